import { ProgressEvent, ProgressEventSchema } from "./schema.js";

/** Incremental NDJSON decoder for the progress stream.
 *
 * Feed it chunks as they arrive; it emits one event per complete line
 * and buffers partial lines across chunk boundaries.
 */
export class NdjsonDecoder {
  private buffer = "";

  constructor(private readonly onEvent: (ev: ProgressEvent) => void) {}

  push(chunk: string): void {
    this.buffer += chunk;
    for (;;) {
      const nl = this.buffer.indexOf("\n");
      if (nl < 0) return;
      const line = this.buffer.slice(0, nl).trim();
      this.buffer = this.buffer.slice(nl + 1);
      if (line.length === 0) continue;
      this.onEvent(ProgressEventSchema.parse(JSON.parse(line)));
    }
  }

  /** Flush a trailing line without a newline (stream end). */
  end(): void {
    const line = this.buffer.trim();
    this.buffer = "";
    if (line.length > 0) {
      this.onEvent(ProgressEventSchema.parse(JSON.parse(line)));
    }
  }
}

export function parseEvents(text: string): ProgressEvent[] {
  const out: ProgressEvent[] = [];
  const dec = new NdjsonDecoder((ev) => out.push(ev));
  dec.push(text);
  dec.end();
  return out;
}
