import { describe, expect, it } from "vitest";
import { NdjsonDecoder, parseEvents } from "../src/events.js";
import { ProgressEvent } from "../src/schema.js";

const LINE = (level: number) =>
  `{"level": ${level}, "yolk_size": ${4 - level}, "shell_size": ${level}, "eta_max": 0.5}\n`;

describe("NdjsonDecoder", () => {
  it("reassembles events across chunk boundaries", () => {
    const seen: ProgressEvent[] = [];
    const dec = new NdjsonDecoder((ev) => seen.push(ev));
    const text = LINE(1) + LINE(2);
    dec.push(text.slice(0, 17));
    expect(seen).toHaveLength(0);
    dec.push(text.slice(17));
    dec.end();
    expect(seen.map((e) => e.level)).toEqual([1, 2]);
    expect(seen[0]!.yolk_size).toBe(3);
  });

  it("ignores blank lines and flushes a trailing partial line", () => {
    const seen: ProgressEvent[] = [];
    const dec = new NdjsonDecoder((ev) => seen.push(ev));
    dec.push("\n\n" + LINE(1) + LINE(2).trimEnd());
    dec.end();
    expect(seen).toHaveLength(2);
  });

  it("keeps extra fields the server may add", () => {
    const [ev] = parseEvents(
      '{"level": 1, "yolk_size": 0, "shell_size": 4, "eta_max": 0.8, "note": "x"}\n',
    );
    expect((ev as Record<string, unknown>)["note"]).toBe("x");
  });

  it("rejects malformed events", () => {
    expect(() => parseEvents('{"level": "one"}\n')).toThrow();
  });
});
