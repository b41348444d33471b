import {
  Command,
  CreateResponseSchema,
  CreateSessionRequest,
  Snapshot,
  SnapshotSchema,
  ZooEntry,
  ZooSchema,
} from "./schema.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

/** One snapshot together with the exact bytes it arrived as. */
export type RawSnapshot = {
  snapshot: Snapshot;
  /** Raw JSON text of the snapshot object, for byte-faithful readouts. */
  raw: string;
};

async function readError(res: Response): Promise<never> {
  let detail = res.statusText;
  try {
    const body = (await res.json()) as { detail?: unknown };
    if (typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body: keep the status text
  }
  throw new ApiError(res.status, detail);
}

/** Extract the snapshot object's own text from a create-session body
 *  ({"id": ..., "snapshot": {...}}) so readouts stay byte-faithful. */
function sliceSnapshotText(body: string): string {
  const marker = body.indexOf('"snapshot"');
  if (marker < 0) throw new Error("create response carries no snapshot");
  const start = body.indexOf("{", marker);
  let depth = 0;
  let inString = false;
  for (let i = start; i < body.length; i++) {
    const ch = body[i];
    if (inString) {
      if (ch === "\\") i += 1;
      else if (ch === '"') inString = false;
      continue;
    }
    if (ch === '"') inString = true;
    else if (ch === "{") depth += 1;
    else if (ch === "}") {
      depth -= 1;
      if (depth === 0) return body.slice(start, i + 1);
    }
  }
  throw new Error("unterminated snapshot object in create response");
}

export class SteeringApi {
  constructor(public readonly baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async zoo(): Promise<ZooEntry[]> {
    const res = await fetch(this.url("/zoo"));
    if (!res.ok) await readError(res);
    return ZooSchema.parse(await res.json()).machines;
  }

  async createSession(
    spec: CreateSessionRequest,
  ): Promise<{ id: string; first: RawSnapshot }> {
    const res = await fetch(this.url("/sessions"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(spec),
    });
    if (!res.ok) await readError(res);
    const body = await res.text();
    const parsed = CreateResponseSchema.parse(JSON.parse(body));
    return {
      id: parsed.id,
      first: { snapshot: parsed.snapshot, raw: sliceSnapshotText(body) },
    };
  }

  async snapshot(id: string): Promise<RawSnapshot> {
    const res = await fetch(this.url(`/sessions/${id}`));
    if (!res.ok) await readError(res);
    const raw = await res.text();
    return { snapshot: SnapshotSchema.parse(JSON.parse(raw)), raw };
  }

  async command(id: string, cmd: Command): Promise<RawSnapshot> {
    const res = await fetch(this.url(`/sessions/${id}/command`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(cmd),
    });
    if (!res.ok) await readError(res);
    const raw = await res.text();
    return { snapshot: SnapshotSchema.parse(JSON.parse(raw)), raw };
  }

  /** Full NDJSON event history; the server replays from the start and
   *  closes the stream once the session is stopped. */
  async eventsText(id: string): Promise<string> {
    const res = await fetch(this.url(`/sessions/${id}/events`));
    if (!res.ok) await readError(res);
    return res.text();
  }
}
