import { z } from "zod";

/** Authoritative session snapshot as served by GET /sessions/{id} and
 *  returned by every command.  The console renders from this and only
 *  this — it never simulates search state client-side. */
export const SnapshotSchema = z.object({
  step: z.number().int(),
  stopped: z.boolean(),
  target: z.number(),
  weights: z.array(z.number()),
  shell_size: z.number().int(),
  yolk_size: z.number().int(),
  yolk_lengths: z.array(z.number().int()),
  eta_max: z.number(),
  alpha_if_complete: z.number().nullable(),
  radius: z.number().int(),
  processed: z.number().int(),
  eta_histogram: z.array(z.number().int()),
  checkpoint_id: z.number().int().nullable(),
  checkpoints: z.array(z.number().int()),
});

export type Snapshot = z.infer<typeof SnapshotSchema>;

export const ZooEntrySchema = z.object({
  name: z.string(),
  states: z.number().int(),
  letters: z.number().int(),
  blocks: z.array(z.array(z.string())),
  text: z.string(),
});

export type ZooEntry = z.infer<typeof ZooEntrySchema>;

export const ZooSchema = z.object({ machines: z.array(ZooEntrySchema) });

export const CreateResponseSchema = z.object({
  id: z.string(),
  snapshot: SnapshotSchema,
});

/** Per-level progress event from GET /sessions/{id}/events (NDJSON). */
export const ProgressEventSchema = z
  .object({
    level: z.number().int(),
    yolk_size: z.number().int(),
    shell_size: z.number().int(),
    eta_max: z.number(),
  })
  .passthrough();

export type ProgressEvent = z.infer<typeof ProgressEventSchema>;

export type CreateSessionRequest = {
  machine?: string;
  text?: string;
  blocks?: string[][];
  weights?: number[];
  target?: number;
  dedup?: "global" | "level" | "none";
  radius_cap?: number | null;
};

export type Command =
  | { op: "expand"; filter?: unknown; levels?: number }
  | { op: "optimize"; subset?: unknown; include_pending?: boolean }
  | { op: "set_target"; target: number }
  | { op: "checkpoint" }
  | { op: "rollback"; id: number }
  | { op: "stop" };
