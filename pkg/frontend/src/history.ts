import { Snapshot } from "./schema.js";

/** One chart point per applied command, keyed by the session step. */
export type HistoryPoint = {
  step: number;
  yolkSize: number;
  shellSize: number;
  radius: number;
  etaMax: number;
};

/** Chart history of the running session.
 *
 * Points only ever come from authoritative snapshots.  On rollback the
 * history truncates to the restored step, so the chart matches what the
 * server would replay.
 */
export class RunHistory {
  private points: HistoryPoint[] = [];

  record(snap: Snapshot): void {
    const point: HistoryPoint = {
      step: snap.step,
      yolkSize: snap.yolk_size,
      shellSize: snap.shell_size,
      radius: snap.radius,
      etaMax: snap.eta_max,
    };
    // a rollback hands us a snapshot at an earlier step: drop everything
    // the server discarded, then re-record the restored state
    while (
      this.points.length > 0 &&
      this.points[this.points.length - 1]!.step >= point.step
    ) {
      this.points.pop();
    }
    this.points.push(point);
  }

  series(): readonly HistoryPoint[] {
    return this.points;
  }

  clear(): void {
    this.points = [];
  }
}
