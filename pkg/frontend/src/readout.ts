import { rawNumberOrDash } from "./rawjson.js";
import { RawSnapshot } from "./api.js";

/** Everything the dashboard shows, precomputed from one snapshot.
 *
 * etaMaxText and alphaText are the server's own bytes (see rawjson):
 * the console never displays an eta or alpha it computed itself.
 */
export type DashboardModel = {
  step: number;
  stopped: boolean;
  targetText: string;
  etaMaxText: string;
  alphaText: string;
  radius: number;
  processed: number;
  yolkSize: number;
  shellSize: number;
  yolkLengths: number[];
  weights: number[];
  /** Frontier ratio histogram, verbatim server bins (fixed layout). */
  histogram: number[];
  checkpoints: number[];
};

export const HISTOGRAM_BINS = 50;
export const HISTOGRAM_RANGE: [number, number] = [0, 2];

export function dashboardModel(rs: RawSnapshot): DashboardModel {
  const s = rs.snapshot;
  if (s.eta_histogram.length !== HISTOGRAM_BINS) {
    throw new Error(
      `server histogram has ${s.eta_histogram.length} bins, expected ${HISTOGRAM_BINS}`,
    );
  }
  return {
    step: s.step,
    stopped: s.stopped,
    targetText: rawNumberOrDash(rs.raw, "target"),
    etaMaxText: rawNumberOrDash(rs.raw, "eta_max"),
    alphaText: rawNumberOrDash(rs.raw, "alpha_if_complete"),
    radius: s.radius,
    processed: s.processed,
    yolkSize: s.yolk_size,
    shellSize: s.shell_size,
    yolkLengths: [...s.yolk_lengths],
    weights: [...s.weights],
    histogram: [...s.eta_histogram],
    checkpoints: [...s.checkpoints],
  };
}

/** Histogram bars scaled into [0, height]; empty bins stay zero. */
export function histogramBars(bins: number[], height: number): number[] {
  const max = Math.max(...bins, 1);
  return bins.map((b) => Math.round((b / max) * height));
}

/** Label of bin i under the fixed layout, e.g. "[1.00, 1.04)". */
export function binLabel(i: number): string {
  const [lo, hi] = HISTOGRAM_RANGE;
  const width = (hi - lo) / HISTOGRAM_BINS;
  const a = lo + i * width;
  const b = a + width;
  const closing = i === HISTOGRAM_BINS - 1 ? "]" : ")";
  return `[${a.toFixed(2)}, ${b.toFixed(2)}${closing}`;
}
