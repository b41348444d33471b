/** Pre-submit feasibility check for the weight sliders.
 *
 * The server enforces the real constraint polytope when it optimizes;
 * this mirror exists only to warn the user *before* submitting.  The
 * constraints: every weight at least the floor, and within each finite
 * block no element may weigh as much as the two factors of any product
 * that yields it ("triangular" weights keep reducedness independent of
 * the weights).
 *
 * The client does not know the blocks' multiplication tables, so it
 * infers them from the block size, which covers every builtin:
 *   - size 1: the generator is its own inverse; no triangle constraint.
 *   - size 2: mutual inverses with squares landing on the partner
 *     (order-3 cyclic factor), giving w(t) < 2 w(s) and w(s) < 2 w(t).
 *   - size 3+: product of two distinct elements is another block element
 *     (Klein-like), giving w(u) < w(s) + w(t) for all distinct s, t, u.
 */

export const WEIGHT_FLOOR = 1e-4;
export const TRIANGLE_MARGIN = 1e-6;
/** Numerical slack mirroring the server's feasibility tolerance, so
 * weights that sit exactly on the margined boundary (as projector
 * output does) are not flagged spuriously. */
export const FEAS_TOL = 1e-9;

export type Violation = {
  kind: "floor" | "triangle";
  /** Generator names involved; the constrained one first. */
  names: string[];
  message: string;
};

export type FeasibilityReport = {
  ok: boolean;
  violations: Violation[];
  /** Weights rescaled to sum 1, as the server will ingest them. */
  normalized: number[];
};

export function checkFeasibility(
  names: string[],
  weights: number[],
  blocks: string[][],
): FeasibilityReport {
  if (names.length !== weights.length) {
    throw new Error("one weight per generator expected");
  }
  const total = weights.reduce((a, b) => a + b, 0);
  if (!(total > 0)) {
    return {
      ok: false,
      violations: [
        {
          kind: "floor",
          names: [...names],
          message: "weights must have a positive sum",
        },
      ],
      normalized: weights.map(() => NaN),
    };
  }
  const w = new Map<string, number>();
  names.forEach((n, i) => w.set(n, weights[i]! / total));
  const violations: Violation[] = [];

  for (const [name, value] of w) {
    if (value < WEIGHT_FLOOR - FEAS_TOL) {
      violations.push({
        kind: "floor",
        names: [name],
        message: `w(${name}) = ${value.toPrecision(3)} is below the floor ${WEIGHT_FLOOR}`,
      });
    }
  }

  for (const block of blocks) {
    const members = block.filter((n) => w.has(n));
    if (members.length === 2) {
      const [s, t] = members as [string, string];
      for (const [a, b] of [
        [s, t],
        [t, s],
      ] as const) {
        if (w.get(a)! > 2 * w.get(b)! - TRIANGLE_MARGIN + FEAS_TOL) {
          violations.push({
            kind: "triangle",
            names: [a, b],
            message: `w(${a}) must stay below 2·w(${b})`,
          });
        }
      }
    } else if (members.length >= 3) {
      for (const u of members) {
        for (const s of members) {
          for (const t of members) {
            if (u === s || u === t || s >= t) continue;
            if (w.get(u)! > w.get(s)! + w.get(t)! - TRIANGLE_MARGIN + FEAS_TOL) {
              violations.push({
                kind: "triangle",
                names: [u, s, t],
                message: `w(${u}) must stay below w(${s}) + w(${t})`,
              });
            }
          }
        }
      }
    }
  }

  return {
    ok: violations.length === 0,
    violations,
    normalized: names.map((n) => w.get(n)!),
  };
}
