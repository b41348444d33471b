"""Minimax weight optimization over the triangular-feasible simplex.

Given integer count vectors (n_w, c_w) for a set of words, the objective is

    F(pi) = max_w  (c_w . pi) / (n_w . pi)

minimized over the polytope  { pi : sum pi = 1,  pi_s >= floor,
pi_t <= pi_s + pi_s' - margin  whenever s s' = t inside a block }.

The landscape is piecewise-smooth and non-convex, so the solver is a
projected subgradient descent with heavy-ball momentum and geometric step
decay, restarted from several random feasible points; the best-ever feasible
iterate across all restarts wins, ties broken by lexicographic weights.
All randomness comes from a seeded generator, so results are reproducible
for any degree of restart parallelism.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .words import AuxiliaryGroup


class OptimizationError(ValueError):
    """Raised for empty problems or infeasible constraint systems."""


@dataclass(frozen=True)
class OptOptions:
    restarts: int = 16          # total starts, including the provided one
    iterations: int = 2000
    step0: float = 0.05
    decay: float = 0.999
    inertia: float = 0.9        # heavy-ball momentum coefficient
    tolerance: float = 1e-7     # objective-improvement convergence window
    patience: int = 200         # iterations without improvement before stop
    polish_iterations: int = 600  # momentum-free refinement from the local best
    polish_step: float = 2e-3
    polish_decay: float = 0.99
    floor: float = 1e-4
    margin: float = 1e-6
    seed: int = 0
    average_ties: bool = False  # average the gradients of all active ratios


@dataclass
class MinimaxProblem:
    """Count matrices plus the constraint system derived from the cover."""

    n_rows: np.ndarray  # shape (W, S) integer letter counts of each word
    c_rows: np.ndarray  # shape (W, S) integer section-letter counts
    triangles: list[tuple[int, int, int]]  # slots (i, j, k): pi_k <= pi_i + pi_j - margin

    @classmethod
    def from_counts(cls, rows, aux: AuxiliaryGroup) -> "MinimaxProblem":
        """rows: iterable of (n, c) vectors aligned with the machine's
        non-identity states; constraints come from the cover's block
        products s*s' = t (t a generator)."""
        rows = list(rows)
        if not rows:
            raise OptimizationError("no words to optimize over")
        n = np.array([r[0] for r in rows], dtype=float)
        c = np.array([r[1] for r in rows], dtype=float)
        if np.any(n.sum(axis=1) <= 0):
            raise OptimizationError("every word must have positive length")
        slot = {s: i for i, s in enumerate(aux.generators)}
        tris = set()
        for s, t, u in aux.triangle_relations():
            tris.add((*sorted((slot[s], slot[t])), slot[u]))
        return cls(n, c, sorted(tris))

    @property
    def n_weights(self) -> int:
        return self.n_rows.shape[1]


def objective(p: MinimaxProblem, pi) -> tuple[float, int]:
    """(max ratio, index of the first word attaining it)."""
    pi = np.asarray(pi, dtype=float)
    num = p.c_rows @ pi
    den = p.n_rows @ pi
    ratios = num / den
    idx = int(np.argmax(ratios))
    # argmax returns the first maximal index, which is the tie-break we want
    return float(ratios[idx]), idx


def _project_simplex_floored(v: np.ndarray, floor: float) -> np.ndarray:
    """Euclidean projection onto {x : sum x = 1, x >= floor} via the shifted
    standard simplex projection (sort-based)."""
    k = v.shape[0]
    if k * floor > 1.0 + 1e-12:
        raise OptimizationError("floors exceed the simplex")
    u = v - floor
    total = 1.0 - k * floor
    # project u onto {x >= 0, sum x = total}
    s = np.sort(u)[::-1]
    css = np.cumsum(s) - total
    rho = np.nonzero(s - css / np.arange(1, k + 1) > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(u - theta, 0.0) + floor


def feasibility_slacks(p: MinimaxProblem, pi, floor: float, margin: float):
    """(floor slacks, triangle slacks, simplex deviation); all slacks >= 0
    and deviation ~ 0 for a feasible vector."""
    pi = np.asarray(pi, dtype=float)
    fs = pi - floor
    ts = np.array(
        [pi[i] + pi[j] - margin - pi[k] for i, j, k in p.triangles], dtype=float
    )
    return fs, ts, float(abs(pi.sum() - 1.0))


def is_feasible(p: MinimaxProblem, pi, floor: float, margin: float, tol: float = 1e-9) -> bool:
    fs, ts, dev = feasibility_slacks(p, pi, floor, margin)
    return bool(np.all(fs >= -tol) and (ts.size == 0 or np.all(ts >= -tol)) and dev <= tol)


def project_feasible(
    p: MinimaxProblem, pi, floor: float = 1e-4, margin: float = 1e-6,
    max_rounds: int = 200,
) -> np.ndarray:
    """Map a raw vector to the constraint polytope.

    Alternates the exact floored-simplex projection with half-space
    projections for each violated triangle (cyclic POCS passes).  If that
    fails to converge, retreats along the segment toward the uniform vector,
    which is strictly feasible for small margins.
    """
    v = np.asarray(pi, dtype=float).copy()
    k = p.n_weights
    if v.shape != (k,):
        raise OptimizationError(f"expected {k} weights")
    uniform = np.full(k, 1.0 / k)
    if not is_feasible(p, uniform, floor, margin, tol=0.0):
        raise OptimizationError("uniform weights infeasible: polytope too tight")
    for _ in range(max_rounds):
        v = _project_simplex_floored(v, floor)
        worst = 0.0
        for i, j, kk in p.triangles:
            viol = v[kk] - (v[i] + v[j] - margin)
            if viol > 0.0:
                # project onto {pi_k - pi_i - pi_j <= -margin}
                shift = viol / 3.0
                v[kk] -= shift
                v[i] += shift
                v[j] += shift
                worst = max(worst, viol)
        if worst <= 1e-12 and is_feasible(p, v, floor, margin, tol=1e-9):
            return v
    # cyclic repair did not settle; fall back to a line search toward uniform
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = (lo + hi) / 2.0
        cand = v * (1.0 - mid) + uniform * mid
        if is_feasible(p, _project_simplex_floored(cand, floor), floor, margin):
            hi = mid
        else:
            lo = mid
    cand = _project_simplex_floored(v * (1.0 - hi) + uniform * hi, floor)
    if not is_feasible(p, cand, floor, margin):
        raise OptimizationError("projection failed to reach the polytope")
    return cand


def gradient(p: MinimaxProblem, pi, average_ties: bool = False) -> np.ndarray:
    """Subgradient of the max ratio: gradient of the active ratio with the
    smallest word index (or the average over all ratios within 1e-12)."""
    pi = np.asarray(pi, dtype=float)
    num = p.c_rows @ pi
    den = p.n_rows @ pi
    ratios = num / den
    best = float(np.max(ratios))
    active = np.nonzero(ratios >= best - 1e-12)[0]
    rows = active if average_ties else active[:1]
    g = np.zeros_like(pi)
    for w in rows:
        g += (p.c_rows[w] * den[w] - p.n_rows[w] * num[w]) / (den[w] ** 2)
    return g / len(rows)


@dataclass
class OptResult:
    weights: list[float]
    eta: float
    argmax_index: int
    iterations: int
    restarts_used: int
    floor_slacks: list[float]
    triangle_slacks: list[float]
    best_start_objective: float


def optimize(
    p: MinimaxProblem,
    start=None,
    options: OptOptions = OptOptions(),
) -> OptResult:
    """Minimize the max ratio over the polytope; deterministic given the
    options seed.  The provided start counts as restart 0."""
    k = p.n_weights
    opts = options
    rng = np.random.default_rng(opts.seed)
    starts: list[np.ndarray] = []
    if start is not None:
        s0 = np.asarray(start, dtype=float)
        starts.append(project_feasible(p, s0 / s0.sum(), opts.floor, opts.margin))
    while len(starts) < max(1, opts.restarts):
        starts.append(
            project_feasible(p, rng.dirichlet(np.ones(k)), opts.floor, opts.margin)
        )

    best_pi: np.ndarray | None = None
    best_val = float("inf")
    best_start_obj = float("inf")
    total_iters = 0

    def consider(pi, val):
        nonlocal best_pi, best_val
        if val < best_val - 1e-15 or (
            abs(val - best_val) <= 1e-15
            and best_pi is not None
            and tuple(pi) < tuple(best_pi)
        ):
            best_val = val
            best_pi = pi.copy()

    for pi0 in starts:
        val0, _ = objective(p, pi0)
        best_start_obj = min(best_start_obj, val0)
        consider(pi0, val0)
        pi = pi0.copy()
        velocity = np.zeros(k)
        step = opts.step0
        local_best = val0
        local_best_pi = pi0.copy()
        stall = 0
        for it in range(opts.iterations):
            total_iters += 1
            g = gradient(p, pi, opts.average_ties)
            velocity = opts.inertia * velocity - step * g
            pi = project_feasible(p, pi + velocity, opts.floor, opts.margin)
            step *= opts.decay
            val, _ = objective(p, pi)
            consider(pi, val)
            if val < local_best - opts.tolerance:
                local_best = val
                local_best_pi = pi.copy()
                stall = 0
            else:
                if val < local_best:
                    local_best = val
                    local_best_pi = pi.copy()
                stall += 1
                if stall >= opts.patience:
                    break
        # momentum-free polish with a small decaying step, from the best
        # point this restart reached: recovers the last few 1e-4 digits the
        # coarse schedule cannot
        pi = local_best_pi.copy()
        step = opts.polish_step
        for it in range(opts.polish_iterations):
            total_iters += 1
            g = gradient(p, pi, opts.average_ties)
            pi = project_feasible(p, pi - step * g, opts.floor, opts.margin)
            step *= opts.polish_decay
            val, _ = objective(p, pi)
            consider(pi, val)

    assert best_pi is not None
    val, idx = objective(p, best_pi)
    fs, ts, _ = feasibility_slacks(p, best_pi, opts.floor, opts.margin)
    return OptResult(
        weights=[float(x) for x in best_pi],
        eta=val,
        argmax_index=idx,
        iterations=total_iters,
        restarts_used=len(starts),
        floor_slacks=[float(x) for x in fs],
        triangle_slacks=[float(x) for x in ts],
        best_start_objective=best_start_obj,
    )
