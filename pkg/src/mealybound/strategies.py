"""Composite search strategies and the interactive steering session.

Three ways to drive the engine:

* `run_opt` — rounds of (search, then optimize the finished egg), one round
  per target; optionally reweights mid-search every `update` levels using
  the whole shell+frontier word set.
* `run_ovi` — a single search that reweights over shell+frontier every
  `update` levels; with `update` beyond the reached radius it degenerates
  to a plain search.
* `Session` — stateful command-driven exploration (expand / optimize /
  set_target / checkpoint / rollback / stop) with immutable snapshots and
  bit-exact rollback, the engine room for the HTTP service.

After any mid-search reweighting the shell is re-verified: words whose
ratio now exceeds the target rejoin the frontier, preserving the engine's
shell invariant.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .machine import MachineError, MealyMachine
from .optimize import (
    MinimaxProblem,
    OptOptions,
    OptimizationError,
    optimize,
)
from .search import (
    EggSearch,
    RunResult,
    SearchCaps,
    alpha_from,
    word_to_text,
)
from .words import AuxiliaryGroup

HISTOGRAM_BINS = 50
HISTOGRAM_RANGE = (0.0, 2.0)


@dataclass
class Round:
    target: float
    weights_in: list[float]
    weights_out: list[float]
    status: str
    eta: float
    alpha: float | None
    radius: int
    egg_size: int
    result: RunResult | None = None


@dataclass
class StrategyRun:
    kind: str
    rounds: list[Round] = field(default_factory=list)

    @property
    def final(self) -> Round:
        if not self.rounds:
            raise MachineError("strategy produced no rounds")
        return self.rounds[-1]

    def best_bound(self) -> Round | None:
        """Last round that certified a bound on its own (status found)."""
        found = [r for r in self.rounds if r.status == "found"]
        return found[-1] if found else None


def _mid_search_reweight(eng: EggSearch, opt_options: OptOptions) -> None:
    """Optimize over shell plus frontier and re-verify the shell."""
    rows = eng.count_rows(include_pending=True)
    if not rows:
        return
    prob = MinimaxProblem.from_counts(rows, eng.aux)
    out = optimize(prob, start=list(eng.weights), options=opt_options)
    eng.set_weights(out.weights)
    eng.reverify()


def _search_with_updates(
    eng: EggSearch, update: int | None, opt_options: OptOptions
) -> str:
    """Drive the engine level by level, reweighting whenever the next wave
    length is a positive multiple of `update`.  Returns the final status."""
    last_reweight_at: int | None = None
    while True:
        lengths = eng.pending_lengths()
        if not lengths:
            return "found"
        nxt = lengths[0]
        if (
            update is not None
            and nxt % update == 0
            and nxt != last_reweight_at
        ):
            _mid_search_reweight(eng, opt_options)
            last_reweight_at = nxt
            if not eng.pending_lengths():
                return "found"
        if not eng.step_level():
            return eng.capped or "found"


def _final_optimize(eng: EggSearch, opt_options: OptOptions) -> None:
    """Optimize over the finished egg; the max ratio can only improve, so
    every shell word stays at or below the target afterwards."""
    rows = eng.count_rows()
    if not rows:
        return
    prob = MinimaxProblem.from_counts(rows, eng.aux)
    out = optimize(prob, start=list(eng.weights), options=opt_options)
    eng.set_weights(out.weights)


def run_opt(
    m: MealyMachine,
    aux: AuxiliaryGroup,
    weights,
    targets,
    update: int | None = None,
    caps: SearchCaps = SearchCaps(max_radius=256),
    opt_options: OptOptions = OptOptions(),
    dedup: str = "global",
    workers: int = 1,
    trace=None,
) -> StrategyRun:
    """Search-then-optimize rounds, one per target, later rounds starting
    from the previous round's optimized weights.  With `update` set, each
    search also reweights itself every `update` levels (shell+frontier
    optimization), which lets poor starting weights escape non-termination.
    A round that does not finish ends the run; earlier rounds keep their
    certified bounds."""
    run = StrategyRun(kind="opt")
    current = list(weights)
    targets = list(targets)
    for target in targets:
        eng = EggSearch(
            m, aux, current, float(target),
            dedup=dedup, caps=caps, workers=workers, trace=trace,
        )
        status = _search_with_updates(eng, update, opt_options)
        if status == "found":
            _final_optimize(eng, opt_options)
        eta = eng.eta_max()
        run.rounds.append(
            Round(
                target=float(target),
                weights_in=list(current),
                weights_out=list(eng.weights),
                status=status,
                eta=eta,
                alpha=alpha_from(eta, m.degree) if status == "found" else None,
                radius=eng.radius,
                egg_size=len(eng.shell),
                result=eng.result(status),
            )
        )
        if status != "found":
            break
        current = list(eng.weights)
    return run


def run_ovi(
    m: MealyMachine,
    aux: AuxiliaryGroup,
    weights,
    target: float,
    update: int | None = None,
    caps: SearchCaps = SearchCaps(max_radius=256),
    opt_options: OptOptions = OptOptions(),
    dedup: str = "global",
    workers: int = 1,
    trace=None,
) -> StrategyRun:
    """One search with periodic shell+frontier reweighting every `update`
    levels; no terminal optimization, so with `update` past the reached
    radius this is exactly a plain search."""
    run = StrategyRun(kind="ovi")
    eng = EggSearch(
        m, aux, list(weights), float(target),
        dedup=dedup, caps=caps, workers=workers, trace=trace,
    )
    status = _search_with_updates(eng, update, opt_options)
    eta = eng.eta_max()
    run.rounds.append(
        Round(
            target=float(target),
            weights_in=list(weights),
            weights_out=list(eng.weights),
            status=status,
            eta=eta,
            alpha=alpha_from(eta, m.degree) if status == "found" else None,
            radius=eng.radius,
            egg_size=len(eng.shell),
            result=eng.result(status),
        )
    )
    return run


# -- interactive session --------------------------------------------------


def _selector_predicate(eng: EggSearch, selector) -> callable:
    """Compile a subset selector into a predicate over entries.

    Selectors: None or {"kind":"all"}; {"kind":"eta","min":x,"max":y};
    {"kind":"level","levels":[...]}; {"kind":"regex","pattern":p} matched
    against the word's state-name text."""
    if selector is None:
        return lambda e: True
    kind = selector.get("kind", "all")
    if kind == "all":
        return lambda e: True
    if kind == "eta":
        lo = float(selector.get("min", float("-inf")))
        hi = float(selector.get("max", float("inf")))
        return lambda e: lo <= eng.eta_of_entry(e) <= hi
    if kind == "level":
        levels = {int(x) for x in selector["levels"]}
        return lambda e: len(e.word) in levels
    if kind == "regex":
        pat = re.compile(selector["pattern"])
        return lambda e: pat.search(word_to_text(eng.machine, e.word)) is not None
    raise MachineError(f"unknown selector kind {kind!r}")


class SessionError(RuntimeError):
    pass


class Session:
    """Command-driven exploration over one engine.

    Commands mutate the engine; every command returns an immutable snapshot
    dict.  Checkpoints capture the full mutable state; rollback restores it
    bit-exactly (replaying the same commands reproduces identical
    snapshots)."""

    def __init__(
        self,
        m: MealyMachine,
        aux: AuxiliaryGroup,
        weights,
        target: float = 1.0,
        caps: SearchCaps = SearchCaps(max_radius=256),
        opt_options: OptOptions = OptOptions(),
        dedup: str = "global",
        trace=None,
    ):
        self.machine = m
        self.aux = aux
        self.opt_options = opt_options
        self.engine = EggSearch(
            m, aux, weights, target, dedup=dedup, caps=caps, trace=trace
        )
        self.stopped = False
        self._checkpoints: dict[int, dict] = {}
        self._next_checkpoint = 1
        self._step = 0

    # -- commands ---------------------------------------------------------

    def command(self, cmd: dict) -> dict:
        """Dispatch one command dict {"op": ..., ...}; returns a snapshot."""
        if self.stopped:
            raise SessionError("session is stopped")
        op = cmd.get("op")
        if op == "expand":
            return self.expand(cmd.get("filter"), int(cmd.get("levels", 1)))
        if op == "optimize":
            return self.optimize(cmd.get("subset"), cmd.get("include_pending", True))
        if op == "set_target":
            return self.set_target(float(cmd["target"]))
        if op == "checkpoint":
            return self.checkpoint()
        if op == "rollback":
            return self.rollback(int(cmd["id"]))
        if op == "stop":
            return self.stop()
        raise SessionError(f"unknown command {op!r}")

    def expand(self, selector=None, levels: int = 1) -> dict:
        """Process up to `levels` waves; with a selector, only matching
        frontier words of the shortest pending length are processed and the
        rest stay put."""
        self._step += 1
        eng = self.engine
        for _ in range(max(1, levels)):
            if selector is None:
                if not eng.step_level():
                    break
                continue
            lengths = eng.pending_lengths()
            if not lengths:
                break
            length = lengths[0]
            pred = _selector_predicate(eng, selector)
            wave = eng._pending[length]
            chosen = [e for e in wave if pred(e)]
            if not chosen:
                break
            rest = [e for e in wave if not pred(e)]
            if rest:
                eng._pending[length] = rest
            else:
                del eng._pending[length]
            shelled = 0
            for e in chosen:
                eta, children = eng._process_entry(e)
                eng.processed += 1
                eng.per_level_sizes[length] = eng.per_level_sizes.get(length, 0) + 1
                if children is None:
                    eng.shell.append(e)
                    shelled += 1
                    if eng._eta_max is not None and eta > eng._eta_max:
                        eng._eta_max = eta
                else:
                    eng._admit(children)
            eng.radius = max(eng.radius, length)
            if eng.trace is not None:
                eng.trace(
                    {
                        "type": "level",
                        "length": length,
                        "processed": len(chosen),
                        "shelled": shelled,
                        "shell": len(eng.shell),
                        "pending": eng.pending_count(),
                        "eta_max": eng.eta_max(),
                    }
                )
        return self.snapshot()

    def optimize(self, subset=None, include_pending: bool = True) -> dict:
        self._step += 1
        eng = self.engine
        pred = _selector_predicate(eng, subset)
        entries = [e for e in eng.shell if pred(e)]
        if include_pending:
            entries.extend(e for e in eng.pending_entries() if pred(e))
        if not entries:
            raise SessionError("selector matched no words")
        prob = MinimaxProblem.from_counts([(e.n, e.c) for e in entries], self.aux)
        out = optimize(prob, start=list(eng.weights), options=self.opt_options)
        eng.set_weights(out.weights)
        eng.reverify()
        return self.snapshot()

    def set_target(self, target: float) -> dict:
        self._step += 1
        self.engine.set_target(target)
        self.engine.reverify()
        return self.snapshot()

    def checkpoint(self) -> dict:
        self._step += 1
        cid = self._next_checkpoint
        self._next_checkpoint += 1
        self._checkpoints[cid] = {
            "engine": self.engine.checkpoint(),
            "step": self._step,
        }
        return self.snapshot(checkpoint_id=cid)

    def rollback(self, checkpoint_id: int) -> dict:
        """Restore a checkpoint bit-exactly.  History after the checkpoint
        is discarded (later checkpoint ids are pruned and the id counter
        rewinds), so replaying the same commands reproduces the original
        snapshots field for field."""
        snap = self._checkpoints.get(checkpoint_id)
        if snap is None:
            raise SessionError(f"no checkpoint {checkpoint_id}")
        self.engine.restore(snap["engine"])
        self._step = snap["step"]
        self._next_checkpoint = checkpoint_id + 1
        self._checkpoints = {
            cid: s for cid, s in self._checkpoints.items() if cid <= checkpoint_id
        }
        return self.snapshot()

    def stop(self) -> dict:
        self._step += 1
        self.stopped = True
        return self.snapshot()

    # -- snapshots --------------------------------------------------------

    def eta_histogram(self) -> list[int]:
        """Frontier ratio histogram: HISTOGRAM_BINS equal bins over
        HISTOGRAM_RANGE, values past the top edge clamped into the last bin."""
        lo, hi = HISTOGRAM_RANGE
        width = (hi - lo) / HISTOGRAM_BINS
        bins = [0] * HISTOGRAM_BINS
        for e in self.engine.pending_entries():
            eta = self.engine.eta_of_entry(e)
            idx = int((eta - lo) / width)
            if idx < 0:
                idx = 0
            elif idx >= HISTOGRAM_BINS:
                idx = HISTOGRAM_BINS - 1
            bins[idx] += 1
        return bins

    def snapshot(self, checkpoint_id: int | None = None) -> dict:
        """Pure read of the current state; safe to call repeatedly (the GET
        endpoint relies on this not perturbing replay determinism)."""
        eng = self.engine
        eta = eng.eta_max()
        pending = eng.pending_count()
        return {
            "step": self._step,
            "stopped": self.stopped,
            "target": eng.target,
            "weights": list(eng.weights),
            "shell_size": len(eng.shell),
            "yolk_size": pending,
            "yolk_lengths": eng.pending_lengths(),
            "eta_max": eta,
            "alpha_if_complete": alpha_from(eta, self.machine.degree)
            if pending == 0
            else None,
            "radius": eng.radius,
            "processed": eng.processed,
            "eta_histogram": self.eta_histogram(),
            "checkpoint_id": checkpoint_id,
            "checkpoints": sorted(self._checkpoints),
        }
