"""Level-synchronous search for strongly contracting generating sets.

The search grows a frontier of reduced words over the machine's states,
level by level.  A word w is scored by the contraction ratio

    eta(w) = (sum_s weight[s] * c_s(w)) / (sum_s weight[s] * n_s(w))

where n counts the letters of w and c counts the letters of the reduced
sections of w, sections that are trivial in the generated group being
dropped entirely.  Words with eta(w) <= target move to the *shell* (the
candidate generating set); the rest are extended by every state that keeps
the word reduced.  Extensions that repeat an already-seen group element are
pruned.  When the frontier empties, the shell witnesses the growth bound
exp(c * l^alpha) with alpha = log d / (log d - log eta_max).

The engine is resumable and re-weightable: weights may change between
levels, previously shelled words can be re-verified against the current
weights (failures rejoin the frontier), and the full mutable state can be
checkpointed and restored bit-for-bit.
"""

from __future__ import annotations

import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .machine import MachineError, MealyMachine
from .words import AuxiliaryGroup, Calculus, Caps, IDENTITY_ID, _CANCEL, _NO_INTERACTION


def normalize_weights(weights) -> tuple[float, ...]:
    """Scale positive weights to sum 1; rejects non-positive entries."""
    w = [float(x) for x in weights]
    if not w or any(x <= 0 for x in w):
        raise MachineError("weights must be positive")
    total = sum(w)
    return tuple(x / total for x in w)


def alpha_from(eta: float, degree: int) -> float | None:
    """Growth exponent alpha = log d / (log d - log eta); None when eta > 1
    (no bound follows), 1.0 at eta = 1 (trivial bound), 0.0 when eta <= 0."""
    if eta > 1.0:
        return None
    if eta == 1.0:
        return 1.0
    if eta <= 0.0:
        return 0.0
    ld = math.log(degree)
    return ld / (ld - math.log(eta))


def word_to_text(m: MealyMachine, word) -> str:
    names = [m.states[q] for q in word]
    if all(len(n) == 1 for n in names):
        return "".join(names)
    return " ".join(names)


@dataclass(frozen=True)
class SearchCaps:
    """Budgets for a search run: `max_radius` bounds the word length the
    frontier may reach; `max_words` bounds the number of words evaluated."""

    max_radius: int | None = None
    max_words: int | None = None


@dataclass
class RunResult:
    status: str  # "found" | "radius-exceeded" | "aborted"
    eta: float
    alpha: float | None
    radius: int
    egg_size: int
    per_level_sizes: list[tuple[int, int]]
    processed: int
    target: float
    weights: list[float]

    def to_json_dict(
        self,
        machine_text: str | None = None,
        aux: dict | None = None,
        seed: int | None = None,
        count_matrix_ref: str | None = None,
    ) -> dict:
        from . import __version__

        return {
            "machine": machine_text,
            "aux": aux,
            "weights": list(self.weights),
            "target": self.target,
            "status": self.status,
            "eta": self.eta,
            "alpha": self.alpha,
            "radius": self.radius,
            "egg_size": self.egg_size,
            "per_level_sizes": [list(p) for p in self.per_level_sizes],
            "count_matrix_ref": count_matrix_ref,
            "seed": seed,
            "versions": {"package": __version__, "python": sys.version.split()[0]},
        }


class Entry:
    """One frontier/shell word with its incremental statistics."""

    __slots__ = ("word", "perm", "secs", "sec_ids", "n", "c")

    def __init__(self, word, perm, secs, sec_ids, n, c):
        self.word = word
        self.perm = perm
        self.secs = secs
        self.sec_ids = sec_ids
        self.n = n
        self.c = c

    def key(self):
        return (
            self.perm,
            tuple(
                i if i is not None else ("w", s)
                for i, s in zip(self.sec_ids, self.secs)
            ),
        )


class EggSearch:
    """Resumable level-synchronous search engine.

    dedup: "global" prunes a word whose group element was ever admitted,
    "level" prunes only within words of the same length, "none" prunes
    nothing (identity-element words are always discarded).
    """

    def __init__(
        self,
        m: MealyMachine,
        aux: AuxiliaryGroup,
        weights,
        target: float,
        dedup: str = "global",
        caps: SearchCaps = SearchCaps(),
        calculus: Calculus | None = None,
        calculus_caps: Caps = Caps(),
        workers: int = 1,
        trace=None,
    ):
        if dedup not in ("global", "level", "none"):
            raise MachineError(f"unknown dedup scope {dedup!r}")
        self.machine = m
        self.aux = aux
        self.calc = calculus if calculus is not None else Calculus(m, aux, calculus_caps)
        self.generators = m.generators()
        self.slot = {s: i for i, s in enumerate(self.generators)}
        self.weights = normalize_weights(weights)
        if len(self.weights) != len(self.generators):
            raise MachineError(
                f"need {len(self.generators)} weights, got {len(self.weights)}"
            )
        self.target = float(target)
        self.dedup = dedup
        self.caps = caps
        self.workers = max(1, int(workers))
        self.trace = trace

        d = m.degree
        self._identity_key = (tuple(range(d)), (IDENTITY_ID,) * d)
        self._seen: set = set()
        self._level_seen: dict[int, set] = {}
        self._pending: dict[int, list[Entry]] = {}
        self.shell: list[Entry] = []
        self.per_level_sizes: dict[int, int] = {}
        self.processed = 0
        self.radius = 0
        self.capped: str | None = None
        self._eta_max: float | None = 0.0  # None = needs recompute

        root = Entry(
            (), tuple(range(d)), ((),) * d, (IDENTITY_ID,) * d,
            (0,) * len(self.generators), (0,) * len(self.generators),
        )
        self._admit([self._make_child(root, s) for s in self.generators])

    # -- statistics -------------------------------------------------------

    def eta_of_entry(self, e: Entry) -> float:
        w = self.weights
        num = 0.0
        den = 0.0
        for i in range(len(w)):
            num += w[i] * e.c[i]
            den += w[i] * e.n[i]
        return num / den

    def eta_max(self) -> float:
        if self._eta_max is None:
            self._eta_max = max(
                (self.eta_of_entry(e) for e in self.shell), default=0.0
            )
        return self._eta_max

    def pending_count(self) -> int:
        return sum(len(v) for v in self._pending.values())

    def pending_lengths(self) -> list[int]:
        return sorted(self._pending)

    def pending_entries(self) -> list[Entry]:
        return [e for length in sorted(self._pending) for e in self._pending[length]]

    def egg_words(self) -> list[str]:
        return [word_to_text(self.machine, e.word) for e in self.shell]

    def count_rows(self, include_pending: bool = False):
        """(n, c) integer count vectors for the shell (optionally plus the
        frontier), the optimizer's input."""
        entries = list(self.shell)
        if include_pending:
            entries.extend(self.pending_entries())
        return [(e.n, e.c) for e in entries]

    # -- re-weighting -----------------------------------------------------

    def set_target(self, target: float) -> None:
        self.target = float(target)

    def set_weights(self, weights) -> None:
        w = normalize_weights(weights)
        if len(w) != len(self.generators):
            raise MachineError("wrong number of weights")
        self.weights = w
        self._eta_max = None

    def reverify(self) -> int:
        """Re-score the shell under the current weights/target; failing
        words rejoin the frontier.  Returns how many moved."""
        keep = []
        moved = 0
        for e in self.shell:
            if self.eta_of_entry(e) <= self.target:
                keep.append(e)
            else:
                self._pending.setdefault(len(e.word), []).append(e)
                moved += 1
        if moved:
            self.shell = keep
            self._eta_max = None
        return moved

    # -- the search -------------------------------------------------------

    def _make_child(self, e: Entry, s: int) -> Entry:
        m = self.machine
        aux = self.aux
        calc = self.calc
        d = m.degree
        sperm = m.outputs[s]
        strans = m.transitions[s]
        identity = m.identity_state
        perm = e.perm
        new_perm = tuple(sperm[perm[x]] for x in range(d))
        secs = list(e.secs)
        sec_ids = list(e.sec_ids)
        c = list(e.c)
        slot = self.slot
        for x in range(d):
            p = strans[perm[x]]
            if p == identity:
                continue
            old = secs[x]
            old_id = sec_ids[x]
            if not old:
                new = (p,)
                r = _NO_INTERACTION
            else:
                r = aux.combine(old[-1], p)
                if r == _NO_INTERACTION:
                    new = old + (p,)
                elif r == _CANCEL:
                    new = old[:-1]
                else:
                    new = old[:-1] + (r,)
            new_id = calc.id_of_reduced(new)
            secs[x] = new
            sec_ids[x] = new_id
            old_live = old_id != IDENTITY_ID
            new_live = new_id != IDENTITY_ID
            if old_live and new_live:
                if r == _NO_INTERACTION:
                    c[slot[p]] += 1
                elif r == _CANCEL:
                    c[slot[old[-1]]] -= 1
                else:
                    c[slot[r]] += 1
                    c[slot[old[-1]]] -= 1
            elif old_live:
                for q in old:
                    c[slot[q]] -= 1
            elif new_live:
                for q in new:
                    c[slot[q]] += 1
        n = list(e.n)
        n[slot[s]] += 1
        return Entry(
            e.word + (s,), new_perm, tuple(secs), tuple(sec_ids), tuple(n), tuple(c)
        )

    def _admit(self, candidates: list[Entry]) -> None:
        for e in candidates:
            key = e.key()
            if key == self._identity_key:
                continue
            if self.dedup == "global":
                if key in self._seen:
                    continue
                self._seen.add(key)
            elif self.dedup == "level":
                bucket = self._level_seen.setdefault(len(e.word), set())
                if key in bucket:
                    continue
                bucket.add(key)
            self._pending.setdefault(len(e.word), []).append(e)

    def _process_entry(self, e: Entry):
        eta = self.eta_of_entry(e)
        if eta <= self.target:
            return eta, None
        children = [
            self._make_child(e, s)
            for s in self.generators
            if self.aux.extension_stays_reduced(e.word, s)
        ]
        return eta, children

    def step_level(self) -> bool:
        """Process the shortest pending wave.  Returns False when there was
        nothing to do (the frontier is empty) or a cap fired; inspect
        `.finished`/`.capped` afterwards."""
        self.capped = None
        if not self._pending:
            return False
        length = min(self._pending)
        if self.caps.max_radius is not None and length > self.caps.max_radius:
            self.capped = "radius-exceeded"
            return False
        wave = self._pending.pop(length)
        self.radius = max(self.radius, length)
        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                results = list(pool.map(self._process_entry, wave))
        else:
            results = [self._process_entry(e) for e in wave]
        shelled = 0
        leftovers = []
        for e, (eta, children) in zip(wave, results):
            if (
                self.caps.max_words is not None
                and self.processed >= self.caps.max_words
            ):
                leftovers.append(e)
                continue
            self.processed += 1
            self.per_level_sizes[length] = self.per_level_sizes.get(length, 0) + 1
            if children is None:
                self.shell.append(e)
                shelled += 1
                if self._eta_max is not None and eta > self._eta_max:
                    self._eta_max = eta
            else:
                self._admit(children)
        if leftovers:
            self._pending[length] = leftovers + self._pending.get(length, [])
        if self.trace is not None:
            self.trace(
                {
                    "type": "level",
                    "length": length,
                    "processed": len(wave) - len(leftovers),
                    "shelled": shelled,
                    "shell": len(self.shell),
                    "pending": self.pending_count(),
                    "eta_max": self.eta_max(),
                }
            )
        if leftovers:
            self.capped = "aborted"
            return False
        return True

    def run(self) -> RunResult:
        """Run until the frontier empties or a cap fires."""
        while self.step_level():
            pass
        if self.capped:
            status = self.capped
        else:
            status = "found"
        return self.result(status)

    def result(self, status: str) -> RunResult:
        eta = self.eta_max()
        return RunResult(
            status=status,
            eta=eta,
            alpha=alpha_from(eta, self.machine.degree) if status == "found" else None,
            radius=self.radius,
            egg_size=len(self.shell),
            per_level_sizes=sorted(self.per_level_sizes.items()),
            processed=self.processed,
            target=self.target,
            weights=list(self.weights),
        )

    # -- checkpointing ----------------------------------------------------

    def checkpoint(self) -> dict:
        """Snapshot of all mutable search state (entries are immutable and
        shared; the element-id table persists across restores harmlessly)."""
        return {
            "seen": set(self._seen),
            "level_seen": {k: set(v) for k, v in self._level_seen.items()},
            "pending": {k: list(v) for k, v in self._pending.items()},
            "shell": list(self.shell),
            "per_level_sizes": dict(self.per_level_sizes),
            "processed": self.processed,
            "radius": self.radius,
            "weights": self.weights,
            "target": self.target,
            "eta_max": self._eta_max,
        }

    def restore(self, snap: dict) -> None:
        self._seen = set(snap["seen"])
        self._level_seen = {k: set(v) for k, v in snap["level_seen"].items()}
        self._pending = {k: list(v) for k, v in snap["pending"].items()}
        self.shell = list(snap["shell"])
        self.per_level_sizes = dict(snap["per_level_sizes"])
        self.processed = snap["processed"]
        self.radius = snap["radius"]
        self.weights = snap["weights"]
        self.target = snap["target"]
        self._eta_max = snap["eta_max"]


def eta_of(
    m: MealyMachine,
    aux: AuxiliaryGroup,
    word,
    weights,
    calculus: Calculus | None = None,
) -> float:
    """Contraction ratio of a single word under the given weights."""
    calc = calculus if calculus is not None else Calculus(m, aux)
    w = tuple(word)
    if not w:
        return 0.0
    pi = normalize_weights(weights)
    slot = {s: i for i, s in enumerate(m.generators())}
    perm, secs = calc.wreath_reduced(w)
    num = 0.0
    den = 0.0
    for q in w:
        den += pi[slot[q]]
    for sec in secs:
        if calc.id_of_reduced(sec) == IDENTITY_ID:
            continue
        for q in sec:
            num += pi[slot[q]]
    return num / den


def search_egg(
    m: MealyMachine,
    aux: AuxiliaryGroup,
    weights,
    target: float,
    dedup: str = "global",
    caps: SearchCaps = SearchCaps(),
    workers: int = 1,
    trace=None,
) -> tuple[RunResult, EggSearch]:
    """One-shot search; returns the result and the engine for inspection."""
    eng = EggSearch(
        m, aux, weights, target, dedup=dedup, caps=caps, workers=workers, trace=trace
    )
    return eng.run(), eng
