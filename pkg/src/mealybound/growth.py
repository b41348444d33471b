"""Exact growth function of the generated group for small radii.

Breadth-first enumeration of group elements by word length over the
generators (symmetrized by default: missing inverse states are adjoined
first, so balls are taken in S together with its inverses).  Elements are
deduplicated by canonical id; ids are exact, so the counts are exact.
This is the independent oracle the rest of the package is sanity-checked
against — it shares only the machine model with the search pipeline.
"""

from __future__ import annotations

from .machine import MachineError, MealyMachine, symmetrize
from .words import AuxiliaryGroup, Calculus, CalculusError


class GrowthError(RuntimeError):
    pass


def growth(
    m: MealyMachine,
    l_max: int,
    symmetric: bool = True,
    max_ball: int = 1_000_000,
) -> dict:
    """gamma(0..l_max): number of distinct elements of word length <= l.

    Returns {"gamma": [...], "complete": bool, "l_reached": int}; when the
    ball budget runs out the series is truncated at the last complete
    radius and flagged incomplete.  gamma(0) = 1; the series is
    non-decreasing and submultiplicative.
    """
    if l_max < 0:
        raise MachineError("l_max must be non-negative")
    work = symmetrize(m) if symmetric else m
    aux = AuxiliaryGroup.free_group(work)
    calc = Calculus(work, aux)
    gens = work.generators()
    gamma = [1]
    seen: set[int] = {0}
    frontier: list[tuple[int, ...]] = [()]
    for length in range(1, l_max + 1):
        nxt = []
        for word in frontier:
            for s in gens:
                w = word + (s,)
                try:
                    wid = calc.canonical_id(w)
                except CalculusError:
                    wid = None
                if wid is None:
                    raise GrowthError(
                        f"element identity undecidable for a word of length {length}"
                    )
                if wid in seen:
                    continue
                if len(seen) >= max_ball:
                    return {
                        "gamma": gamma,
                        "complete": False,
                        "l_reached": length - 1,
                    }
                seen.add(wid)
                nxt.append(w)
        gamma.append(len(seen))
        frontier = nxt
    return {"gamma": gamma, "complete": True, "l_reached": l_max}
