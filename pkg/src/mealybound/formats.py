"""Text format for machines, the builtin machine zoo, and DOT export.

Machine text: one line per non-identity state,

    name = <s1,s2,...,sd> (c1)(c2)...

where ``<...>`` lists the next state for each letter (0-based letter order),
and the optional cycles give the output permutation in 1-based disjoint
cycle notation (absent cycles mean the state outputs letters unchanged).
``e`` is reserved for the identity state: it may be referenced in sections
but never defined, and is appended as the last state when referenced.
Blank lines and ``#`` comments are allowed.  Letters are named "0".."d-1".
"""

from __future__ import annotations

import re

from .machine import (
    MachineError,
    MealyMachine,
    detect_identity_state,
    level_power,
    validate,
)
from .words import AuxiliaryGroup

_LINE = re.compile(r"^(\S+)\s*=\s*<([^>]*)>\s*((?:\([^()]*\))*)\s*$")
_CYCLE = re.compile(r"\(([^()]*)\)")

IDENTITY_NAME = "e"


def _parse_cycles(text: str, degree: int, where: str) -> tuple[int, ...]:
    perm = list(range(degree))
    touched: set[int] = set()
    for cyc in _CYCLE.findall(text):
        entries = [p.strip() for p in cyc.split(",") if p.strip()]
        if len(entries) < 2:  # () and fixed points like (3) contribute nothing
            continue
        try:
            pts = [int(p) - 1 for p in entries]
        except ValueError:
            raise MachineError(f"{where}: non-numeric cycle entry in ({cyc})") from None
        for p in pts:
            if not 0 <= p < degree:
                raise MachineError(f"{where}: cycle point {p + 1} outside 1..{degree}")
            if p in touched:
                raise MachineError(f"{where}: cycles are not disjoint at {p + 1}")
            touched.add(p)
        for a, b in zip(pts, pts[1:] + pts[:1]):
            perm[a] = b
    return tuple(perm)


def parse_automaton(text: str) -> MealyMachine:
    """Parse machine text; raises MachineError with the offending line."""
    names: list[str] = []
    sections: list[list[str]] = []
    perms: list[tuple[int, ...] | None] = []
    degree: int | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        mo = _LINE.match(line)
        if mo is None:
            raise MachineError(f"line {lineno}: cannot parse {line!r}")
        name, secs_text, cycles_text = mo.groups()
        if name == IDENTITY_NAME:
            raise MachineError(f"line {lineno}: state name {IDENTITY_NAME!r} is reserved")
        if name in names:
            raise MachineError(f"line {lineno}: duplicate state {name!r}")
        secs = [s.strip() for s in secs_text.split(",")]
        if any(not s for s in secs):
            raise MachineError(f"line {lineno}: empty section name")
        if degree is None:
            degree = len(secs)
        elif len(secs) != degree:
            raise MachineError(
                f"line {lineno}: expected {degree} sections, got {len(secs)}"
            )
        names.append(name)
        sections.append(secs)
        perms.append(_parse_cycles(cycles_text, degree, f"line {lineno}"))
    if degree is None:
        raise MachineError("no states defined")

    uses_identity = any(IDENTITY_NAME in secs for secs in sections)
    all_names = names + [IDENTITY_NAME] if uses_identity else list(names)
    index = {n: i for i, n in enumerate(all_names)}
    transitions = []
    outputs = []
    for name, secs, perm in zip(names, sections, perms):
        row = []
        for s in secs:
            if s not in index:
                raise MachineError(f"state {name!r}: unknown section state {s!r}")
            row.append(index[s])
        transitions.append(tuple(row))
        outputs.append(perm)
    identity = None
    if uses_identity:
        identity = len(all_names) - 1
        transitions.append((identity,) * degree)
        outputs.append(tuple(range(degree)))
    m = MealyMachine(
        states=tuple(all_names),
        letters=tuple(str(x) for x in range(degree)),
        transitions=tuple(transitions),
        outputs=tuple(outputs),
        identity_state=identity,
    )
    validate(m)
    if identity is None:
        found = detect_identity_state(m)
        if found is not None:
            m = MealyMachine(
                m.states, m.letters, m.transitions, m.outputs, identity_state=found
            )
    return m


def _format_cycles(perm: tuple[int, ...]) -> str:
    seen: set[int] = set()
    parts = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cyc = [start]
        seen.add(start)
        nxt = perm[start]
        while nxt != start:
            cyc.append(nxt)
            seen.add(nxt)
            nxt = perm[nxt]
        parts.append("(" + ",".join(str(p + 1) for p in cyc) + ")")
    return "".join(parts)


def format_automaton(m: MealyMachine) -> str:
    """Render machine text; parse(format(m)) rebuilds an equal machine for
    machines whose identity state (if any) is referenced and last."""
    lines = []
    for q in range(m.n_states):
        if q == m.identity_state:
            continue
        secs = ",".join(
            IDENTITY_NAME if t == m.identity_state else m.states[t]
            for t in m.transitions[q]
        )
        cycles = _format_cycles(m.outputs[q])
        line = f"{m.states[q]} = <{secs}>"
        if cycles:
            line += f" {cycles}"
        lines.append(line)
    return "\n".join(lines) + "\n"


# -- builtin zoo ---------------------------------------------------------

_ZOO_TEXT: dict[str, str] = {
    "grigorchuk": """\
a = <e,e> (1,2)
b = <a,c>
c = <a,d>
d = <e,b>
""",
    "t1-6letters": """\
a = <e,e,e,e,e,e> (1,2)(3,4)(5,6)
b = <b,e,e,e,e,e> (2,3)(4,5)
c = <c,a,a,a,a,a> (2,3)
d = <d,a,a,a,a,a> (4,5)
""",
    "mnote-8letters": """\
a = <a,e,e,e,e,e,e,e> (3,4)(5,8)(6,7)
b = <e,e,e,e,e,e,b,b^-1> (1,2,3)(4,5,6)
b^-1 = <e,e,e,e,e,e,b^-1,b> (1,3,2)(4,6,5)
""",
    "y-7letters": """\
a = <a,a,e,e,e,e,e> (3,4)(6,7)
b = <e,e,e,e,b,e,e> (1,2)(3,6)
c = <e,e,e,e,e,e,c> (2,3)(4,5)
""",
    "xshape-17letters": """\
a = <e,e,e,e,e,e,e,e,e,e,e,e,e,e,e,e,e> (1,2)(6,7)(12,13)(15,16)
b = <e,e,e,e,e,e,e,e,e,e,e,e,e,e,e,e,b> (4,5)(7,8)(1,10)(14,15)
c = <e,e,e,e,e,e,e,e,a,e,e,e,e,e,e,e,c> (4,5)(14,15)
d = <e,e,e,e,e,e,e,e,a,e,e,e,e,e,e,e,d> (7,8)(1,10)
a' = <e,e,e,e,e,e,e,e,e,e,e,e,e,e,e,e,b'> (3,4)(8,9)(10,11)(1,14)
b' = <e,e,e,e,b',e,e,e,e,e,e,e,e,e,e,e,e> (2,3)(1,6)(11,12)(16,17)
c' = <e,e,e,e,c',e,e,e,e,e,e,e,a',e,e,e,e> (2,3)(16,17)
d' = <e,e,e,e,d',e,e,e,e,e,e,e,a',e,e,e,e> (1,6)(11,12)
""",
}

_ZOO_BLOCKS: dict[str, list[list[str]]] = {
    "grigorchuk": [["a"], ["b", "c", "d"]],
    "grigorchuk-l2": [["a"], ["b", "c", "d"]],
    "grigorchuk-l3": [["a"], ["b", "c", "d"]],
    "t1-6letters": [["a"], ["b", "c", "d"]],
    "mnote-8letters": [["a"], ["b", "b^-1"]],
    "y-7letters": [["a"], ["b"], ["c"]],
    "xshape-17letters": [["a"], ["b", "c", "d"], ["a'"], ["b'", "c'", "d'"]],
}


def builtin_names() -> list[str]:
    return sorted(_ZOO_TEXT) + ["grigorchuk-l2", "grigorchuk-l3"]


def builtin(name: str) -> MealyMachine:
    """A zoo machine by name; raises MachineError for unknown names."""
    if name in _ZOO_TEXT:
        return parse_automaton(_ZOO_TEXT[name])
    if name in ("grigorchuk-l2", "grigorchuk-l3"):
        k = int(name[-1])
        return level_power(parse_automaton(_ZOO_TEXT["grigorchuk"]), k)
    raise MachineError(f"unknown builtin machine {name!r}; try one of {builtin_names()}")


def builtin_text(name: str) -> str:
    if name in _ZOO_TEXT:
        return _ZOO_TEXT[name]
    if name in ("grigorchuk-l2", "grigorchuk-l3"):
        return format_automaton(builtin(name))
    raise MachineError(f"unknown builtin machine {name!r}")


def builtin_blocks(name: str) -> list[list[str]]:
    if name not in _ZOO_BLOCKS:
        raise MachineError(f"no block data for {name!r}")
    return [list(b) for b in _ZOO_BLOCKS[name]]


def builtin_aux(name: str) -> AuxiliaryGroup:
    m = builtin(name)
    return AuxiliaryGroup.free_product(m, builtin_blocks(name))


def discover_blocks(m: MealyMachine) -> list[list[str]]:
    """Blocks of a discovered free-product cover (singletons if nothing merges)."""
    return AuxiliaryGroup.discover(m).block_names()


# -- DOT export ----------------------------------------------------------


def export_dot(m: MealyMachine, mode: str = "diagram") -> str:
    """Deterministic Graphviz source.

    mode "diagram": states as nodes, one edge per (state, letter) labelled
    "input|output".  mode "schreier": letters as nodes, one edge per
    (non-identity state, letter) labelled with the state name.
    """
    out = []
    if mode == "diagram":
        out.append("digraph machine {")
        out.append("  rankdir=LR;")
        for q in range(m.n_states):
            shape = "doublecircle" if q == m.identity_state else "circle"
            out.append(f'  "{m.states[q]}" [shape={shape}];')
        for q in range(m.n_states):
            for x in range(m.degree):
                src = m.states[q]
                dst = m.states[m.transitions[q][x]]
                label = f"{m.letters[x]}|{m.letters[m.outputs[q][x]]}"
                out.append(f'  "{src}" -> "{dst}" [label="{label}"];')
        out.append("}")
    elif mode == "schreier":
        out.append("digraph schreier {")
        for x in range(m.degree):
            out.append(f'  "{m.letters[x]}" [shape=circle];')
        for q in range(m.n_states):
            if q == m.identity_state:
                continue
            for x in range(m.degree):
                y = m.outputs[q][x]
                out.append(
                    f'  "{m.letters[x]}" -> "{m.letters[y]}" [label="{m.states[q]}"];'
                )
        out.append("}")
    else:
        raise MachineError(f"unknown dot mode {mode!r}")
    return "\n".join(out) + "\n"
