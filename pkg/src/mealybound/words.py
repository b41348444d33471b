"""Generator words, auxiliary covers, and exact element identity.

The group generated by a machine's states is approached through words over
the non-identity states.  An *auxiliary cover* is a group with an obvious
normal form that maps onto the generated group: either the free product of
finite blocks (each block together with the identity forms a finite subgroup
of the generated group) or a free group with an optional pairing of mutually
inverse states.  Reducing words in the cover never changes the generated
element and gives the syllable normal form used by the search.

Exact equality of generated elements is decided by `Calculus.canonical_id`:
every element seen so far is assigned a node in a hash-consed table keyed by
(root permutation, child node ids).  Because an element can recur inside its
own sections (e.g. single generators of self-similar groups), the resolver
runs Tarjan's algorithm over the section closure and canonicalises each
strongly connected component by partition refinement plus a breadth-first
serialisation.  Ids are exact when returned; `None` means a cap was hit and
the word must be treated as a fresh element (sound for deduplication).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .machine import MachineError, MealyMachine, wreath

# Sentinels for letter interaction inside `reduce`.
_NO_INTERACTION = -2
_CANCEL = -1

IDENTITY_ID = 0


class CalculusError(RuntimeError):
    """Raised when an exact answer is required but a cap was exceeded."""


def words_act_equally(m: MealyMachine, u, v, max_nodes: int = 200_000) -> bool:
    """Whether two state words induce the same map on all letter strings.

    Pure machine-level bisimulation check on the pair closure; no reduction
    involved, so it terminates whenever section words do not grow.
    """
    seen: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()
    stack = [(tuple(u), tuple(v))]
    while stack:
        pair = stack.pop()
        if pair in seen:
            continue
        seen.add(pair)
        if len(seen) > max_nodes:
            raise CalculusError("equality check exceeded node cap")
        pa, sa = wreath(m, pair[0])
        pb, sb = wreath(m, pair[1])
        if pa != pb:
            return False
        stack.extend(zip(sa, sb))
    return True


@dataclass(frozen=True)
class Caps:
    """Budgets for the exact-identity machinery."""

    max_nodes: int = 1_000_000
    max_depth: int = 64


class AuxiliaryGroup:
    """Reduction rules for words over the machine's non-identity states.

    mode "free_product": generators are partitioned into blocks; each block
    plus the identity is a finite subgroup, with the multiplication table
    derived from the machine's action.  Adjacent same-block letters combine
    (or cancel), so reduced words alternate blocks.

    mode "free_group": only adjacent mutually-inverse letters cancel.
    """

    def __init__(
        self,
        m: MealyMachine,
        mode: str,
        blocks: tuple[tuple[int, ...], ...],
        table: dict[tuple[int, int], int],
        inverse: dict[int, int],
    ):
        self.machine = m
        self.mode = mode
        self.blocks = blocks
        self.generators = m.generators()
        self.block_of = {}
        for bi, block in enumerate(blocks):
            for s in block:
                self.block_of[s] = bi
        self.table = table
        self.inverse = inverse

    # -- construction -----------------------------------------------------

    @classmethod
    def free_product(cls, m: MealyMachine, blocks) -> "AuxiliaryGroup":
        """Free product of finite blocks given by state names or indices.

        The multiplication table of each block is computed from the machine
        action; a block that is not closed, or misses inverses, is rejected.
        """
        gens = m.generators()
        resolved: list[tuple[int, ...]] = []
        for block in blocks:
            resolved.append(
                tuple(s if isinstance(s, int) else m.state_index(s) for s in block)
            )
        flat = [s for block in resolved for s in block]
        if sorted(flat) != sorted(gens):
            raise MachineError("blocks must partition the non-identity states")
        table: dict[tuple[int, int], int] = {}
        inverse: dict[int, int] = {}
        for block in resolved:
            members = list(block)
            for s in members:
                for t in members:
                    prod = None
                    if words_act_equally(m, (s, t), ()):
                        prod = _CANCEL
                    else:
                        for u in members:
                            if words_act_equally(m, (s, t), (u,)):
                                prod = u
                                break
                    if prod is None:
                        raise MachineError(
                            f"block {tuple(m.states[q] for q in block)} is not closed "
                            f"at {m.states[s]}*{m.states[t]}"
                        )
                    table[(s, t)] = prod
                    if prod == _CANCEL:
                        inverse[s] = t
            for s in members:
                if s not in inverse:
                    raise MachineError(f"state {m.states[s]!r} has no inverse in its block")
        return cls(m, "free_product", tuple(resolved), table, inverse)

    @classmethod
    def free_group(cls, m: MealyMachine, pair_inverses: bool = True) -> "AuxiliaryGroup":
        """Free group on the generators; adjacent inverse pairs cancel.

        With `pair_inverses` the pairing is discovered from the action (a
        state may be its own inverse); without it no reduction happens.
        """
        gens = m.generators()
        inverse: dict[int, int] = {}
        if pair_inverses:
            for s in gens:
                if s in inverse:
                    continue
                for t in gens:
                    if words_act_equally(m, (s, t), ()):
                        inverse[s] = t
                        inverse[t] = s
                        break
        blocks = tuple((s,) for s in gens)
        return cls(m, "free_group", blocks, {}, inverse)

    @classmethod
    def discover(cls, m: MealyMachine) -> "AuxiliaryGroup":
        """Infer a free-product structure by merging generators whose product
        stays inside the generator set (plus identity); fall back to a free
        group when nothing merges."""
        gens = m.generators()
        parent = {s: s for s in gens}

        def find(s):
            while parent[s] != s:
                parent[s] = parent[parent[s]]
                s = parent[s]
            return s

        for s in gens:
            for t in gens:
                if s == t:
                    continue
                if words_act_equally(m, (s, t), ()):
                    parent[find(s)] = find(t)
                    continue
                for u in gens:
                    if words_act_equally(m, (s, t), (u,)):
                        parent[find(s)] = find(t)
                        parent[find(u)] = find(t)
                        break
        groups: dict[int, list[int]] = {}
        for s in gens:
            groups.setdefault(find(s), []).append(s)
        blocks = [sorted(v) for v in groups.values()]
        blocks.sort()
        try:
            return cls.free_product(m, blocks)
        except MachineError:
            return cls.free_group(m)

    # -- reduction --------------------------------------------------------

    def combine(self, s: int, t: int) -> int:
        """Interaction of adjacent letters s, t: _NO_INTERACTION, _CANCEL,
        or the replacing letter."""
        if self.mode == "free_product":
            if self.block_of[s] != self.block_of[t]:
                return _NO_INTERACTION
            return self.table[(s, t)]
        if self.inverse.get(s) == t:
            return _CANCEL
        return _NO_INTERACTION

    def reduce(self, word) -> tuple[int, ...]:
        """Normal form in the cover (stack reduction, left to right)."""
        out: list[int] = []
        identity = self.machine.identity_state
        for s in word:
            if s == identity:
                continue
            while True:
                if not out:
                    out.append(s)
                    break
                r = self.combine(out[-1], s)
                if r == _NO_INTERACTION:
                    out.append(s)
                    break
                out.pop()
                if r == _CANCEL:
                    break
                s = r
        return tuple(out)

    def append_reduced(self, word: tuple[int, ...], s: int) -> tuple[int, ...]:
        """reduce(word + (s,)) assuming `word` is already reduced."""
        if not word:
            return (s,)
        r = self.combine(word[-1], s)
        if r == _NO_INTERACTION:
            return word + (s,)
        if r == _CANCEL:
            return word[:-1]
        return word[:-1] + (r,)

    def is_reduced(self, word) -> bool:
        return self.reduce(word) == tuple(word)

    def extension_stays_reduced(self, word: tuple[int, ...], s: int) -> bool:
        """Whether appending s keeps the word in normal form (the syllable
        length grows by exactly one)."""
        if not word:
            return True
        return self.combine(word[-1], s) == _NO_INTERACTION

    def aux_length(self, word) -> int:
        return len(self.reduce(word))

    def inverse_word(self, word) -> tuple[int, ...]:
        missing = [s for s in word if s not in self.inverse]
        if missing:
            names = [self.machine.states[s] for s in missing]
            raise MachineError(f"no inverse known for {names}")
        return tuple(self.inverse[s] for s in reversed(word))

    def triangle_relations(self) -> list[tuple[int, int, int]]:
        """(s, t, u) with s*t = u inside a block, u a generator: the weight
        of u must stay below weight(s) + weight(t)."""
        out = []
        for (s, t), u in self.table.items():
            if u != _CANCEL:
                out.append((s, t, u))
        return out

    def block_names(self) -> list[list[str]]:
        return [[self.machine.states[s] for s in block] for block in self.blocks]


def verify_factors(aux: AuxiliaryGroup, max_nodes: int = 200_000) -> dict:
    """Re-derive every table entry from the machine action and report
    mismatches; the report is empty iff the cover is faithful to the action."""
    m = aux.machine
    mismatches = []
    for (s, t), u in aux.table.items():
        expected = (u,) if u != _CANCEL else ()
        if not words_act_equally(m, (s, t), expected, max_nodes):
            mismatches.append(
                {
                    "left": m.states[s],
                    "right": m.states[t],
                    "claimed": m.states[u] if u != _CANCEL else "e",
                }
            )
    for s, t in aux.inverse.items():
        if not words_act_equally(m, (s, t), (), max_nodes):
            mismatches.append(
                {"left": m.states[s], "right": m.states[t], "claimed": "e"}
            )
    return {"ok": not mismatches, "mismatches": mismatches}


class _CapExceeded(Exception):
    pass


class Calculus:
    """Exact element identity for words over one machine/cover pair.

    Nodes live in a table `id -> (perm, child_ids)`; the identity is node 0
    (trivial permutation, all children itself).  `canonical_id` maps a word
    to its node, resolving mutually recursive sections via Tarjan SCCs; the
    result is exact whenever an id is returned, and `None` past the caps.
    """

    def __init__(self, m: MealyMachine, aux: AuxiliaryGroup, caps: Caps = Caps()):
        if aux.machine is not m:
            # allow equal machines passed as distinct objects
            if aux.machine != m:
                raise MachineError("auxiliary cover belongs to a different machine")
        self.machine = m
        self.aux = aux
        self.caps = caps
        d = m.degree
        trivial = tuple(range(d))
        self._nodes: list[tuple[tuple[int, ...], tuple[int, ...]]] = [
            (trivial, (IDENTITY_ID,) * d)
        ]
        self._key_id: dict = {(trivial, (IDENTITY_ID,) * d): IDENTITY_ID}
        self._serial_id: dict = {}
        self._word_id: dict[tuple[int, ...], int] = {(): IDENTITY_ID}
        self._unknown_words: set[tuple[int, ...]] = set()
        self._lock = threading.Lock()

    # -- public api -------------------------------------------------------

    def canonical_id(self, word) -> int | None:
        w = self.aux.reduce(tuple(word))
        got = self._word_id.get(w)
        if got is not None:
            return got
        if w in self._unknown_words:
            return None
        with self._lock:
            got = self._word_id.get(w)
            if got is not None:
                return got
            try:
                return self._resolve(w)
            except _CapExceeded:
                self._unknown_words.add(w)
                return None

    def id_of_reduced(self, w: tuple[int, ...]) -> int | None:
        """Like canonical_id but trusts that `w` is already reduced."""
        got = self._word_id.get(w)
        if got is not None:
            return got
        if w in self._unknown_words:
            return None
        with self._lock:
            got = self._word_id.get(w)
            if got is not None:
                return got
            try:
                return self._resolve(w)
            except _CapExceeded:
                self._unknown_words.add(w)
                return None

    def is_identity(self, word) -> bool:
        """Exact word problem against the identity; raises CalculusError if
        the caps prevent a definite answer."""
        got = self.canonical_id(word)
        if got is None:
            raise CalculusError("identity test exceeded caps")
        return got == IDENTITY_ID

    def equal(self, u, v) -> bool:
        a, b = self.canonical_id(u), self.canonical_id(v)
        if a is None or b is None:
            raise CalculusError("equality test exceeded caps")
        return a == b

    def node(self, node_id: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self._nodes[node_id]

    def n_nodes(self) -> int:
        return len(self._nodes)

    def wreath_reduced(self, word):
        """(perm, reduced section words) of a word."""
        perm, secs = wreath(self.machine, tuple(word))
        return perm, tuple(self.aux.reduce(s) for s in secs)

    # -- resolution -------------------------------------------------------

    def _children_of(self, w: tuple[int, ...]):
        perm, secs = wreath(self.machine, w)
        return perm, [self.aux.reduce(s) for s in secs]

    def _resolve(self, root: tuple[int, ...]) -> int:
        word_id = self._word_id
        index: dict[tuple[int, ...], int] = {}
        low: dict[tuple[int, ...], int] = {}
        onstack: set[tuple[int, ...]] = set()
        scc_stack: list[tuple[int, ...]] = []
        info: dict[tuple[int, ...], tuple[tuple[int, ...], list]] = {}
        counter = 0
        budget = self.caps.max_nodes

        frames: list[list] = []

        def open_node(w):
            nonlocal counter
            if counter >= budget:
                raise _CapExceeded
            index[w] = low[w] = counter
            counter += 1
            onstack.add(w)
            scc_stack.append(w)
            perm, children = self._children_of(w)
            info[w] = (perm, children)
            frames.append([w, children, 0])
            if len(frames) > self.caps.max_depth:
                raise _CapExceeded

        open_node(root)
        while frames:
            frame = frames[-1]
            w, children, i = frame
            if i < len(children):
                frame[2] += 1
                c = children[i]
                if c in word_id:
                    continue
                if c in index:
                    if c in onstack:
                        if index[c] < low[w]:
                            low[w] = index[c]
                    continue
                open_node(c)
                continue
            # close w
            frames.pop()
            if frames:
                parent = frames[-1][0]
                if low[w] < low[parent]:
                    low[parent] = low[w]
            if low[w] == index[w]:
                members = []
                while True:
                    v = scc_stack.pop()
                    onstack.discard(v)
                    members.append(v)
                    if v == w:
                        break
                self._finish_scc(members, info)
        return word_id[root]

    def _alloc_keyed(self, perm, child_ids) -> int:
        key = (perm, child_ids)
        got = self._key_id.get(key)
        if got is not None:
            return got
        node_id = len(self._nodes)
        self._nodes.append(key)
        self._key_id[key] = node_id
        return node_id

    def _finish_scc(self, members, info):
        word_id = self._word_id
        if len(members) == 1:
            w = members[0]
            perm, children = info[w]
            if w not in children:
                ids = tuple(word_id[c] for c in children)
                word_id[w] = self._alloc_keyed(perm, ids)
                return
        member_set = set(members)
        # children as ('G', id) for resolved words, or the member word itself
        shaped: dict[tuple[int, ...], list] = {}
        for w in members:
            perm, children = info[w]
            shaped[w] = [c if c in member_set else word_id[c] for c in children]
        # partition refinement: start from (perm, resolved-child pattern)
        cls: dict[tuple[int, ...], int] = {}
        sig0: dict = {}
        for w in members:
            perm, _ = info[w]
            s = (perm, tuple(c if isinstance(c, int) else None for c in shaped[w]))
            cls[w] = sig0.setdefault(s, len(sig0))
        while True:
            sig: dict = {}
            new_cls: dict[tuple[int, ...], int] = {}
            for w in members:
                s = (
                    cls[w],
                    tuple(
                        c if isinstance(c, int) else ("c", cls[c]) for c in shaped[w]
                    ),
                )
                new_cls[w] = sig.setdefault(s, len(sig))
            if len(sig) == len(set(cls.values())):
                cls = new_cls
                break
            cls = new_cls
        # quotient: class -> (perm, children as int id | ('c', class))
        class_rep: dict[int, tuple[int, ...]] = {}
        for w in members:
            class_rep.setdefault(cls[w], w)
        quot: dict[int, tuple] = {}
        for c, rep in class_rep.items():
            perm, _ = info[rep]
            quot[c] = (
                perm,
                tuple(
                    ch if isinstance(ch, int) else ("c", cls[ch]) for ch in shaped[rep]
                ),
            )

        def serialize(root_class: int):
            order = {root_class: 0}
            queue = [root_class]
            out = []
            qi = 0
            while qi < len(queue):
                c = queue[qi]
                qi += 1
                perm, children = quot[c]
                row = [perm]
                for ch in children:
                    if isinstance(ch, int):
                        row.append(("g", ch))
                    else:
                        target = ch[1]
                        if target not in order:
                            order[target] = len(order)
                            queue.append(target)
                        row.append(("l", order[target]))
                out.append(tuple(row))
            return tuple(out), queue

        class_id: dict[int, int] = {}
        for c in quot:
            serial, _ = serialize(c)
            got = self._serial_id.get(serial)
            if got is None:
                got = len(self._nodes)
                self._nodes.append(None)  # filled below
                self._serial_id[serial] = got
            class_id[c] = got
        # fill node entries and register resolved keys
        for c, (perm, children) in quot.items():
            ids = tuple(
                ch if isinstance(ch, int) else class_id[ch[1]] for ch in children
            )
            if self._nodes[class_id[c]] is None:
                self._nodes[class_id[c]] = (perm, ids)
            self._key_id.setdefault((perm, ids), class_id[c])
        for w in members:
            word_id[w] = class_id[cls[w]]
