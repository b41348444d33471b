"""Complete, invertible letter-to-letter transducers and their group actions.

A machine has a finite state set Q and a finite alphabet of d letters.  Each
state q carries a permutation-valued output function rho_q and a transition
(section) function: reading letter x in state q emits rho_q(x) and continues
in state delta_q(x).  Invertible machines generate groups of tree
automorphisms: a word of states acts on letter strings with the *leftmost
state applied first*.

Conventions used throughout the package:

* ``apply(m, w, u)`` feeds u through the states of w left to right.
* The image of a state word under the recursive decomposition is a pair
  ``(perm, sections)`` where ``perm[x]`` is the image of letter x and
  ``sections[x]`` is a state word (identity states dropped) satisfying
  ``apply(w, x + u) == perm[x] + apply(sections[x], u)``.
* Products compose as ``perm_{vw}[x] = perm_w[perm_v[x]]`` and
  ``sections_{vw}[x] = sections_v[x] + sections_w[perm_v[x]]``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import product


class MachineError(ValueError):
    """Raised for structurally invalid machines or invalid machine inputs."""


@dataclass(frozen=True)
class MealyMachine:
    """Immutable transducer: ``transitions[q][x]`` is the next state and
    ``outputs[q][x]`` the emitted letter, both 0-based indices."""

    states: tuple[str, ...]
    letters: tuple[str, ...]
    transitions: tuple[tuple[int, ...], ...]
    outputs: tuple[tuple[int, ...], ...]
    identity_state: int | None = None

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def degree(self) -> int:
        return len(self.letters)

    def state_index(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise MachineError(f"unknown state {name!r}") from None

    def letter_index(self, name: str) -> int:
        try:
            return self.letters.index(name)
        except ValueError:
            raise MachineError(f"unknown letter {name!r}") from None

    def generators(self) -> tuple[int, ...]:
        """All states except the identity state, in declaration order."""
        return tuple(q for q in range(self.n_states) if q != self.identity_state)

    def word_from_names(self, text: str | list[str]) -> tuple[int, ...]:
        """Parse a state word given as a list of names or a string.

        A plain string is first tried letter-by-letter (the common
        single-character case), otherwise split on whitespace.
        """
        if isinstance(text, str):
            parts = list(text) if all(c in self.states for c in text) else text.split()
        else:
            parts = list(text)
        return tuple(self.state_index(p) for p in parts)


def validate(m: MealyMachine) -> None:
    """Check structural well-formedness; raise MachineError on violation.

    Verified: table shapes and index ranges, every output function is a
    permutation of the alphabet (invertibility), and the declared identity
    state, if any, acts trivially and only transitions to itself.
    """
    n, d = m.n_states, m.degree
    if n == 0 or d == 0:
        raise MachineError("machine needs at least one state and one letter")
    if len(set(m.states)) != n:
        raise MachineError("duplicate state names")
    if len(set(m.letters)) != d:
        raise MachineError("duplicate letter names")
    if len(m.transitions) != n or len(m.outputs) != n:
        raise MachineError("transition/output tables must have one row per state")
    for q in range(n):
        if len(m.transitions[q]) != d or len(m.outputs[q]) != d:
            raise MachineError(f"state {m.states[q]!r}: rows must have {d} entries")
        for x in range(d):
            if not 0 <= m.transitions[q][x] < n:
                raise MachineError(f"state {m.states[q]!r}: bad transition at letter {x}")
            if not 0 <= m.outputs[q][x] < d:
                raise MachineError(f"state {m.states[q]!r}: bad output at letter {x}")
        if sorted(m.outputs[q]) != list(range(d)):
            raise MachineError(
                f"state {m.states[q]!r}: output function is not a permutation"
            )
    e = m.identity_state
    if e is not None:
        if not 0 <= e < n:
            raise MachineError("identity_state out of range")
        for x in range(d):
            if m.outputs[e][x] != x or m.transitions[e][x] != e:
                raise MachineError("declared identity state does not act trivially")


def apply_word(m: MealyMachine, word: tuple[int, ...], letters: tuple[int, ...]) -> tuple[int, ...]:
    """Action of a state word on a letter string, leftmost state first."""
    out = letters
    for q in word:
        state = q
        buf = []
        trans, outs = m.transitions, m.outputs
        for x in out:
            buf.append(outs[state][x])
            state = trans[state][x]
        out = tuple(buf)
    return out


def apply(m: MealyMachine, word, letters):
    """Name-level wrapper around apply_word: accepts and returns strings.

    `word` may be a state name, a string of single-character state names, a
    list of names, or a tuple of state indices; `letters` likewise.
    """
    if isinstance(word, tuple) and all(isinstance(q, int) for q in word):
        w = word
    else:
        w = m.word_from_names(word)
    if isinstance(letters, str):
        u = tuple(m.letter_index(c) for c in letters)
        res = apply_word(m, w, u)
        return "".join(m.letters[x] for x in res)
    u = tuple(m.letter_index(c) for c in letters)
    return [m.letters[x] for x in apply_word(m, w, u)]


def state_wreath(m: MealyMachine, q: int) -> tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]:
    """(perm, sections) of a single state; identity sections are empty words."""
    perm = m.outputs[q]
    secs = []
    for x in range(m.degree):
        p = m.transitions[q][x]
        secs.append(() if p == m.identity_state else (p,))
    return perm, tuple(secs)


def wreath_mul(
    m: MealyMachine,
    left: tuple[tuple[int, ...], tuple[tuple[int, ...], ...]],
    right: tuple[tuple[int, ...], tuple[tuple[int, ...], ...]],
) -> tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]:
    """Recursive-decomposition product: left factor acts first."""
    lperm, lsec = left
    rperm, rsec = right
    perm = tuple(rperm[lperm[x]] for x in range(m.degree))
    secs = tuple(lsec[x] + rsec[lperm[x]] for x in range(m.degree))
    return perm, secs


def wreath(m: MealyMachine, word: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]:
    """Root permutation and raw section words of a state word.

    Sections are concatenations of single-state sections with identity
    states dropped; no group-theoretic reduction is applied here.
    """
    perm = tuple(range(m.degree))
    secs: tuple[tuple[int, ...], ...] = ((),) * m.degree
    current = (perm, secs)
    for q in word:
        current = wreath_mul(m, current, state_wreath(m, q))
    return current


def is_trivial_word(m: MealyMachine, word: tuple[int, ...], max_nodes: int = 100_000) -> bool:
    """Whether a state word acts trivially on every letter string.

    Breadth-first closure over section words: the word is trivial iff every
    reachable section has the identity root permutation.  No reduction is
    used, so this is machine-level only; the cap guards against machines
    whose sections grow.
    """
    identity = tuple(range(m.degree))
    seen = set()
    queue = [tuple(word)]
    while queue:
        w = queue.pop()
        if w in seen:
            continue
        seen.add(w)
        if len(seen) > max_nodes:
            raise MachineError("triviality check exceeded node cap")
        perm, secs = wreath(m, w)
        if perm != identity:
            return False
        for s in secs:
            if s not in seen:
                queue.append(s)
    return True


def detect_identity_state(m: MealyMachine) -> int | None:
    """Index of a state that outputs every letter unchanged and always
    transitions to itself, or None."""
    for q in range(m.n_states):
        if all(m.outputs[q][x] == x and m.transitions[q][x] == q for x in range(m.degree)):
            return q
    return None


def with_detected_identity(m: MealyMachine) -> MealyMachine:
    return replace(m, identity_state=detect_identity_state(m))


def dual(m: MealyMachine) -> MealyMachine:
    """Exchange the roles of states and letters.

    The dual has one state per letter of `m` and one letter per state of
    `m`; reading letter q in state x emits the section delta_q(x) and moves
    to rho_q(x).  The dual is always complete and deterministic but need not
    be invertible, so it is not validated here.
    """
    trans = tuple(
        tuple(m.outputs[q][x] for q in range(m.n_states)) for x in range(m.degree)
    )
    outs = tuple(
        tuple(m.transitions[q][x] for q in range(m.n_states)) for x in range(m.degree)
    )
    out = MealyMachine(
        states=m.letters,
        letters=m.states,
        transitions=trans,
        outputs=outs,
        identity_state=None,
    )
    return with_detected_identity(out)


def level_power(m: MealyMachine, k: int) -> MealyMachine:
    """Same states acting on blocks of k letters (alphabet Sigma^k, lex order).

    Block names are concatenations of letter names; each state's action on a
    block is the k-fold application of the single-letter rule.
    """
    if k < 1:
        raise MachineError("level must be >= 1")
    blocks = list(product(range(m.degree), repeat=k))
    names = tuple("".join(m.letters[x] for x in b) for b in blocks)
    index = {b: i for i, b in enumerate(blocks)}
    trans = []
    outs = []
    for q in range(m.n_states):
        trow = []
        orow = []
        for b in blocks:
            state = q
            out_block = []
            for x in b:
                out_block.append(m.outputs[state][x])
                state = m.transitions[state][x]
            trow.append(state)
            orow.append(index[tuple(out_block)])
        trans.append(tuple(trow))
        outs.append(tuple(orow))
    return MealyMachine(
        states=m.states,
        letters=names,
        transitions=tuple(trans),
        outputs=tuple(outs),
        identity_state=m.identity_state,
    )


def inverse_permutation(perm: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for x, y in enumerate(perm):
        inv[y] = x
    return tuple(inv)


def symmetrize(m: MealyMachine, dedupe_involutions: bool = True) -> MealyMachine:
    """Add an inverse state for every state whose action is not an involution.

    The inverse of q outputs rho_q^{-1} and, on letter y, transitions to the
    inverse of delta_q(rho_q^{-1}(y)).  With `dedupe_involutions` (default)
    states generating involutions — including the identity — are their own
    inverses and are not duplicated.
    """
    validate(m)
    inv_index: dict[int, int] = {m.identity_state: m.identity_state}
    if dedupe_involutions:
        # reuse states already inverse to each other (or to themselves)
        for q in range(m.n_states):
            if q in inv_index:
                continue
            for p in range(m.n_states):
                if is_trivial_word(m, (q, p)):
                    inv_index[q] = p
                    inv_index[p] = q
                    break
    needs_inverse = [q not in inv_index for q in range(m.n_states)]
    states = list(m.states)
    taken = set(states)
    for q in range(m.n_states):
        if needs_inverse[q]:
            name = m.states[q] + "^-1"
            while name in taken:
                name += "'"
            taken.add(name)
            inv_index[q] = len(states)
            states.append(name)
    trans = [list(row) for row in m.transitions]
    outs = [list(row) for row in m.outputs]
    for q in range(m.n_states):
        if not needs_inverse[q]:
            continue
        rho_inv = inverse_permutation(m.outputs[q])
        trow = []
        orow = []
        for y in range(m.degree):
            x = rho_inv[y]
            trow.append(inv_index[m.transitions[q][x]])
            orow.append(x)
        trans.append(trow)
        outs.append(orow)
    return MealyMachine(
        states=tuple(states),
        letters=m.letters,
        transitions=tuple(tuple(r) for r in trans),
        outputs=tuple(tuple(r) for r in outs),
        identity_state=m.identity_state,
    )
