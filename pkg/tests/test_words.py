"""Cover-group reduction and the hash-consed element calculus."""
import pytest
from hypothesis import given, settings, strategies as st

from mealybound import formats
from mealybound.machine import MachineError
from mealybound.words import (
    AuxiliaryGroup,
    Calculus,
    verify_factors,
    words_act_equally,
)

from conftest import aux_for


def _gens_strategy(m, max_len=8):
    gens = list(m.generators())
    return st.lists(st.sampled_from(gens), max_size=max_len).map(tuple)


@pytest.mark.parametrize("name", formats.builtin_names())
def test_factor_tables_match_the_action(name):
    m = formats.builtin(name)
    aux = aux_for(name, m)
    report = verify_factors(aux)
    assert report["ok"], report


@pytest.mark.parametrize("name", ["grigorchuk", "t1-6letters", "mnote-8letters"])
@settings(max_examples=80, deadline=None)
@given(data=st.data())
def test_reduce_is_idempotent_and_sound(name, data):
    m = formats.builtin(name)
    aux = aux_for(name, m)
    w = data.draw(_gens_strategy(m))
    r = aux.reduce(w)
    assert aux.reduce(r) == r
    assert len(r) <= len(w)
    assert aux.is_reduced(r)
    # reduction never changes the group element
    assert words_act_equally(m, w, r)


@pytest.mark.parametrize("name", ["grigorchuk", "t1-6letters"])
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_append_reduced_matches_full_reduction(name, data):
    m = formats.builtin(name)
    aux = aux_for(name, m)
    w = aux.reduce(data.draw(_gens_strategy(m)))
    s = data.draw(st.sampled_from(list(m.generators())))
    assert aux.append_reduced(w, s) == aux.reduce(w + (s,))
    if aux.extension_stays_reduced(w, s):
        assert len(aux.reduce(w + (s,))) == len(w) + 1


def test_klein_four_block_relations(grig):
    m, aux = grig
    b, c, d = m.state_index("b"), m.state_index("c"), m.state_index("d")
    a = m.state_index("a")
    assert aux.reduce((b, c)) == (d,)
    assert aux.reduce((c, d)) == (b,)
    assert aux.reduce((b, d)) == (c,)
    for s in (a, b, c, d):
        assert aux.reduce((s, s)) == ()
    assert aux.block_names() == [["a"], ["b", "c", "d"]]


def test_identity_letters_vanish_under_reduction(grig):
    m, aux = grig
    e, b = m.state_index("e"), m.state_index("b")
    assert aux.reduce((e,)) == ()
    assert aux.reduce((e, b, e)) == (b,)


def test_six_letter_machine_shares_the_klein_block():
    m = formats.builtin("t1-6letters")
    aux = aux_for("t1-6letters", m)
    b, c, d = m.state_index("b"), m.state_index("c"), m.state_index("d")
    assert aux.reduce((b, c)) == (d,)
    assert aux.reduce((c, b)) == (d,)
    assert aux.reduce((c, d)) == (b,)


def test_letter_doubling_machine_has_an_order_three_block():
    m = formats.builtin("mnote-8letters")
    aux = aux_for("mnote-8letters", m)
    b, binv = m.state_index("b"), m.state_index("b^-1")
    assert aux.reduce((b, binv)) == ()
    assert aux.reduce((b, b)) == (binv,)
    assert aux.reduce((binv, binv)) == (b,)


def test_free_group_cover_only_cancels_inverse_pairs():
    m = formats.builtin("mnote-8letters")
    fg = AuxiliaryGroup.free_group(m)
    b, binv = m.state_index("b"), m.state_index("b^-1")
    assert fg.reduce((b, binv)) == ()
    assert fg.reduce((b, b)) == (b, b)


def test_free_product_rejects_unclosed_blocks(grig):
    m, _ = grig
    with pytest.raises(MachineError):
        AuxiliaryGroup.free_product(m, [["a", "b"], ["c", "d"]])


def test_inverse_word_reverses_and_inverts(grig):
    m, aux = grig
    a, b = m.state_index("a"), m.state_index("b")
    w = (a, b)
    assert aux.reduce(w + aux.inverse_word(w)) == ()


def test_triangle_relations_cover_the_klein_block(grig):
    _, aux = grig
    rels = set(aux.triangle_relations())
    # every ordered pair of distinct members multiplies to the third
    assert (1, 2, 3) in rels and (2, 3, 1) in rels
    assert len(rels) == 6


# -- element calculus ------------------------------------------------------


def test_equal_group_elements_share_a_canonical_id(grig):
    m, aux = grig
    calc = Calculus(m, aux)
    b, c, d = m.state_index("b"), m.state_index("c"), m.state_index("d")
    a = m.state_index("a")
    assert calc.canonical_id((b, c)) == calc.canonical_id((d,))
    assert calc.canonical_id((a, a)) == calc.canonical_id(())
    assert calc.canonical_id((a,)) != calc.canonical_id((b,))
    # (ad)^4 is a relation; (ad)^2 is not
    assert calc.is_identity((a, d) * 4)
    assert not calc.is_identity((a, d) * 2)


def test_identity_recognition(grig):
    m, aux = grig
    calc = Calculus(m, aux)
    a, b, c, d = (m.state_index(x) for x in "abcd")
    for w in ((), (a, a), (b, b), (b, c, d), (m.state_index("e"),)):
        assert calc.is_identity(w)
    for w in ((a,), (b,), (a, b), (a, d)):
        assert not calc.is_identity(w)


def test_hash_consing_reuses_nodes(grig):
    m, aux = grig
    calc = Calculus(m, aux)
    a, b = m.state_index("a"), m.state_index("b")
    calc.canonical_id((a, b))
    before = calc.n_nodes()
    for _ in range(5):
        calc.canonical_id((a, b))
    assert calc.n_nodes() == before


@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_calculus_equality_matches_bisimulation(data):
    m = formats.builtin("grigorchuk")
    aux = aux_for("grigorchuk", m)
    calc = Calculus(m, aux)
    u = data.draw(_gens_strategy(m, max_len=5))
    v = data.draw(_gens_strategy(m, max_len=5))
    assert calc.equal(u, v) == words_act_equally(m, u, v)


def test_bisimulation_on_known_pairs(grig):
    m, _ = grig
    b, c, d = m.state_index("b"), m.state_index("c"), m.state_index("d")
    a = m.state_index("a")
    assert words_act_equally(m, (b, c), (d,))
    assert words_act_equally(m, (a, a), ())
    assert not words_act_equally(m, (a,), (b,))
