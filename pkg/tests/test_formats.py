"""Automaton text format, builtin zoo, DOT export, result schema."""
import json

import pytest

from mealybound import formats
from mealybound.machine import MachineError, validate
from mealybound.search import SearchCaps, search_egg

from conftest import aux_for
from util import BARTHOLDI

EXPECTED_ZOO = {
    "grigorchuk": (2, 5),
    "mnote-8letters": (8, 4),
    "t1-6letters": (6, 5),
    "xshape-17letters": (17, 9),
    "y-7letters": (7, 4),
    "grigorchuk-l2": (4, 5),
    "grigorchuk-l3": (8, 5),
}


def test_zoo_contents():
    assert set(formats.builtin_names()) == set(EXPECTED_ZOO)
    for name, (degree, n_states) in EXPECTED_ZOO.items():
        m = formats.builtin(name)
        assert (m.degree, m.n_states) == (degree, n_states), name


def test_unknown_builtin_raises():
    with pytest.raises(MachineError):
        formats.builtin("nope")
    with pytest.raises(MachineError):
        formats.builtin_blocks("not-a-machine")


@pytest.mark.parametrize("name", formats.builtin_names())
def test_text_round_trip(name):
    # letter names are positional in the text format, so only their count
    # survives a round trip; states and tables must be identical
    m = formats.builtin(name)
    again = formats.parse_automaton(formats.format_automaton(m))
    assert again.states == m.states
    assert len(again.letters) == len(m.letters)
    assert again.transitions == m.transitions
    assert again.outputs == m.outputs
    assert again.identity_state == m.identity_state


@pytest.mark.parametrize("name", formats.builtin_names())
def test_builtin_text_parses_to_the_builtin(name):
    m = formats.builtin(name)
    parsed = formats.parse_automaton(formats.builtin_text(name))
    assert parsed.transitions == m.transitions
    assert parsed.outputs == m.outputs


BAD_TEXTS = [
    # same state twice
    "a = <e,e> (1,2)\na = <e,e>\n",
    # section arity does not match the alphabet
    "a = <e> (1,2)\nb = <a,a>\n",
    # output is not a permutation of the letters
    "a = <e,e> (1,1)\n",
    # undefined state in a section
    "a = <zz,e> (1,2)\n",
    # empty input
    "",
]


@pytest.mark.parametrize("text", BAD_TEXTS)
def test_parse_rejects_malformed_text(text):
    with pytest.raises(MachineError):
        formats.parse_automaton(text)


def test_parse_accepts_explicit_identity_and_cycles():
    m = formats.parse_automaton("a = <e, a> (1,2)\n")
    validate(m)
    assert m.identity_state == m.state_index("e")
    assert m.degree == 2


def test_dot_export_mentions_every_state(grig):
    m, _ = grig
    dot = formats.export_dot(m)
    assert dot.startswith("digraph")
    for s in m.states:
        assert f'"{s}"' in dot
    assert "|" in dot  # in/out letter labels


def test_dot_schreier_mode_renders_the_letter_action(grig):
    m, _ = grig
    dot = formats.export_dot(m, mode="schreier")
    assert dot.startswith("digraph schreier")
    assert '"0" -> "1" [label="a"]' in dot


def test_discovered_blocks_match_curated_ones():
    for name in ("grigorchuk", "t1-6letters", "mnote-8letters"):
        m = formats.builtin(name)
        curated = [sorted(b) for b in formats.builtin_blocks(name)]
        discovered = [sorted(b) for b in formats.discover_blocks(m)]
        assert sorted(discovered) == sorted(curated), name


RESULT_KEYS = [
    "machine",
    "aux",
    "weights",
    "target",
    "status",
    "eta",
    "alpha",
    "radius",
    "egg_size",
    "per_level_sizes",
    "count_matrix_ref",
    "seed",
    "versions",
]


def test_run_result_schema_has_stable_keys(grig):
    m, aux = grig
    res, _ = search_egg(m, aux, BARTHOLDI, 0.99, caps=SearchCaps(max_radius=8))
    payload = res.to_json_dict(machine_text="grigorchuk", aux={"kind": "free"})
    assert list(payload.keys()) == RESULT_KEYS
    # and it is JSON-serializable as-is
    json.loads(json.dumps(payload))
