"""Consistency report for the superpolynomial-growth side conditions."""
from mealybound.formats import builtin, builtin_blocks, parse_automaton
from mealybound.machine import wreath
from mealybound.superpoly import (
    check_first_section_surjective,
    check_partition,
    superpoly_report,
)

from util import ODOMETER_TEXT


def test_main_example_report_is_consistent():
    m = builtin("grigorchuk")
    rep = superpoly_report(m, builtin_blocks("grigorchuk"), max_len=6)
    assert rep["verdict"] == "consistent"
    assert rep["partition"]["status"] == "pass"
    assert rep["partition"]["block_orders"] == [2, 4]
    assert rep["section_contraction"]["status"] == "pass"
    assert rep["first_section_surjective"]["status"] == "pass"


def test_main_example_surjectivity_witnesses():
    m = builtin("grigorchuk")
    rep = check_first_section_surjective(m, max_len=6)
    assert rep["missing"] == []
    assert rep["witnesses"] == {
        "a": ["b"],
        "b": ["a", "d", "a"],
        "c": ["a", "b", "a"],
        "d": ["a", "c", "a"],
    }


def test_witnesses_actually_witness():
    # every claimed witness word must have the target state as first section
    m = builtin("grigorchuk")
    rep = check_first_section_surjective(m, max_len=6)
    idx = {name: i for i, name in enumerate(m.states)}
    for target, names in rep["witnesses"].items():
        perm, secs = wreath(m, tuple(idx[n] for n in names))
        assert secs[0] == (idx[target],)


def test_partition_rejects_a_bad_grouping():
    m = builtin("grigorchuk")
    rep = check_partition(m, [["a", "b"], ["c", "d"]])
    assert rep["status"] == "fail"
    assert "not closed" in rep["reason"]


def test_partition_orders_on_mixed_block_machine():
    m = builtin("mnote-8letters")
    rep = check_partition(m, builtin_blocks("mnote-8letters"))
    assert rep["status"] == "pass"
    assert rep["block_orders"] == [2, 3]


def test_infinite_cyclic_machine_fails():
    # adding machine: the singleton non-identity block is not closed under
    # composition, so the torsion partition condition cannot hold
    odo = parse_automaton(ODOMETER_TEXT)
    rep = superpoly_report(odo, [["a"]], max_len=6)
    assert rep["verdict"] == "fail"
    assert rep["partition"]["status"] == "fail"


def test_eta_is_passed_through():
    m = builtin("grigorchuk")
    rep = superpoly_report(m, builtin_blocks("grigorchuk"), max_len=4, eta=0.8106)
    assert rep["eta"] == 0.8106
    assert rep["verdict"] == "consistent"


def test_report_is_explicit_about_bounded_evidence():
    m = builtin("grigorchuk")
    rep = superpoly_report(m, builtin_blocks("grigorchuk"), max_len=4)
    assert rep["section_contraction"]["max_len"] == 4
    assert "only up to" in rep["note"]
