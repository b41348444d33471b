"""Exact ball-size oracle: independent growth counts for small radii."""
import pytest

from mealybound.formats import builtin, parse_automaton
from mealybound.growth import growth
from mealybound.machine import MachineError

from util import ODOMETER_TEXT

GRIG_GAMMA = [1, 5, 11, 23, 40, 68, 109, 179, 281]


def test_main_example_ball_sizes():
    out = growth(builtin("grigorchuk"), 8)
    assert out["gamma"] == GRIG_GAMMA
    assert out["complete"] is True
    assert out["l_reached"] == 8


def test_adding_machine_grows_linearly():
    out = growth(parse_automaton(ODOMETER_TEXT), 12)
    assert out["gamma"] == [2 * l + 1 for l in range(13)]
    assert out["complete"] is True


def test_adding_machine_one_sided():
    # without adjoining inverses the ball only contains non-negative powers
    out = growth(parse_automaton(ODOMETER_TEXT), 6, symmetric=False)
    assert out["gamma"] == [l + 1 for l in range(7)]


def test_ball_budget_truncates_and_flags():
    out = growth(builtin("grigorchuk"), 8, max_ball=100)
    assert out["complete"] is False
    assert out["l_reached"] < 8
    assert out["gamma"] == GRIG_GAMMA[: out["l_reached"] + 1]


def test_series_is_monotone_and_submultiplicative():
    g = growth(builtin("mnote-8letters"), 5)["gamma"]
    assert all(a <= b for a, b in zip(g, g[1:]))
    for i in range(len(g)):
        for j in range(len(g) - i):
            assert g[i + j] <= g[i] * g[j]


def test_negative_radius_rejected():
    with pytest.raises(MachineError):
        growth(builtin("grigorchuk"), -1)
