"""Minimax weight optimization: feasibility, progress, gradients."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mealybound.optimize import (
    MinimaxProblem,
    OptOptions,
    feasibility_slacks,
    gradient,
    objective,
    optimize,
    project_feasible,
)
from mealybound.search import SearchCaps, search_egg

from util import BARTHOLDI

FLOOR = 1e-4
MARGIN = 1e-6


@pytest.fixture(scope="module")
def grig_problem(request):
    from mealybound import formats
    from conftest import aux_for

    m = formats.builtin("grigorchuk")
    aux = aux_for("grigorchuk", m)
    _, eng = search_egg(m, aux, BARTHOLDI, 0.99)
    return MinimaxProblem.from_counts(eng.count_rows(), aux), aux


def _assert_feasible(p, pi):
    pi = np.asarray(pi)
    assert pi.sum() == pytest.approx(1.0, abs=1e-9)
    assert (pi >= FLOOR - 1e-12).all()
    _, tri, deviation = feasibility_slacks(p, pi, FLOOR, MARGIN)
    assert deviation <= 1e-9
    assert all(t >= -1e-9 for t in tri)


def test_result_is_feasible_and_never_worse(grig_problem):
    p, _ = grig_problem
    for start in ([0.25] * 4, [0.7, 0.1, 0.1, 0.1], BARTHOLDI):
        res = optimize(p, start=start, options=OptOptions(restarts=4, seed=1))
        _assert_feasible(p, res.weights)
        start_val, _ = objective(p, project_feasible(p, np.asarray(start)))
        assert res.eta <= start_val + 1e-12


def test_optimum_matches_the_known_level1_weights(grig_problem):
    p, _ = grig_problem
    res = optimize(p, start=[0.25] * 4, options=OptOptions(restarts=16, seed=0))
    assert res.eta == pytest.approx(0.8105362, abs=5e-4)
    l1 = sum(abs(a - b) for a, b in zip(res.weights, BARTHOLDI))
    assert l1 < 0.05


def test_same_seed_same_answer(grig_problem):
    p, _ = grig_problem
    a = optimize(p, start=[0.25] * 4, options=OptOptions(restarts=4, seed=7))
    b = optimize(p, start=[0.25] * 4, options=OptOptions(restarts=4, seed=7))
    assert a.weights == b.weights
    assert a.eta == b.eta


def test_provided_start_counts_as_a_restart(grig_problem):
    # starting at the known optimum can only stay at least as good, even
    # with zero random restarts beyond it
    p, _ = grig_problem
    res = optimize(p, start=BARTHOLDI, options=OptOptions(restarts=1, seed=3))
    base, _ = objective(p, project_feasible(p, np.asarray(BARTHOLDI)))
    assert res.eta <= base + 1e-12


def test_projection_is_idempotent_and_repairs(grig_problem):
    p, _ = grig_problem
    feasible = project_feasible(p, np.array([0.4, 0.3, 0.2, 0.1]))
    again = project_feasible(p, feasible)
    assert np.allclose(feasible, again, atol=1e-12)
    for raw in ([-1.0, 2.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0], [9.0, 0.0, 0.0, 0.0]):
        fixed = project_feasible(p, np.asarray(raw, dtype=float))
        _assert_feasible(p, fixed)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_random_starts_land_feasible(grig_problem, seed):
    p, _ = grig_problem
    rng = np.random.default_rng(seed)
    pi = project_feasible(p, rng.dirichlet(np.ones(4)))
    _assert_feasible(p, pi)


def test_gradient_matches_finite_differences(grig_problem):
    """The subgradient used by the optimizer must agree with central
    finite differences of the max ratio wherever the argmax is unique."""
    p, _ = grig_problem
    rng = np.random.default_rng(5)
    checked = 0
    while checked < 12:
        pi = project_feasible(p, rng.dirichlet(np.ones(4)))
        vals = [
            (np.dot(c, pi) / np.dot(n, pi))
            for n, c in zip(p.n_rows, p.c_rows)
        ]
        top = sorted(vals, reverse=True)
        if len(top) > 1 and top[0] - top[1] < 1e-4:
            continue  # tie: objective not differentiable here
        g = gradient(p, pi)
        h = 1e-6
        for j in range(4):
            e = np.zeros(4)
            e[j] = h
            fp, _ = objective(p, pi + e)
            fm, _ = objective(p, pi - e)
            fd = (fp - fm) / (2 * h)
            assert abs(fd - g[j]) <= 1e-6, (j, fd, g[j])
        checked += 1


def test_ties_average_when_requested(grig_problem):
    p, _ = grig_problem
    pi = project_feasible(p, np.array([0.25] * 4))
    g_single = gradient(p, pi, average_ties=False)
    g_avg = gradient(p, pi, average_ties=True)
    assert g_single.shape == g_avg.shape == (4,)


def test_floors_keep_every_weight_positive(grig_problem):
    # push hard toward a vertex; floors must hold in the answer
    p, _ = grig_problem
    res = optimize(
        p, start=[1.0, FLOOR, FLOOR, FLOOR], options=OptOptions(restarts=2, seed=2)
    )
    assert min(res.weights) >= FLOOR - 1e-12


def test_from_counts_shapes(grig_problem):
    p, aux = grig_problem
    assert p.n_weights == 4
    assert len(p.n_rows) == len(p.c_rows)
    assert len(p.triangles) > 0
