"""Batch strategies (target ladder, mid-search reweighting) and the
interactive session with checkpoints and replay."""
import json

import pytest

from mealybound.search import SearchCaps
from mealybound.strategies import Session, SessionError, run_opt, run_ovi

from util import BARTHOLDI


def test_opt_recovers_the_tuned_weights_from_uniform(grig):
    m, aux = grig
    run = run_opt(m, aux, [0.25] * 4, targets=[0.90], update=4)
    r = run.final
    assert r.status == "found"
    assert r.eta <= 0.812
    assert r.alpha <= 0.768
    l1 = sum(abs(a - b) for a, b in zip(r.weights_out, [0.3052, 0.3475, 0.2243, 0.1232]))
    assert l1 < 0.05


def test_ovi_with_frequent_updates_closes_at_radius_two(grig):
    m, aux = grig
    run = run_ovi(m, aux, [0.25] * 4, target=0.90, update=2)
    r = run.final
    assert r.status == "found"
    assert r.radius == 2
    assert r.egg_size == 4


def test_ladder_rounds_chain_their_weights(grig):
    m, aux = grig
    run = run_opt(m, aux, [0.25] * 4, targets=[0.95, 0.90], update=4)
    assert len(run.rounds) == 2
    assert run.rounds[1].weights_in == run.rounds[0].weights_out
    assert run.best_bound() is run.rounds[-1]


def test_failed_round_ends_the_ladder(grig):
    m, aux = grig
    run = run_opt(
        m, aux, [0.25] * 4, targets=[0.99, 0.90],
        caps=SearchCaps(max_radius=8),
    )
    # uniform weights with no reweighting cannot close, so round one stalls
    assert len(run.rounds) == 1
    assert run.final.status == "radius-exceeded"
    assert run.best_bound() is None
    assert run.final.result is not None
    assert run.final.result.status == "radius-exceeded"


def test_rounds_carry_full_results(grig):
    m, aux = grig
    run = run_opt(m, aux, BARTHOLDI, targets=[0.99])
    res = run.final.result
    assert res is not None
    assert res.radius == run.final.radius
    assert res.per_level_sizes


# -- interactive session ---------------------------------------------------


def _fresh(m, aux, **kw):
    return Session(m, aux, BARTHOLDI, target=0.99, **kw)


def test_two_expands_empty_the_frontier(grig):
    m, aux = grig
    s = _fresh(m, aux)
    s.expand()
    snap = s.expand()
    assert snap["yolk_size"] == 0
    assert snap["eta_max"] == pytest.approx(0.8105362, abs=1e-6)


def test_snapshot_is_pure(grig):
    m, aux = grig
    s = _fresh(m, aux)
    s.expand()
    a = json.dumps(s.snapshot(), sort_keys=True)
    b = json.dumps(s.snapshot(), sort_keys=True)
    assert a == b
    assert s.snapshot()["step"] == 1


def test_commands_advance_the_step_counter(grig):
    m, aux = grig
    s = _fresh(m, aux)
    assert s.snapshot()["step"] == 0
    s.expand()
    s.set_target(0.95)
    s.checkpoint()
    assert s.snapshot()["step"] == 3


def test_rollback_restores_and_prunes(grig):
    m, aux = grig
    s = _fresh(m, aux)
    s.expand()
    cp = s.checkpoint()
    cp_id = cp["checkpoint_id"]

    def strip(snap):
        return json.dumps(
            {k: v for k, v in snap.items() if k != "checkpoint_id"}, sort_keys=True
        )

    frozen = strip(cp)
    s.expand()
    s.checkpoint()
    assert s.snapshot()["checkpoints"] == [1, 2]
    back = s.rollback(cp_id)
    # state equals the checkpointed snapshot; later checkpoints are pruned
    assert strip(back) == frozen
    assert back["checkpoints"] == [cp_id]


def test_rollback_to_unknown_checkpoint_errors(grig):
    m, aux = grig
    s = _fresh(m, aux)
    with pytest.raises(SessionError):
        s.rollback(99)


def test_stop_blocks_further_commands(grig):
    m, aux = grig
    s = _fresh(m, aux)
    s.stop()
    assert s.snapshot()["stopped"] is True
    with pytest.raises(SessionError, match="stopped"):
        s.command({"op": "expand"})


def test_unknown_command_errors(grig):
    m, aux = grig
    s = _fresh(m, aux)
    with pytest.raises(SessionError, match="unknown"):
        s.command({"op": "fold"})


def test_selector_expand_processes_a_subset(grig):
    m, aux = grig
    full = _fresh(m, aux, caps=SearchCaps(max_radius=16))
    full.expand()
    all_processed = full.snapshot()["processed"]

    picky = _fresh(m, aux, caps=SearchCaps(max_radius=16))
    picky.expand(selector={"kind": "eta", "min": 1.5})
    some_processed = picky.snapshot()["processed"]
    assert 0 < some_processed < all_processed


def test_optimize_command_lowers_eta_max(grig):
    m, aux = grig
    s = Session(m, aux, [0.25] * 4, target=0.99)
    s.expand()
    s.expand()
    before = s.snapshot()["eta_max"]
    after = s.optimize()["eta_max"]
    assert after <= before + 1e-12
    assert s.snapshot()["weights"] != [0.25] * 4


def test_session_replay_from_journal_is_deterministic(grig):
    m, aux = grig
    commands = [
        {"op": "expand"},
        {"op": "set_target", "target": 0.95},
        {"op": "checkpoint"},
        {"op": "expand"},
        {"op": "optimize"},
        {"op": "rollback", "id": 1},
        {"op": "expand", "levels": 2},
    ]
    live = _fresh(m, aux)
    for cmd in commands:
        live.command(cmd)
    replayed = _fresh(m, aux)
    for cmd in commands:
        replayed.command(cmd)
    assert json.dumps(live.snapshot(), sort_keys=True) == json.dumps(
        replayed.snapshot(), sort_keys=True
    )


def test_snapshot_histogram_layout(grig):
    m, aux = grig
    s = _fresh(m, aux)
    s.expand()
    hist = s.snapshot()["eta_histogram"]
    assert len(hist) == 50
    assert all(isinstance(x, int) and x >= 0 for x in hist)
    assert sum(hist) == s.snapshot()["yolk_size"]
