import json

import numpy as np
import pytest

from clearq.model import ModelParams, State
from clearq.simulator import Stream, event_counts, simulate_many, simulate_once, stream_keys, uniforms
from clearq.solver import evaluate_policy

P = ModelParams(3, 1, 2.0, 4.0, 3.0, 0.5, 1.0, 0.2)


def test_uniforms_open_interval_and_deterministic():
    keys = stream_keys(123, np.arange(10_000))
    u = uniforms(keys, 0)
    assert (u > 0).all() and (u < 1).all()
    assert np.array_equal(u, uniforms(stream_keys(123, np.arange(10_000)), 0))
    assert abs(u.mean() - 0.5) < 0.01
    assert not np.array_equal(u, uniforms(keys, 1))


def test_empty_system_costs_nothing():
    assert simulate_once(P, "pi1", (0, 0, 0, 0)) == 0.0
    assert event_counts(P, "pi1", (0, 0, 0, 0), 5).tolist() == [0] * 5


def test_zero_cost_rates():
    p = ModelParams(2, 1, 1.0, 2.0, 3.0, 0.0, 0.0, 0.0)
    assert simulate_many(p, "pi3", (4, 1, 0, 1), 100, seed=1).mean_cost == 0.0


def test_every_replication_runs_exactly_level_events():
    s = State(6, 1, 1, 1)
    for pol in ("pi1", "pi3", "heur"):
        counts = event_counts(P, pol, s, 2000, seed=9)
        assert (counts == s.level).all()


def test_same_seed_same_result():
    a = simulate_many(P, "heur", (5, 1, 1, 1), 3000, seed=42)
    b = simulate_many(P, "heur", (5, 1, 1, 1), 3000, seed=42)
    assert a == b
    assert simulate_many(P, "heur", (5, 1, 1, 1), 3000, seed=43).mean_cost != a.mean_cost


def test_batching_does_not_change_results():
    a = simulate_many(P, "pi4", (5, 1, 1, 1), 1000, seed=5)
    b = simulate_many(P, "pi4", (5, 1, 1, 1), 1000, seed=5, batch=77)
    assert a.mean_cost == pytest.approx(b.mean_cost, rel=1e-12)
    assert a.std_error == pytest.approx(b.std_error, rel=1e-9)


def test_simulate_once_replays_a_replication():
    many = [simulate_once(P, "pi2:3", (4, 1, 1, 1), Stream(8, r)) for r in range(4)]
    batch = simulate_many(P, "pi2:3", (4, 1, 1, 1), 4, seed=8)
    assert batch.mean_cost == pytest.approx(np.mean(many), rel=1e-12)


def test_single_replication_has_no_standard_error():
    r = simulate_many(P, "pi1", (2, 1, 1, 1), 1, seed=3)
    assert r.replications == 1 and r.std_error == 0.0 and not r.se_available
    assert json.loads(json.dumps(r.to_dict()))["std_error"] is None


def test_validation():
    with pytest.raises(ValueError):
        simulate_many(P, "pi1", (2, 1, 1, 1), 0)
    with pytest.raises(ValueError):
        simulate_many(P, "pi1", (2, 0, 0, 0), 10)


def test_two_stage_example_matches_exact_value():
    p = ModelParams(1, 1, 2.0, 4.0, 3.0, 0.5, 1.0, 0.2)
    r = simulate_many(p, "pi1", (0, 1, 0, 0), 100_000, seed=2024)
    assert abs(r.mean_cost - 0.5) <= 4 * r.std_error


@pytest.mark.parametrize("policy", ["pi1", "pi3", "heur-lin", "optimal"])
def test_agrees_with_exact_evaluation(policy):
    s = State(8, 1, 1, 1)
    exact = evaluate_policy(P, policy, s.level).value(s)
    r = simulate_many(P, policy, s, 40_000, seed=17)
    assert abs(r.mean_cost - exact) <= 4 * r.std_error
    lo, hi = r.interval(4.0)
    assert lo <= exact <= hi
