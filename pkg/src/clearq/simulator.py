"""Seeded Monte Carlo simulation of the clearing system under a fixed policy.

Randomness is counter based.  Replication ``r`` of a run with seed ``s``
owns a SplitMix64 stream started from ``mix(s + (r + 1) * GAMMA)``; its
outputs ``2e`` and ``2e + 1`` drive the sojourn time and the event choice
of event ``e``.  Any replication can therefore be replayed on its own and
the result does not depend on how replications are batched.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import ModelParams, State, check_feasible, state_space
from .policies import PolicySpec, policy_actions

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GAMMA = np.uint64(GAMMA)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def stream_keys(seed: int, replications: np.ndarray) -> np.ndarray:
    """Starting state of each replication's SplitMix64 stream."""
    reps = np.asarray(replications, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix(np.uint64(seed & MASK64) + (reps + np.uint64(1)) * _GAMMA)


def uniforms(keys: np.ndarray, counter: int) -> np.ndarray:
    """Output number ``counter`` of each stream mapped to the open interval (0, 1)."""
    with np.errstate(over="ignore"):
        x = _mix(keys + np.uint64((counter + 1) & MASK64) * _GAMMA)
    return ((x >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53


class Stream(NamedTuple):
    seed: int
    replication: int = 0


@dataclass(frozen=True)
class SimResult:
    replications: int
    mean_cost: float
    std_error: float
    seed: int
    initial: State
    policy: PolicySpec
    se_available: bool = True

    def interval(self, z: float = 1.96) -> tuple:
        return self.mean_cost - z * self.std_error, self.mean_cost + z * self.std_error

    def describe(self) -> str:
        if not self.se_available:
            return f"{self.mean_cost:.6g} (single replication, no standard error)"
        return f"{self.mean_cost:.6g} +/- {1.96 * self.std_error:.3g} (95% CI, n={self.replications})"

    def to_dict(self) -> dict:
        return {
            "replications": self.replications,
            "mean_cost": self.mean_cost,
            "std_error": self.std_error if self.se_available else None,
            "seed": self.seed,
            "initial": list(self.initial),
            "policy": self.policy.label,
        }


def _as_spec(policy) -> PolicySpec:
    return PolicySpec.parse(policy) if isinstance(policy, str) else policy


def _run(params: ModelParams, spec: PolicySpec, initial: State, seed: int, reps: np.ndarray):
    """Simulate the given replications in lockstep; returns (costs, events per replication)."""
    n = len(reps)
    n_events = initial.level
    costs = np.zeros(n)
    if n_events == 0:
        return costs, np.zeros(n, dtype=np.int64)
    space = state_space(params.cp, n_events)
    lookup = space.dense_lookup(policy_actions(spec, params, space))
    keys = stream_keys(seed, reps)
    i = np.full(n, initial.i, dtype=np.int64)
    j = np.full(n, initial.j, dtype=np.int64)
    k = np.full(n, initial.k, dtype=np.int64)
    l = np.full(n, initial.l, dtype=np.int64)
    events = np.zeros(n, dtype=np.int64)
    e = 0
    alive = (j + k + l) > 0
    while alive.any():
        if e > n_events:
            raise AssertionError("replication did not empty after M(initial) events")
        rj = j * params.mu0
        rk = k * params.mu1
        rl = np.minimum(l, params.cg) * params.mu2
        d = np.where(alive, rj + rk + rl, 1.0)
        cost = (i + j) * params.h0 + k * params.h1 + l * params.h2
        costs += cost * (-np.log(uniforms(keys, 2 * e)) / d)
        pick = uniforms(keys, 2 * e + 1) * d
        triage = alive & (pick < rj)
        s1 = alive & ~triage & (pick < rj + rk)
        s2 = alive & ~triage & ~s1
        act = lookup[i, j, k, l]
        to_l = triage & (act == 1)
        to_k = triage & ~to_l
        # station completions free an NP, who starts triage if anyone waits
        refill = (s1 | s2) & (i > 0)
        j = j - triage + refill
        k = k + to_k - s1
        l = l + to_l - s2
        i = i - refill
        events += alive
        alive = (j + k + l) > 0
        e += 1
    return costs, events


def simulate_once(params: ModelParams, policy, initial, stream: Stream = Stream(0, 0)) -> float:
    """Total holding cost of one trajectory; identical to replication ``stream.replication`` of simulate_many."""
    initial = check_feasible(params, initial)
    costs, _ = _run(params, _as_spec(policy), initial, stream.seed, np.array([stream.replication]))
    return float(costs[0])


def simulate_many(params: ModelParams, policy, initial, n: int, seed: int = 0,
                  batch: int = 100_000) -> SimResult:
    """Mean cost and standard error over ``n`` independent replications."""
    if n < 1:
        raise ValueError("number of replications must be at least 1")
    initial = check_feasible(params, initial)
    spec = _as_spec(policy)
    parts = []
    for start in range(0, n, batch):
        reps = np.arange(start, min(n, start + batch), dtype=np.uint64)
        parts.append(_run(params, spec, initial, seed, reps)[0])
    costs = np.concatenate(parts)
    mean = float(np.mean(costs))
    if n == 1:
        return SimResult(1, mean, 0.0, seed, initial, spec, se_available=False)
    se = float(np.std(costs, ddof=1) / math.sqrt(n))
    return SimResult(n, mean, se, seed, initial, spec)


def event_counts(params: ModelParams, policy, initial, n: int, seed: int = 0) -> np.ndarray:
    """Number of events each of ``n`` replications executed before emptying."""
    initial = check_feasible(params, initial)
    return _run(params, _as_spec(policy), initial, seed, np.arange(n, dtype=np.uint64))[1]
