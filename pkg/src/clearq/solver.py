"""Exact backward induction over the clearing levels.

Every event lowers the level ``2(i+j)+k+l`` by one, so the state graph is
acyclic and one sweep in ascending level order solves the optimality
equations (or a fixed policy's linear equations) exactly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .model import (
    ModelParams,
    State,
    StateSpace,
    check_feasible,
    is_decision_state,
    state_space,
)

OPTIMAL = "optimal"


@dataclass(frozen=True)
class ValueTable:
    """Expected clearing cost for every state with level <= ``m_max``.

    ``actions`` is 0/1 at decision states and -1 elsewhere.  ``mode`` is
    ``"optimal"`` or the policy label the values were computed under.
    """

    params: ModelParams
    m_max: int
    values: np.ndarray
    actions: np.ndarray
    mode: str = OPTIMAL
    space: StateSpace = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.space is None:
            object.__setattr__(self, "space", state_space(self.params.cp, self.m_max))

    @property
    def is_optimal(self) -> bool:
        return self.mode == OPTIMAL

    def _index(self, state) -> int:
        state = State(*state)
        try:
            return self.space.index[state]
        except KeyError:
            check_feasible(self.params, state)
            raise ValueError(
                f"state {tuple(state)} has level {state.level} > m_max={self.m_max}"
            ) from None

    def value(self, state) -> float:
        return float(self.values[self._index(state)])

    def action(self, state) -> int:
        a = int(self.actions[self._index(state)])
        if a < 0:
            raise ValueError(f"state {tuple(state)} is not a decision state")
        return a

    def to_dict(self) -> dict:
        entries = []
        for n, s in enumerate(self.space.states):
            entry = {"state": list(s), "value": float(self.values[n])}
            if self.actions[n] >= 0:
                entry["action"] = int(self.actions[n])
            entries.append(entry)
        return {"params": self.params.to_dict(), "m_max": self.m_max, "mode": self.mode, "entries": entries}

    def to_json(self, **kwargs) -> str:
        # repr(float) is the shortest round-tripping form (at most 17 significant digits)
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "ValueTable":
        params = ModelParams.from_dict(data["params"])
        m_max = int(data["m_max"])
        space = state_space(params.cp, m_max)
        values = np.full(len(space), np.nan)
        actions = np.full(len(space), -1, dtype=np.int8)
        for entry in data["entries"]:
            n = space.index[State(*entry["state"])]
            values[n] = float(entry["value"])
            if "action" in entry:
                actions[n] = int(entry["action"])
        if np.isnan(values).any():
            raise ValueError("value table is missing states")
        return cls(params, m_max, values, actions, data.get("mode", OPTIMAL), space)

    @classmethod
    def from_json(cls, text: str) -> "ValueTable":
        return cls.from_dict(json.loads(text))


def _sweep(params: ModelParams, space: StateSpace, fixed_actions: Optional[np.ndarray]):
    rj, rk, rl, cost = space.rates(params)
    d = rj + rk + rl
    d[0] = 1.0  # zero state: no events, value fixed at 0
    to_k, to_l, s1, s2 = space.succ
    values = np.zeros(len(space))
    actions = np.full(len(space), -1, dtype=np.int8)
    if fixed_actions is not None:
        actions[space.decision] = fixed_actions[space.decision]
    for sl in space.layer_slices():
        if sl.start == 0:
            continue
        v_noncollab = values[to_k[sl]]
        v_collab = values[to_l[sl]]
        if fixed_actions is None:
            collab = v_collab < v_noncollab
            actions[sl] = np.where(space.decision[sl], collab, -1)
        else:
            collab = actions[sl] == 1
        v_triage = np.where(collab, v_collab, v_noncollab)
        values[sl] = (cost[sl] + rj[sl] * v_triage + rk[sl] * values[s1[sl]] + rl[sl] * values[s2[sl]]) / d[sl]
    return values, actions


def solve_optimal(params: ModelParams, m_max: int) -> ValueTable:
    """Optimal values and actions for all states up to level ``m_max``.

    Ties between the two routing options resolve to 0 (independent care).
    """
    space = state_space(params.cp, m_max)
    values, actions = _sweep(params, space, None)
    return ValueTable(params, m_max, values, actions, OPTIMAL, space)


def evaluate_actions(params: ModelParams, m_max: int, actions: np.ndarray, label: str) -> ValueTable:
    """Values of the stationary policy given by a per-state action array."""
    space = state_space(params.cp, m_max)
    actions = np.asarray(actions)
    chosen = actions[space.decision]
    if chosen.shape[0] and not np.isin(chosen, (0, 1)).all():
        raise ValueError(f"policy {label!r} returned an action outside {{0, 1}}")
    values, acts = _sweep(params, space, actions)
    return ValueTable(params, m_max, values, acts, label, space)


def evaluate_policy(params: ModelParams, policy, m_max: int) -> ValueTable:
    from .policies import PolicySpec, policy_actions

    if isinstance(policy, str):
        policy = PolicySpec.parse(policy)
    space = state_space(params.cp, m_max)
    return evaluate_actions(params, m_max, policy_actions(policy, params, space), policy.label)


def value_difference(table: ValueTable, state) -> float:
    """Cost of routing the finishing triage patient alone minus routing them to the GP.

    Positive means collaboration is cheaper.
    """
    state = State(*state)
    if not table.is_optimal:
        raise ValueError("value difference is defined on the optimal value table")
    if not is_decision_state(state, table.params):
        raise ValueError(f"state {tuple(state)} is not a decision state")
    i, j, k, l = state
    return table.value((i, j - 1, k + 1, l)) - table.value((i, j - 1, k, l + 1))


def bellman_residual(table: ValueTable) -> float:
    """Largest relative violation of the equations that define ``table``."""
    space, params, v = table.space, table.params, table.values
    rj, rk, rl, cost = space.rates(params)
    d = rj + rk + rl
    to_k, to_l, s1, s2 = space.succ
    if table.is_optimal:
        v_triage = np.minimum(v[to_k], v[to_l])
    else:
        v_triage = np.where(table.actions == 1, v[to_l], v[to_k])
    nz = np.arange(len(space)) > 0
    rhs = np.zeros(len(space))
    rhs[nz] = (cost[nz] + rj[nz] * v_triage[nz] + rk[nz] * v[s1[nz]] + rl[nz] * v[s2[nz]]) / d[nz]
    resid = np.abs(v - rhs) / np.maximum(1.0, np.abs(v))
    return float(resid.max())


@dataclass(frozen=True)
class ThresholdReport:
    fixed: tuple
    i_max: int
    actions: tuple
    sign_changes: tuple
    stabilized_action: Optional[int]

    @property
    def stabilized(self) -> bool:
        return self.stabilized_action is not None

    def describe_stabilized(self) -> str:
        if self.stabilized_action is None:
            return f"not stabilized within i_max={self.i_max}"
        return str(self.stabilized_action)

    def to_dict(self) -> dict:
        return {
            "fixed": list(self.fixed),
            "i_max": self.i_max,
            "action_sequence": list(self.actions),
            "sign_change_positions": list(self.sign_changes),
            "stabilized_action": self.describe_stabilized() if self.stabilized_action is None else self.stabilized_action,
        }


def find_threshold(params: ModelParams, j: int, k: int, l: int, i_max: int,
                   min_tail: Optional[int] = None) -> ThresholdReport:
    """Scan the optimal action at ``(i, j, k, l)`` for ``i = 0..i_max``.

    The tail action counts as stabilized when the last run of equal actions
    covers at least ``min_tail`` values of ``i`` (default: a quarter of the
    scan, at least 2).
    """
    if i_max < 0:
        raise ValueError("i_max must be nonnegative")
    if j < 1 or j + k + l != params.cp or min(k, l) < 0:
        raise ValueError(f"(j, k, l) = {(j, k, l)} must have j >= 1 and j + k + l = cp = {params.cp}")
    table = solve_optimal(params, State(i_max, j, k, l).level)
    acts = tuple(table.action((i, j, k, l)) for i in range(i_max + 1))
    changes = tuple(i for i in range(1, i_max + 1) if acts[i] != acts[i - 1])
    if min_tail is None:
        min_tail = max(2, (i_max + 1) // 4)
    last_run = i_max + 1 - (changes[-1] if changes else 0)
    stabilized = acts[-1] if last_run >= min(min_tail, i_max + 1) else None
    return ThresholdReport((j, k, l), i_max, acts, changes, stabilized)
