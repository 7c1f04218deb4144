"""Routing policies: the benchmark rules, the two heuristics, custom tables and the optimum."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import heuristics
from .model import ModelParams, State, StateSpace, is_decision_state, state_space

KINDS = ("pi1", "pi2", "pi3", "pi4", "heur", "heur-lin", "custom", "optimal")
DEFAULT_PI2_THRESHOLD = 10


class UnknownPolicyError(ValueError):
    pass


@dataclass(frozen=True)
class PolicySpec:
    """One evaluable policy.

    ``pi1`` never collaborates, ``pi2`` collaborates while the upstream
    queue ``i`` is below ``threshold``, ``pi3`` always collaborates,
    ``pi4`` collaborates only when a GP is idle, ``heur``/``heur-lin``
    follow the sign of the piecewise/linear approximation, ``custom``
    looks actions up in ``table`` and ``optimal`` uses the exact solver.
    """

    kind: str
    threshold: Optional[int] = None
    table: Optional[dict] = field(default=None, compare=False, hash=False)
    source: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnknownPolicyError(f"unknown policy {self.kind!r}")
        if self.kind == "pi2" and self.threshold is None:
            object.__setattr__(self, "threshold", DEFAULT_PI2_THRESHOLD)
        if self.kind == "custom" and self.table is None:
            raise ValueError("custom policy needs an action table")

    @property
    def label(self) -> str:
        if self.kind == "pi2":
            return f"pi2:{self.threshold}"
        if self.kind == "custom":
            return f"custom:{self.source}" if self.source else "custom"
        return self.kind

    def __str__(self) -> str:
        return self.label

    @classmethod
    def parse(cls, text: str) -> "PolicySpec":
        name, _, arg = text.strip().partition(":")
        name = name.lower()
        if name == "pi2":
            try:
                return cls("pi2", int(arg) if arg else DEFAULT_PI2_THRESHOLD)
            except ValueError:
                raise UnknownPolicyError(f"bad pi2 threshold in {text!r}") from None
        if name == "custom":
            if not arg:
                raise UnknownPolicyError("custom policy needs a path: custom:<file.json>")
            return cls("custom", table=load_action_table(arg), source=arg)
        if arg or name not in KINDS:
            raise UnknownPolicyError(f"unknown policy {text!r}")
        return cls(name)


BENCHMARKS = tuple(PolicySpec(k) for k in ("heur", "heur-lin", "pi1", "pi2", "pi3", "pi4"))


def load_action_table(path) -> dict:
    """Read ``{state: action}`` from a JSON file.

    Accepts either a list of ``{"state": [i, j, k, l], "action": a}`` objects
    or an exported value table (whose ``entries`` carry the actions).
    """
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    entries = data["entries"] if isinstance(data, dict) else data
    table = {}
    for entry in entries:
        if "action" in entry:
            table[State(*entry["state"])] = int(entry["action"])
    return table


def policy_action(spec: PolicySpec, params: ModelParams, state, oracle=None) -> int:
    """Action of ``spec`` at one decision state.

    ``oracle`` is a solved optimal value table used by ``optimal``; one is
    computed on demand when it is missing.
    """
    state = State(*state)
    if not is_decision_state(state, params):
        raise ValueError(f"state {tuple(state)} is not a decision state")
    i, j, k, l = state
    kind = spec.kind
    if kind == "pi1":
        return 0
    if kind == "pi2":
        return int(i < spec.threshold)
    if kind == "pi3":
        return 1
    if kind == "pi4":
        return int(l < params.cg)
    if kind == "heur":
        return heuristics.action_h(params, state)
    if kind == "heur-lin":
        return heuristics.action_h_lin(params, state)
    if kind == "custom":
        try:
            return spec.table[state]
        except KeyError:
            raise ValueError(f"custom policy has no action for state {tuple(state)}") from None
    if oracle is None or oracle.m_max < state.level:
        from .solver import solve_optimal

        oracle = solve_optimal(params, state.level)
    return oracle.action(state)


def policy_actions(spec: PolicySpec, params: ModelParams, space: StateSpace) -> np.ndarray:
    """Actions of ``spec`` at every state of ``space`` (-1 where no decision is taken)."""
    out = np.full(len(space), -1, dtype=np.int8)
    dec = space.decision
    kind = spec.kind
    if kind == "pi1":
        out[dec] = 0
    elif kind == "pi2":
        out[dec] = space.i[dec] < spec.threshold
    elif kind == "pi3":
        out[dec] = 1
    elif kind == "pi4":
        out[dec] = space.l[dec] < params.cg
    elif kind == "optimal":
        from .solver import solve_optimal

        out[:] = solve_optimal(params, space.m_max).actions
    else:
        for n in np.flatnonzero(dec):
            out[n] = policy_action(spec, params, space.states[n])
    return out


def policy_action_table(spec: PolicySpec, params: ModelParams, m_max: int) -> dict:
    space = state_space(params.cp, m_max)
    acts = policy_actions(spec, params, space)
    return {s: int(a) for s, a in zip(space.states, acts) if a >= 0}
