"""Problem instance, state space and transition structure of the clearing queue.

Patients wait upstream (``i``), are triaged by a nurse practitioner (``j``),
and then either finish with the NP alone (station 1, ``k``) or queue for a
joint NP/GP service (station 2, ``l``).  Each NP stays with one patient for
the whole visit, so ``j + k + l <= cp``.  There are no arrivals: every event
completes one service stage and the system eventually empties.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional

import numpy as np

PARAM_KEYS = ("cp", "cg", "mu0", "mu1", "mu2", "h0", "h1", "h2")


class InfeasibleStateError(ValueError):
    """Raised when a state is outside the feasible set for the given staffing."""


@dataclass(frozen=True)
class ModelParams:
    cp: int
    cg: int
    mu0: float
    mu1: float
    mu2: float
    h0: float
    h1: float
    h2: float

    def __post_init__(self):
        for name in ("cp", "cg"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        for name in ("mu0", "mu1", "mu2"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite rate, got {value!r}")
            object.__setattr__(self, name, value)
        for name in ("h0", "h1", "h2"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be a finite nonnegative cost, got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def prefers_collab(self) -> bool:
        """Whether a single collaborative service is cheaper than an independent one."""
        return self.h1 / self.mu1 > self.h2 / self.mu2

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ModelParams":
        missing = [key for key in PARAM_KEYS if key not in data]
        if missing:
            raise ValueError(f"missing parameter(s): {', '.join(missing)}")
        return cls(**{key: data[key] for key in PARAM_KEYS})


class State(NamedTuple):
    i: int
    j: int
    k: int
    l: int

    @property
    def level(self) -> int:
        """Number of service completions left before the system is empty."""
        return 2 * (self.i + self.j) + self.k + self.l

    def to_list(self) -> list:
        return [self.i, self.j, self.k, self.l]

    @classmethod
    def parse(cls, text: str) -> "State":
        parts = [p for p in text.replace(" ", "").strip("()[]").split(",") if p]
        if len(parts) != 4:
            raise ValueError(f"state must have four components i,j,k,l, got {text!r}")
        return cls(*(int(p) for p in parts))


ZERO = State(0, 0, 0, 0)


def is_feasible(params: ModelParams, state: State) -> bool:
    i, j, k, l = state
    if min(state) < 0:
        return False
    busy = j + k + l
    return (i == 0 and busy < params.cp) or busy == params.cp


def check_feasible(params: ModelParams, state: State) -> State:
    state = State(*state)
    if not is_feasible(params, state):
        raise InfeasibleStateError(f"state {tuple(state)} is infeasible for cp={params.cp}")
    return state


def is_decision_state(state: State, params: Optional[ModelParams] = None) -> bool:
    """True when a triage is in progress, i.e. a routing decision is pending.

    Feasibility is checked as well when ``params`` is supplied.
    """
    state = State(*state)
    if params is not None and not is_feasible(params, state):
        return False
    return min(state) >= 0 and state.j >= 1


def total_rate(params: ModelParams, state: State) -> float:
    i, j, k, l = check_feasible(params, state)
    if (j, k, l) == (0, 0, 0):
        raise ValueError("absorbing state has no rate")
    return j * params.mu0 + k * params.mu1 + min(l, params.cg) * params.mu2


def cost_rate(params: ModelParams, state: State) -> float:
    i, j, k, l = state
    return (i + j) * params.h0 + k * params.h1 + l * params.h2


class TransitionKind(enum.Enum):
    TRIAGE_DONE = "triage"
    STATION1_DONE = "station1"
    STATION2_DONE = "station2"


class Transition(NamedTuple):
    rate: float
    next: State
    kind: TransitionKind
    action: Optional[int] = None


def transitions(params: ModelParams, state: State, action: Optional[int] = None) -> list:
    """Outgoing transitions of a nonzero state; ``action`` routes the triage completion."""
    i, j, k, l = check_feasible(params, state)
    if (j, k, l) == (0, 0, 0):
        raise ValueError("absorbing state has no transitions")
    out = []
    if j >= 1:
        if action not in (0, 1):
            raise ValueError(f"decision state {tuple(state)} needs action 0 or 1, got {action!r}")
        nxt = State(i, j - 1, k + 1, l) if action == 0 else State(i, j - 1, k, l + 1)
        out.append(Transition(j * params.mu0, nxt, TransitionKind.TRIAGE_DONE, action))
    elif action is not None:
        raise ValueError(f"no decision is taken in state {tuple(state)} (j = 0)")
    if k >= 1:
        nxt = State(0, j, k - 1, l) if i == 0 else State(i - 1, j + 1, k - 1, l)
        out.append(Transition(k * params.mu1, nxt, TransitionKind.STATION1_DONE))
    if l >= 1:
        nxt = State(0, j, k, l - 1) if i == 0 else State(i - 1, j + 1, k, l - 1)
        out.append(Transition(min(l, params.cg) * params.mu2, nxt, TransitionKind.STATION2_DONE))
    return out


def _layer(cp: int, level: int) -> list:
    states = []
    for i in range(level // 2 + 1):
        for j in range(cp + 1):
            for k in range(cp + 1 - j):
                l = level - 2 * (i + j) - k
                if l < 0 or j + k + l > cp:
                    continue
                if i == 0 or j + k + l == cp:
                    states.append(State(i, j, k, l))
    return sorted(states)


def enumerate_states(params: ModelParams, m_max: int) -> list:
    """All feasible states with level <= m_max, one sorted list per level."""
    if m_max < 0:
        raise ValueError("m_max must be nonnegative")
    return [_layer(params.cp, level) for level in range(m_max + 1)]


class StateSpace:
    """Dense, level-ordered indexing of the states with level <= m_max.

    ``succ`` holds successor indices per state for the four event types
    (triage->station 1, triage->station 2, station-1 and station-2
    completion); missing events point at the zero state (index 0), whose
    value is 0, and always carry a zero rate.
    """

    def __init__(self, cp: int, m_max: int):
        if m_max < 0:
            raise ValueError("m_max must be nonnegative")
        self.cp, self.m_max = cp, m_max
        layers = [_layer(cp, level) for level in range(m_max + 1)]
        self.states = [s for layer in layers for s in layer]
        self.bounds = np.cumsum([0] + [len(layer) for layer in layers])
        self.index = {s: n for n, s in enumerate(self.states)}
        arr = np.array(self.states, dtype=np.int64).reshape(-1, 4)
        self.i, self.j, self.k, self.l = arr.T.copy()
        self.i_max = int(self.i.max())

        succ = np.zeros((4, len(self.states)), dtype=np.int64)
        for n, (i, j, k, l) in enumerate(self.states):
            if j >= 1:
                succ[0, n] = self.index[State(i, j - 1, k + 1, l)]
                succ[1, n] = self.index[State(i, j - 1, k, l + 1)]
            if k >= 1:
                succ[2, n] = self.index[State(0, j, k - 1, l) if i == 0 else State(i - 1, j + 1, k - 1, l)]
            if l >= 1:
                succ[3, n] = self.index[State(0, j, k, l - 1) if i == 0 else State(i - 1, j + 1, k, l - 1)]
        self.succ = succ
        self.decision = self.j >= 1
        for a in (self.i, self.j, self.k, self.l, self.succ, self.decision):
            a.setflags(write=False)

    def __len__(self) -> int:
        return len(self.states)

    def layer_slices(self):
        for level in range(self.m_max + 1):
            yield slice(int(self.bounds[level]), int(self.bounds[level + 1]))

    def rates(self, params: ModelParams):
        """Per-state event rates (triage, station 1, station 2) and holding-cost rate."""
        rj = self.j * params.mu0
        rk = self.k * params.mu1
        rl = np.minimum(self.l, params.cg) * params.mu2
        cost = (self.i + self.j) * params.h0 + self.k * params.h1 + self.l * params.h2
        return rj, rk, rl, cost

    def dense_lookup(self, values) -> np.ndarray:
        """Scatter per-state values into an ``[i, j, k, l]`` array (unused cells are -1)."""
        values = np.asarray(values)
        out = np.full((self.i_max + 1,) + (self.cp + 1,) * 3, -1, dtype=values.dtype)
        out[self.i, self.j, self.k, self.l] = values
        return out


@functools.lru_cache(maxsize=64)
def state_space(cp: int, m_max: int) -> StateSpace:
    return StateSpace(cp, m_max)
