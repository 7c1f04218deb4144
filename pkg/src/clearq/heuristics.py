"""Closed-form approximations of the value difference and the policies they induce.

``h_piecewise`` and ``h_linear`` estimate the sign of
``v(i, j-1, k+1, l) - v(i, j-1, k, l+1)`` without solving the MDP.  For
``l >= cg`` they blend a slow-triage estimate with a fast-triage estimate
using the probability ``w`` that the next event is a triage completion.
``deterministic_area_oracle`` replays the fluid two-system comparison the
slow-triage estimate is built on, so the ceiling formulas can be checked
against an explicit trace.
"""
from __future__ import annotations

import enum
import heapq
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional

from .model import ModelParams, State, check_feasible


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


@dataclass(frozen=True)
class HeuristicConstants:
    """Constants of the approximation for the ``(k, l)`` column with ``j = cp - k - l``.

    Fields that only exist when every GP is busy (``b_l``, ``c_l``, ``y_l``
    and ``ell_prime``) are ``None`` for ``l < cg``; ``ell_prime`` also needs
    ``c > 0``.
    """

    k: int
    l: int
    j_implied: int
    b: float
    c: float
    c_prime: float
    b_prime: float
    w: float
    b_l: Optional[float] = None
    c_l: Optional[float] = None
    y_l: Optional[float] = None
    ell_prime: Optional[int] = None

    def to_dict(self) -> dict:
        return asdict(self)


def largest_below(cg: int, mu1: float, mu2: float) -> int:
    """Largest integer ``n`` with ``n * mu1 < cg * mu2``, compared exactly."""
    ratio = Fraction(cg) * Fraction(mu2) / Fraction(mu1)
    return math.ceil(ratio) - 1


def constants(params: ModelParams, k: int, l: int) -> HeuristicConstants:
    p = params
    if k < 0 or l < 0:
        raise ValueError("k and l must be nonnegative")
    if k + l >= p.cp:
        raise ValueError("no deciding NP: k + l must be at most cp - 1")
    j = p.cp - k - l
    b = p.h1 / p.mu1 - p.h2 / p.mu2
    c = p.h0 / p.cp * (1 / p.mu1 - 1 / p.mu2)
    c_prime = -p.h0 / (p.cg * p.mu2)
    b_prime = (p.h1 - p.h2) / p.mu1 - p.cp * p.h2 / (p.cg * p.mu2)
    w = j * p.mu0 / (j * p.mu0 + k * p.mu1 + p.cg * p.mu2)
    extra = {}
    if l >= p.cg:
        extra["b_l"] = p.h1 / p.mu1 - (l + 1) / p.cg * p.h2 / p.mu2
        extra["c_l"] = p.h0 / p.cp * (1 / p.mu1 - (l + 1) / (p.cg * p.mu2))
        extra["y_l"] = p.cp - l - 1 + p.cg * p.mu2 / p.mu1
        if c > 0:
            extra["ell_prime"] = largest_below(p.cg, p.mu1, p.mu2)
    return HeuristicConstants(k=k, l=l, j_implied=j, b=b, c=c, c_prime=c_prime,
                              b_prime=b_prime, w=w, **extra)


def _decision_state(params: ModelParams, state) -> State:
    state = check_feasible(params, state)
    if state.j < 1:
        raise ValueError(f"state {tuple(state)} is not a decision state")
    return state


def upstream_slow_triage(params: ModelParams, state) -> float:
    """Upstream holding-cost difference of the slow-triage fluid comparison.

    For ``l < cg`` the comparison has no GP blocking and needs ``mu1 >= mu2``;
    for ``l >= cg`` the three regimes are keyed on how the independent
    service time compares with the collaborative sojourn.
    """
    p = params
    i, j, k, l = state
    if l < p.cg:
        return _ceil_div(i - k, p.cp) * (1 / p.mu1 - 1 / p.mu2) * p.h0
    c = p.h0 / p.cp * (1 / p.mu1 - 1 / p.mu2)
    c_l = p.h0 / p.cp * (1 / p.mu1 - (l + 1) / (p.cg * p.mu2))
    wait = 1 / (p.cg * p.mu2)
    if c <= 0:
        head = _ceil_div(i - k, p.cp) * (1 / p.mu1 - 1 / p.mu2)
        tail = sum(_ceil_div(i - k - r, p.cp) for r in range(p.cg, l + 1)) * wait
        return (head - tail) * p.h0
    if c_l <= 0:
        lp = largest_below(p.cg, p.mu1, p.mu2)
        head = _ceil_div(i - k - lp, p.cp) * (1 / p.mu1 - (lp + 1) * wait)
        tail = sum(_ceil_div(i - k - r, p.cp) for r in range(lp + 1, l + 1)) * wait
        return (head - tail) * p.h0
    return _ceil_div(i - l, p.cp) * (1 / p.mu1 - (l + 1) * wait) * p.h0


def _fast_triage(cst: HeuristicConstants, i: int) -> float:
    return (i - cst.y_l) * cst.c_prime + cst.b_prime


def _is_degenerate(cst: HeuristicConstants) -> bool:
    return cst.c_l <= 0 and cst.b_l <= 0


def h_piecewise(params: ModelParams, state) -> float:
    """Piecewise-linear estimate of the value difference (ceiling form)."""
    i, j, k, l = _decision_state(params, state)
    if i == 0:
        p = params
        if l < p.cg:
            return p.h1 / p.mu1 - p.h2 / p.mu2
        return p.h1 / p.mu1 - (l + 1) / p.cg * p.h2 / p.mu2
    cst = constants(params, k, l)
    if l < params.cg:
        if cst.c <= 0:
            return upstream_slow_triage(params, (i, j, k, l)) + cst.b
        return cst.b
    if _is_degenerate(cst):
        return -1.0
    slow = upstream_slow_triage(params, (i, j, k, l)) + cst.b_l
    return cst.w * _fast_triage(cst, i) + (1 - cst.w) * slow


def h_linear(params: ModelParams, state) -> float:
    """Linear-in-``i`` estimate of the value difference."""
    i, j, k, l = _decision_state(params, state)
    if i == 0:
        return h_piecewise(params, (i, j, k, l))
    cst = constants(params, k, l)
    if l < params.cg:
        return i * cst.c + cst.b
    if _is_degenerate(cst):
        return -1.0
    return cst.w * _fast_triage(cst, i) + (1 - cst.w) * (i * cst.c_l + cst.b_l)


def action_h(params: ModelParams, state) -> int:
    return int(h_piecewise(params, state) > 0)


def action_h_lin(params: ModelParams, state) -> int:
    return int(h_linear(params, state) > 0)


class RuleKind(str, enum.Enum):
    ALWAYS_NONCOLLAB = "always_noncollab"
    ALWAYS_COLLAB = "always_collab"
    COLLAB_BELOW = "collab_below"
    COLLAB_ABOVE = "collab_above"


def _root(b: float, c: float) -> float:
    """Where ``i*c + b`` changes sign, with the degenerate slopes mapped to 0 / inf."""
    if c != 0:
        return -b / c
    return 0.0 if b <= 0 else math.inf


@dataclass(frozen=True)
class ThresholdRule:
    """Action of the linear heuristic as a function of the upstream queue ``i``.

    ``kind``/``threshold`` describe ``i >= 1``.  With an empty queue the
    heuristic falls back to the one-service cost comparison, kept in
    ``base_action``; it can disagree with the linear rule when ``l >= cg``.
    """

    kind: RuleKind
    threshold: Optional[float] = None
    base_action: int = 0
    c_tilde: Optional[float] = None
    b_tilde: Optional[float] = None
    R1: Optional[float] = None
    R2: Optional[float] = None

    def action(self, i: int) -> int:
        if i == 0:
            return self.base_action
        if self.kind is RuleKind.ALWAYS_NONCOLLAB:
            return 0
        if self.kind is RuleKind.ALWAYS_COLLAB:
            return 1
        if self.kind is RuleKind.COLLAB_BELOW:
            return int(i < self.threshold)
        return int(i > self.threshold)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["kind"] = self.kind.value
        return {key: (str(v) if isinstance(v, float) and math.isinf(v) else v) for key, v in out.items()}


def threshold_form(params: ModelParams, k: int, l: int) -> ThresholdRule:
    """Explicit threshold rule reproducing ``action_h_lin`` on the ``(k, l)`` column."""
    p = params
    cst = constants(p, k, l)
    r1 = None
    if p.mu1 != p.mu2 and p.h0 > 0:
        r1 = -(cst.b * p.cp) / ((1 / p.mu1 - 1 / p.mu2) * p.h0)
    if l < p.cg:
        base = int(cst.b > 0)
        b, c = cst.b, cst.c
        # when collaboration is the cheaper single service: mu1 > mu2 gives
        # c < 0 (threshold R1), otherwise c >= 0 and collaboration always wins
        if c < 0 and b > 0:
            return ThresholdRule(RuleKind.COLLAB_BELOW, _root(b, c), base, R1=r1)
        if c > 0 and b <= 0:
            return ThresholdRule(RuleKind.COLLAB_ABOVE, _root(b, c), base, R1=r1)
        kind = RuleKind.ALWAYS_COLLAB if b > 0 else RuleKind.ALWAYS_NONCOLLAB
        return ThresholdRule(kind, None, base, R1=r1)
    base = int(cst.b_l > 0)
    w = cst.w
    c_tilde = w * cst.c_prime + (1 - w) * cst.c_l
    b_tilde = w * (-cst.y_l * cst.c_prime + cst.b_prime) + (1 - w) * cst.b_l
    r2 = _root(b_tilde, c_tilde)
    diag = dict(c_tilde=c_tilde, b_tilde=b_tilde, R1=r1, R2=r2)
    if _is_degenerate(cst):
        return ThresholdRule(RuleKind.ALWAYS_NONCOLLAB, None, base, **diag)
    if c_tilde <= 0:
        return ThresholdRule(RuleKind.COLLAB_BELOW, r2, base, **diag)
    return ThresholdRule(RuleKind.COLLAB_ABOVE, r2, base, **diag)


class OracleMode(str, enum.Enum):
    NO_INITIAL_BLOCK = "no_initial_block"
    INITIAL_BLOCK = "initial_block"


def _upstream_area(params: ModelParams, start: State, blocking: bool) -> float:
    """Integral of the upstream head count of a fluid run under always-collaborative control.

    Service times equal the mean sojourn times of the stochastic stations.
    With ``blocking`` the pairs initially at the GP station leave in FIFO
    order, the ``p``-th at ``max(p, cg) / (cg * mu2)``; every later
    collaborative service takes ``1 / mu2``.
    """
    p = params
    t_triage, t_solo, t_collab = 1 / p.mu0, 1 / p.mu1, 1 / p.mu2
    i, j, k, l = start
    events = []  # (time, seq, kind); kind "free": an NP returns upstream, "done": a triage completes
    seq = 0

    def push(t, kind):
        nonlocal seq
        heapq.heappush(events, (t, seq, kind))
        seq += 1

    for _ in range(j):
        push(t_triage, "done")
        push(t_triage + t_collab, "free")
    for _ in range(k):
        push(t_solo, "free")
    for pos in range(1, l + 1):
        push(max(pos, p.cg) / (p.cg * p.mu2) if blocking else t_collab, "free")

    waiting, upstream = i, i + j
    area, clock = 0.0, 0.0
    while events and upstream > 0:
        t, _, kind = heapq.heappop(events)
        area += upstream * (t - clock)
        clock = t
        if kind == "done":
            upstream -= 1
        elif waiting > 0:
            waiting -= 1
            push(t + t_triage, "done")
            push(t + t_triage + t_collab, "free")
    return area


def deterministic_area_oracle(params: ModelParams, state, mode=OracleMode.NO_INITIAL_BLOCK) -> float:
    """``h0`` times the upstream-area difference between the two fluid systems.

    System 1 starts after routing the finishing triage patient to
    independent care, system 2 after routing them to the GP; both then
    collaborate at every later decision.  ``NO_INITIAL_BLOCK`` ignores GP
    capacity entirely; ``INITIAL_BLOCK`` queues the pairs already at the GP
    station and matches the closed form when triage is slower than any
    initial downstream service.
    """
    mode = OracleMode(mode)
    i, j, k, l = _decision_state(params, state)
    if mode is OracleMode.NO_INITIAL_BLOCK:
        if params.mu1 < params.mu2:
            raise ValueError("the no-blocking comparison needs mu1 >= mu2")
        blocking = False
    else:
        if l < params.cg:
            raise ValueError("the initial-blocking comparison needs l >= cg")
        blocking = True
    one = _upstream_area(params, State(i, j - 1, k + 1, l), blocking)
    two = _upstream_area(params, State(i, j - 1, k, l + 1), blocking)
    return params.h0 * (one - two)
