"""Benchmark sweep: parameter grid, all-policy evaluation, relative errors and block statistics."""
from __future__ import annotations

import csv
import io
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .model import ModelParams, State
from .policies import BENCHMARKS, PolicySpec, policy_actions
from .solver import evaluate_actions, solve_optimal

DEFAULT_STAFFING = ((2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3))
RECORD_FIELDS = ("config_id", "cp", "cg", "h0", "h2", "mu0", "mu2", "i", "j", "k", "l",
                 "policy", "v_opt", "v_pi", "err_pct")
STATS_FIELDS = ("cp", "cg", "regime", "policy", "n", "max_err", "avg_err", "std_err")

# regime labels; mu2 == mu1 belongs to the first one
SLOW_COLLAB = "mu1>=mu2"
FAST_COLLAB = "mu1<mu2"
REGIMES = (SLOW_COLLAB, FAST_COLLAB)

POLICY_TITLES = {"heur": "pi'", "heur-lin": "pi'_Lin"}


@dataclass(frozen=True)
class SweepConfig:
    staffing: tuple = DEFAULT_STAFFING
    h0_list: tuple = (0.05, 0.1, 0.2, 0.5, 1.0)
    h2_list: tuple = (0.1, 0.2, 0.5, 1.0, 1.5)
    mu0_list: tuple = (1.0, 2.0, 4.0, 8.0, 16.0)
    mu2_list: tuple = (1.6, 2.0, 3.2, 4.0, 5.0, 8.0, 10.0)
    h1: float = 1.0
    mu1: float = 4.0
    i0: int = 20
    policies: tuple = BENCHMARKS
    enforce_assumption: bool = True

    def __post_init__(self):
        for name in ("staffing", "h0_list", "h2_list", "mu0_list", "mu2_list", "policies"):
            value = tuple(getattr(self, name))
            if not value:
                raise ValueError(f"{name} must be nonempty")
            object.__setattr__(self, name, value)
        object.__setattr__(self, "staffing", tuple((int(a), int(b)) for a, b in self.staffing))
        if self.i0 < 0:
            raise ValueError("i0 must be nonnegative")


@dataclass(frozen=True)
class Combo:
    """One grid point (everything except the staffing pair)."""
    config_id: int
    h0: float
    h2: float
    mu0: float
    mu2: float
    h1: float
    mu1: float

    def params(self, cp: int, cg: int) -> ModelParams:
        return ModelParams(cp, cg, self.mu0, self.mu1, self.mu2, self.h0, self.h1, self.h2)

    @property
    def regime(self) -> str:
        return SLOW_COLLAB if self.mu2 <= self.mu1 else FAST_COLLAB


@dataclass(frozen=True)
class SweepRecord:
    config_id: int
    cp: int
    cg: int
    h0: float
    h2: float
    mu0: float
    mu2: float
    state: State
    policy: str
    v_opt: float
    v_pi: float
    err_pct: float
    mu1: float = field(default=4.0, compare=False)

    @property
    def regime(self) -> str:
        return SLOW_COLLAB if self.mu2 <= self.mu1 else FAST_COLLAB

    def row(self) -> list:
        return [self.config_id, self.cp, self.cg, self.h0, self.h2, self.mu0, self.mu2,
                *self.state, self.policy, repr(self.v_opt), repr(self.v_pi), repr(self.err_pct)]


@dataclass(frozen=True)
class BlockStats:
    cp: int
    cg: int
    regime: str
    policy: str
    n: int
    max_err: float
    avg_err: float
    std_err: float

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in STATS_FIELDS}


def build_grid(config: SweepConfig) -> list:
    """Cartesian product of (h0, h2, mu0, mu2), optionally keeping only h2/mu2 < h1/mu1."""
    combos = []
    for h0, h2, mu0, mu2 in itertools.product(config.h0_list, config.h2_list, config.mu0_list, config.mu2_list):
        if config.enforce_assumption and not h2 / mu2 < config.h1 / config.mu1:
            continue
        combos.append(Combo(len(combos), float(h0), float(h2), float(mu0), float(mu2),
                            float(config.h1), float(config.mu1)))
    return combos


def initial_states(cp: int, i0: int) -> list:
    """Decision states (i0, j, k, l) with j >= 1 and j + k + l = cp, in lexicographic order."""
    return [State(i0, j, k, cp - j - k) for j in range(1, cp + 1) for k in range(cp - j + 1)]


def _err_pct(v_pi: float, v_opt: float) -> float:
    return 100.0 * (v_pi - v_opt) / v_opt


def evaluate_combo(combo: Combo, cp: int, cg: int, i0: int, policies: Sequence[PolicySpec]) -> list:
    params = combo.params(cp, cg)
    starts = initial_states(cp, i0)
    m_max = max(s.level for s in starts)
    try:
        opt = solve_optimal(params, m_max)
        tables = []
        for spec in policies:
            if spec.kind == "optimal":
                tables.append(opt)
            else:
                tables.append(evaluate_actions(params, m_max, policy_actions(spec, params, opt.space), spec.label))
    except Exception as exc:
        raise RuntimeError(f"sweep failed for config {combo.config_id} (cp={cp}, cg={cg}, {params}): {exc}") from exc
    records = []
    for s in starts:
        v_opt = opt.value(s)
        for spec, table in zip(policies, tables):
            v_pi = table.value(s)
            records.append(SweepRecord(combo.config_id, cp, cg, combo.h0, combo.h2, combo.mu0, combo.mu2,
                                       s, spec.label, v_opt, v_pi, _err_pct(v_pi, v_opt), combo.mu1))
    return records


def _evaluate_chunk(args):
    combos, staffing, i0, policies = args
    out = []
    for combo in combos:
        for cp, cg in staffing:
            out.extend(evaluate_combo(combo, cp, cg, i0, policies))
    return out


def expected_record_count(config: SweepConfig) -> int:
    per_combo = sum(len(initial_states(cp, config.i0)) for cp, _ in config.staffing)
    return len(build_grid(config)) * per_combo * len(config.policies)


def run_sweep(config: SweepConfig, jobs: int = 1) -> list:
    """Evaluate every policy at every initial state of every combo and staffing pair.

    Records are ordered by (combo, staffing, state, policy) regardless of ``jobs``.
    """
    combos = build_grid(config)
    if jobs <= 1 or len(combos) < 2:
        records = _evaluate_chunk((combos, config.staffing, config.i0, config.policies))
    else:
        n_chunks = min(len(combos), jobs * 4)
        chunks = [combos[c::n_chunks] for c in range(n_chunks)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = pool.map(_evaluate_chunk, [(c, config.staffing, config.i0, config.policies) for c in chunks])
            records = [r for part in parts for r in part]
        staff_rank = {pair: n for n, pair in enumerate(config.staffing)}
        # within one (combo, staffing) group records are already in state/policy order
        records.sort(key=lambda r: (r.config_id, staff_rank[(r.cp, r.cg)]))
    expected = expected_record_count(config)
    if len(records) != expected:
        raise AssertionError(f"sweep produced {len(records)} records, expected {expected}")
    return records


def aggregate(records: Iterable[SweepRecord], ddof: int = 0) -> list:
    """Max/avg/std of err_pct per (staffing, regime, policy); ``ddof=0`` gives the population std."""
    groups: dict = {}
    records = list(records)
    if not records:
        raise ValueError("no records to aggregate")
    for r in records:
        groups.setdefault((r.cp, r.cg, r.regime, r.policy), []).append(r.err_pct)
    stats = []
    for (cp, cg, regime, policy), errs in groups.items():
        arr = np.asarray(errs)
        std = float(arr.std(ddof=ddof)) if arr.size > ddof else 0.0
        stats.append(BlockStats(cp, cg, regime, policy, int(arr.size), float(arr.max()), float(arr.mean()), std))
    return stats


def records_csv(records: Iterable[SweepRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RECORD_FIELDS)
    for r in records:
        writer.writerow(r.row())
    return buf.getvalue()


def stats_csv(stats: Iterable[BlockStats]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(STATS_FIELDS)
    for s in stats:
        writer.writerow([s.cp, s.cg, s.regime, s.policy, s.n, repr(s.max_err), repr(s.avg_err), repr(s.std_err)])
    return buf.getvalue()


def _fmt(x: float) -> str:
    text = f"{x:.2f}"
    return text[1:] if text.startswith("0.") else text


def format_table(stats: Sequence[BlockStats], regime: str, policies: Optional[Sequence[str]] = None,
                 staffing: Optional[Sequence[tuple]] = None) -> str:
    """Aligned text table for one regime: a row per (policy, statistic), a column per staffing pair."""
    index = {(s.cp, s.cg, s.regime, s.policy): s for s in stats}
    if staffing is None:
        staffing = sorted({(s.cp, s.cg) for s in stats if s.regime == regime})
    if policies is None:
        policies = list(dict.fromkeys(s.policy for s in stats if s.regime == regime))
    header = ["Policy", "Error"] + [f"({cp},{cg})" for cp, cg in staffing]
    rows = [header]
    for policy in policies:
        for name, attr in (("Max", "max_err"), ("Avg", "avg_err"), ("Std", "std_err")):
            cells = []
            for cp, cg in staffing:
                s = index.get((cp, cg, regime, policy))
                cells.append(_fmt(getattr(s, attr)) if s else "-")
            rows.append([POLICY_TITLES.get(policy, policy) if name == "Max" else "", name] + cells)
    widths = [max(len(row[c]) for row in rows) for c in range(len(header))]
    lines = [f"Relative errors (%) when {regime}"]
    for row in rows:
        lines.append("  ".join(cell.rjust(w) if c >= 2 else cell.ljust(w) for c, (cell, w) in enumerate(zip(row, widths))).rstrip())
    return "\n".join(lines) + "\n"


def format_tables(stats: Sequence[BlockStats], staffing: Sequence[tuple] = DEFAULT_STAFFING) -> str:
    return "\n".join(format_table(stats, regime, staffing=staffing) for regime in REGIMES)


def stats_lookup(stats: Iterable[BlockStats]) -> dict:
    return {(s.cp, s.cg, s.regime, s.policy): s for s in stats}
