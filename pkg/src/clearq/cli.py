"""Command-line front end (``clearq``)."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import experiments, heuristics
from .model import PARAM_KEYS, InfeasibleStateError, ModelParams, State, check_feasible
from .policies import PolicySpec, UnknownPolicyError
from .simulator import simulate_many
from .solver import evaluate_policy, solve_optimal, value_difference

EXIT_OK, EXIT_USAGE, EXIT_INPUT = 0, 1, 2


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _state_arg(text: str) -> State:
    try:
        return State.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _float_list(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _staffing_arg(text: str) -> tuple:
    pairs = []
    for chunk in text.replace(" ", "").split(";"):
        if not chunk:
            continue
        try:
            cp, cg = chunk.strip("()").split(",")
            pairs.append((int(cp), int(cg)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"staffing must look like '2,1;3,1', got {text!r}")
    return tuple(pairs)


def _add_param_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file with model parameters (flags override it)")
    for key in PARAM_KEYS:
        kind = int if key in ("cp", "cg") else float
        p.add_argument(f"--{key}", type=kind)


def _add_output_flags(p: argparse.ArgumentParser, formats=("json", "csv", "text"), default="text"):
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("--output", "-o", help="write to this file instead of standard output")


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}")


def load_params(args) -> ModelParams:
    data = {}
    if args.config:
        data = _read_json(args.config)
        if not isinstance(data, dict):
            raise InputError(f"{args.config} must contain a JSON object")
        data = data.get("params", data)
    for key in PARAM_KEYS:
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    missing = [key for key in PARAM_KEYS if key not in data]
    if missing:
        raise UsageError("missing parameter(s): " + ", ".join(f"--{k}" for k in missing))
    try:
        return ModelParams.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise InputError(f"invalid parameters: {exc}")


def _policy(text: str) -> PolicySpec:
    try:
        return PolicySpec.parse(text)
    except UnknownPolicyError as exc:
        raise InputError(str(exc))
    except OSError as exc:
        raise InputError(f"cannot read custom policy: {exc}")
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"bad custom policy file: {exc}")


def _decision(params: ModelParams, state: State) -> State:
    state = check_feasible(params, state)
    if state.j < 1:
        raise InputError(f"state {tuple(state)} is not a decision state (needs j >= 1)")
    return state


def _emit(args, text: str):
    if not text.endswith("\n"):
        text += "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _kv_text(rows) -> str:
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def _csv_rows(header, rows) -> str:
    return "\n".join([",".join(header)] + [",".join(str(x) for x in row) for row in rows])


def cmd_solve(args) -> int:
    params = load_params(args)
    state = check_feasible(params, args.state)
    table = solve_optimal(params, state.level)
    if args.format == "json":
        _emit(args, table.to_json())
    elif args.format == "csv":
        rows = [(*s, repr(float(v)), a if a >= 0 else "")
                for s, v, a in zip(table.space.states, table.values, table.actions)]
        _emit(args, _csv_rows(("i", "j", "k", "l", "value", "action"), rows))
    else:
        rows = [("state", ",".join(map(str, state))), ("m_max", table.m_max),
                ("states", len(table.space)), ("value", repr(table.value(state)))]
        if state.j >= 1:
            rows.append(("optimal action", table.action(state)))
        _emit(args, _kv_text(rows))
    return EXIT_OK


def advise_report(params: ModelParams, state: State) -> dict:
    i, j, k, l = state
    table = solve_optimal(params, state.level)
    report = {
        "state": list(state),
        "D": value_difference(table, state),
        "optimal_action": table.action(state),
        "H": heuristics.h_piecewise(params, state),
        "H_lin": heuristics.h_linear(params, state),
        "action_H": heuristics.action_h(params, state),
        "action_H_lin": heuristics.action_h_lin(params, state),
    }
    if k + l < params.cp:
        report["constants"] = heuristics.constants(params, k, l).to_dict()
        report["threshold_rule"] = heuristics.threshold_form(params, k, l).to_dict()
    return report


def cmd_advise(args) -> int:
    params = load_params(args)
    state = _decision(params, args.state)
    report = advise_report(params, state)
    if args.format == "json":
        _emit(args, json.dumps(report, indent=2))
        return EXIT_OK
    rows = [(key, report[key]) for key in ("D", "optimal_action", "H", "H_lin", "action_H", "action_H_lin")]
    for group in ("constants", "threshold_rule"):
        for key, value in report.get(group, {}).items():
            rows.append((f"{group}.{key}", value))
    if args.format == "csv":
        _emit(args, _csv_rows(("field", "value"), rows))
    else:
        _emit(args, f"state {','.join(map(str, state))}\n" + _kv_text(rows))
    return EXIT_OK


def cmd_eval(args) -> int:
    params = load_params(args)
    spec = _policy(args.policy)
    state = check_feasible(params, args.state)
    v_pi = evaluate_policy(params, spec, state.level).value(state)
    v_opt = solve_optimal(params, state.level).value(state)
    err = 100.0 * (v_pi - v_opt) / v_opt if v_opt > 0 else 0.0
    report = {"state": list(state), "policy": spec.label, "v_pi": v_pi, "v_opt": v_opt, "err_pct": err}
    if args.format == "json":
        _emit(args, json.dumps(report))
    elif args.format == "csv":
        _emit(args, _csv_rows(("i", "j", "k", "l", "policy", "v_pi", "v_opt", "err_pct"),
                              [(*state, spec.label, repr(v_pi), repr(v_opt), repr(err))]))
    else:
        _emit(args, _kv_text([("policy", spec.label), ("v_pi", repr(v_pi)), ("v_opt", repr(v_opt)),
                              ("err_pct", f"{err:.4f}")]))
    return EXIT_OK


def sweep_config(args) -> experiments.SweepConfig:
    kwargs = {}
    if args.sweep_config:
        data = _read_json(args.sweep_config)
        if not isinstance(data, dict):
            raise InputError(f"{args.sweep_config} must contain a JSON object")
        known = set(experiments.SweepConfig.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown sweep setting(s): {', '.join(sorted(unknown))}")
        kwargs.update(data)
        if "policies" in kwargs:
            kwargs["policies"] = tuple(_policy(p) for p in kwargs["policies"])
    for name in ("staffing", "h0_list", "h2_list", "mu0_list", "mu2_list", "i0", "h1", "mu1"):
        value = getattr(args, name, None)
        if value is not None:
            kwargs[name] = value
    if args.policies:
        kwargs["policies"] = tuple(_policy(p) for p in args.policies.split(","))
    if args.no_assumption:
        kwargs["enforce_assumption"] = False
    try:
        return experiments.SweepConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise InputError(f"invalid sweep settings: {exc}")


def _jobs(args) -> int:
    if args.jobs is not None:
        return args.jobs
    env = os.environ.get("CLEARQ_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"CLEARQ_JOBS must be an integer, got {env!r}")
    return 1


def cmd_sweep(args) -> int:
    config = sweep_config(args)
    records = experiments.run_sweep(config, jobs=_jobs(args))
    stats = experiments.aggregate(records, ddof=args.ddof)
    if args.stats:
        Path(args.stats).write_text(experiments.stats_csv(stats), encoding="utf-8", newline="\n")
    if args.format == "csv":
        _emit(args, experiments.records_csv(records))
    elif args.format == "json":
        _emit(args, json.dumps({"records": len(records), "stats": [s.to_dict() for s in stats]}, indent=2))
    else:
        _emit(args, experiments.format_tables(stats, config.staffing))
    return EXIT_OK


def cmd_tables(args) -> int:
    if args.no_assumption:
        raise UsageError("tables needs the cost-efficiency filter; drop --no-assumption or use sweep")
    config = sweep_config(args)
    stats = experiments.aggregate(experiments.run_sweep(config, jobs=_jobs(args)), ddof=args.ddof)
    _emit(args, experiments.format_tables(stats, config.staffing))
    return EXIT_OK


def cmd_simulate(args) -> int:
    params = load_params(args)
    spec = _policy(args.policy)
    state = check_feasible(params, args.state)
    result = simulate_many(params, spec, state, args.replications, args.seed)
    if args.format == "json":
        _emit(args, json.dumps(result.to_dict()))
    else:
        _emit(args, f"policy {spec.label} from {','.join(map(str, state))}: mean cost {result.describe()}")
    return EXIT_OK


def _add_sweep_flags(p: argparse.ArgumentParser):
    p.add_argument("--defaults", action="store_true", help="use the default benchmark grid (the default)")
    p.add_argument("--sweep-config", help="JSON file with SweepConfig fields")
    p.add_argument("--staffing", type=_staffing_arg, help="staffing pairs, e.g. '2,1;3,1'")
    p.add_argument("--h0-list", type=_float_list)
    p.add_argument("--h2-list", type=_float_list)
    p.add_argument("--mu0-list", type=_float_list)
    p.add_argument("--mu2-list", type=_float_list)
    p.add_argument("--h1", type=float)
    p.add_argument("--mu1", type=float)
    p.add_argument("--i0", type=int, help="initial upstream queue (default 20)")
    p.add_argument("--policies", help="comma-separated policies (default: heur,heur-lin,pi1,pi2,pi3,pi4)")
    p.add_argument("--no-assumption", action="store_true", help="keep combos where collaboration is not cheaper")
    p.add_argument("--jobs", type=int, help="worker processes (default: $CLEARQ_JOBS or 1)")
    p.add_argument("--ddof", type=int, default=0, choices=(0, 1), help="0: population std, 1: sample std")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="clearq", description="Exact and heuristic routing for a two-stage clearing queue.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="optimal value table up to the level of --state")
    _add_param_flags(p)
    p.add_argument("--state", type=_state_arg, required=True)
    _add_output_flags(p, default="json")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("advise", help="exact and heuristic routing advice at a decision state")
    _add_param_flags(p)
    p.add_argument("--state", type=_state_arg, required=True)
    _add_output_flags(p)
    p.set_defaults(func=cmd_advise)

    p = sub.add_parser("eval", help="value of a policy and its gap to the optimum")
    _add_param_flags(p)
    p.add_argument("--state", type=_state_arg, required=True)
    p.add_argument("--policy", required=True)
    _add_output_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="benchmark sweep: records CSV and block statistics")
    _add_sweep_flags(p)
    p.add_argument("--stats", help="also write block statistics CSV to this file")
    _add_output_flags(p, default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of a policy's cost")
    _add_param_flags(p)
    p.add_argument("--state", type=_state_arg, required=True)
    p.add_argument("--policy", required=True)
    p.add_argument("--replications", "-n", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    _add_output_flags(p, formats=("json", "text"))
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tables", help="relative-error tables for both service-rate regimes")
    _add_sweep_flags(p)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_tables)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "replications", 1) < 1:
            raise UsageError("--replications must be at least 1")
        if getattr(args, "jobs", None) is not None and args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        return args.func(args)
    except UsageError as exc:
        print(f"clearq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, InfeasibleStateError) as exc:
        print(f"clearq: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
