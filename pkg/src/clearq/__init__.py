"""Exact solver, heuristics and benchmarks for a two-stage collaborative-care clearing queue."""
from .model import InfeasibleStateError, ModelParams, State, is_decision_state, is_feasible, transitions
from .policies import PolicySpec, policy_action
from .simulator import SimResult, simulate_many, simulate_once
from .solver import ValueTable, evaluate_policy, find_threshold, solve_optimal, value_difference

__all__ = [
    "InfeasibleStateError", "ModelParams", "State", "is_decision_state", "is_feasible", "transitions",
    "PolicySpec", "policy_action", "SimResult", "simulate_many", "simulate_once",
    "ValueTable", "evaluate_policy", "find_threshold", "solve_optimal", "value_difference",
]
