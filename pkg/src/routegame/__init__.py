"""Repeated interval-contract game over an interdomain route market."""

from .analysis import (
    ConvergenceReport,
    NashReport,
    detect_convergence,
    evaluate_pure_profile,
    nash_check,
    satisfaction_rate,
)
from .config import ConfigError, GameConfig, load_config, parse_config
from .engine import GameTrace, run_game, run_step, select_route
from .market import cascade_round, compute_benefit, generate_offers, settle_requests
from .strategy import build_action_set, lri_update, normalized_utility, sample_action
from .topology import Topology, TopologyError, cascade_levels, dump_topology, load_topology

__all__ = [
    "ConfigError", "ConvergenceReport", "GameConfig", "GameTrace", "NashReport",
    "Topology", "TopologyError", "build_action_set", "cascade_levels", "cascade_round",
    "compute_benefit", "detect_convergence", "dump_topology", "evaluate_pure_profile",
    "generate_offers", "load_config", "load_topology", "lri_update", "nash_check",
    "normalized_utility", "parse_config", "run_game", "run_step", "sample_action",
    "satisfaction_rate", "select_route", "settle_requests",
]
