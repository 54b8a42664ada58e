"""Convergence detection, satisfaction metric and pure-Nash verification."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .engine import GameTrace, StepReport, select_route
from .market import Interval, cascade_round
from .strategy import build_action_set
from .topology import NodeId, Topology


@dataclass
class ConvergenceReport:
    converged: bool
    step: Optional[int]
    profile: dict[NodeId, Interval]


@dataclass
class Deviation:
    player: NodeId
    action: Interval
    gain: float


@dataclass
class NashReport:
    is_nash: bool
    deviations: list[Deviation] = field(default_factory=list)


def _argmax(s) -> int:
    return max(range(len(s)), key=lambda k: (s[k], -k))


def detect_convergence(trace: GameTrace, theta: float = 0.99, window: int = 50) -> ConvergenceReport:
    """First recorded step from which every player keeps max prob >= theta for ``window`` steps.

    The reported profile is the argmax action of each player at the last
    recorded step.
    """
    if not 0.5 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0.5, 1], got {theta}")
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    ok = [all(max(s) >= theta for s in prof.values()) for prof in trace.profiles]
    step = None
    for t in range(len(ok) - window + 1):
        if all(ok[t:t + window]):
            step = t
            break
    final = trace.profiles[-1]
    profile = {p: trace.action_sets[p][_argmax(s)] for p, s in final.items()}
    return ConvergenceReport(step is not None, step, profile)


def satisfaction_rate(report: StepReport) -> Fraction:
    if not report.rows:
        return Fraction(0)
    hits = sum(1 for r in report.rows if r.granted >= r.lo)
    return Fraction(hits, len(report.rows))


def evaluate_pure_profile(
    topo: Topology, profile: Mapping[NodeId, Interval], own_demand_first: bool = False
) -> dict[NodeId, float]:
    return cascade_round(topo, profile, select_route, own_demand_first).benefits()


def default_action_sets(topo: Topology, granularity: int = 1) -> dict[NodeId, list[Interval]]:
    return {p: build_action_set(topo.params(p).cap, granularity) for p in topo.players()}


def nash_check(
    topo: Topology,
    profile: Mapping[NodeId, Interval],
    action_sets: Optional[Mapping[NodeId, list[Interval]]] = None,
    own_demand_first: bool = False,
) -> NashReport:
    """Try every unilateral deviation; any strict gain is a witness."""
    if action_sets is None:
        action_sets = default_action_sets(topo)
    profile = dict(profile)
    for p, a in profile.items():
        if tuple(a) not in action_sets[p]:
            raise ValueError(f"action {a} of {p} is not in its action set")
    base = evaluate_pure_profile(topo, profile, own_demand_first)
    witnesses = []
    for p in sorted(profile):
        for alt in action_sets[p]:
            if alt == tuple(profile[p]):
                continue
            trial = dict(profile)
            trial[p] = alt
            gain = evaluate_pure_profile(topo, trial, own_demand_first)[p] - base[p]
            if gain > 0:
                witnesses.append(Deviation(p, alt, gain))
    return NashReport(not witnesses, witnesses)


def finalize(trace: GameTrace, topo: Topology, theta: float, window: int,
             own_demand_first: bool = False) -> GameTrace:
    """Attach convergence and (for converged runs) Nash verdicts to a trace."""
    trace.convergence = detect_convergence(trace, theta, window)
    if trace.convergence.converged:
        trace.nash = nash_check(topo, trace.convergence.profile, trace.action_sets, own_demand_first)
    else:
        trace.nash = None
    return trace
