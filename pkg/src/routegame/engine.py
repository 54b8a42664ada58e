"""Repeated game driver.

Each constituent game runs the four local steps for every player: sample an
interval, buy the best admissible route, observe the resulting benefit, and
update the mixed strategy with linear reward-inaction.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from .config import ConfigError, GameConfig
from .market import Interval, MarketOutcome, RouteOffer, cascade_round
from .strategy import (
    BenefitBounds,
    StrategyVector,
    build_action_set,
    check_simplex,
    lri_update,
    normalized_utility,
    sample_action,
    uniform_strategy,
    validate_action_set,
)
from .topology import NodeId, Topology


def select_route(offers: Sequence[RouteOffer], interval: Interval) -> Optional[RouteOffer]:
    """Largest usable capacity within the interval, then cheapest, then provider id."""
    lo, hi = interval
    best = None
    best_key = None
    for offer in offers:
        if offer.available_capacity < lo:
            continue
        key = (-min(offer.available_capacity, hi), offer.unit_price, offer.provider)
        if best_key is None or key < best_key:
            best, best_key = offer, key
    return best


def player_rng(seed: int, node: NodeId) -> np.random.Generator:
    """Independent stream per player, keyed on the master seed and node id."""
    digest = hashlib.sha256(node.encode("utf-8")).digest()
    node_key = int.from_bytes(digest[:8], "little")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, node_key])))


@dataclass
class PlayerState:
    node: NodeId
    actions: list[Interval]
    strategy: StrategyVector
    bounds: BenefitBounds = field(default_factory=BenefitBounds)
    last_choice: Optional[int] = None
    last_granted: int = 0
    satisfied: bool = False
    rng: Any = None

    @property
    def max_prob(self) -> float:
        return max(self.strategy)

    def argmax(self) -> int:
        s = self.strategy
        return max(range(len(s)), key=lambda k: (s[k], -k))


@dataclass
class GameState:
    topology: Topology
    players: dict[NodeId, PlayerState]
    t: int = 0

    def profile(self) -> dict[NodeId, StrategyVector]:
        return {p: st.strategy for p, st in self.players.items()}


@dataclass
class PlayerRow:
    step: int
    player: NodeId
    lo: int
    hi: int
    granted: int
    benefit: float
    u: float
    max_prob: float
    satisfied: bool
    traversed: bool


@dataclass
class StepReport:
    step: int
    rows: list[PlayerRow]
    outcome: Optional[MarketOutcome] = field(default=None, compare=False, repr=False)

    def row(self, player: NodeId) -> PlayerRow:
        for r in self.rows:
            if r.player == player:
                return r
        raise KeyError(player)


@dataclass
class GameTrace:
    config: dict
    action_sets: dict[NodeId, list[Interval]]
    profiles: list[dict[NodeId, StrategyVector]]
    reports: list[StepReport] = field(default_factory=list)
    online_convergence_step: Optional[int] = None
    convergence: Any = None
    nash: Any = None

    @property
    def players(self) -> list[NodeId]:
        return list(self.action_sets)

    def chosen_index(self, row: PlayerRow) -> int:
        return self.action_sets[row.player].index((row.lo, row.hi))


def init_state(config: GameConfig) -> GameState:
    topo = config.topology
    players = {}
    for node in topo.players():
        cap = topo.params(node).cap
        if node in config.actions:
            actions = validate_action_set(config.actions[node], cap)
        else:
            try:
                actions = build_action_set(cap, config.granularity)
            except ValueError as exc:
                raise ConfigError(f"player {node}: {exc}") from None
        if node in config.init:
            s = tuple(config.init[node])
            if len(s) != len(actions):
                raise ConfigError(f"init.{node} has {len(s)} entries for {len(actions)} actions")
            try:
                check_simplex(s, strict_positive=True)
            except ValueError as exc:
                raise ConfigError(f"init.{node}: {exc}") from None
        else:
            s = uniform_strategy(len(actions))
        players[node] = PlayerState(node, actions, s, rng=player_rng(config.seed, node))
    return GameState(topo, players)


def learn(player: PlayerState, benefit: float, b: float) -> float:
    """Local strategy update; sees only this player's own benefit and choice."""
    player.bounds.absorb(benefit)
    u = normalized_utility(benefit, player.bounds)
    player.strategy = lri_update(player.strategy, player.last_choice, u, b)
    return u


def run_step(state: GameState, config: GameConfig) -> tuple[GameState, StepReport]:
    """Play one constituent game. Mutates ``state`` in place and returns it."""
    players = state.players
    actions = {}
    for node, st in players.items():
        st.last_choice = sample_action(st.strategy, st.rng)
        actions[node] = st.actions[st.last_choice]

    outcome = cascade_round(state.topology, actions, select_route, config.own_demand_first)

    state.t += 1
    rows = []
    for node, st in players.items():
        res = outcome.players[node]
        lo, hi = actions[node]
        st.last_granted = res.granted
        st.satisfied = res.granted >= lo
        u = learn(st, res.benefit, config.b)
        rows.append(PlayerRow(
            state.t, node, lo, hi, res.granted, res.benefit, u,
            st.max_prob, st.satisfied, res.traversed,
        ))
    return state, StepReport(state.t, rows, outcome)


def run_game(config: GameConfig, keep_outcomes: bool = False) -> GameTrace:
    """Play ``config.horizon`` constituent games from a fresh state.

    With ``early_stop`` the run ends as soon as every player has held
    max probability >= theta for ``window`` consecutive recorded profiles.
    """
    config.validate()
    state = init_state(config)
    trace = GameTrace(
        config=config.echo(),
        action_sets={p: list(st.actions) for p, st in state.players.items()},
        profiles=[state.profile()],
    )

    theta, window = config.theta, config.window
    streak_start = None

    def observe(t: int) -> bool:
        nonlocal streak_start
        if all(st.max_prob >= theta for st in state.players.values()):
            if streak_start is None:
                streak_start = t
            if t - streak_start + 1 >= window:
                trace.online_convergence_step = streak_start
                return True
        else:
            streak_start = None
        return False

    done = observe(0)
    for _ in range(config.horizon):
        if done and config.early_stop:
            break
        _, report = run_step(state, config)
        if not keep_outcomes:
            report.outcome = None
        trace.reports.append(report)
        trace.profiles.append(state.profile())
        if not done:
            done = observe(state.t)
    return trace
