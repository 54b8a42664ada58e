"""Stock model: route offers, interval requests and inverse-cascade settlement.

Capacity flows outward from the destination. A node can only announce a route
once it holds stock on it, and it only sells to neighbours one hop farther
from the destination.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

from .topology import DestParams, NodeId, NodeParams, Topology

log = logging.getLogger(__name__)

Interval = tuple[int, int]


@dataclass(slots=True)
class RouteOffer:
    provider: NodeId
    recipient: NodeId
    dest: NodeId
    path: tuple[NodeId, ...]
    unit_price: float
    available_capacity: int
    delay: float
    availability: float = 1.0
    duration: int = 1


@dataclass(slots=True)
class CapacityRequest:
    buyer: NodeId
    interval: Interval
    offer: RouteOffer


@dataclass(slots=True)
class Contract:
    buyer: NodeId
    seller: NodeId
    path: tuple[NodeId, ...]
    granted_capacity: int
    unit_price: float
    remaining_duration: int
    interval: Interval
    delay: float = 0.0
    availability: float = 1.0


@dataclass(slots=True)
class PlayerOutcome:
    granted: int = 0
    cost: float = 0.0
    resold: int = 0
    revenue: float = 0.0
    delivered: int = 0
    benefit: float = 0.0
    traversed: bool = False
    contract: Optional[Contract] = None


@dataclass
class MarketOutcome:
    players: dict[NodeId, PlayerOutcome]
    contracts: list[Contract] = field(default_factory=list)
    offers: list[RouteOffer] = field(default_factory=list)

    def benefits(self) -> dict[NodeId, float]:
        return {p: o.benefit for p, o in self.players.items()}

    def grants(self) -> dict[NodeId, int]:
        return {p: o.granted for p, o in self.players.items()}


def offer_capacity(params: NodeParams, granted: int, own_demand_first: bool = False) -> int:
    """Stock a buyer may put back on the market after its purchase."""
    if own_demand_first:
        return granted - min(params.demand, granted)
    return granted


def generate_offers(
    node: NodeId,
    acquired: Contract | DestParams,
    topo: Topology,
    own_demand_first: bool = False,
) -> list[RouteOffer]:
    """One offer per neighbour one level farther from the destination."""
    if isinstance(acquired, DestParams):
        capacity = acquired.export
        price = acquired.price
        path: tuple[NodeId, ...] = (node,)
        delay, avail = 0.0, 1.0
    else:
        params = topo.params(node)
        capacity = offer_capacity(params, acquired.granted_capacity, own_demand_first)
        price = acquired.unit_price + params.margin
        path = (node,) + acquired.path
        delay, avail = acquired.delay, acquired.availability
    if capacity < 1:
        return []
    level = topo.level(node)
    offers = []
    for nb in topo.neighbors(node):
        if topo.level(nb) != level + 1:
            continue
        link = topo.link(node, nb)
        offers.append(RouteOffer(
            provider=node,
            recipient=nb,
            dest=topo.destination,
            path=path,
            unit_price=price,
            available_capacity=capacity,
            delay=delay + link.delay,
            availability=avail * link.avail,
        ))
    return offers


def settle_requests(
    provider_stock: int, requests: Sequence[CapacityRequest]
) -> list[tuple[NodeId, int]]:
    """Allocate a provider's stock among competing buyers.

    Largest cap_min first, ties broken by buyer id. A buyer gets as much of
    its cap_max as remains, or nothing if that falls short of its cap_min.
    """
    grants = []
    remaining = provider_stock
    order = sorted(requests, key=lambda r: (-r.interval[0], r.buyer))
    for req in order:
        lo, hi = req.interval
        if not 1 <= lo <= hi:
            log.warning("rejecting malformed request from %s: interval %s", req.buyer, req.interval)
            grants.append((req.buyer, 0))
            continue
        give = min(hi, remaining)
        if give < lo:
            give = 0
        remaining -= give
        grants.append((req.buyer, give))
    return grants


def delivered_units(params: NodeParams, granted: int, resold: int) -> int:
    return min(params.demand, granted - resold)


def compute_benefit(
    params: NodeParams, granted: int, cost: float, resold: int, revenue: float
) -> float:
    if granted == 0:
        return 0.0
    return revenue + params.value * delivered_units(params, granted, resold) - cost


Selector = Callable[[Sequence[RouteOffer], Interval], Optional[RouteOffer]]


def cascade_round(
    topo: Topology,
    actions: Mapping[NodeId, Interval],
    selector: Selector,
    own_demand_first: bool = False,
) -> MarketOutcome:
    """Settle one constituent game level by level, then compute benefits."""
    players = topo.players()
    missing = [p for p in players if p not in actions]
    if missing:
        raise ValueError(f"no action for players: {', '.join(missing)}")

    by_level: dict[int, list[NodeId]] = defaultdict(list)
    for p in players:
        by_level[topo.level(p)].append(p)

    results = {p: PlayerOutcome() for p in players}
    outcome = MarketOutcome(results)
    dest = topo.destination
    stock = {dest: topo.dest_params.export}
    inbox: dict[NodeId, list[RouteOffer]] = defaultdict(list)
    for offer in generate_offers(dest, topo.dest_params, topo, own_demand_first):
        inbox[offer.recipient].append(offer)
        outcome.offers.append(offer)

    for level in sorted(by_level):
        requests: dict[NodeId, list[CapacityRequest]] = defaultdict(list)
        for p in by_level[level]:
            interval = actions[p]
            choice = selector(inbox.get(p, ()), interval)
            if choice is not None:
                requests[choice.provider].append(CapacityRequest(p, interval, choice))

        for provider in sorted(requests):
            reqs = requests[provider]
            offers_by_buyer = {r.buyer: r for r in reqs}
            for buyer, granted in settle_requests(stock[provider], reqs):
                if granted == 0:
                    continue
                req = offers_by_buyer[buyer]
                offer = req.offer
                contract = Contract(
                    buyer=buyer,
                    seller=provider,
                    path=offer.path,
                    granted_capacity=granted,
                    unit_price=offer.unit_price,
                    remaining_duration=offer.duration,
                    interval=req.interval,
                    delay=offer.delay,
                    availability=offer.availability,
                )
                stock[provider] -= granted
                outcome.contracts.append(contract)
                res = results[buyer]
                res.granted = granted
                res.cost = granted * offer.unit_price
                res.contract = contract
                if provider != dest:
                    seller = results[provider]
                    seller.resold += granted
                    seller.revenue += granted * offer.unit_price

        for p in by_level[level]:
            contract = results[p].contract
            if contract is None:
                continue
            offers = generate_offers(p, contract, topo, own_demand_first)
            if offers:
                stock[p] = offers[0].available_capacity
            for offer in offers:
                inbox[offer.recipient].append(offer)
                outcome.offers.append(offer)

    for contract in outcome.contracts:
        for hop in contract.path:
            if hop != dest:
                results[hop].traversed = True

    for p, res in results.items():
        params = topo.params(p)
        res.delivered = delivered_units(params, res.granted, res.resold)
        res.benefit = compute_benefit(params, res.granted, res.cost, res.resold, res.revenue)
    return outcome
