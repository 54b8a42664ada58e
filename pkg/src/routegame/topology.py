"""Interdomain graph, topology file parsing and cascade levels.

File grammar, one record per line (blank lines and ``#`` comments ignored)::

    node <id> [cap=<int>] [margin=<num>] [demand=<int>] [value=<num>]
    dest <id> export=<int> price=<num>
    edge <id> <id> delay=<num> [avail=<num>]

``cap`` is mandatory for every node except the destination. Exactly one
``dest`` line is required and it must name a declared node. Edges may
reference nodes declared further down the file.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass, field

NodeId = str


class TopologyError(ValueError):
    """Raised for malformed or inconsistent topology descriptions."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class NodeParams:
    cap: int = 0
    margin: float = 0.0
    demand: int = 0
    value: float = 0.0


@dataclass(frozen=True)
class DestParams:
    export: int
    price: float


@dataclass(frozen=True)
class Edge:
    u: NodeId
    v: NodeId
    delay: float = 0.0
    avail: float = 1.0

    @property
    def key(self) -> frozenset:
        return frozenset((self.u, self.v))


@dataclass(frozen=True)
class Topology:
    nodes: dict[NodeId, NodeParams]
    edges: tuple[Edge, ...]
    destination: NodeId
    dest_params: DestParams
    _adj: dict = field(init=False, repr=False, compare=False)
    _links: dict = field(init=False, repr=False, compare=False)
    _levels: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.destination not in self.nodes:
            raise TopologyError(f"unknown destination id {self.destination!r}")
        if self.dest_params.export < 1:
            raise TopologyError("export capacity must be >= 1")
        adj: dict[NodeId, list[NodeId]] = {n: [] for n in self.nodes}
        links: dict[frozenset, Edge] = {}
        for e in self.edges:
            if e.u == e.v:
                raise TopologyError(f"self-loop on {e.u!r}")
            for end in (e.u, e.v):
                if end not in self.nodes:
                    raise TopologyError(f"edge references unknown node {end!r}")
            if e.key in links:
                raise TopologyError(f"duplicate edge {e.u}-{e.v}")
            if e.delay < 0:
                raise TopologyError(f"negative delay on {e.u}-{e.v}")
            if not 0 < e.avail <= 1:
                raise TopologyError(f"availability of {e.u}-{e.v} outside (0,1]")
            links[e.key] = e
            adj[e.u].append(e.v)
            adj[e.v].append(e.u)
        for n, p in self.nodes.items():
            if n != self.destination and p.cap < 1:
                raise TopologyError(f"non-positive capacity for node {n!r}")
        object.__setattr__(self, "_adj", {n: tuple(sorted(vs)) for n, vs in adj.items()})
        object.__setattr__(self, "_links", links)
        object.__setattr__(self, "_levels", _bfs_levels(self))

    def neighbors(self, node: NodeId) -> tuple[NodeId, ...]:
        return self._adj[node]

    def link(self, u: NodeId, v: NodeId) -> Edge:
        return self._links[frozenset((u, v))]

    def params(self, node: NodeId) -> NodeParams:
        return self.nodes[node]

    def players(self) -> list[NodeId]:
        """Reachable non-destination nodes, sorted by id."""
        return sorted(n for n in self._levels if n != self.destination)

    def level(self, node: NodeId) -> int | None:
        return self._levels.get(node)


def _number(raw: str, key: str, lineno: int, integer: bool = False):
    try:
        return int(raw) if integer else float(raw)
    except ValueError:
        kind = "integer" if integer else "number"
        raise TopologyError(f"{key}={raw!r} is not a valid {kind}", lineno) from None


def _attrs(tokens: list[str], allowed: dict[str, bool], lineno: int) -> dict:
    out = {}
    for tok in tokens:
        key, sep, raw = tok.partition("=")
        if not sep:
            raise TopologyError(f"expected key=value, got {tok!r}", lineno)
        if key not in allowed:
            raise TopologyError(f"unknown attribute {key!r}", lineno)
        if key in out:
            raise TopologyError(f"attribute {key!r} given twice", lineno)
        out[key] = _number(raw, key, lineno, integer=allowed[key])
    return out


_NODE_ATTRS = {"cap": True, "margin": False, "demand": True, "value": False}
_DEST_ATTRS = {"export": True, "price": False}
_EDGE_ATTRS = {"delay": False, "avail": False}


def load_topology(text: str) -> Topology:
    nodes: dict[NodeId, NodeParams] = {}
    node_lines: dict[NodeId, int] = {}
    edges: list[Edge] = []
    edge_lines: list[int] = []
    seen_edges: set[frozenset] = set()
    dest = None
    dest_line = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        kind, *rest = line.split()
        if kind == "node":
            if not rest:
                raise TopologyError("node record without id", lineno)
            nid, attrs = rest[0], _attrs(rest[1:], _NODE_ATTRS, lineno)
            if nid in nodes:
                raise TopologyError(f"duplicate node {nid!r}", lineno)
            for key in ("margin", "demand", "value"):
                if attrs.get(key, 0) < 0:
                    raise TopologyError(f"{key} must be >= 0", lineno)
            nodes[nid] = NodeParams(**attrs)
            node_lines[nid] = lineno
        elif kind == "dest":
            if not rest:
                raise TopologyError("dest record without id", lineno)
            if dest is not None:
                raise TopologyError("destination declared twice", lineno)
            attrs = _attrs(rest[1:], _DEST_ATTRS, lineno)
            missing = set(_DEST_ATTRS) - set(attrs)
            if missing:
                raise TopologyError(f"dest missing {', '.join(sorted(missing))}", lineno)
            if attrs["export"] < 1:
                raise TopologyError("export capacity must be >= 1", lineno)
            dest = (rest[0], DestParams(**attrs))
            dest_line = lineno
        elif kind == "edge":
            if len(rest) < 2:
                raise TopologyError("edge record needs two endpoints", lineno)
            u, v = rest[0], rest[1]
            attrs = _attrs(rest[2:], _EDGE_ATTRS, lineno)
            if u == v:
                raise TopologyError(f"self-loop on {u!r}", lineno)
            key = frozenset((u, v))
            if key in seen_edges:
                raise TopologyError(f"duplicate edge {u}-{v}", lineno)
            if attrs.get("delay", 0.0) < 0:
                raise TopologyError("delay must be >= 0", lineno)
            if not 0 < attrs.get("avail", 1.0) <= 1:
                raise TopologyError("avail must lie in (0,1]", lineno)
            seen_edges.add(key)
            edges.append(Edge(u, v, **attrs))
            edge_lines.append(lineno)
        else:
            raise TopologyError(f"unknown record type {kind!r}", lineno)

    if dest is None:
        raise TopologyError("no destination declared")
    dest_id, dest_params = dest
    if dest_id not in nodes:
        raise TopologyError(f"unknown destination id {dest_id!r}", dest_line)
    for nid, p in nodes.items():
        if nid != dest_id and p.cap < 1:
            raise TopologyError(f"non-positive capacity for node {nid!r}", node_lines[nid])
    for e, lineno in zip(edges, edge_lines):
        for end in (e.u, e.v):
            if end not in nodes:
                raise TopologyError(f"edge references unknown node {end!r}", lineno)
    return Topology(nodes, tuple(edges), dest_id, dest_params)


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def dump_topology(topo: Topology) -> str:
    """Serialize back to the file grammar; ``load_topology`` inverts it."""
    lines = []
    for nid, p in topo.nodes.items():
        if nid == topo.destination and p == NodeParams():
            lines.append(f"node {nid}")
        else:
            lines.append(
                f"node {nid} cap={p.cap} margin={_fmt(p.margin)} "
                f"demand={p.demand} value={_fmt(p.value)}"
            )
    dp = topo.dest_params
    lines.append(f"dest {topo.destination} export={dp.export} price={_fmt(dp.price)}")
    for e in topo.edges:
        extra = "" if e.avail == 1.0 else f" avail={_fmt(e.avail)}"
        lines.append(f"edge {e.u} {e.v} delay={_fmt(e.delay)}{extra}")
    return "\n".join(lines) + "\n"


def _bfs_levels(topo: Topology) -> dict[NodeId, int]:
    levels = {topo.destination: 0}
    queue = deque([topo.destination])
    while queue:
        n = queue.popleft()
        for m in topo.neighbors(n):
            if m not in levels:
                levels[m] = levels[n] + 1
                queue.append(m)
    return levels


def cascade_levels(topo: Topology) -> dict[NodeId, int]:
    """Hop distance from the destination; unreachable nodes are left out."""
    levels = dict(topo._levels)
    unreachable = sorted(set(topo.nodes) - set(levels))
    if unreachable:
        warnings.warn(
            f"nodes without a path to {topo.destination}: {', '.join(unreachable)}",
            stacklevel=2,
        )
    return levels
