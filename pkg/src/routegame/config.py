"""Game configuration and its ``key = value`` file format.

Recognised keys::

    topology     path to a topology file, relative to the config file (required)
    b            learning rate in [0, 1] (required)
    horizon      number of constituent games, >= 0 (required)
    seed         non-negative 64-bit integer (required)
    granularity  capacity grid step for action sets (default 1)
    theta        convergence threshold in (0.5, 1] (default 0.99)
    window       convergence stability window in steps (default 50)
    early_stop   stop once converged: true/false (default false)
    own_demand_first  serve local demand before resale (default false)
    output       output directory (default "out")
    actions.<node>  explicit interval list, e.g. ``1-1, 1-2, 2-2``
    init.<node>     explicit initial strategy, e.g. ``0.25, 0.75``
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .strategy import Interval
from .topology import Topology, TopologyError, load_topology


class ConfigError(ValueError):
    pass


@dataclass
class GameConfig:
    topology: Topology
    b: float
    horizon: int
    seed: int
    granularity: int = 1
    theta: float = 0.99
    window: int = 50
    early_stop: bool = False
    own_demand_first: bool = False
    output: Path = Path("out")
    topology_path: Path | None = None
    actions: dict[str, list[Interval]] = field(default_factory=dict)
    init: dict[str, list[float]] = field(default_factory=dict)

    def validate(self) -> None:
        if not 0.0 <= self.b <= 1.0:
            raise ConfigError(f"b out of [0,1]: {self.b}")
        if self.horizon < 0:
            raise ConfigError(f"horizon must be >= 0, got {self.horizon}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a non-negative 64-bit integer, got {self.seed}")
        if self.granularity < 1:
            raise ConfigError(f"granularity must be >= 1, got {self.granularity}")
        if not 0.5 < self.theta <= 1.0:
            raise ConfigError(f"theta out of (0.5,1]: {self.theta}")
        if self.window < 1:
            raise ConfigError(f"window must be >= 1, got {self.window}")
        for node in list(self.actions) + list(self.init):
            if node not in self.topology.nodes or node == self.topology.destination:
                raise ConfigError(f"override for unknown player {node!r}")

    def echo(self) -> dict:
        return {
            "topology": str(self.topology_path) if self.topology_path else None,
            "b": self.b,
            "horizon": self.horizon,
            "seed": self.seed,
            "granularity": self.granularity,
            "theta": self.theta,
            "window": self.window,
            "early_stop": self.early_stop,
            "own_demand_first": self.own_demand_first,
        }


REQUIRED = ("topology", "b", "horizon", "seed")


def _bool(raw: str, key: str) -> bool:
    low = raw.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {raw!r}")


def parse_intervals(raw: str, key: str) -> list[Interval]:
    out = []
    for part in raw.split(","):
        lo, sep, hi = part.strip().partition("-")
        try:
            out.append((int(lo), int(hi if sep else lo)))
        except ValueError:
            raise ConfigError(f"{key}: bad interval {part.strip()!r}") from None
    return out


def _floats(raw: str, key: str) -> list[float]:
    try:
        return [float(x) for x in raw.split(",")]
    except ValueError:
        raise ConfigError(f"{key}: expected comma-separated numbers") from None


_CASTS = {
    "b": float,
    "horizon": int,
    "seed": int,
    "granularity": int,
    "theta": float,
    "window": int,
}


def parse_config(text: str, base_dir: Path | str = ".") -> GameConfig:
    base_dir = Path(base_dir)
    raw: dict[str, str] = {}
    actions: dict[str, list[Interval]] = {}
    init: dict[str, list[float]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        if key.startswith("actions."):
            actions[key[len("actions."):]] = parse_intervals(value, key)
        elif key.startswith("init."):
            init[key[len("init."):]] = _floats(value, key)
        elif key in _CASTS or key in ("topology", "early_stop", "own_demand_first", "output"):
            if key in raw:
                raise ConfigError(f"line {lineno}: key {key!r} given twice")
            raw[key] = value
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")

    missing = [k for k in REQUIRED if k not in raw]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")

    kwargs: dict = {}
    for key, cast in _CASTS.items():
        if key in raw:
            try:
                kwargs[key] = cast(raw[key])
            except ValueError:
                raise ConfigError(f"{key}: cannot parse {raw[key]!r}") from None
    for key in ("early_stop", "own_demand_first"):
        if key in raw:
            kwargs[key] = _bool(raw[key], key)
    if "output" in raw:
        kwargs["output"] = Path(raw["output"])

    topo_path = base_dir / raw["topology"]
    try:
        topo_text = topo_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read topology {topo_path}: {exc.strerror}") from None
    try:
        topo = load_topology(topo_text)
    except TopologyError as exc:
        raise ConfigError(f"{topo_path}: {exc}") from None

    cfg = GameConfig(topology=topo, topology_path=topo_path, actions=actions, init=init, **kwargs)
    cfg.validate()
    return cfg


def load_config(path: Path | str) -> GameConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, base_dir=path.parent)
