"""Command line entry point: single runs, sweeps and Nash checks."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace
from fractions import Fraction
from pathlib import Path
from statistics import fmean

from .analysis import finalize, nash_check, satisfaction_rate
from .config import ConfigError, GameConfig, parse_intervals, load_config
from .engine import GameTrace, init_state, run_game
from .traceio import strategies_csv, trace_csv, write_text

log = logging.getLogger("routegame")


def summarize(trace: GameTrace) -> dict:
    conv = trace.convergence
    final_sat = satisfaction_rate(trace.reports[-1]) if trace.reports else None
    return {
        "seed": trace.config["seed"],
        "b": trace.config["b"],
        "steps": len(trace.reports),
        "converged": conv.converged,
        "convergence_step": conv.step,
        "profile": {p: list(a) for p, a in conv.profile.items()} if conv.converged else None,
        "final_satisfaction": str(final_sat) if final_sat is not None else None,
        "nash": trace.nash.is_nash if trace.nash is not None else None,
        "deviations": [asdict(d) for d in trace.nash.deviations] if trace.nash is not None else [],
    }


def simulate(config: GameConfig) -> tuple[GameTrace, dict]:
    trace = run_game(config)
    finalize(trace, config.topology, config.theta, config.window, config.own_demand_first)
    return trace, summarize(trace)


def run_experiment(config: GameConfig) -> int:
    """Run one game and write trace.csv, strategies.csv and summary.json."""
    trace, summary = simulate(config)
    out = Path(config.output)
    try:
        out.mkdir(parents=True, exist_ok=True)
        write_text(out / "trace.csv", trace_csv(trace.reports))
        write_text(out / "strategies.csv", strategies_csv(trace))
    except OSError as exc:
        log.error("cannot write trace under %s: %s", out, exc)
        return 2
    text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    try:
        write_text(out / "summary.json", text)
    except OSError as exc:
        log.error("cannot write summary %s: %s", out / "summary.json", exc)
        return 2
    sys.stdout.write(text)
    return 0


def _sweep_one(args):
    config, seed, b, out = args
    cfg = replace(config, seed=seed, b=b)
    try:
        trace, summary = simulate(cfg)
        if out is not None:
            run_dir = Path(out) / f"seed{seed}_b{b}"
            run_dir.mkdir(parents=True, exist_ok=True)
            write_text(run_dir / "trace.csv", trace_csv(trace.reports))
            write_text(run_dir / "summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
        return summary
    except Exception as exc:
        return {"seed": seed, "b": b, "error": f"{type(exc).__name__}: {exc}"}


def aggregate(summaries: list[dict]) -> dict:
    ok = [s for s in summaries if "error" not in s]
    converged = [s for s in ok if s["converged"]]
    sats = [float(Fraction(s["final_satisfaction"])) for s in ok if s["final_satisfaction"] is not None]
    return {
        "runs": len(summaries),
        "failed": [s for s in summaries if "error" in s],
        "convergence_fraction": len(converged) / len(ok) if ok else None,
        "mean_convergence_step": fmean(s["convergence_step"] for s in converged) if converged else None,
        "mean_final_satisfaction": fmean(sats) if sats else None,
        "nash_fraction": sum(bool(s["nash"]) for s in converged) / len(converged) if converged else None,
    }


def run_sweep(config: GameConfig, seeds: list[int], bs: list[float], out=None, jobs: int = 1) -> dict:
    if not seeds:
        raise ConfigError("seed list must not be empty")
    if not bs:
        bs = [config.b]
    for b in bs:
        replace(config, b=b).validate()
    tasks = [(config, s, b, out) for b in bs for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            summaries = list(pool.map(_sweep_one, tasks))
    else:
        summaries = [_sweep_one(t) for t in tasks]
    report = aggregate(summaries)
    report["per_run"] = summaries
    return report


def parse_seeds(text: str) -> list[int]:
    if ".." in text:
        a, b = text.split("..", 1)
        return list(range(int(a), int(b) + 1))
    return [int(x) for x in text.split(",") if x.strip()]


def load_profile(path: Path) -> dict:
    """Pure profile file: ``<node> = <lo>-<hi>`` lines, ``#`` comments."""
    profile = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        node, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected '<node> = <lo>-<hi>'")
        (interval,) = parse_intervals(value, node.strip())
        profile[node.strip()] = interval
    return profile


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="routegame", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    run = sub.add_parser("run", help="play one repeated game")
    run.add_argument("--config", required=True, type=Path)
    run.add_argument("--seed", type=int)
    run.add_argument("--steps", type=int, help="override horizon")
    run.add_argument("--out", type=Path)

    sw = sub.add_parser("sweep", help="run a seed x learning-rate grid")
    sw.add_argument("--config", required=True, type=Path)
    sw.add_argument("--seeds", required=True, help="a..b (inclusive) or comma list")
    sw.add_argument("--b", default="", help="comma list of learning rates")
    sw.add_argument("--out", type=Path)
    sw.add_argument("--jobs", type=int, default=1)

    nash = sub.add_parser("nash", help="check a pure profile for unilateral deviations")
    nash.add_argument("--config", required=True, type=Path)
    nash.add_argument("--profile", required=True, type=Path)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(args.config)
        if args.cmd == "run":
            if args.seed is not None:
                config.seed = args.seed
            if args.steps is not None:
                config.horizon = args.steps
            if args.out is not None:
                config.output = args.out
            config.validate()
            return run_experiment(config)
        if args.cmd == "sweep":
            bs = [float(x) for x in args.b.split(",") if x.strip()]
            report = run_sweep(config, parse_seeds(args.seeds), bs, args.out, args.jobs)
            print(json.dumps(report, indent=2, sort_keys=True))
            return 0 if not report["failed"] else 1
        if args.cmd == "nash":
            profile = load_profile(args.profile)
            sets = {p: st.actions for p, st in init_state(config).players.items()}
            rep = nash_check(config.topology, profile, sets, config.own_demand_first)
            print(json.dumps(asdict(rep), indent=2, sort_keys=True))
            return 0
    except (ConfigError, ValueError) as exc:
        log.error("%s", exc)
        return 2
    return 1


if __name__ == "__main__":
    sys.exit(main())
