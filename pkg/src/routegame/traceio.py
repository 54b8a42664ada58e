"""CSV serialization of game traces.

``trace.csv`` holds one row per player per constituent game, columns
``step, player, lo, hi, granted, benefit, u, max_prob, satisfied, traversed``.
``strategies.csv`` holds the full mixed strategy of every player at every
recorded step (step 0 is the initial profile) as ``step, player, k, lo, hi, prob``.
Floats are written with ``repr`` so reading them back is exact.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable

from .engine import GameTrace, PlayerRow, StepReport

TRACE_COLUMNS = ["step", "player", "lo", "hi", "granted", "benefit", "u", "max_prob", "satisfied", "traversed"]
STRATEGY_COLUMNS = ["step", "player", "k", "lo", "hi", "prob"]


def _writer(buf):
    return csv.writer(buf, lineterminator="\n")


def trace_csv(reports: Iterable[StepReport]) -> str:
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(TRACE_COLUMNS)
    for rep in reports:
        for r in rep.rows:
            w.writerow([
                r.step, r.player, r.lo, r.hi, r.granted, repr(float(r.benefit)),
                repr(float(r.u)), repr(float(r.max_prob)), int(r.satisfied), int(r.traversed),
            ])
    return buf.getvalue()


def parse_trace_csv(text: str) -> list[StepReport]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != TRACE_COLUMNS:
        raise ValueError(f"unexpected trace header: {header}")
    reports: list[StepReport] = []
    for rec in reader:
        row = PlayerRow(
            step=int(rec[0]), player=rec[1], lo=int(rec[2]), hi=int(rec[3]),
            granted=int(rec[4]), benefit=float(rec[5]), u=float(rec[6]),
            max_prob=float(rec[7]), satisfied=rec[8] == "1", traversed=rec[9] == "1",
        )
        if not reports or reports[-1].step != row.step:
            reports.append(StepReport(row.step, []))
        reports[-1].rows.append(row)
    return reports


def strategies_csv(trace: GameTrace) -> str:
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(STRATEGY_COLUMNS)
    for t, prof in enumerate(trace.profiles):
        for p, s in prof.items():
            for k, (prob, (lo, hi)) in enumerate(zip(s, trace.action_sets[p])):
                w.writerow([t, p, k, lo, hi, repr(float(prob))])
    return buf.getvalue()


def parse_strategies_csv(text: str) -> tuple[dict, list[dict]]:
    """Return (action_sets, profiles) as recorded in a strategies file."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != STRATEGY_COLUMNS:
        raise ValueError(f"unexpected strategies header: {header}")
    action_sets: dict[str, list] = {}
    profiles: list[dict[str, list[float]]] = []
    for rec in reader:
        t, p, k = int(rec[0]), rec[1], int(rec[2])
        while len(profiles) <= t:
            profiles.append({})
        profiles[t].setdefault(p, []).append(float(rec[5]))
        if t == 0:
            action_sets.setdefault(p, []).append((int(rec[3]), int(rec[4])))
        assert len(profiles[t][p]) == k + 1
    return action_sets, [{p: tuple(s) for p, s in prof.items()} for prof in profiles]


def write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
