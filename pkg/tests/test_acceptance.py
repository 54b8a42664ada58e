"""Exit criteria. Each test records one PASS/FAIL line, printed in the terminal summary."""

import math
import random
import subprocess
import sys
import time
from fractions import Fraction
from itertools import product

import pytest

from instances import DATA, check_outcome, line_oracle, line_topology, random_topology
from routegame.analysis import default_action_sets, detect_convergence, nash_check, satisfaction_rate
from routegame.config import GameConfig
from routegame.engine import run_game, select_route
from routegame.market import cascade_round
from routegame.strategy import lri_update
from routegame.traceio import parse_strategies_csv, parse_trace_csv

THETA, WINDOW, B, HORIZON, RUNS = 0.99, 50, 0.1, 5000, 200


def test_c1_simplex_preservation(verdict):
    rng = random.Random(2024)
    worst_sum = 0.0
    negatives = 0
    start = time.perf_counter()
    for _ in range(1000):
        m = rng.randint(1, 10)
        raw = [rng.random() + 1e-3 for _ in range(m)]
        s = tuple(x / math.fsum(raw) for x in raw)
        for _ in range(100):
            s = lri_update(s, rng.randrange(m), rng.random(), rng.random())
            negatives += any(p < 0.0 for p in s)
            worst_sum = max(worst_sum, abs(math.fsum(s) - 1.0))
    elapsed = time.perf_counter() - start
    ok = negatives == 0 and worst_sum <= 1e-12 and elapsed < 5.0
    verdict("C1 simplex preservation", ok,
            f"1e5 updates, max |sum-1|={worst_sum:.2e}, negatives={negatives}, {elapsed:.2f}s")
    assert ok


def test_c2_worked_examples(verdict):
    r1 = lri_update((0.5, 0.5), 0, 1.0, 0.1)
    r2 = lri_update((0.2, 0.3, 0.5), 2, 0.5, 0.2)
    err = max(max(abs(x - y) for x, y in zip(r1, (0.55, 0.45))),
              max(abs(x - y) for x, y in zip(r2, (0.18, 0.27, 0.55))))
    s = (0.123, 0.456, 0.421)
    inaction = all(lri_update(s, k, 0.0, b) == s for k in range(3) for b in (0.0, 0.3, 1.0))
    ok = err <= 1e-15 and inaction
    verdict("C2 update-rule exactness", ok, f"max err={err:.1e}, u=0 bit-exact={inaction}")
    assert ok


@pytest.fixture(scope="module")
def line_runs():
    topo = line_topology()
    start = time.perf_counter()
    traces = []
    for seed in range(RUNS):
        cfg = GameConfig(topology=topo, b=B, horizon=HORIZON, seed=seed,
                         theta=THETA, window=WINDOW, early_stop=True)
        traces.append(run_game(cfg))
    return topo, traces, time.perf_counter() - start


def test_c3_convergence(line_runs, verdict):
    _, traces, elapsed = line_runs
    reports = [detect_convergence(t, THETA, WINDOW) for t in traces]
    frac = sum(r.converged for r in reports) / RUNS
    agree = all(r.step == t.online_convergence_step for r, t in zip(reports, traces))
    ok = frac >= 0.9 and elapsed < 30.0 and agree
    verdict("C3 convergence on line fixture", ok,
            f"{frac:.1%} of {RUNS} runs converged (need >= 90%), {elapsed:.1f}s")
    assert ok


def line_tensor_truth(topo):
    sets = default_action_sets(topo)
    pay = {}
    for a, b in product(sets["A"], sets["B"]):
        res = line_oracle(b, a)
        pay[a, b] = (res["A"][1], res["B"][1])
    truth = {}
    for (a, b), (pa, pb) in pay.items():
        truth[a, b] = (all(pay[alt, b][0] <= pa for alt in sets["A"])
                       and all(pay[a, alt][1] <= pb for alt in sets["B"]))
    return sets, truth


def test_c4_nash(line_runs, verdict):
    topo, traces, _ = line_runs
    sets, truth = line_tensor_truth(topo)
    converged = [detect_convergence(t, THETA, WINDOW) for t in traces]
    converged = [c for c in converged if c.converged]
    certified = 0
    mismatches = 0
    for c in converged:
        rep = nash_check(topo, c.profile, sets)
        certified += rep.is_nash
        mismatches += rep.is_nash != truth[c.profile["A"], c.profile["B"]]

    # full-tensor consistency on random small instances
    rng = random.Random(77)
    checked = 0
    for _ in range(60):
        inst = random_topology(rng, max_nodes=5, max_cap=3)
        isets = default_action_sets(inst)
        players = sorted(isets)
        table = {prof: cascade_round(inst, dict(zip(players, prof)), select_route).benefits()
                 for prof in product(*(isets[p] for p in players))}
        for prof, pay in table.items():
            stable = all(table[prof[:i] + (alt,) + prof[i + 1:]][p] <= pay[p]
                         for i, p in enumerate(players) for alt in isets[p])
            rep = nash_check(inst, dict(zip(players, prof)), isets)
            mismatches += rep.is_nash != stable
            checked += 1

    frac = certified / len(converged) if converged else 0.0
    ok = frac >= 0.8 and mismatches == 0
    verdict("C4 converged profiles are Nash", ok,
            f"{certified}/{len(converged)} certified ({frac:.1%}, need >= 80%), "
            f"tensor mismatches={mismatches} over {len(converged) + checked} profiles")
    assert ok


def test_c5_conservation(verdict):
    rng = random.Random(5)
    violations = 0
    steps = 0
    for i in range(1000):
        topo = random_topology(rng, max_nodes=8)
        cfg = GameConfig(topology=topo, b=rng.choice([0.05, 0.1, 0.5, 1.0]), horizon=100,
                         seed=i, own_demand_first=rng.random() < 0.2)
        trace = run_game(cfg, keep_outcomes=True)
        for report in trace.reports:
            violations += len(check_outcome(topo, report.outcome))
            steps += 1
    ok = violations == 0 and steps == 100_000
    verdict("C5 conservation / stock / loop-free", ok, f"{steps} steps, violations={violations}")
    assert ok


def run_cli(out):
    return subprocess.run(
        [sys.executable, "-m", "routegame", "run", "--config", str(DATA / "line.cfg"), "--out", str(out)],
        capture_output=True, text=True,
    )


def test_c6_determinism(tmp_path, verdict):
    a, b = run_cli(tmp_path / "a"), run_cli(tmp_path / "b")
    same = (tmp_path / "a" / "trace.csv").read_bytes() == (tmp_path / "b" / "trace.csv").read_bytes()
    ok = a.returncode == b.returncode == 0 and same
    verdict("C6 byte-identical traces", ok, f"exit codes {a.returncode}/{b.returncode}, identical={same}")
    assert ok


def test_c7_replay(tmp_path, verdict):
    assert run_cli(tmp_path).returncode == 0
    reports = parse_trace_csv((tmp_path / "trace.csv").read_text())
    sets, profiles = parse_strategies_csv((tmp_path / "strategies.csv").read_text())
    worst = 0.0
    for t, report in enumerate(reports):
        for row in report.rows:
            k = sets[row.player].index((row.lo, row.hi))
            again = lri_update(profiles[t][row.player], k, row.u, B)
            worst = max(worst, max(abs(x - y) for x, y in zip(again, profiles[t + 1][row.player])))
    ok = worst <= 1e-12 and len(reports) == HORIZON
    verdict("C7 replay consistency", ok, f"{len(reports)} steps, max deviation={worst:.1e}")
    assert ok


def test_c8_satisfaction(line_runs, verdict):
    _, traces, _ = line_runs
    checked = 0
    mismatches = 0
    for trace in traces:
        conv = detect_convergence(trace, THETA, WINDOW)
        if not conv.converged or conv.step == 0:
            continue
        report = trace.reports[conv.step - 1]  # game whose update produced the converged profile
        a, b = report.row("A"), report.row("B")
        res = line_oracle((b.lo, b.hi), (a.lo, a.hi))
        hand = Fraction(int(res["A"][0] >= a.lo) + int(res["B"][0] >= b.lo), 2)
        mismatches += satisfaction_rate(report) != hand
        checked += 1
    ok = mismatches == 0 and checked > 0
    verdict("C8 satisfaction metric", ok, f"{checked} converged steps, mismatches={mismatches}")
    assert ok
