"""Acceptance suite: one PASS/FAIL line per criterion.

The lines are collected into a summary section at the end of any pytest
run; ``python3 tests/test_acceptance.py`` runs just this file.
"""

from __future__ import annotations

import json
import os
import random
import subprocess
import sys
import time
from contextlib import redirect_stdout
from io import StringIO
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from hfktorsion.cli import main as cli_main
from hfktorsion.data import DATA_DIR, bundled_table
from hfktorsion.engine import audit_trace
from hfktorsion.grid import GridDiagram, grid_to_pd, hat_homology, tilde_complex, tilde_homology, tilde_to_hat
from hfktorsion.pdcode import PDCode, alexander_polynomial
from hfktorsion.polynomial import LaurentPoly
from hfktorsion.session import Session, run_session
from hfktorsion.tables import euler_characteristic, verify_table
from hfktorsion.torsion import PairingProblem, lemma_diagonal_check, lemma_report, minmax_torsion_bound

from conftest import ACCEPTANCE_LINES
from oracles import FIGURE_EIGHT, TREFOIL, all_knot_grids, brute_extreme, brute_feasible, random_table

# limits in seconds
LIMIT_DATA = 1.0
LIMIT_LEMMA = 1.0
LIMIT_MINMAX_MM6 = 10.0
LIMIT_GRID6 = 60.0
LIMIT_DERIVE = 1.0

FIG8_GRID = GridDiagram(6, (4, 3, 1, 2, 5, 6), (2, 5, 4, 6, 1, 3))
TREFOIL_GRID = GridDiagram(5, (4, 3, 2, 1, 5), (1, 5, 4, 3, 2))
UNKNOT_GRID = GridDiagram(2, (2, 1), (1, 2))


def report(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[criterion {number}] {'PASS' if ok else 'FAIL'}: {title} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)


def _verified(name):
    return verify_table(bundled_table(name))


def _cli(args) -> tuple[int, str]:
    buf = StringIO()
    with redirect_stdout(buf):
        code = cli_main([str(a) for a in args])
    return code, buf.getvalue()


def test_criterion_1_data_integrity():
    t0 = time.perf_counter()
    code, out = _cli(["verify-data", "--json"])
    elapsed = time.perf_counter() - t0
    rep = json.loads(out)
    tables = rep["tables"]
    ok = (
        code == 0
        and rep["manifest"] == []
        and len(tables) == 6
        and all(t["verified"] and t["parity_ok"] and t["symmetry_ok"] and t["euler_at_one"] == 1 for t in tables)
        and elapsed < LIMIT_DATA
    )
    report(1, "verify-data passes on MM1..MM6", ok, f"{elapsed:.3f}s, totals {[t['total'] for t in tables]}")
    assert ok


def test_criterion_2_diagonal_check():
    t0 = time.perf_counter()
    results = []
    for ell in range(1, 7):
        tab = _verified(f"mm{ell}").table
        rep = lemma_report(tab)
        red = sorted({(1 - 2 * n, -n) for n in range(1, ell)} | ({(1, 1)} if ell > 1 else set()))
        results.append(
            lemma_diagonal_check(tab) == ell
            and sorted(rep.empty_cells) == red
            and rep.origin_dim == tab[(0, 0)] >= 2
        )
    elapsed = time.perf_counter() - t0
    ok = all(results) and elapsed < LIMIT_LEMMA
    report(2, "diagonal check returns l with the red/green cells", ok, f"{elapsed:.3f}s, per table {results}")
    assert ok


def test_criterion_3_optimizer_dominance():
    values = {}
    t_mm6 = None
    for ell in range(1, 7):
        tab = _verified(f"mm{ell}").table
        t0 = time.perf_counter()
        values[ell] = minmax_torsion_bound(tab)
        if ell == 6:
            t_mm6 = time.perf_counter() - t0
    dominance = all(values[ell] >= lemma_diagonal_check(_verified(f"mm{ell}").table) for ell in values)
    exhaustive = all(brute_extreme(_verified(f"mm{ell}").table.dims, want_max=False) == values[ell] == ell for ell in (1, 2))
    ok = dominance and exhaustive and t_mm6 < LIMIT_MINMAX_MM6
    report(3, "minmax >= diagonal check, equal to exhaustive oracle on MM1, MM2", ok, f"values {values}, MM6 {t_mm6:.3f}s")
    assert ok


def test_criterion_4_grid_golden():
    unknot = hat_homology(UNKNOT_GRID).dims == {(0, 0): 1}
    t0 = time.perf_counter()
    cx = tilde_complex(FIG8_GRID)  # raises if the square of the differential is nonzero
    d2_zero = not ((cx.differential @ cx.differential).toarray() % 2).any()
    tilde = tilde_homology(FIG8_GRID)
    hat = tilde_to_hat(tilde)
    elapsed = time.perf_counter() - t0
    ok = unknot and d2_zero and hat.dims == {(-1, -1): 1, (0, 0): 3, (1, 1): 1} and tilde.total == 5 * 2**5 and elapsed < LIMIT_GRID6
    report(4, "grid homology: unknot n=2 and figure-eight n=6", ok, f"n=6 in {elapsed:.2f}s, hat {hat.dims}")
    assert ok


def test_criterion_5_oracle_equivalence():
    mismatches = 0
    checks = 0
    seen = set()
    for n in (2, 3, 4):
        for g in all_knot_grids(n):
            hat = tilde_to_hat(tilde_homology(g))
            key = tuple(sorted(hat.dims.items()))
            if key in seen:
                continue
            seen.add(key)
            for n_max in range(1, 4):
                checks += 1
                mismatches += PairingProblem(hat.dims, n_max).feasible() != brute_feasible(hat.dims, n_max)
    rng = random.Random(20260101)
    for _ in range(100):
        dims = random_table(rng, max_total=9)
        assert sum(dims.values()) <= 9
        for n_max in range(1, 5):
            checks += 1
            mismatches += PairingProblem(dims, n_max).feasible() != brute_feasible(dims, n_max)
    ok = mismatches == 0
    report(5, "flow feasibility equals brute force (grids n<=4, 100 random tables)", ok, f"{checks} checks, {mismatches} mismatches")
    assert ok


def test_criterion_6_cross_invariants():
    fig8 = alexander_polynomial(PDCode(FIGURE_EIGHT))
    mm1 = euler_characteristic(bundled_table("mm1")).normalized()
    expected = LaurentPoly({-1: -1, 0: 3, 1: -1})
    tref_pd = alexander_polynomial(PDCode(TREFOIL))
    tref_grid = euler_characteristic(hat_homology(TREFOIL_GRID)).normalized()
    tref_grid_pd = alexander_polynomial(grid_to_pd(TREFOIL_GRID))
    ok = fig8 == mm1 == expected and tref_pd == tref_grid == tref_grid_pd
    report(6, "Alexander polynomials agree with Euler characteristics", ok, f"figure-eight {fig8}, trefoil {tref_pd} / {tref_grid}")
    assert ok


def test_criterion_7_lower_bound_replay():
    t0 = time.perf_counter()
    store, rep = run_session(Session.load(DATA_DIR / "sessions" / "mm6.json"))
    elapsed = time.perf_counter() - t0
    ge = store.query("L", "UnknottingGE")
    ok = (
        ge.value == 5
        and store.query("L", "AlexanderOne").value is True
        and store.query("L", "doubly-slice").value is True
        and store.query("L", "amphicheiral").value is True
        and audit_trace(store) == []
        and audit_trace(store, ge.record.id) == []
        and store.query("L", "UnknottingLE").value is None
        and any(c["statement"] == "u(L) = 5" and "not machine-derived" in c["status"] for c in rep["external_claims"])
        and elapsed < LIMIT_DERIVE
    )
    report(7, "MM6 session derives u(L) >= 5 with replayable trace", ok, f"{elapsed:.3f}s, {rep['derived']} derived facts")
    assert ok


ACCEPTANCE_COMMANDS = [
    ["verify-data", "--json"],
    *[["bounds", f"bundled:mm{ell}", "--json"] for ell in range(1, 7)],
    ["compute-hfk", str(DATA_DIR / "grids" / "unknot2.grd"), "--json"],
    ["compute-hfk", str(DATA_DIR / "grids" / "figure_eight6.grd"), "--json", "--workers", "4"],
    ["compute-hfk", str(DATA_DIR / "grids" / "trefoil5.grd"), "--json", "--workers", "2"],
    ["alexander", str(DATA_DIR / "pd" / "figure_eight.pd"), "--json"],
    ["alexander", str(DATA_DIR / "pd" / "trefoil.pd"), "--json"],
    ["derive", str(DATA_DIR / "sessions" / "mm6.json"), "--json"],
]


def _subprocess_run(args, seed):
    env = dict(os.environ, PYTHONHASHSEED=str(seed))
    res = subprocess.run([sys.executable, "-m", "hfktorsion", *args], capture_output=True, env=env)
    return res.returncode, res.stdout


def test_criterion_8_determinism():
    differing = []
    for args in ACCEPTANCE_COMMANDS:
        a = _subprocess_run(args, 1)
        b = _subprocess_run(args, 2)
        if a != b or a[0] != 0:
            differing.append(args[0])
    # the parallel grid run must equal the serial one
    serial = _subprocess_run(["compute-hfk", str(DATA_DIR / "grids" / "figure_eight6.grd"), "--json"], 3)
    parallel = _subprocess_run(["compute-hfk", str(DATA_DIR / "grids" / "figure_eight6.grd"), "--json", "--workers", "4"], 4)
    ok = not differing and serial == parallel
    report(8, "acceptance commands give byte-identical JSON", ok, f"{len(ACCEPTANCE_COMMANDS)} commands, differing {differing}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
