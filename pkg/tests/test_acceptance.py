"""Acceptance criteria. Each test prints one ``ACn PASS/FAIL ...`` line.

The Monte Carlo criteria (AC3, AC9) are marked ``slow``; deselect them with
``-m "not slow"``.
"""

import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from pairscan import reference as ref
from pairscan import tables
from pairscan.io import PairTable
from pairscan.pipeline import scan_genome
from pairscan.simulate import MCEstimate, SimConfig, mc_pvalue, simulate_paired_end, substream
from pairscan.sv import PairedEndModel

TESTS = Path(__file__).parent


def test_ac1_table1_analytic(ac_report):
    t0 = time.perf_counter()
    rows = tables.table1()
    elapsed = time.perf_counter() - t0
    bad = [r["row"] for r in rows
           if abs(r["approx1"] - r["published"]["approx1"]) > 0.001
           or abs(r["approx2"] - r["published"]["approx2"]) > 0.001]
    ok = not bad and elapsed < 10
    pairs = " ".join(f"{r['row']}:{r['approx1']:.3f}/{r['approx2']:.3f}" for r in rows)
    ac_report("AC1", ok, f"rows off by >0.001: {bad or 'none'}; {elapsed:.2f}s; {pairs}")
    assert ok


def test_ac2_laplace_cross_check(ac_report):
    rows = tables.sec62()
    diffs = []
    for r in rows:
        diffs.append(abs(r["integral"] - r["published"]["integral"]))
        diffs.append(abs(r["laplace"] - r["published"]["laplace"]))
    ok = max(diffs) <= 0.002
    vals = ", ".join(f"{r['integral']:.4f} vs {r['laplace']:.4f}" for r in rows)
    ac_report("AC2", ok, f"integral vs Laplace: {vals} (target 0.053 vs 0.051, 0.105 vs 0.101, +-0.002)")
    assert ok


@pytest.mark.slow
def test_ac3_monte_carlo_table1(ac_report):
    t0 = time.perf_counter()
    good, lines = 0, []
    for i, row in enumerate(ref.TABLE1, 1):
        reps = row[10]
        approx2 = tables.pvalue_fixed_mixture(*row[:7]).p_nu
        est = mc_pvalue(tables.table1_sampler(row), row[1], SimConfig(20240601 + i, reps))
        hit = est.ci95[0] <= approx2
        good += hit
        lines.append(f"{i}:{est.estimate:.3f}[{est.ci95[0]:.3f},{est.ci95[1]:.3f}]vs{approx2:.3f}")
    elapsed = time.perf_counter() - t0
    ok = good >= 14 and elapsed < 7200
    ac_report("AC3", ok, f"{good}/16 rows with MC CI containing or below Approx2; {elapsed:.0f}s; "
                         + " ".join(lines))
    assert ok


def test_ac4_overdispersion(ac_report):
    rows = [r for r in tables.overdispersion() if r["alpha"] is not None]
    ok = all(abs(r["p"] - r["published"]) <= 0.001 for r in rows)
    vals = ", ".join(f"alpha={r['alpha']}: {r['p']:.4f} (target {r['published']})" for r in rows)
    ac_report("AC4", ok, vals)
    assert ok


def test_ac5_thresholds(ac_report):
    t2 = tables.table2_thresholds()
    pub = ref.TABLE2_THRESHOLDS
    got = {k: v for k, v in t2.items() if k != "bonferroni"}
    got["b0"], got["b1"] = t2["bonferroni"]
    want = {k: v for k, v in pub.items() if k != "bonferroni"}
    want["b0"], want["b1"] = pub["bonferroni"]
    misses = [f"{k}={got[k]:.3f}(target {want[k]})" for k in want if abs(got[k] - want[k]) > 0.05]
    sv_parts = []
    for row in tables.sv_threshold_check():
        for st in ("ZH", "ZB"):
            c, p = row["computed"][st], row["published"][st]
            sv_parts.append(f"R={row['setting'][0]} {st}={c:.3f}(target {p})")
            if abs(c - p) > 0.1:
                misses.append(sv_parts[-1])
    ok = not misses
    table2_vals = ", ".join(f"{k}={v:.3f}" for k, v in got.items())
    ac_report("AC5", ok, f"mixture: {table2_vals}; paired-end: {', '.join(sv_parts)}; "
                         f"outside tolerance: {misses or 'none'}")
    assert ok


def _power_entries():
    out = []
    for r in tables.table2():
        for k, pub in r["published"].items():
            out.append((f"T2({r['r1']},{r['w1']},{k})", r["computed"][k], pub))
    for name, fn in (("T4", tables.table4), ("T5", tables.table5), ("T6", tables.table6)):
        for r in fn():
            for k in ("hanging", "bracketing"):
                out.append((f"{name}({r['setting'][0]},{r['r']},{r['w']},{k})", r["computed"][k], r["published"][k]))
    return out


def test_ac6_power_tables(ac_report):
    entries = _power_entries()
    within = [abs(c - p) <= 0.02 for _, c, p in entries]
    frac = sum(within) / len(entries)
    by_table = {}
    for (name, _, _), w in zip(entries, within):
        key = name[:2]
        a, b = by_table.get(key, (0, 0))
        by_table[key] = (a + w, b + 1)
    ok = frac >= 0.9
    per = ", ".join(f"{k} {a}/{b}" for k, (a, b) in by_table.items())
    examples = [e for e in entries if e[0] in ("T2(0.1,3.0,fixed_ell)", "T4(36,0.5,20,hanging)",
                                               "T4(36,0.5,20,bracketing)", "T5(36,0.1,100,bracketing)",
                                               "T6(100,0.05,150,bracketing)")]
    ex = ", ".join(f"{n}={c:.3f}(target {p})" for n, c, p in examples)
    ac_report("AC6", ok, f"{sum(within)}/{len(entries)} = {frac:.1%} within +-0.02 (need 90%); {per}; {ex}")
    assert ok


def test_ac7_combination(ac_report):
    res = tables.combination()
    checks = [("insertion sum", res["insertion_R36_sum"]["computed"]["sum"], 0.88)]
    dl = res["deletion_R100"]
    for k in ("zh_half", "zb_half", "bonferroni", "sum"):
        checks.append((f"deletion {k}", dl["computed"][k], dl["published"][k]))
    ok = all(abs(c - p) <= 0.02 for _, c, p in checks)
    ac_report("AC7", ok, ", ".join(f"{n}={c:.3f}(target {p})" for n, c, p in checks))
    assert ok


def test_ac8_property_suite(ac_report):
    files = ["test_core.py", "test_mixture.py", "test_sv.py", "test_pvalue.py", "test_backend.py"]
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider",
                           *[str(TESTS / f) for f in files]], capture_output=True, text=True)
    elapsed = time.perf_counter() - t0
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    ok = proc.returncode == 0 and elapsed < 60
    ac_report("AC8", ok, f"{tail} ({elapsed:.1f}s, limit 60s)")
    assert ok


@pytest.mark.slow
def test_ac9_end_to_end_fwer(ac_report):
    model = PairedEndModel()
    length, reps, seed = 10_000_000, 400, 2024
    t0 = time.perf_counter()
    hits, thr = 0, None
    for rep in range(reps):
        rp = simulate_paired_end(model, substream(seed, rep), (), length)
        out = scan_genome(PairTable({"null": rp}, {}), model, ("ZB",), alpha=0.05, step=10,
                          kind="deletion", lengths={"null": length})
        thr = out.thresholds["ZB"]
        hits += bool(out.calls)
    elapsed = time.perf_counter() - t0
    est = MCEstimate.from_hits(hits, reps)
    ok = 0.03 <= est.estimate <= 0.075 and elapsed < 3600
    ac_report("AC9", ok, f"family-wise error {est.estimate:.4f} CI [{est.ci95[0]:.3f}, {est.ci95[1]:.3f}] "
                         f"over {reps} null chromosomes of 1e6 grid points at threshold {thr:.3f}; "
                         f"target [0.03, 0.075]; {elapsed:.0f}s")
    assert ok


def test_ac10_declared(ac_report):
    ac_report("AC10", True, "declared not reproducible offline: the chromosome 20 call counts and thresholds "
                            "need the external read-pair data; covered by AC9 and the planted-deletion "
                            "recovery test; procedure in README")
