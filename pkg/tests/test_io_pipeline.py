import io as _io
import math

import numpy as np
import pytest
from scipy import stats

from pairscan.core import ContractError, ModelDomainError
from pairscan.io import (
    PAIR_HEADER,
    Call,
    PairTable,
    ParseError,
    dump_json,
    read_calls,
    read_pairs,
    write_calls,
    write_pairs,
)
from pairscan.pipeline import (
    ScoreTrack,
    estimate_insert_params,
    estimate_kappa2,
    merge_calls,
    model_from_estimates,
    overlap_analysis,
    scan_genome,
)
from pairscan.power import Alternative, Statistic, marginal_power
from pairscan.simulate import simulate_paired_end, substream
from pairscan.sv import PairedEndModel, ReadPairs, SVHypothesis


FIXTURE = PAIR_HEADER + "\nchr1\t100\t290\nchr1\t150\tinf\nchr20\t900\tinf\n"


def test_fixture_round_trip(tmp_path):
    src = tmp_path / "a.tsv"
    src.write_text(FIXTURE)
    tab = read_pairs(src)
    out = tmp_path / "b.tsv"
    write_pairs(out, tab)
    assert out.read_text() == FIXTURE


def test_unmapped_minus_is_hanging(tmp_path):
    src = tmp_path / "a.tsv"
    src.write_text(FIXTURE)
    rp = read_pairs(src).pairs["chr20"]
    assert rp.hanging_minus.tolist() == [True]
    assert rp.x_plus[0] == 900 and math.isinf(rp.x_minus[0])


def test_simulated_pairs_ingest_losslessly(tmp_path, pe36):
    rp = simulate_paired_end(pe36, substream(1, 0), (SVHypothesis("insertion", 50_000.0, 40.0, 0.5),), 400_000)
    assert len(rp) > 100_000
    write_pairs(tmp_path / "s.tsv", {"chrS": rp}, {"R": 36})
    tab = read_pairs(tmp_path / "s.tsv")
    assert tab.meta == {"R": "36"} and not tab.resorted
    got = tab.pairs["chrS"]
    assert np.array_equal(got.x_plus, rp.x_plus) and np.array_equal(got.x_minus, rp.x_minus)


def test_parse_errors_report_line(tmp_path):
    p = tmp_path / "bad.tsv"
    p.write_text(PAIR_HEADER + "\nchr1\t1\t200\nchr1\tx\t5\n")
    with pytest.raises(ParseError) as e:
        read_pairs(p)
    assert e.value.line == 3
    p.write_text(PAIR_HEADER + "\nchr1\t1\n")
    with pytest.raises(ParseError, match="line 2"):
        read_pairs(p)
    p.write_text("chr1\t1\t2\n")
    with pytest.raises(ParseError, match="header"):
        read_pairs(p)


def test_double_unmapped_rejected_and_unsorted_noticed(tmp_path, capsys):
    p = tmp_path / "u.tsv"
    p.write_text(PAIR_HEADER + "\nchr1\t500\t700\nchr1\tinf\tinf\nchr1\t100\t300\n")
    tab = read_pairs(p)
    assert tab.rejected == 1 and tab.resorted
    assert tab.pairs["chr1"].x_plus.tolist() == [100.0, 500.0]
    assert "sorted" in capsys.readouterr().err


def test_calls_round_trip(tmp_path):
    calls = [Call("chr1", 10, 60, "ZB", 12.5, 30, 10.0, 0.05), Call("chr2", 0, 10, "Zminus", 3.25, 0, 2.0, 0.05)]
    with open(tmp_path / "c.bed", "w") as fh:
        write_calls(fh, calls)
    assert read_calls(tmp_path / "c.bed") == calls
    with pytest.raises(ValueError):
        Call("chr1", 5, 5, "ZB", 1.0, 5, 1.0, 0.05)


def test_json_report_has_schema_version():
    buf = _io.StringIO()
    dump_json(buf, "x", {"a": np.float64(math.inf), "b": np.arange(2)})
    assert '"schema_version": 1' in buf.getvalue() and '"inf"' in buf.getvalue()


def _pairs_from_inserts(y):
    x = np.arange(len(y), dtype=float) * 3
    return ReadPairs(x, x + y)


def test_insert_estimates_normal(rng):
    y = rng.normal(220, 63, 20_000).round()
    est = estimate_insert_params(_pairs_from_inserts(y))
    se = 63 / np.sqrt(y.size)
    assert abs(est.delta - 220) < 4 * se
    assert est.sigma_mle == pytest.approx(63, rel=0.03)
    assert est.sigma_robust == pytest.approx(63, rel=0.05)


def test_contamination_inflates_mle_not_robust(rng):
    y = rng.normal(220, 63, 19_000)
    y = np.concatenate([y, np.full(1000, 220.0 + 800.0)])
    est = estimate_insert_params(_pairs_from_inserts(y))
    assert est.sigma_mle > 1.5 * 63
    assert est.sigma_robust == pytest.approx(63, rel=0.1)


def test_degenerate_and_too_few():
    est = estimate_insert_params(_pairs_from_inserts(np.full(2000, 200.0)))
    assert est.degenerate and est.sigma_mle == 0.0
    with pytest.raises(ModelDomainError):
        model_from_estimates(est, 36, 0.03, 0.27)
    with pytest.raises(ContractError):
        estimate_insert_params(_pairs_from_inserts(np.full(999, 200.0)))


def test_kappa2_estimate(pe36):
    rp = simulate_paired_end(pe36, substream(2, 0), (), 200_000)
    k2 = estimate_kappa2(rp, 200_000, 36)
    assert k2 == pytest.approx(pe36.kappa2, rel=0.03)


def test_merge_calls_soundness():
    v = np.array([0, 5, 6, 0, 0, 7, 0, 9, 9, 1], dtype=float)
    tr = ScoreTrack("c", 0.0, 10.0, v, "ZB")
    calls = merge_calls(tr, 5.0, 0.05)
    assert [(c.start, c.end, c.peak, c.peak_pos) for c in calls] == [(10, 30, 6, 20), (50, 60, 7, 50), (70, 90, 9, 70)]
    exceed = np.flatnonzero(v >= 5.0) * 10
    for pos in exceed:
        assert sum(c.start <= pos < c.end for c in calls) == 1
    assert all(c.peak >= c.threshold for c in calls)
    assert len(merge_calls(tr, 5.0, 0.05, gap=2)) == 1
    with pytest.raises(ModelDomainError):
        ScoreTrack("c", 0.0, 1.0, np.array([np.nan]), "ZB")


def test_overlap_analysis():
    zb = [Call("c", 1000, 1600, "ZB", 20.0, 1200, 10.0, 0.05)]
    far_m = [Call("c", 5000, 5100, "Zminus", 3.0, 5000, 2.0, 0.05)]
    far_p = [Call("c", 9000, 9100, "Zplus", 3.0, 9000, 2.0, 0.05)]
    assert overlap_analysis(zb, far_m, far_p)["flanked"] == 0
    left = [Call("c", 900, 1001, "Zminus", 3.0, 950, 2.0, 0.05)]
    right = [Call("c", 1599, 1700, "Zplus", 3.0, 1650, 2.0, 0.05)]
    out = overlap_analysis(zb, left, right)
    assert out["flanked"] == 1 and out["flanked_pct"] == 100.0
    # the left-end call must not stand in for the right end
    assert overlap_analysis(zb, left, [Call("c", 800, 1000, "Zplus", 3.0, 900, 2.0, 0.05)])["flanked"] == 0
    assert overlap_analysis([], [], [])["flanked_pct"] == 0.0


def test_scan_empty_table(pe36):
    out = scan_genome(PairTable({}, {}), pe36)
    assert out.tracks == [] and out.calls == []
    out = scan_genome(PairTable({"c": ReadPairs.empty()}, {}), pe36)
    assert out.calls == []


def test_scan_rejects_bad_inputs(pe36):
    with pytest.raises(ContractError):
        scan_genome(PairTable({}, {}), pe36, statistics=("ZQ",))
    with pytest.raises(ContractError):
        scan_genome(PairTable({}, {}), pe36, step=2.5)


def test_scan_threshold_failure_skips_statistic(pe36):
    rp = simulate_paired_end(pe36, substream(3, 0), (), 20_000)
    out = scan_genome(PairTable({"c": rp}, {}), pe36, statistics=("ZB", "Zminus"), alpha=1e-300,
                      thresholds={"Zminus": 5.0})
    assert "ZB" not in out.thresholds and out.thresholds["Zminus"] == 5.0
    assert any("ZB" in d for d in out.diagnostics)


def test_scan_is_deterministic(pe36):
    rp = simulate_paired_end(pe36, substream(4, 0), (SVHypothesis("deletion", 8000.0, 300.0, 0.5),), 20_000)
    tab = PairTable({"b": rp, "a": rp}, {})
    one = scan_genome(tab, pe36, step=10)
    two = scan_genome(tab, pe36, step=10)
    assert one.calls == two.calls and one.thresholds == two.thresholds
    assert [c.chrom for c in one.calls] == sorted(c.chrom for c in one.calls)


def test_planted_deletions_recovered():
    model = PairedEndModel(kappa2=0.02)
    length, reps = 120_000, 5
    dels = tuple(SVHypothesis("deletion", 3000.0 + 6000.0 * i, 200.0, 0.999999) for i in range(20))
    found, thr = 0, None
    for rep in range(reps):
        rp = simulate_paired_end(model, substream(5, rep), dels, length)
        out = scan_genome(PairTable({"s": rp}, {}), model, ("ZB",), step=10, w=200.0, r=0.999,
                          lengths={"s": length})
        thr = out.thresholds["ZB"]
        found += sum(any(c.start <= d.s + d.w and d.s <= c.end for c in out.calls) for d in dels)
    power = marginal_power(Statistic("ZB", w=200.0, r=0.999, model=model), Alternative(1.0, 200.0, "deletion"),
                           thr).power
    n = 20 * reps
    assert found >= stats.binom.ppf(0.025, n, power)
