import numpy as np
import pytest
from scipy import stats

from pairscan.core import ContractError, MarkDistribution, NullModel, PiecewiseRate
from pairscan.mixture import ScanRegime
from pairscan.simulate import (
    MCEstimate,
    MixtureScanSampler,
    PairedScanSampler,
    SimConfig,
    mc_pvalue,
    mc_replicates,
    poisson_count_gof,
    simulate_alternative_field,
    simulate_negbinom_field,
    simulate_null_field,
    simulate_paired_end,
    substream,
)
from pairscan.sv import PairedEndModel, SVHypothesis


def test_substreams_are_reproducible_and_distinct():
    a = substream(3, 7).random(5)
    assert np.array_equal(a, substream(3, 7).random(5))
    assert not np.array_equal(a, substream(3, 8).random(5))
    assert not np.array_equal(a, substream(4, 7).random(5))


def test_replicates_independent_of_worker_count():
    sampler = MixtureScanSampler(NullModel(1.0), ScanRegime("score_only_Z", delta=10.0, w0=2.0), 200)
    one = mc_replicates(sampler, SimConfig(9, 12, 1))
    two = mc_replicates(sampler, SimConfig(9, 12, 2))
    assert np.array_equal(one, two)
    # replication k only depends on (seed, k)
    assert mc_replicates(sampler, SimConfig(9, 5, 1))[4] == one[4]


def test_wilson_interval():
    est = MCEstimate.from_hits(20, 400)
    assert est.estimate == 0.05
    lo, hi = est.ci95
    assert lo < 0.05 < hi
    assert lo == pytest.approx(0.0326, abs=5e-4) and hi == pytest.approx(0.0760, abs=5e-4)
    assert MCEstimate.from_hits(0, 50).ci95[0] == 0.0
    with pytest.raises(ContractError):
        SimConfig(replications=0)


def test_null_field_counts_are_poisson(rng):
    model = NullModel(0.5)
    counts = [len(simulate_null_field(model, 40.0, rng)) for _ in range(3000)]
    assert poisson_count_gof(np.array(counts), 20.0) > 1e-3
    ev = simulate_null_field(NullModel(0.5, MarkDistribution.normal(2.0, 3.0)), 20000.0, rng)
    assert stats.kstest(ev.y, "norm", args=(2.0, 3.0)).pvalue > 1e-3
    assert np.all(np.diff(ev.t) >= 0)


def test_piecewise_rate_field(rng):
    rate = PiecewiseRate((0.0, 1000.0, 3000.0), (0.2, 1.0))
    ev = simulate_null_field(NullModel(rate), 3000.0, rng)
    left = np.count_nonzero(ev.t < 1000.0)
    assert left == pytest.approx(200, abs=5 * np.sqrt(200))
    assert len(ev) - left == pytest.approx(2000, abs=5 * np.sqrt(2000))


def test_gamma_mixed_overdispersion(rng):
    alpha, rho, cell = 0.5, 2.0, 1.0
    counts = []
    for _ in range(2000):
        ev = simulate_negbinom_field(NullModel(rho), 10.0, alpha, rng, cell=cell)
        counts.append(np.count_nonzero(ev.t < 1.0))
    c = np.array(counts)
    assert c.mean() == pytest.approx(rho, abs=0.15)
    assert c.var() == pytest.approx(rho * (1 + 1 / alpha), rel=0.15)


def test_alternative_field_shifts_marks(rng):
    ev = simulate_alternative_field(NullModel(5.0), 2000.0, 1500.0, 4.0, 1.0, 500.0, rng)
    inside = (ev.t >= 1000.0) & (ev.t < 1500.0)
    assert ev.y[inside].mean() == pytest.approx(4.0, abs=0.15)
    assert ev.y[~inside].mean() == pytest.approx(0.0, abs=0.1)
    with pytest.raises(ContractError):
        simulate_alternative_field(NullModel(1.0), 100.0, 10.0, 1.0, 0.5, 50.0, rng)


def test_paired_end_null_geometry(rng):
    m = PairedEndModel()
    rp = simulate_paired_end(m, rng, (), 200_000)
    y = (rp.x_minus - rp.x_plus)[rp.mapped]
    assert y.mean() == pytest.approx(200.0, abs=0.5)
    assert y.std() == pytest.approx(10.0, rel=0.05)
    assert np.count_nonzero(~rp.mapped) / len(rp) == pytest.approx(m.p, rel=0.1)
    assert np.count_nonzero(rp.hanging_minus) == pytest.approx(np.count_nonzero(rp.hanging_plus), rel=0.15)
    assert np.all(np.diff(np.where(np.isinf(rp.x_plus), rp.x_minus, rp.x_plus)) >= 0)


def test_paired_end_homozygous_deletion(rng):
    m = PairedEndModel(p=0.01)
    dl = SVHypothesis("deletion", 50_000.0, 500.0, 0.999999)
    rp = simulate_paired_end(m, rng, (dl,), 100_000)
    reads = np.concatenate([rp.x_plus, rp.x_minus])
    assert np.count_nonzero((reads > 50_000 + 5) & (reads < 50_500 - m.R - 5)) == 0
    # bracketing inserts are longer by the deletion width
    brk = rp.mapped & (rp.x_plus < 50_000 - m.R) & (rp.x_minus > 50_500)
    assert (rp.x_minus - rp.x_plus)[brk].mean() == pytest.approx(700.0, abs=5.0)


def test_paired_end_insertion_creates_hanging_reads(rng):
    m = PairedEndModel(p=0.01)
    ins = SVHypothesis("insertion", 50_000.0, 40.0, 0.999999)
    rp = simulate_paired_end(m, rng, (ins,), 100_000)
    near = rp.hanging_minus & (np.abs(rp.x_plus - 49_900) < 150)
    far = rp.hanging_minus & (np.abs(rp.x_plus - 20_000) < 150)
    assert np.count_nonzero(near) > 5 * max(np.count_nonzero(far), 1)


def test_overlapping_variants_rejected(rng):
    with pytest.raises(ContractError):
        simulate_paired_end(PairedEndModel(), rng, (SVHypothesis("deletion", 100.0, 500.0, 0.5),
                                                    SVHypothesis("deletion", 300.0, 10.0, 0.5)), 5000)


def test_mc_pvalue_bounds():
    sampler = PairedScanSampler(PairedEndModel(), "ZB", "deletion", length=20_000)
    est = mc_pvalue(sampler, -1e9, SimConfig(1, 3))
    assert est.estimate == 1.0
    with pytest.raises(ContractError):
        PairedScanSampler(PairedEndModel(), "ZX", length=5000)(np.random.default_rng(0))
