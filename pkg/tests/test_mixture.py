import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pairscan.core import ContractError, MarkDistribution, ModelDomainError, NullModel, PiecewiseRate, solve_implied_beta
from pairscan.mixture import (
    MarkedEvents,
    MixtureFamily,
    ScanRegime,
    g_derivatives,
    g_mixture,
    loglik_ell,
    scan_max,
    score_Z,
    smooth_kernel_score,
)


def test_kernel_is_log_likelihood_ratio():
    y = np.linspace(-4, 4, 17)
    w, r = 1.3, 0.2
    phi = lambda z: np.exp(-0.5 * z * z)
    want = np.log((1 - r) + r * phi(y - w) / phi(y))
    np.testing.assert_allclose(g_mixture(y, w, r), want, rtol=1e-13)
    assert np.all(g_mixture(y, 0.0, r) == 0.0)
    with pytest.raises(ModelDomainError):
        g_mixture(y, w, 1.0)


@settings(max_examples=30, deadline=None)
@given(y=st.floats(-6, 6), w=st.floats(0.2, 4.0), r=st.floats(0.01, 0.95))
def test_kernel_derivatives(y, w, r):
    d = g_derivatives(np.array([y]), w, r)
    h = 1e-5
    gw = (g_mixture(y, w + h, r) - g_mixture(y, w - h, r)) / (2 * h)
    gww = (g_mixture(y, w + h, r) - 2 * g_mixture(y, w, r) + g_mixture(y, w - h, r)) / h ** 2
    hr = 1e-6 * min(r, 1 - r)
    gr = (g_mixture(y, w, r + hr) - g_mixture(y, w, r - hr)) / (2 * hr)
    assert float(d["gw"][0]) == pytest.approx(float(gw), rel=1e-5, abs=1e-7)
    assert float(d["gww"][0]) == pytest.approx(float(gww), rel=1e-3, abs=1e-4)
    assert float(d["gr"][0]) == pytest.approx(float(gr), rel=1e-5, abs=1e-7)


def test_mixture_family_is_likelihood_ratio_at_one():
    # E0[exp g] = 1 so psi(1) = 0 for every (w, r)
    for w, r in [(0.5, 0.1), (2.0, 0.3), (4.0, 0.05)]:
        assert MixtureFamily(w, r).moments(1.0).psi == pytest.approx(0.0, abs=1e-12)


def test_empirical_marks_against_hermite_oracle():
    # smoothed sample = equal mixture of N(s_i, h^2); integrate each component by Gauss-Hermite
    rng = np.random.default_rng(0)
    emp = MarkDistribution.empirical(rng.normal(1.0, 2.0, 50), bandwidth=0.4)
    w, r, beta = 3.0, 0.2, 0.8
    fam = MixtureFamily(w, r, emp)
    x, q = np.polynomial.hermite_e.hermegauss(80)
    q = q / np.sqrt(2 * np.pi)
    y = (np.asarray(emp.sample)[:, None] + emp.bandwidth * x - emp.mean) / emp.sd
    g = g_mixture(y, w / emp.sd, r)
    psi = np.mean(np.expm1(beta * g) @ q)
    xi = np.mean((g * np.exp(beta * g)) @ q)
    mo = fam.moments(beta)
    assert mo.psi == pytest.approx(psi, rel=1e-6)
    assert mo.xi == pytest.approx(xi, rel=1e-6)


def test_score_Z_window_is_closed():
    ev = MarkedEvents(np.array([1.0, 2.0, 3.0, 5.0]), np.array([0.5, 2.0, -1.0, 3.0]))
    z = score_Z(ev, 3.0, 2.0, 0.1, 2.0)
    assert z == pytest.approx(float(np.sum(g_mixture(np.array([0.5, 2.0, -1.0]), 2.0, 0.1))))
    assert score_Z(ev, 0.5, 2.0, 0.1, 0.3) == 0.0
    with pytest.raises(ContractError):
        MarkedEvents(np.array([2.0, 1.0]), np.array([0.0, 0.0]))


def test_smooth_kernel_score():
    assert smooth_kernel_score([0.0], 0.0, 2.0) == pytest.approx(0.5)
    assert smooth_kernel_score([0.0, 3.0], 1.0, 2.0) == pytest.approx(0.25)
    with pytest.raises(ModelDomainError):
        smooth_kernel_score([0.0], 0.0, 2.0, "box")


def _brute(ev, model, regime, grid):
    """Exhaustive max over every (t, w, r) cell, evaluated one cell at a time."""
    best = None
    for t, w, r in itertools.product(grid, regime.w_grid(), regime.r_grid()):
        omega = float(model.omega(t, regime.delta))
        if regime.kind == "score_only_Z" or regime.statistic == "Z":
            v = score_Z(ev, t, w, r, regime.delta, model.mark)
        else:
            fam = MixtureFamily(float(w), float(r), model.mark)
            om_beta = omega if isinstance(model.rho, PiecewiseRate) else float(model.omega(grid[-1], regime.delta))
            beta = regime.beta if regime.beta is not None else solve_implied_beta(fam, regime.x_implied, om_beta)
            v = loglik_ell(ev, t, w, r, beta, model, regime.delta)
            if regime.kind == "two_window_bonferroni":
                v /= regime.b0 if w == regime.w0 else regime.b1
        if best is None or v > best:
            best = v
    return best


REGIMES = [
    ScanRegime("fixed_wr", delta=5.0, w0=2.0, r0=0.1, x_implied=3.0),
    ScanRegime("fixed_wr", delta=5.0, w0=2.0, r0=0.1, beta=0.7),
    ScanRegime("max_w", delta=5.0, w0=1.0, w1=2.0, w_step=0.25, r0=0.1, statistic="Z"),
    ScanRegime("max_w", delta=5.0, w0=1.0, w1=2.0, w_step=0.5, r0=0.2, x_implied=4.0),
    ScanRegime("max_wr", delta=5.0, w0=1.0, w1=2.0, w_step=0.5, r0=0.1, r1=0.3, r_step=0.1, x_implied=4.0),
    ScanRegime("two_window_bonferroni", delta=5.0, w0=1.0, w1=3.0, r0=0.1, x_implied=4.0, b0=1.2, b1=0.9),
    ScanRegime("score_only_Z", delta=5.0, w0=2.5, r0=0.1),
]


@pytest.mark.parametrize("regime", REGIMES, ids=lambda r: f"{r.kind}-{r.statistic}")
@pytest.mark.parametrize("piecewise", [False, True])
def test_scan_matches_brute_force(regime, piecewise):
    rng = np.random.default_rng(7)
    rho = PiecewiseRate((-10.0, 8.0, 40.0), (0.8, 1.5)) if piecewise else 1.0
    model = NullModel(rho)
    n_t = 100 // (len(regime.w_grid()) * len(regime.r_grid()))
    grid = 5.0 + 2.5 * np.arange(min(n_t, 12))
    t = np.sort(rng.uniform(0, grid[-1], 20))
    y = rng.standard_normal(20) + 1.5 * (rng.random(20) < 0.4)
    ev = MarkedEvents(t, y)
    got = scan_max(ev, model, regime, grid)
    want = _brute(ev, model, regime, grid)
    assert got.value == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_scan_tie_break_is_leftmost():
    ev = MarkedEvents(np.array([1.0, 11.0]), np.array([2.0, 2.0]))
    res = scan_max(ev, NullModel(1.0), ScanRegime("score_only_Z", delta=2.0, w0=2.0), np.arange(0.0, 20.0))
    assert res.t == 1.0


def test_null_likelihood_ratio_has_unit_mean():
    # E0[exp(ell)] = 1 for ell = beta*Z - Omega*psi(beta)
    rng = np.random.default_rng(2024)
    n_rep, omega, w, r, beta = 100_000, 2.0, 2.0, 0.1, 0.8
    psi = MixtureFamily(w, r).moments(beta).psi
    n = rng.poisson(omega, n_rep)
    g = g_mixture(rng.standard_normal(n.sum()), w, r)
    z = np.bincount(np.repeat(np.arange(n_rep), n), weights=g, minlength=n_rep)
    lr = np.exp(beta * z - omega * psi)
    assert abs(lr.mean() - 1.0) < 3 * lr.std() / np.sqrt(n_rep)


def test_regime_validation():
    with pytest.raises(ContractError):
        ScanRegime("nope")
    with pytest.raises(ContractError):
        ScanRegime("max_w")
    with pytest.raises(ContractError):
        ScanRegime("max_wr", w1=4.0)
    with pytest.raises(ContractError):
        scan_max(MarkedEvents(np.zeros(0), np.zeros(0)), NullModel(1.0), ScanRegime(), np.zeros(0))
