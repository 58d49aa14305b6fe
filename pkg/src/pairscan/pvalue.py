"""Analytic approximations to scan false-positive rates and threshold inversion.

Every approximation returns a :class:`PValueReport` holding the value with the
overshoot correction set to one (``p_unit``) and evaluated (``p_nu``).

Units: ``rho`` is the event rate per base, ``delta`` the window length in
bases, ``m`` the number of grid points and ``step`` the grid spacing in bases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np
from scipy import integrate, optimize, special, stats

from .core import (
    ContractError,
    MarkDistribution,
    ModelDomainError,
    PiecewiseRate,
    SolveError,
    TiltedFamily,
    nu,
    solve_implied_beta,
    solve_tilt_for_mean,
)
from .mixture import MixtureFamily
from .sv import BracketFamily, HangingFamily, PairedEndModel


@dataclass
class PValueReport:
    p_unit: float
    p_nu: float
    method: str
    inputs: dict = field(default_factory=dict)
    detail: dict = field(default_factory=dict)
    valid: bool = True

    def p(self, nu_mode: str = "evaluated") -> float:
        if nu_mode not in ("unit", "evaluated"):
            raise ContractError(f"unknown nu mode {nu_mode!r}")
        return self.p_unit if nu_mode == "unit" else self.p_nu


def _poisson_clump(q: float) -> tuple[float, bool]:
    """``1 - exp(-q)`` with a flag for exponents outside the small-p regime."""
    return float(-np.expm1(-max(q, 0.0))), q <= 0.5


def _drift(family, beta: float) -> tuple[float, float]:
    fn = getattr(family, "drift", None)
    if fn is not None:
        return fn(beta)
    mo = family.moments(beta)
    return mo.xi, mo.sigma2


# ---------------------------------------------------------------------------
# fixed parameters


def pvalue_fixed(m: float, x: float, family: TiltedFamily, rho: float, delta: float,
                 step: float = 1.0) -> PValueReport:
    """Fixed-parameter approximation for the scan of ``beta*Z - rho*delta*psi``.

    ``beta`` solves ``rho*delta*J(beta) = x``. Families with a ``drift`` method
    (bracketing scores) use it for the jump-size moments.
    """
    omega = rho * delta
    beta = solve_implied_beta(family, x, omega)
    mo = family.moments(beta)
    xd_b, sd_b = _drift(family, beta)
    xd_0, sd_0 = _drift(family, 0.0)
    q1 = m * step * np.exp(-x) * rho * (xd_b - xd_0) / np.sqrt(2 * np.pi * omega * mo.sigma2)
    arg = 2 * np.sqrt(rho * step) * (xd_b - xd_0) / np.sqrt(sd_b + sd_0)
    v = nu(arg)
    p1, ok = _poisson_clump(q1)
    p2, _ = _poisson_clump(q1 * v)
    return PValueReport(p1, p2, "fixed", {"m": m, "x": x, "rho": rho, "delta": delta, "step": step},
                        {"beta": beta, "xi_beta": mo.xi, "sigma2_beta": mo.sigma2, "J": mo.kl,
                         "nu": v, "nu_arg": arg, "z_threshold": omega * mo.xi}, ok)


def pvalue_fixed_mixture(m: float, x: float, rho: float, delta: float, w: float, r: float,
                         sigma: float = 1.0, alpha: float | None = None, step: float = 1.0) -> PValueReport:
    """Fixed approximation for the mixture score; ``alpha`` adds gamma-mixed overdispersion."""
    from .core import GammaMixedFamily

    fam: TiltedFamily = MixtureFamily(w, r, MarkDistribution.normal(0.0, sigma))
    if alpha is not None:
        fam = GammaMixedFamily(fam, alpha)
    rep = pvalue_fixed(m, x, fam, rho, delta, step)
    rep.inputs.update(w=w, r=r, sigma=sigma, alpha=alpha)
    return rep


def pvalue_zb(m: float, x: float, model: PairedEndModel, w: float = 30.0, r: float = 0.1,
              kind: str = "deletion", step: float = 1.0) -> PValueReport:
    """Bracketing-score scan: the fixed formula with window mass ``rho1`` (unit window).

    ``x`` is on the likelihood scale; ``detail['z_threshold']`` gives the
    equivalent threshold for ``Z^B`` itself.
    """
    rep = pvalue_fixed(m, x, BracketFamily(model, w, r, kind), model.rho1, 1.0, step)
    rep.method = "zb"
    return rep


# ---------------------------------------------------------------------------
# maximum over w (mixture)


def _mix_terms(w: float, r: float, beta: float, mark: MarkDistribution):
    fam = MixtureFamily(w, r, mark)
    q = fam.integrals(beta)
    q0 = fam.integrals(0.0)
    return fam, q, q0


def _ell_integrand(w, x, rho, delta, r, mark, step, use_nu):
    omega = rho * delta
    fam = MixtureFamily(w, r, mark)
    b = solve_implied_beta(fam, x, omega)
    q, q0 = fam.integrals(b), fam.integrals(0.0)
    # D_w ell = beta_w' g + beta g_w with beta_w' from d/dw[J] = 0 at fixed x
    bp = -b * q["ggw"] / q["s2"]
    sig = omega * (bp * bp * q0["s2"] + 2 * bp * b * q0["ggw"] + b * b * q0["gw2"])
    sig /= mark.sd ** 2
    v = np.exp(-x) * (q["xi"] - q0["xi"]) * np.sqrt(max(sig, 0.0)) / (2 * np.pi * np.sqrt(omega * q["s2"]))
    if use_nu:
        v *= nu(2 * np.sqrt(rho * step) * (q["xi"] - q0["xi"]) / np.sqrt(q["s2"] + q0["s2"]))
    return v


def _z_beta(fam: MixtureFamily, x0: float, omega: float) -> float:
    return solve_tilt_for_mean(fam, x0, omega)


def _z_integrand(w, x0, rho, delta, r, mark, step, use_nu):
    omega = rho * delta
    fam = MixtureFamily(w, r, mark)
    b = _z_beta(fam, x0, omega)
    q, q0 = fam.integrals(b), fam.integrals(0.0)
    J = b * q["xi"] - q["psi"]
    bp = -(q["gw"] + b * q["ggw"]) / q["s2"]
    sig = omega * (-2 * bp * q["gw"] - b * q["gww"]) / mark.sd ** 2
    v = np.exp(-omega * J) * (q["xi"] - q0["xi"]) * np.sqrt(max(sig, 0.0)) / (
        2 * np.pi * np.sqrt(omega * q["s2"]))
    if use_nu:
        v *= nu(2 * np.sqrt(rho * step) * (q["xi"] - q0["xi"]) / np.sqrt(q["s2"] + q0["s2"]))
    return v


def pvalue_max_w(m: float, x: float, rho: float, delta: float, r: float, w0: float, w1: float,
                 statistic: str = "ell", mark: MarkDistribution = MarkDistribution(),
                 step: float = 1.0) -> PValueReport:
    """Scan maximized over ``w`` in ``[w0, w1]`` with ``r`` fixed.

    ``statistic='ell'`` thresholds the log likelihood at ``x`` with the implied
    tilt per ``w``; ``statistic='Z'`` thresholds the raw score at ``x``.
    """
    if w1 < w0:
        raise ContractError("w range must be ordered")
    omega = rho * delta
    inputs = {"m": m, "x": x, "rho": rho, "delta": delta, "r": r, "w0": w0, "w1": w1,
              "statistic": statistic, "step": step}
    if w1 == w0:
        fam = MixtureFamily(w0, r, mark)
        xl = x if statistic == "ell" else omega * fam.moments(_z_beta(fam, x, omega)).kl
        rep = pvalue_fixed(m, xl, fam, rho, delta, step)
        rep.method, rep.inputs = "max_w(degenerate)", inputs
        return rep
    f = _ell_integrand if statistic == "ell" else _z_integrand
    out = []
    for use_nu in (False, True):
        val, err = integrate.quad(f, w0, w1, args=(x, rho, delta, r, mark, step, use_nu),
                                  epsrel=1e-8, limit=200)
        out.append(m * step * rho * val)
    p1, ok = _poisson_clump(out[0])
    p2, _ = _poisson_clump(out[1])
    return PValueReport(p1, p2, "max_w", inputs, {"exponent_unit": out[0], "exponent_nu": out[1]}, ok)


def pvalue_laplace(m: float, x: float, rho: float, delta: float, r: float, w0: float, w1: float,
                   statistic: str = "Z", mark: MarkDistribution = MarkDistribution(),
                   step: float = 1.0) -> PValueReport:
    """Laplace approximation of the max-over-``w`` integral around the minimizer of ``J``.

    Only the raw-score scan has a nondegenerate minimizer; for the likelihood
    scan ``J`` equals ``x`` for every ``w``.
    """
    if statistic != "Z":
        raise ContractError("the likelihood scan has constant J in w; use pvalue_max_w")
    omega = rho * delta

    def Jw(w: float) -> float:
        fam = MixtureFamily(w, r, mark)
        return fam.moments(_z_beta(fam, x, omega)).kl

    res = optimize.minimize_scalar(Jw, bounds=(w0, w1), method="bounded", options={"xatol": 1e-9})
    ws = float(res.x)
    tol = 1e-4 * (w1 - w0)
    if ws - w0 < tol or w1 - ws < tol:
        raise SolveError(f"minimizer w*={ws:.4g} is on the boundary; use pvalue_max_w")
    fam = MixtureFamily(ws, r, mark)
    b = _z_beta(fam, x, omega)
    q, q0 = fam.integrals(b), fam.integrals(0.0)
    s2u = mark.sd ** 2
    sig = -b * omega * q["gww"] / s2u
    cond = b * b * omega * (q["gw2"] - q["ggw"] ** 2 / q["s2"]) / s2u
    d2 = sig - cond
    if not d2 > 0:
        raise SolveError("nonpositive curvature of J at the minimizer")
    core = np.exp(-omega * res.fun) * (q["xi"] - q0["xi"]) * np.sqrt(sig / (2 * np.pi * omega * q["s2"] * d2))
    v = nu(2 * np.sqrt(rho * step) * (q["xi"] - q0["xi"]) / np.sqrt(q["s2"] + q0["s2"]))
    p1, ok = _poisson_clump(m * step * rho * core)
    p2, _ = _poisson_clump(m * step * rho * core * v)
    return PValueReport(p1, p2, "laplace", {"m": m, "x": x, "rho": rho, "delta": delta, "r": r,
                                            "w0": w0, "w1": w1},
                        {"w_star": ws, "beta": b, "Sigma": sig, "D2J": d2, "J": res.fun}, ok)


# ---------------------------------------------------------------------------
# maximum over w and r


def _wr_integrand(w, r, x, rho, delta, mark):
    omega = rho * delta
    fam = MixtureFamily(w, r, mark)
    b = solve_implied_beta(fam, x, omega)
    q, q0 = fam.integrals(b), fam.integrals(0.0)
    bw = -b * q["ggw"] / q["s2"]
    br = -b * q["ggr"] / q["s2"]
    # null covariance of (D_w ell, D_r ell)
    A = omega * (bw * bw * q0["s2"] + 2 * bw * b * q0["ggw"] + b * b * q0["gw2"]) / mark.sd ** 2
    B = omega * (br * br * q0["s2"] + 2 * br * b * q0["ggr"] + b * b * q0["gr2"])
    C = omega * (bw * br * q0["s2"] + b * bw * q0["ggr"] + b * br * q0["ggw"] + b * b * q0["gwgr"]) / mark.sd
    det = max(A * B - C * C, 0.0)
    return np.exp(-x) * (q["xi"] - q0["xi"]) * np.sqrt(det) / ((2 * np.pi) ** 1.5 * np.sqrt(omega * q["s2"]))


def edge_correction_r(p_wr: float, p_w_at_r1: float) -> float:
    """Add the max-over-``w`` tail at the upper ``r`` endpoint."""
    return float(min(1.0, p_wr + p_w_at_r1))


def pvalue_max_wr(m: float, x: float, rho: float, delta: float, w0: float, w1: float,
                  r0: float, r1: float, mark: MarkDistribution = MarkDistribution(),
                  step: float = 1.0, edge: bool = True, nodes: tuple[int, int] = (24, 16)) -> PValueReport:
    """Likelihood scan maximized over ``w`` and ``r`` (Gauss-Legendre tensor rule)."""
    xw, ww = np.polynomial.legendre.leggauss(nodes[0])
    xr, wr = np.polynomial.legendre.leggauss(nodes[1])
    W = 0.5 * (w1 - w0) * xw + 0.5 * (w1 + w0)
    Rg = 0.5 * (r1 - r0) * xr + 0.5 * (r1 + r0)
    tot = 0.0
    for wi, a in zip(W, ww):
        for ri, c in zip(Rg, wr):
            tot += a * c * _wr_integrand(wi, ri, x, rho, delta, mark)
    tot *= 0.25 * (w1 - w0) * (r1 - r0)
    p2d, ok = _poisson_clump(m * step * rho * tot)
    p = p2d
    detail = {"p_interior": p2d}
    if edge:
        pe = pvalue_max_w(m, x, rho, delta, r1, w0, w1, "ell", mark, step).p_unit
        detail["p_edge"] = pe
        p = edge_correction_r(p2d, pe)
    return PValueReport(p, p, "max_wr", {"m": m, "x": x, "rho": rho, "delta": delta, "w0": w0,
                                         "w1": w1, "r0": r0, "r1": r1}, detail, ok)


# ---------------------------------------------------------------------------
# non-homogeneous rate


def pvalue_nonhomogeneous(x: float, rate: PiecewiseRate, delta: float, w: float, r: float,
                          grid: np.ndarray, mark: MarkDistribution = MarkDistribution(),
                          step: float = 1.0) -> PValueReport:
    """Sum of per-position fixed-formula terms with ``rho*delta`` replaced by ``Omega(t)``."""
    grid = np.asarray(grid, dtype=float)
    om = np.asarray(rate.omega(grid, delta), dtype=float)
    rt = np.asarray(rate(grid), dtype=float)
    rtd = np.asarray(rate(grid + delta), dtype=float)
    fam = MixtureFamily(w, r, mark)
    mo0 = fam.moments(0.0)
    keys = np.round(np.stack([om, rt, rtd], axis=1), 12)
    uniq, inv = np.unique(keys, axis=0, return_inverse=True)
    t1 = np.zeros(len(uniq))
    t2 = np.zeros(len(uniq))
    for i, (o, a, b) in enumerate(uniq):
        if o <= 0:
            continue
        beta = solve_implied_beta(fam, x, o)
        mo = fam.moments(beta)
        t1[i] = step * np.exp(-x) * (a * mo.xi - b * mo0.xi) / np.sqrt(2 * np.pi * o * mo.sigma2)
        t2[i] = t1[i] * nu(2 * np.sqrt(a * step) * (mo.xi - mo0.xi) / np.sqrt(mo.sigma2 + mo0.sigma2))
    inv = inv.ravel()
    q1 = float(np.sum(np.maximum(t1[inv], 0.0)))
    q2 = float(np.sum(np.maximum(t2[inv], 0.0)))
    p1, ok = _poisson_clump(q1)
    p2, _ = _poisson_clump(q2)
    return PValueReport(p1, p2, "nonhomogeneous", {"x": x, "delta": delta, "w": w, "r": r,
                                                   "m": grid.size}, {"exponent_unit": q1}, ok)


# ---------------------------------------------------------------------------
# smooth (shot-noise) fields


class SmoothField(Protocol):
    stationary: bool

    def at(self, beta: float, tau: float) -> dict[str, float]: ...


@dataclass
class ShotNoiseField:
    """``Z(tau) = sum_i k(tau - t_i)`` over Poisson points with rate ``rho``.

    ``kernel='gaussian'`` uses ``height * exp(-s^2 / (2 w^2))``.
    """

    w: float
    rho: float | PiecewiseRate = 1.0
    height: float = 1.0
    kernel: str = "gaussian"

    def __post_init__(self) -> None:
        if self.kernel != "gaussian":
            raise ModelDomainError("crossing-rate approximations need a twice differentiable kernel")
        s, qs = np.polynomial.legendre.leggauss(200)
        self._s = 10.0 * self.w * s
        self._q = 10.0 * self.w * qs

    @property
    def stationary(self) -> bool:
        return not isinstance(self.rho, PiecewiseRate)

    def at(self, beta: float, tau: float) -> dict[str, float]:
        s = self._s
        lam = self._q * (self.rho(tau - s) if isinstance(self.rho, PiecewiseRate) else self.rho)
        g = self.height * np.exp(-0.5 * (s / self.w) ** 2)
        gd = -s / self.w ** 2 * g
        e = lam * np.exp(beta * g)
        return {"psi": float(np.sum(lam * np.expm1(beta * g))), "mean": float(np.sum(e * g)),
                "var": float(np.sum(e * g * g)), "dmean": float(np.sum(e * gd)),
                "dvar": float(np.sum(e * gd * gd)), "cov": float(np.sum(e * g * gd))}


@dataclass
class StationaryHangingField:
    """Adapter presenting :class:`HangingFamily` as a stationary smooth field."""

    family: HangingFamily
    side: str = "both"
    stationary: bool = True

    def at(self, beta: float, tau: float = 0.0) -> dict[str, float]:
        q = self.family.field(beta)
        if self.side == "both":
            return {"psi": q["psi"], "mean": q["mean"], "var": q["var"], "dmean": 0.0,
                    "dvar": q["dvar_minus"] + q["dvar_plus"], "cov": q["cov_minus"] + q["cov_plus"]}
        if self.side not in ("minus", "plus"):
            raise ContractError(f"unknown side {self.side!r}")
        k = "_" + self.side
        return {"psi": q["psi" + k], "mean": q["mean" + k], "var": q["var" + k], "dmean": 0.0,
                "dvar": q["dvar" + k], "cov": q["cov" + k]}


def _solve_field_beta(field_: SmoothField, tau: float, target: float, scale: str) -> float:
    def f(b: float) -> float:
        q = field_.at(b, tau)
        return (q["mean"] if scale == "Z" else b * q["mean"] - q["psi"]) - target

    if f(1e-12) >= 0:
        raise SolveError("threshold is not above the null mean of the field")
    hi = 1.0
    while f(hi) < 0:
        hi *= 2.0
        if hi > 1e4:
            raise SolveError("threshold unreachable")
    return optimize.brentq(f, 1e-12, hi, xtol=1e-14, rtol=1e-15)


def eta(y):
    """``phi(y) + y*Phi(y)``."""
    return stats.norm.pdf(y) + y * special.ndtr(y)


def _smooth_terms(field_: SmoothField, x: float, tau: float, scale: str) -> tuple[float, float, dict]:
    b = _solve_field_beta(field_, tau, x, scale)
    q = field_.at(b, tau)
    var, dvar, cov, dmean = q["var"], q["dvar"], q["cov"], q["dmean"]
    if not var > 0:
        raise ModelDomainError("field variance vanishes")
    J = b * q["mean"] - q["psi"]
    cond = dvar - cov * cov / var
    if scale == "ell":
        # beta_tau keeps J(beta_tau; tau) = x, hence beta' = -J_tau / J_beta
        bdot = -b * cov / var
        xdot = dmean + bdot * (b * q["mean"] - x - q["psi"]) / b ** 2
        sigma = bdot * bdot * var + 2 * b * bdot * cov + b * b * dvar
    else:
        bdot = -(dmean + b * cov) / var
        xdot = 0.0
        # E[-D^2 beta(Z - x)] with E Z'' = -beta E[g'^2] for a stationary field
        d2mean = -b * dvar if field_.stationary else q.get("d2mean", -b * dvar)
        sigma = -2 * bdot * dmean - b * d2mean
    xi_arg = (xdot - dmean) / np.sqrt(cond)
    rice = np.exp(-J) * np.sqrt(cond / (2 * np.pi * var)) * eta(xi_arg)
    pws2 = np.exp(-J) * np.sqrt(sigma / (b * b * var)) / (2 * np.pi)
    return float(rice), float(pws2), {"beta": b, "J": J, "cond_var": cond, "var": var}


def pvalue_smooth(field_: SmoothField, x: float, tau0: float, tau1: float, scale: str = "Z",
                  n_tau: int = 64) -> PValueReport:
    """Crossing-rate approximations for a smooth field over ``[tau0, tau1]``.

    ``p_unit`` is the upcrossing (Rice) form and ``detail['p_pws2']`` the
    curvature form; they coincide when the threshold follows the likelihood
    scale (``scale='ell'``).
    """
    if scale not in ("Z", "ell"):
        raise ContractError("scale must be 'Z' or 'ell'")
    L = tau1 - tau0
    if L <= 0:
        return PValueReport(0.0, 0.0, "smooth", {"x": x, "tau0": tau0, "tau1": tau1}, {"p_pws2": 0.0})
    if field_.stationary:
        rice, pws2, d = _smooth_terms(field_, x, tau0, scale)
        q_r, q_p = L * rice, L * pws2
    else:
        ts, qs = np.polynomial.legendre.leggauss(n_tau)
        taus = 0.5 * L * ts + 0.5 * (tau0 + tau1)
        vals = np.array([_smooth_terms(field_, x, t, scale)[:2] for t in taus])
        q_r, q_p = (0.5 * L * qs) @ vals
        d = {}
    p1, ok = _poisson_clump(q_r)
    p2, _ = _poisson_clump(q_p)
    d.update(p_pws2=p2, exponent_rice=q_r, exponent_pws2=q_p)
    return PValueReport(p1, p1, "smooth", {"x": x, "tau0": tau0, "tau1": tau1, "scale": scale}, d, ok)


def pvalue_hanging(m: float, x: float, model: PairedEndModel, kind: str = "insertion",
                   w: float = 30.0, r: float = 0.1, w_range: tuple[float, float] = (0.0, 150.0),
                   edge: bool = True, side: str = "both") -> PValueReport:
    """Hanging-read score ``Z^H`` over ``m`` bases, thresholded at ``x``.

    Insertions use the one-parameter crossing rate. Deletions maximize
    ``Z^-(s) + Z^+(s + w')`` over ``w'`` in ``w_range``: a two-parameter
    volume term plus, with ``edge``, the one-parameter term for a boundary
    value of ``w'``. ``side='minus'`` or ``'plus'`` treats one strand's score alone.
    """
    fam = HangingFamily(model, w if kind == "insertion" else 0.0, r, kind)
    fld = StationaryHangingField(fam, side)
    rice, _, d = _smooth_terms(fld, x, 0.0, "Z")
    one = m * rice
    if kind == "insertion" or side != "both":
        p, ok = _poisson_clump(one)
        return PValueReport(p, p, "hanging", {"m": m, "x": x, "kind": kind}, d, ok)
    b = d["beta"]
    q = fam.field(b)
    V = q["var"]
    # gradient of Z^-(s) + Z^+(s + w') in (s, w')
    c_s = q["cov_minus"] + q["cov_plus"]
    C = np.array([[q["dvar_minus"] + q["dvar_plus"], q["dvar_plus"]], [q["dvar_plus"], q["dvar_plus"]]])
    cv = np.array([c_s, q["cov_plus"]])
    det = float(np.linalg.det(C - np.outer(cv, cv) / V))
    two = m * (w_range[1] - w_range[0]) * np.exp(-d["J"]) * np.sqrt(max(det, 0.0) / V) / (2 * np.pi) ** 1.5
    p, ok = _poisson_clump(two + (one if edge else 0.0))
    d.update(volume_term=two, edge_term=one)
    return PValueReport(p, p, "hanging", {"m": m, "x": x, "kind": kind, "w_range": w_range}, d, ok)


def discrete_upper_bound(m: float, x1: float, beta: float, J: float, rho0: float, sigma0: float,
                         sigma_beta: float, step: float = 1.0, boundary: bool = True) -> float:
    """Discrete-time upper bound built from lag-one normal conditional moments.

    Each grid step contributes
    ``exp(-J) * int_0^inf exp(-beta u) Phi(-(rho0 u - (1-rho0) x1) / s) du / sqrt(2 pi sigma_beta^2)``
    with ``s = sigma0 * sqrt(1 - rho0^2)``; ``u`` is the overshoot ``Delta*y``.
    With ``boundary`` a single-point marginal term is added.
    """
    if not 0 < rho0 <= 1:
        raise ModelDomainError("lag correlation must lie in (0, 1]")
    pref = np.exp(-J) / np.sqrt(2 * np.pi * sigma_beta ** 2)
    s = sigma0 * np.sqrt(max(1 - rho0 * rho0, 0.0))
    if s == 0.0:
        per = 0.0
    else:
        f = lambda u: np.exp(-beta * u) * special.ndtr(-(rho0 * u - (1 - rho0) * x1) / s)
        per = integrate.quad(f, 0.0, np.inf, epsabs=1e-14, limit=200)[0]
    total = m * pref * per
    if boundary:
        total += pref / beta
    return float(min(1.0, total))


# ---------------------------------------------------------------------------
# thresholds


def solve_threshold(pfun: Callable[[float], float], alpha: float, lo: float = 1.0,
                    hi: float = 60.0) -> float:
    """Threshold ``x`` with ``pfun(x) = alpha`` for a decreasing approximation."""
    if not 0 < alpha < 1:
        raise ContractError("alpha must lie in (0, 1)")
    plo, phi = pfun(lo), pfun(hi)
    if not (plo >= alpha >= phi):
        raise SolveError(f"alpha={alpha} not bracketed: p({lo})={plo:.4g}, p({hi})={phi:.4g}")
    x = optimize.brentq(lambda t: pfun(t) - alpha, lo, hi, xtol=1e-10, rtol=1e-12)
    return float(x)


@dataclass(frozen=True)
class ThresholdRequest:
    """Statistic description for :func:`threshold_for`.

    ``statistic`` is one of ``fixed``, ``max_w_ell``, ``max_w_Z``, ``max_wr``,
    ``bonferroni`` (returns the pair), ``ZB``, ``ZH``, ``Zminus``, ``Zplus``.
    ``m`` counts grid points spaced ``step`` bases apart.
    """

    statistic: str
    alpha: float = 0.05
    m: float = 1e6
    rho: float = 0.5
    delta: float = 200.0
    w: float = 2.0
    r: float = 0.1
    w0: float = 0.5
    w1: float = 5.0
    r0: float = 0.03
    r1: float = 0.3
    b_w: tuple[float, float] = (1.0, 3.5)
    sigma: float = 1.0
    step: float = 1.0
    nu_mode: str = "unit"
    model: PairedEndModel | None = None
    sv_w: float = 30.0
    sv_r: float = 0.1
    kind: str = "deletion"
    hang_w_range: tuple[float, float] = (0.0, 150.0)


def threshold_for(req: ThresholdRequest):
    """Invert the approximation matching ``req.statistic`` at level ``req.alpha``."""
    mark = MarkDistribution.normal(0.0, req.sigma)
    nm = req.nu_mode
    st = req.statistic
    if st == "fixed":
        return solve_threshold(lambda x: pvalue_fixed_mixture(req.m, x, req.rho, req.delta, req.w, req.r,
                                                              req.sigma, step=req.step).p(nm), req.alpha)
    if st in ("max_w_ell", "max_w_Z"):
        stat = "ell" if st == "max_w_ell" else "Z"
        return solve_threshold(lambda x: pvalue_max_w(req.m, x, req.rho, req.delta, req.r, req.w0, req.w1,
                                                      stat, mark, req.step).p(nm), req.alpha, 2.0, 60.0)
    if st == "max_wr":
        return solve_threshold(lambda x: pvalue_max_wr(req.m, x, req.rho, req.delta, req.w0, req.w1,
                                                       req.r0, req.r1, mark, req.step).p(nm),
                               req.alpha, 5.0, 40.0)
    if st == "bonferroni":
        return tuple(solve_threshold(lambda x, w=w: pvalue_fixed_mixture(req.m, x, req.rho, req.delta, w, req.r,
                                                                         req.sigma, step=req.step).p(nm),
                                     req.alpha / 2) for w in req.b_w)
    model = req.model or PairedEndModel()
    if st == "ZB":
        fam = BracketFamily(model, req.sv_w, req.sv_r, req.kind)
        x = solve_threshold(lambda t: pvalue_fixed(req.m, t, fam, model.rho1, 1.0, req.step).p(nm), req.alpha)
        return pvalue_fixed(req.m, x, fam, model.rho1, 1.0, req.step).detail["z_threshold"]
    if st in ("Zminus", "Zplus"):
        side = "minus" if st == "Zminus" else "plus"
        fam = HangingFamily(model, req.sv_w if req.kind == "insertion" else 0.0, req.sv_r, req.kind)
        lo = StationaryHangingField(fam, side).at(0.0)["mean"]
        return solve_threshold(lambda t: pvalue_hanging(req.m * req.step, t, model, req.kind, req.sv_w, req.sv_r,
                                                        side=side).p_unit, req.alpha, lo + 0.5, 400.0)
    if st == "ZH":
        fam = HangingFamily(model, req.sv_w if req.kind == "insertion" else 0.0, req.sv_r, req.kind)
        lo = fam.moments(0.0).xi + 1e-3
        return solve_threshold(lambda t: pvalue_hanging(req.m * req.step, t, model, req.kind, req.sv_w, req.sv_r,
                                                        req.hang_w_range).p_unit, req.alpha, lo + 1.0, 400.0)
    raise ContractError(f"unknown statistic {st!r}")
