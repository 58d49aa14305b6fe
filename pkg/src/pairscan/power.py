"""Marginal power under a specified alternative by a normal approximation.

The statistic evaluated at the signal location is treated as normal with its
mean and variance under the true alternative; power is
``Phi((mu - threshold) / sd)``, maximized over the scan's parameter grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .core import ContractError, MarkDistribution, SolveError, composite_gauss, solve_implied_beta
from .mixture import MixtureFamily, g_mixture
from .pvalue import StationaryHangingField, _smooth_terms, eta
from .sv import BracketFamily, HangingFamily, PairedEndModel, _hanging_c, bracket_weight


@dataclass(frozen=True)
class Alternative:
    """True signal: carrier fraction ``r1`` and shift or variant length ``w1``."""

    r1: float
    w1: float
    kind: str = "mixture"

    def __post_init__(self) -> None:
        if not 0.0 <= self.r1 <= 1.0:
            raise ContractError("r1 must lie in [0, 1]")
        if self.kind not in ("mixture", "deletion", "insertion"):
            raise ContractError(f"unknown alternative kind {self.kind!r}")


@dataclass(frozen=True)
class Statistic:
    """Scan statistic description used by :func:`marginal_power`.

    ``name`` is one of ``fixed_ell``, ``fixed_Z``, ``max_w_ell``, ``max_w_Z``,
    ``max_wr``, ``bonferroni``, ``ZB``, ``ZH``.
    """

    name: str
    rho: float = 0.5
    delta: float = 200.0
    w: float = 2.0
    r: float = 0.1
    sigma: float = 1.0
    w_grid: tuple[float, float, float] = (0.5, 5.0, 0.05)
    r_grid: tuple[float, float, float] = (0.03, 0.3, 0.01)
    b_w: tuple[float, float] = (1.0, 3.5)
    model: PairedEndModel | None = None


@dataclass
class PowerReport:
    statistic: str
    threshold: float | tuple
    power: float
    mean: float
    sd: float
    detail: dict = field(default_factory=dict)


def _exceed(mu: float, sd: float, x: float) -> float:
    if sd <= 0:
        return 1.0 if mu >= x else 0.0
    return float(special.ndtr((mu - x) / sd))


def _grid(spec: tuple[float, float, float]) -> np.ndarray:
    lo, hi, st = spec
    return np.round(lo + st * np.arange(int(round((hi - lo) / st)) + 1), 10)


# ---------------------------------------------------------------------------
# mixture scans


class _MixturePower:
    def __init__(self, st: Statistic, alt: Alternative):
        self.st = st
        self.omega = st.rho * st.delta
        w1 = alt.w1 / st.sigma
        hi = max(w1, 0.0) + 12.0
        lo = min(w1, 0.0) - 12.0
        self.y, q = composite_gauss(lo, hi, panel=0.25)
        phi = np.exp(-0.5 * self.y ** 2) / np.sqrt(2 * np.pi)
        phi1 = np.exp(-0.5 * (self.y - w1) ** 2) / np.sqrt(2 * np.pi)
        self.q = q * ((1 - alt.r1) * phi + alt.r1 * phi1)
        self.mark = MarkDistribution.normal(0.0, st.sigma)

    def moments(self, w: float, r: float) -> tuple[float, float]:
        g = g_mixture(self.y, w / self.st.sigma, r)
        return self.omega * float(self.q @ g), float(np.sqrt(self.omega * (self.q @ (g * g))))

    def z_threshold(self, w: float, r: float, x: float) -> float:
        fam = MixtureFamily(w, r, self.mark)
        b = solve_implied_beta(fam, x, self.omega)
        return (x + self.omega * fam.moments(b).psi) / b

    def best(self, cells, x: float, scale: str) -> PowerReport:
        best = None
        for w, r in cells:
            thr = x if scale == "Z" else self.z_threshold(w, r, x)
            mu, sd = self.moments(w, r)
            pw = _exceed(mu, sd, thr)
            if best is None or pw > best.power:
                best = PowerReport(self.st.name, x, pw, mu, sd, {"w": w, "r": r, "z_threshold": thr})
        return best


def _mixture_power(st: Statistic, alt: Alternative, x) -> PowerReport:
    mp = _MixturePower(st, alt)
    if st.name == "fixed_ell":
        return mp.best([(st.w, st.r)], x, "ell")
    if st.name == "fixed_Z":
        return mp.best([(st.w, st.r)], x, "Z")
    if st.name in ("max_w_ell", "max_w_Z"):
        return mp.best([(w, st.r) for w in _grid(st.w_grid)], x, "ell" if st.name == "max_w_ell" else "Z")
    if st.name == "max_wr":
        return mp.best([(w, r) for w in _grid(st.w_grid) for r in _grid(st.r_grid)], x, "ell")
    if st.name == "bonferroni":
        reps = [mp.best([(w, st.r)], b, "ell") for w, b in zip(st.b_w, x)]
        out = max(reps, key=lambda rp: rp.power)
        out.statistic, out.threshold = st.name, tuple(x)
        return out
    raise ContractError(f"unknown mixture statistic {st.name!r}")


# ---------------------------------------------------------------------------
# paired-end scores


def zb_moments(model: PairedEndModel, alt: Alternative, w: float = 30.0, r: float = 0.1) -> tuple[float, float]:
    """Mean and sd of ``Z^B`` at the variant under the true insert-length law.

    The nominal score uses ``(w, r)``. Non-carrier pairs bracket with weight
    ``(x - lo)^+``. A carrier pair of apparent insert ``x`` must also span the
    true event, so for deletions its weight is ``(x - R - max(w, w1))^+`` with
    inserts following ``f(x - w1)``; for insertions it is ``(x - R)^+`` with
    ``f(x + w1)``.
    """
    fam = BracketFamily(model, w, r, alt.kind)
    lo = fam.lo
    hi = model.upper(max(w, abs(alt.w1)))
    x, qx = composite_gauss(lo, hi, panel=model.sigma / 4.0)
    g = bracket_weight(x, w, r, model, alt.kind)
    if alt.kind == "deletion":
        lo1, shift = model.R + max(w, alt.w1), alt.w1
    else:
        lo1, shift = lo, -alt.w1
    wt = qx * ((1 - alt.r1) * (x - lo) * model.f(x)
               + alt.r1 * np.clip(x - lo1, 0.0, None) * model.f(x - shift))
    return model.rho1 * float(wt @ g), float(np.sqrt(model.rho1 * (wt @ (g * g))))


def _truth_hanging(model: PairedEndModel, alt: Alternative, a, b):
    """True hanging intensities on the minus (offset ``a``) and plus (offset ``b``) sides."""
    F, R = model.F, model.R
    c1 = _hanging_c(model, alt.r1) if alt.r1 > 0 else 0.0
    we = alt.w1 if alt.kind == "insertion" else 0.0
    dm = F(a + we) - F(a - R)
    dp = F(b + we + R) - F(b)
    rh = model.rate_hanging
    return rh * (1 + c1 * dm) * (a >= R), rh * (1 + c1 * dp) * (b > 0)


def zh_moments(model: PairedEndModel, alt: Alternative, w: float = 30.0, r: float = 0.1) -> tuple[float, float]:
    """Mean and sd of ``Z^H`` at the (aligned) breakpoints under the truth."""
    we = w if alt.kind == "insertion" else 0.0
    fam = HangingFamily(model, we, r, alt.kind)
    hi = model.upper(max(we, abs(alt.w1)))
    R = float(model.R)
    a, qa = composite_gauss(R, hi, panel=model.sigma / 4.0)
    b, qb = composite_gauss(0.0, hi - R, panel=model.sigma / 4.0)
    from .sv import _hanging_derivs

    hm, _, _, _ = _hanging_derivs(a, a, we, r, model, alt.kind)
    _, hp, _, _ = _hanging_derivs(b, b, we, r, model, alt.kind)
    lm, _ = _truth_hanging(model, alt, a, a)
    _, lp = _truth_hanging(model, alt, b, b)
    mu = float(qa @ (lm * hm) + qb @ (lp * hp))
    var = float(qa @ (lm * hm * hm) + qb @ (lp * hp * hp))
    del fam
    return mu, float(np.sqrt(var))


def marginal_power(st: Statistic, alt: Alternative, x) -> PowerReport:
    """Normal-approximation marginal power of ``st`` at threshold ``x``.

    Mixture likelihood thresholds are converted to the raw-score scale per
    parameter value; ``bonferroni`` takes the pair of thresholds. ``ZB`` and
    ``ZH`` thresholds are on the raw-score scale.
    """
    if st.name in ("ZB", "ZH"):
        if alt.kind == "mixture":
            raise ContractError("paired-end statistics need a deletion or insertion alternative")
        model = st.model or PairedEndModel()
        fn = zb_moments if st.name == "ZB" else zh_moments
        mu, sd = fn(model, alt, st.w, st.r)
        return PowerReport(st.name, x, _exceed(mu, sd, x), mu, sd)
    if alt.kind != "mixture":
        raise ContractError("mixture statistics need a mixture alternative")
    return _mixture_power(st, alt, x)


def power_table(alternatives, statistics, thresholds) -> list[list[PowerReport | str]]:
    """Matrix of reports: one row per alternative, one column per statistic.

    A failing cell holds the error message instead of a report.
    """
    out = []
    for alt in alternatives:
        row: list[PowerReport | str] = []
        for st, x in zip(statistics, thresholds):
            try:
                row.append(marginal_power(st, alt, x))
            except (ContractError, SolveError, ValueError) as exc:
                row.append(f"{type(exc).__name__}: {exc}")
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# combining the bracketing and hanging scores


def sum_pvalue(m: float, x: float, model: PairedEndModel, kind: str, w: float = 30.0,
               r: float = 0.1) -> float:
    """Tail approximation for ``Z^B + Z^H`` (independent parts, shared tilt).

    The local crossing rate mixes the jump drift of ``Z^B`` (``mu``) with the
    smooth conditional derivative sd of ``Z^H`` (``s``) as ``s * eta(mu / s)``,
    which recovers the fixed formula as ``s -> 0`` and the upcrossing rate as
    ``mu -> 0``.
    """
    bf = BracketFamily(model, w, r, kind)
    hf = StationaryHangingField(HangingFamily(model, w if kind == "insertion" else 0.0, r, kind))
    rho1 = model.rho1

    def mean(beta: float) -> float:
        return rho1 * bf.moments(beta).xi + hf.at(beta)["mean"]

    if mean(1e-12) >= x:
        return 1.0
    hi = 1.0
    while mean(hi) < x:
        hi *= 2.0
        if hi > 1e4:
            raise SolveError("threshold unreachable for the sum statistic")
    b = optimize.brentq(lambda t: mean(t) - x, 1e-12, hi, xtol=1e-13)
    mb, q = bf.moments(b), hf.at(b)
    J = b * x - rho1 * mb.psi - q["psi"]
    var = rho1 * mb.sigma2 + q["var"]
    mu = rho1 * (bf.drift(b)[0] - bf.drift(0.0)[0])
    s = np.sqrt(max(q["dvar"] - q["cov"] ** 2 / var, 0.0))
    rate = mu if s == 0 else s * float(eta(mu / s))
    return float(-np.expm1(-m * np.exp(-J) * rate / np.sqrt(2 * np.pi * var)))


@dataclass
class CombinedPower:
    power_zb: float
    power_zh: float
    bonferroni_zb: float
    bonferroni_zh: float
    bonferroni: float
    sum_power: float
    thresholds: dict


def sum_and_bonferroni_power(model: PairedEndModel, alt: Alternative, alpha: float = 0.05,
                             m: float = 1e6, w: float = 30.0, r: float = 0.1) -> CombinedPower:
    """Marginal powers of ``Z^B``, ``Z^H``, their Bonferroni maximum and their sum.

    The two scores use disjoint sets of pairs, so the Bonferroni maximum has
    power ``1 - (1 - p1)(1 - p2)`` with each part at level ``alpha/2``.
    """
    from .pvalue import ThresholdRequest, solve_threshold, threshold_for

    thr = {}
    for a, tag in ((alpha, ""), (alpha / 2, "_half")):
        thr["ZB" + tag] = threshold_for(ThresholdRequest("ZB", alpha=a, m=m, model=model, kind=alt.kind,
                                                         sv_w=w, sv_r=r))
        thr["ZH" + tag] = threshold_for(ThresholdRequest("ZH", alpha=a, m=m, model=model, kind=alt.kind,
                                                         sv_w=w, sv_r=r))
    mb, sb = zb_moments(model, alt, w, r)
    mh, sh = zh_moments(model, alt, w, r)
    b0 = _exceed(mb, sb, thr["ZB"])
    h0 = _exceed(mh, sh, thr["ZH"])
    b2 = _exceed(mb, sb, thr["ZB_half"])
    h2 = _exceed(mh, sh, thr["ZH_half"])
    lo = HangingFamily(model, w if alt.kind == "insertion" else 0.0, r, alt.kind).moments(0.0).xi
    lo += model.rho1 * BracketFamily(model, w, r, alt.kind).moments(0.0).xi
    thr["sum"] = solve_threshold(lambda t: sum_pvalue(m, t, model, alt.kind, w, r), alpha, lo + 1.0, 400.0)
    ps = _exceed(mb + mh, np.hypot(sb, sh), thr["sum"])
    return CombinedPower(b0, h0, b2, h2, 1 - (1 - b2) * (1 - h2), ps, thr)
