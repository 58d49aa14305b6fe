"""Mixture-mark scan: kernel, window scores, log likelihoods and scan maxima.

Marks are insert lengths. Under the null they follow ``F0``; inside a signal
window a fraction ``r`` of them is shifted by ``w``. The kernel is written in
standardized mark units: with ``a = w*y - w**2/2`` it equals
``log(1 + r*(exp(a) - 1))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from ._backend import sliding_window_max
from .core import (
    ContractError,
    MarkDistribution,
    ModelDomainError,
    Moments,
    NullModel,
    composite_gauss,
    solve_implied_beta,
)


# ---------------------------------------------------------------------------
# kernel and its derivatives (standardized units)


def _check_r(r: float) -> None:
    if not 0.0 <= r < 1.0:
        raise ModelDomainError(f"carrier proportion r must lie in [0, 1), got {r}")


def g_mixture(y, w: float, r: float):
    """Mixture kernel ``log(1 + r*(phi(y - w)/phi(y) - 1))`` for standardized ``y``."""
    _check_r(r)
    y = np.asarray(y, dtype=float)
    if r == 0.0 or w == 0.0:
        return np.zeros_like(y)
    a = w * y - 0.5 * w * w
    return np.logaddexp(np.log1p(-r), np.log(r) + a)


def _posterior(a, r: float):
    # posterior probability that a mark came from the shifted component
    return special.expit(a + np.log(r) - np.log1p(-r))


def g_derivatives(y, w: float, r: float) -> dict[str, np.ndarray]:
    """Kernel ``g`` with ``dg/dw``, ``d2g/dw2`` and ``dg/dr``."""
    _check_r(r)
    y = np.asarray(y, dtype=float)
    if r == 0.0:
        z = np.zeros_like(y)
        return {"g": z, "gw": z, "gww": z, "gr": np.expm1(w * y - 0.5 * w * w)}
    a = w * y - 0.5 * w * w
    g = np.logaddexp(np.log1p(-r), np.log(r) + a)
    q = _posterior(a, r)
    gw = (y - w) * q
    gww = ((y - w) ** 2 - 1.0) * q - gw * gw
    with np.errstate(over="ignore"):
        gr = np.where(a > 0, -q * np.expm1(-np.where(a > 0, a, 0.0)) / r,
                      np.expm1(np.minimum(a, 0.0)) * np.exp(-g))
    return {"g": g, "gw": gw, "gww": gww, "gr": gr}


# ---------------------------------------------------------------------------
# tilted family


@dataclass
class MixtureFamily:
    """Tilted cumulants of the mixture kernel under mark distribution ``mark``.

    ``w`` is in mark units; it is divided by ``mark.sd`` internally.
    """

    w: float
    r: float
    mark: MarkDistribution = field(default_factory=MarkDistribution)
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self) -> None:
        _check_r(self.r)

    @property
    def ws(self) -> float:
        return self.w / self.mark.sd

    def _nodes(self, beta: float) -> tuple[np.ndarray, np.ndarray]:
        """Standardized nodes and null-measure weights adapted to the tilt."""
        ws = self.ws
        if self.mark.kind == "normal":
            shift = beta * ws
            lo, hi = min(0.0, shift, ws) - 10.0, max(0.0, shift, ws) + 10.0
            key = (round(lo, 1), round(hi, 1))
            if key not in self._cache:
                y, qw = composite_gauss(key[0], key[1])
                self._cache[key] = (y, qw * np.exp(-0.5 * y * y) / np.sqrt(2 * np.pi))
            return self._cache[key]
        key = "emp"
        if key not in self._cache:
            lo, hi = self.mark.support()
            x, qw = composite_gauss(lo, hi, panel=(hi - lo) / 400.0)
            dens = self.mark.pdf(x)
            self._cache[key] = ((x - self.mark.mean) / self.mark.sd, qw * dens)
        return self._cache[key]

    def integrals(self, beta: float) -> dict[str, float]:
        """Tilted integrals ``int h(y) exp(beta*g) dF0`` of kernel products."""
        y, mass = self._nodes(beta)
        d = g_derivatives(y, self.ws, self.r)
        g, gw, gww, gr = d["g"], d["gw"], d["gww"], d["gr"]
        e = mass * np.exp(beta * g)
        return {
            "psi": float(np.sum(mass * np.expm1(beta * g))),
            "xi": float(np.sum(e * g)),
            "s2": float(np.sum(e * g * g)),
            "gw": float(np.sum(e * gw)),
            "gww": float(np.sum(e * gww)),
            "gw2": float(np.sum(e * gw * gw)),
            "ggw": float(np.sum(e * g * gw)),
            "gr": float(np.sum(e * gr)),
            "gr2": float(np.sum(e * gr * gr)),
            "ggr": float(np.sum(e * g * gr)),
            "gwgr": float(np.sum(e * gw * gr)),
        }

    def moments(self, beta: float) -> Moments:
        if self.r == 0.0 or self.w == 0.0:
            return Moments(beta, 0.0, 0.0, 0.0)
        y, mass = self._nodes(beta)
        g = g_mixture(y, self.ws, self.r)
        e = mass * np.exp(beta * g)
        return Moments(beta, float(np.sum(mass * np.expm1(beta * g))), float(np.sum(e * g)),
                       float(np.sum(e * g * g)))

    def kernel(self, marks):
        """Kernel values for raw (unstandardized) marks."""
        return g_mixture((np.asarray(marks, dtype=float) - self.mark.mean) / self.mark.sd, self.ws, self.r)


# ---------------------------------------------------------------------------
# events and window scores


@dataclass(frozen=True)
class MarkedEvents:
    """Event positions ``t`` (sorted) with marks ``y``."""

    t: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.t, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if t.shape != y.shape or t.ndim != 1:
            raise ContractError("positions and marks must be 1-D arrays of equal length")
        if t.size > 1 and np.any(np.diff(t) < 0):
            raise ContractError("events must be sorted by position")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.t.size

    def shifted(self, c: float) -> "MarkedEvents":
        return MarkedEvents(self.t + c, self.y)


def score_Z(events: MarkedEvents, t: float, w: float, r: float, delta: float,
            mark: MarkDistribution = MarkDistribution()) -> float:
    """Sum of kernel values over events with ``t - delta <= t_i <= t``."""
    lo = np.searchsorted(events.t, t - delta, side="left")
    hi = np.searchsorted(events.t, t, side="right")
    if hi <= lo:
        return 0.0
    ys = (events.y[lo:hi] - mark.mean) / mark.sd
    return float(np.sum(g_mixture(ys, w / mark.sd, r)))


def loglik_ell(events: MarkedEvents, t: float, w: float, r: float, beta: float,
               model: NullModel, delta: float) -> float:
    """``beta*Z - Omega_delta(t)*psi(beta)`` for the window ending at ``t``."""
    if beta == 0.0:
        return 0.0
    z = score_Z(events, t, w, r, delta, model.mark)
    omega = float(model.omega(t, delta))
    return beta * z - omega * MixtureFamily(w, r, model.mark).moments(beta).psi


def smooth_kernel_score(events, tau, w: float, kind: str = "triangular"):
    """Matched-filter score ``sum_i k_w(tau - t_i)`` for jump positions ``events``.

    ``triangular`` uses ``(1 - |s|/w)^+ / w``; ``gaussian`` the normal density
    with sd ``w``.
    """
    if not w > 0:
        raise ModelDomainError("kernel width must be positive")
    t = np.asarray(events, dtype=float)
    tau = np.asarray(tau, dtype=float)
    s = tau[..., None] - t
    if kind == "triangular":
        k = np.clip(1.0 - np.abs(s) / w, 0.0, None) / w
    elif kind == "gaussian":
        k = np.exp(-0.5 * (s / w) ** 2) / (w * np.sqrt(2 * np.pi))
    else:
        raise ModelDomainError(f"unknown smooth kernel {kind!r}")
    out = k.sum(axis=-1)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# scans


REGIMES = ("fixed_wr", "max_w", "max_wr", "two_window_bonferroni", "score_only_Z")


@dataclass(frozen=True)
class ScanRegime:
    """Which parameters are maximized and which statistic is scanned.

    ``statistic='ell'`` scans the log likelihood with ``beta`` fixed, or with
    the implied tilt at ``x_implied`` when ``beta`` is None. ``score_only_Z``
    always scans the raw score. Two-window Bonferroni scans
    ``max(ell(w0)/b0, ell(w1)/b1)``.
    """

    kind: str = "fixed_wr"
    delta: float = 200.0
    w0: float = 3.0
    w1: float | None = None
    r0: float = 0.1
    r1: float | None = None
    w_step: float = 0.05
    r_step: float = 0.01
    statistic: str = "ell"
    beta: float | None = None
    x_implied: float | None = None
    b0: float = 1.0
    b1: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in REGIMES:
            raise ContractError(f"unknown scan regime {self.kind!r}")
        if self.w1 is not None and self.w1 < self.w0:
            raise ContractError("w range must be ordered")
        if self.r1 is not None and self.r1 < self.r0:
            raise ContractError("r range must be ordered")
        if self.kind in ("max_w", "max_wr", "two_window_bonferroni") and self.w1 is None:
            raise ContractError(f"regime {self.kind} needs w1")
        if self.kind == "max_wr" and self.r1 is None:
            raise ContractError("regime max_wr needs r1")
        if not self.delta > 0:
            raise ContractError("window length must be positive")

    def w_grid(self) -> np.ndarray:
        if self.kind in ("fixed_wr",) or self.w1 is None:
            return np.array([self.w0])
        if self.kind == "two_window_bonferroni":
            return np.array([self.w0, self.w1])
        n = int(np.floor((self.w1 - self.w0) / self.w_step + 1e-9))
        return self.w0 + self.w_step * np.arange(n + 1)

    def r_grid(self) -> np.ndarray:
        if self.kind != "max_wr":
            return np.array([self.r0])
        n = int(np.floor((self.r1 - self.r0) / self.r_step + 1e-9))
        return np.round(self.r0 + self.r_step * np.arange(n + 1), 12)


@dataclass(frozen=True)
class ScanResult:
    value: float
    t: float
    w: float
    r: float
    beta: float | None


def _combo_params(regime: ScanRegime, model: NullModel, omega: float):
    """Per-(w, r) tilt, offset and scale so that statistic = (beta*Z - offset)/scale."""
    rows = []
    for w in regime.w_grid():
        for r in regime.r_grid():
            if regime.kind == "score_only_Z" or regime.statistic == "Z":
                rows.append((w, r, 1.0, 0.0, 1.0, None))
                continue
            fam = MixtureFamily(float(w), float(r), model.mark)
            if regime.beta is not None:
                beta = regime.beta
            elif regime.x_implied is not None:
                beta = solve_implied_beta(fam, regime.x_implied, omega)
            else:
                raise ContractError("likelihood scans need beta or x_implied")
            scale = 1.0
            if regime.kind == "two_window_bonferroni":
                scale = regime.b0 if w == regime.w0 else regime.b1
            rows.append((w, r, beta, fam.moments(beta).psi, scale, beta))
    return rows


def scan_grid(model: NullModel, start: float | None = None) -> np.ndarray:
    """Evaluation points ``start + i*step`` for ``i < m``."""
    if model.m < 1:
        raise ContractError("scan grid is empty")
    s0 = 0.0 if start is None else start
    return s0 + model.step * np.arange(model.m)


def scan_max(events: MarkedEvents, model: NullModel, regime: ScanRegime,
             grid: np.ndarray | None = None) -> ScanResult:
    """Maximum of the regime's statistic over the grid and its parameter grid.

    Ties are broken by smallest ``t``, then ``w``, then ``r``.
    """
    grid = scan_grid(model) if grid is None else np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ContractError("scan grid is empty")
    delta = regime.delta
    constant = not hasattr(model.rho, "omega")
    omega_ref = float(model.omega(grid[-1], delta))
    combos = _combo_params(regime, model, omega_ref)
    ys = (events.y - model.mark.mean) / model.mark.sd
    vals = np.empty((len(events), len(combos)))
    for j, (w, r, *_rest) in enumerate(combos):
        vals[:, j] = g_mixture(ys, w / model.mark.sd, r)

    if constant:
        best_z, arg = sliding_window_max(events.t, vals, grid, delta)
        best = np.array([(b * z - omega_ref * p) / s for z, (_, _, b, p, s, _) in zip(best_z, combos)])
    else:
        # piecewise rate: the offset depends on t, so evaluate whole tracks
        csum = np.vstack([np.zeros((1, vals.shape[1])), np.cumsum(vals, axis=0)])
        hi = np.searchsorted(events.t, grid, side="right")
        lo = np.searchsorted(events.t, grid - delta, side="left")
        z = csum[hi] - csum[lo]
        om = np.asarray(model.omega(grid, delta), dtype=float)
        best = np.empty(len(combos))
        arg = np.empty(len(combos), dtype=np.int64)
        for j, (w, r, b, _, s, _) in enumerate(combos):
            if regime.statistic == "Z" or regime.kind == "score_only_Z":
                track = z[:, j]
            else:
                fam = MixtureFamily(float(w), float(r), model.mark)
                if regime.beta is not None:
                    bt = np.full(grid.size, regime.beta)
                else:
                    bt = np.array([solve_implied_beta(fam, regime.x_implied, o) for o in om])
                psi_t = np.array([fam.moments(float(bb)).psi for bb in bt])
                track = (bt * z[:, j] - om * psi_t) / s
            arg[j] = int(np.argmax(track))
            best[j] = track[arg[j]]

    top = best.max()
    cand = [j for j in range(len(combos)) if best[j] == top]
    j = min(cand, key=lambda k: (arg[k], combos[k][0], combos[k][1]))
    w, r, _, _, _, beta = combos[j]
    return ScanResult(float(best[j]), float(grid[arg[j]]), float(w), float(r), beta)
