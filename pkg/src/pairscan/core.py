"""Null-measure machinery shared by every scan model.

A *tilted family* is anything with a ``moments(beta)`` method returning the
cumulant generating function and its first two derivatives per unit of window
mass. Everything else here (KL information, implied-beta solving, the
overshoot correction, gamma-mixed overdispersion) is written against that
small protocol.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Protocol, Sequence

import numpy as np
from scipy import special, stats


class ModelDomainError(ValueError):
    """Raised when inputs fall outside a function's mathematical domain."""


class SolveError(RuntimeError):
    """Raised when a root or threshold cannot be bracketed."""


class ContractError(ValueError):
    """Raised when inputs violate a documented precondition (ordering, emptiness)."""


# ---------------------------------------------------------------------------
# quadrature helpers


@lru_cache(maxsize=16)
def _gl_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def composite_gauss(a: float, b: float, panel: float = 0.25, order: int = 10) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of composite Gauss-Legendre on ``[a, b]``."""
    if not b > a:
        return np.zeros(0), np.zeros(0)
    n = max(1, int(np.ceil((b - a) / panel)))
    edges = np.linspace(a, b, n + 1)
    x0, w0 = _gl_rule(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x0[None, :]).ravel()
    weights = (half[:, None] * w0[None, :]).ravel()
    return nodes, weights


# ---------------------------------------------------------------------------
# mark distributions


@dataclass(frozen=True)
class MarkDistribution:
    """Distribution of marks (insert lengths) under the null.

    ``kind='normal'`` uses ``mean`` and ``sd``. ``kind='empirical'`` smooths a
    weighted sample with a Gaussian kernel of bandwidth ``bandwidth``.
    """

    kind: str = "normal"
    mean: float = 0.0
    sd: float = 1.0
    lo: float | None = None
    hi: float | None = None
    sample: tuple[float, ...] = ()
    sample_weights: tuple[float, ...] = ()
    bandwidth: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("normal", "empirical"):
            raise ModelDomainError(f"unknown mark distribution kind {self.kind!r}")
        if self.kind == "normal" and not self.sd > 0:
            raise ModelDomainError("mark sd must be positive")
        if self.kind == "empirical":
            if len(self.sample) == 0:
                raise ModelDomainError("empirical mark distribution needs a sample")
            w = np.asarray(self.sample_weights or np.ones(len(self.sample)), dtype=float)
            if np.any(w < 0) or len(w) != len(self.sample):
                raise ModelDomainError("sample weights must be nonnegative and match the sample")

    @classmethod
    def normal(cls, mean: float = 0.0, sd: float = 1.0) -> "MarkDistribution":
        return cls("normal", mean=mean, sd=sd)

    @classmethod
    def empirical(cls, values: Sequence[float], weights: Sequence[float] | None = None,
                  bandwidth: float | None = None) -> "MarkDistribution":
        v = np.sort(np.asarray(values, dtype=float))
        w = np.ones_like(v) if weights is None else np.asarray(weights, dtype=float)
        w = w / w.sum()
        mu = float(np.sum(w * v))
        sd = float(np.sqrt(np.sum(w * (v - mu) ** 2)))
        if bandwidth is None:
            bandwidth = max(1.06 * sd * len(v) ** (-0.2), 1e-9)
        return cls("empirical", mean=mu, sd=sd, sample=tuple(v), sample_weights=tuple(w),
                   bandwidth=bandwidth)

    def support(self, width: float = 8.0) -> tuple[float, float]:
        lo = self.lo if self.lo is not None else self.mean - width * self.sd
        hi = self.hi if self.hi is not None else self.mean + width * self.sd
        if self.kind == "empirical":
            bw = float(self.bandwidth)
            lo = min(lo, self.sample[0] - 8 * bw) if self.lo is None else lo
            hi = max(hi, self.sample[-1] + 8 * bw) if self.hi is None else hi
        return lo, hi

    def _mix(self) -> tuple[np.ndarray, np.ndarray, float]:
        return np.asarray(self.sample), np.asarray(self.sample_weights), float(self.bandwidth)

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "normal":
            return stats.norm.logpdf(x, self.mean, self.sd)
        s, w, h = self._mix()
        flat = x.ravel()
        out = np.empty(flat.shape)
        # chunked so nodes x sample stays small
        n = max(1, 2_000_000 // len(s))
        for i in range(0, flat.size, n):
            z = (flat[i:i + n, None] - s) / h
            out[i:i + n] = special.logsumexp(-0.5 * z * z, b=w, axis=-1)
        return (out - np.log(h * np.sqrt(2 * np.pi))).reshape(x.shape)

    def pdf(self, x):
        return np.exp(self.logpdf(x))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "normal":
            return stats.norm.cdf(x, self.mean, self.sd)
        s, w, h = self._mix()
        flat = x.ravel()
        out = np.empty(flat.shape)
        n = max(1, 2_000_000 // len(s))
        for i in range(0, flat.size, n):
            out[i:i + n] = special.ndtr((flat[i:i + n, None] - s) / h) @ w
        return out.reshape(x.shape)

    def rvs(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "normal":
            return rng.normal(self.mean, self.sd, size)
        s, w, h = self._mix()
        return rng.choice(s, size=size, p=w) + h * rng.standard_normal(size)


# ---------------------------------------------------------------------------
# rates


@dataclass(frozen=True)
class PiecewiseRate:
    """Piecewise-constant intensity on ``[breaks[0], breaks[-1])``."""

    breaks: tuple[float, ...]
    values: tuple[float, ...]
    _cum: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        b = np.asarray(self.breaks, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if b.ndim != 1 or len(b) != len(v) + 1 or np.any(np.diff(b) <= 0):
            raise ModelDomainError("breaks must be increasing with one more entry than values")
        if np.any(v <= 0):
            raise ModelDomainError("rate must be positive")
        object.__setattr__(self, "_cum", np.concatenate([[0.0], np.cumsum(v * np.diff(b))]))

    @classmethod
    def constant(cls, rho: float, length: float) -> "PiecewiseRate":
        return cls((0.0, float(length)), (float(rho),))

    def __call__(self, t):
        b = np.asarray(self.breaks)
        i = np.clip(np.searchsorted(b, t, side="right") - 1, 0, len(self.values) - 1)
        return np.asarray(self.values)[i]

    def cumulative(self, t):
        """Integral of the rate from ``breaks[0]`` to ``t`` (clamped to the domain)."""
        b = np.asarray(self.breaks)
        t = np.clip(np.asarray(t, dtype=float), b[0], b[-1])
        i = np.clip(np.searchsorted(b, t, side="right") - 1, 0, len(self.values) - 1)
        return self._cum[i] + np.asarray(self.values)[i] * (t - b[i])

    def omega(self, t, delta: float):
        """Window mass over ``[t - delta, t]``."""
        return self.cumulative(t) - self.cumulative(np.asarray(t, dtype=float) - delta)


@dataclass(frozen=True)
class NullModel:
    """Marked Poisson null: rate, marks, optional gamma-mixing index ``alpha``."""

    rho: float | PiecewiseRate
    mark: MarkDistribution = MarkDistribution()
    alpha: float | None = None
    m: int = 1
    step: float = 1.0

    def __post_init__(self) -> None:
        if isinstance(self.rho, (int, float)) and not self.rho > 0:
            raise ModelDomainError("rho must be positive")
        if self.alpha is not None and not self.alpha > 0:
            raise ModelDomainError("alpha must be positive")

    def rate(self, t):
        return self.rho(t) if isinstance(self.rho, PiecewiseRate) else np.full_like(np.asarray(t, float), self.rho)

    def omega(self, t, delta: float):
        if isinstance(self.rho, PiecewiseRate):
            return self.rho.omega(t, delta)
        return np.full_like(np.asarray(t, dtype=float), self.rho * delta)


# ---------------------------------------------------------------------------
# tilted families


@dataclass(frozen=True)
class Moments:
    """``psi``, its derivative ``xi`` and second derivative ``sigma2`` at ``beta``.

    ``extra`` carries model-specific tilted integrals (derivatives in nuisance
    parameters, local-field drift terms).
    """

    beta: float
    psi: float
    xi: float
    sigma2: float
    extra: dict = field(default_factory=dict)

    @property
    def kl(self) -> float:
        return self.beta * self.xi - self.psi


class TiltedFamily(Protocol):
    def moments(self, beta: float) -> Moments: ...


@dataclass
class DiscreteFamily:
    """Tilted family for a kernel evaluated on fixed quadrature nodes.

    ``mass`` holds the base-measure weight of each node (already including the
    quadrature weight), ``g`` the kernel value.
    """

    g: np.ndarray
    mass: np.ndarray

    def moments(self, beta: float) -> Moments:
        g = np.asarray(self.g)
        e = np.exp(beta * g)
        mw = self.mass
        return Moments(beta, float(np.sum(mw * (e - 1.0))), float(np.sum(mw * g * e)),
                       float(np.sum(mw * g * g * e)))


def psi(family: TiltedFamily, beta: float) -> float:
    return family.moments(beta).psi


def xi(family: TiltedFamily, beta: float) -> float:
    return family.moments(beta).xi


def sigma2(family: TiltedFamily, beta: float) -> float:
    return family.moments(beta).sigma2


def kl_info(family: TiltedFamily, beta: float) -> float:
    """Kullback-Leibler information ``beta*xi(beta) - psi(beta)`` per unit mass."""
    return family.moments(beta).kl


def solve_implied_beta(family: TiltedFamily, x: float, omega: float, *,
                       beta_max: float = 400.0, rtol: float = 1e-12) -> float:
    """Positive root of ``omega * J(beta) = x``.

    Safeguarded Newton on a geometrically expanded bracket; ``J`` is increasing
    on ``beta > 0`` with derivative ``beta * sigma2(beta)``.
    """
    if not x > 0:
        raise ModelDomainError("target must be positive")
    if not omega > 0:
        raise ModelDomainError("window mass must be positive")
    sup = getattr(family, "beta_sup", None)
    cap = beta_max if sup is None else min(beta_max, sup * (1 - 1e-12))

    def f(b: float) -> tuple[float, float]:
        mo = family.moments(b)
        return omega * mo.kl - x, omega * b * mo.sigma2

    lo, hi = 0.0, min(1.0, cap)
    fh, _ = f(hi)
    while not fh > 0:
        if not np.isfinite(fh):
            raise SolveError(f"J not finite at beta={hi}")
        lo = hi
        if hi >= cap:
            raise SolveError(f"target x={x} unreachable: omega*J(beta) <= {fh + x:.6g} for beta <= {cap}")
        hi = min(hi * 2.0, cap)
        fh, _ = f(hi)
    b = 0.5 * (lo + hi)
    for _ in range(200):
        fb, db = f(b)
        if fb > 0:
            hi = b
        else:
            lo = b
        if abs(fb) <= rtol * x:
            return b
        nb = b - fb / db if db > 0 else 0.5 * (lo + hi)
        if not lo < nb < hi:
            nb = 0.5 * (lo + hi)
        if hi - lo < 1e-15 * max(1.0, hi):
            return nb
        b = nb
    return b


def solve_tilt_for_mean(family: TiltedFamily, target: float, scale: float, *,
                        beta_max: float = 400.0) -> float:
    """Root of ``scale * xi(beta) = target`` for ``beta > 0`` (``xi`` increasing)."""
    sup = getattr(family, "beta_sup", None)
    cap = beta_max if sup is None else min(beta_max, sup * (1 - 1e-12))

    def f(b: float) -> tuple[float, float]:
        mo = family.moments(b)
        return scale * mo.xi - target, scale * mo.sigma2

    if f(0.0)[0] >= 0:
        raise SolveError("target is not above the null mean")
    lo, hi = 0.0, min(1.0, cap)
    while f(hi)[0] < 0:
        lo = hi
        if hi >= cap:
            raise SolveError(f"target {target} unreachable for beta <= {cap}")
        hi = min(2 * hi, cap)
    b = 0.5 * (lo + hi)
    for _ in range(200):
        fb, db = f(b)
        if fb > 0:
            hi = b
        else:
            lo = b
        if abs(fb) <= 1e-13 * max(1.0, abs(target)):
            return b
        nb = b - fb / db if db > 0 else 0.5 * (lo + hi)
        if not lo < nb < hi:
            nb = 0.5 * (lo + hi)
        if hi - lo < 1e-15 * max(1.0, hi):
            return nb
        b = nb
    return b


# ---------------------------------------------------------------------------
# overshoot correction


def nu(y):
    """Overshoot correction for a discretely observed maximum.

    Uses the standard closed-form approximation
    ``(2/y)(Phi(y/2) - 1/2) / ((y/2) Phi(y/2) + phi(y/2))``; equals 1 at 0.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y < 0) or np.any(np.isnan(y)):
        raise ModelDomainError("nu is defined for y >= 0")
    h = 0.5 * y
    small = h < 1e-6
    hs = np.where(small, 1.0, h)
    val = (special.ndtr(hs) - 0.5) / hs / (hs * special.ndtr(hs) + stats.norm.pdf(hs))
    # near zero nu(y) = 1 - y*sqrt(2*pi)/4 + O(y^2)
    out = np.where(small, 1.0 - y * np.sqrt(2 * np.pi) / 4, val)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# count likelihoods


def cnv_loglik(n, omega, beta):
    """Poisson log likelihood ratio ``beta*N - (e^beta - 1)*omega``."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ModelDomainError("omega must be positive")
    return beta * np.asarray(n, dtype=float) - np.expm1(beta) * omega


def negbinom_loglik(n, omega, beta, alpha):
    """Gamma-mixed Poisson log likelihood ratio.

    ``beta*N + alpha*omega*log(1 - (e^beta - 1)/alpha)``; tends to
    :func:`cnv_loglik` as ``alpha`` grows.
    """
    if not alpha > 0:
        raise ModelDomainError("alpha must be positive")
    arg = -np.expm1(beta) / alpha
    if np.any(arg <= -1):
        raise ModelDomainError("tilt too large for this alpha: log argument <= 0")
    return beta * np.asarray(n, dtype=float) + alpha * np.asarray(omega, dtype=float) * np.log1p(arg)


@dataclass
class GammaMixedFamily:
    """Cumulants of a gamma-mixed (negative binomial) version of ``base``.

    With a gamma process of index ``alpha`` driving the rate, the per-unit
    cumulant generating function becomes ``-alpha*log(1 - psi/alpha)``.
    """

    base: TiltedFamily
    alpha: float
    _sup: float | None = field(default=None, init=False, repr=False)

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ModelDomainError("alpha must be positive")

    @property
    def beta_sup(self) -> float:
        """Largest positive beta with ``psi(beta) < alpha``."""
        if self._sup is None:
            hi = 1.0
            while self.base.moments(hi).psi < self.alpha:
                hi *= 2.0
                if hi > 1e4:
                    self._sup = np.inf
                    return self._sup
            lo = hi / 2 if hi > 1.0 else 0.0
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if self.base.moments(mid).psi < self.alpha:
                    lo = mid
                else:
                    hi = mid
            self._sup = lo
        return self._sup

    def moments(self, beta: float) -> Moments:
        mo = self.base.moments(beta)
        u = 1.0 - mo.psi / self.alpha
        if u <= 0:
            raise ModelDomainError("tilt exceeds the gamma-mixture domain")
        return Moments(beta, -self.alpha * np.log(u), mo.xi / u,
                       mo.sigma2 / u + mo.xi ** 2 / (self.alpha * u * u), mo.extra)

