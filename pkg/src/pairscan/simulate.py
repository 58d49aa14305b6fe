"""Monte Carlo generators and Monte Carlo p-value / power oracles.

Every replication draws from its own substream derived from ``(seed, rep)``
so results do not depend on how replications are spread over workers.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .core import ContractError, ModelDomainError, NullModel, PiecewiseRate
from .mixture import MarkedEvents, ScanRegime, scan_max
from .sv import (
    PairedEndModel,
    ReadPairs,
    SVHypothesis,
    bracket_track,
    hanging_track,
)


def substream(seed: int, rep: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(rep,)))


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    replications: int = 200
    workers: int = 1

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise ContractError("replications must be at least 1")


@dataclass(frozen=True)
class MCEstimate:
    """Binomial proportion with a Wilson 95% interval."""

    estimate: float
    stderr: float
    replications: int
    ci95: tuple[float, float]

    @classmethod
    def from_hits(cls, hits: int, n: int) -> "MCEstimate":
        p = hits / n
        z = 1.959963984540054
        den = 1 + z * z / n
        c = (p + z * z / (2 * n)) / den
        h = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
        lo = 0.0 if hits == 0 else max(0.0, c - h)
        hi = 1.0 if hits == n else min(1.0, c + h)
        return cls(p, float(np.sqrt(p * (1 - p) / n)), n, (float(lo), float(hi)))


# ---------------------------------------------------------------------------
# marked Poisson fields


def _uniform_events(rng: np.random.Generator, rate, start: float, length: float) -> np.ndarray:
    if isinstance(rate, PiecewiseRate):
        b = np.clip(np.asarray(rate.breaks, dtype=float), start, start + length)
        out = []
        for lo, hi, v in zip(b[:-1], b[1:], rate.values):
            if hi > lo and v > 0:
                out.append(rng.uniform(lo, hi, rng.poisson(v * (hi - lo))))
        t = np.concatenate(out) if out else np.zeros(0)
    else:
        t = rng.uniform(start, start + length, rng.poisson(rate * length))
    return np.sort(t)


def simulate_null_field(model: NullModel, length: float, rng: np.random.Generator,
                        start: float = 0.0) -> MarkedEvents:
    """Marked Poisson events on ``[start, start + length)``; gamma-mixed when ``model.alpha`` is set."""
    if model.alpha is not None:
        return simulate_negbinom_field(model, length, model.alpha, rng, start)
    t = _uniform_events(rng, model.rho, start, length)
    return MarkedEvents(t, model.mark.rvs(rng, t.size))


def simulate_alternative_field(model: NullModel, length: float, s: float, w: float, r: float,
                               delta: float, rng: np.random.Generator, start: float = 0.0) -> MarkedEvents:
    """Null field except that marks in ``[s - delta, s)`` are shifted by ``w`` with probability ``r``."""
    if s - delta < start:
        raise ContractError("signal window must lie inside the field")
    ev = simulate_null_field(model, length, rng, start)
    inside = (ev.t >= s - delta) & (ev.t < s)
    y = ev.y.copy()
    y[inside] += w * (rng.random(int(inside.sum())) < r)
    return MarkedEvents(ev.t, y)


def simulate_negbinom_field(model: NullModel, length: float, alpha: float, rng: np.random.Generator,
                            start: float = 0.0, cell: float = 1.0) -> MarkedEvents:
    """Cox process driven by a gamma random measure.

    A cell of null mass ``Omega`` gets intensity ``Gamma(alpha*Omega, 1/alpha)``,
    so counts have mean ``Omega`` and variance ``Omega (1 + 1/alpha)``.
    """
    if not alpha > 0:
        raise ModelDomainError("alpha must be positive")
    n = int(np.ceil(length / cell))
    edges = start + cell * np.arange(n + 1)
    edges[-1] = start + length
    if isinstance(model.rho, PiecewiseRate):
        mass = np.diff(model.rho.cumulative(edges))
    else:
        mass = model.rho * np.diff(edges)
    lam = rng.gamma(alpha * mass, 1.0 / alpha)
    cnt = rng.poisson(lam)
    lo = np.repeat(edges[:-1], cnt)
    wd = np.repeat(np.diff(edges), cnt)
    t = np.sort(lo + wd * rng.random(lo.size))
    return MarkedEvents(t, model.mark.rvs(rng, t.size))


# ---------------------------------------------------------------------------
# paired-end reads


class _Donor:
    """Carrier genome with all planted variants applied."""

    def __init__(self, variants: Sequence[SVHypothesis], R: int):
        seg, off, bad_lo, bad_hi = [], [0.0], [], []
        o = 0.0
        for v in variants:
            sd = v.s + o
            if v.kind == "deletion":
                bad_lo.append(sd - R)
                bad_hi.append(sd)
                seg.append(sd)
                o -= v.w
            else:
                bad_lo.append(sd - R)
                bad_hi.append(sd + v.w)
                seg.append(sd + v.w)
                o += v.w
            off.append(o)
        self.seg = np.asarray(seg)
        self.off = np.asarray(off)
        self.bad_lo = np.asarray(bad_lo)
        self.bad_hi = np.asarray(bad_hi)
        self.total = o

    def to_ref(self, d: np.ndarray) -> np.ndarray:
        """Reference position of donor read starts; ``inf`` for reads touching a breakpoint."""
        if self.seg.size == 0:
            return d.astype(float)
        ref = d - self.off[np.searchsorted(self.seg, d, side="right")]
        k = np.searchsorted(self.bad_lo, d, side="right") - 1
        kk = np.clip(k, 0, None)
        hit = (k >= 0) & (d > self.bad_lo[kk]) & (d < self.bad_hi[kk])
        return np.where(hit, np.inf, ref)


def _check_variants(variants: Sequence[SVHypothesis]) -> list[SVHypothesis]:
    vs = sorted(variants, key=lambda v: v.s)
    for a, b in zip(vs[:-1], vs[1:]):
        end = a.s + (a.w if a.kind == "deletion" else 0.0)
        if b.s <= end:
            raise ContractError("planted variants overlap")
    return vs


def _fragments(rng: np.random.Generator, model: PairedEndModel, length: float):
    n = rng.poisson(model.kappa2 * length)
    u = rng.uniform(0.0, length, n)
    y = model.insert.rvs(rng, n)
    keep = (u + y + model.R <= length) & (y > 0)
    return u[keep], u[keep] + y[keep]


def simulate_paired_end(model: PairedEndModel, rng: np.random.Generator,
                        variants: Sequence[SVHypothesis] = (), length: float | None = None) -> ReadPairs:
    """Read pairs over a template of ``length`` bases (default ``model.T``).

    Fragments come from the reference with rate ``(1 - r) kappa^2`` and from
    the carrier genome with rate ``r kappa^2``, where ``r`` belongs to the
    nearest variant. Reads overlapping a breakpoint or inserted sequence are
    unmapped. Independently, with probability ``p`` one read (either side
    equally likely) fails to map. Positions are rounded to whole bases.
    """
    T = float(model.T if length is None else length)
    vs = _check_variants(variants)
    mids = np.array([v.s for v in vs])
    rs = np.array([v.r for v in vs])

    def carrier_prob(pos: np.ndarray) -> np.ndarray:
        if mids.size == 0:
            return np.zeros(pos.size)
        k = np.clip(np.searchsorted(mids, pos), 1, max(mids.size - 1, 1))
        if mids.size == 1:
            return np.full(pos.size, rs[0])
        near = np.where(np.abs(pos - mids[k - 1]) <= np.abs(pos - mids[k]), k - 1, k)
        return rs[near]

    u, v = _fragments(rng, model, T)
    keep = rng.random(u.size) >= carrier_prob(0.5 * (u + v))
    xs, xm = [u[keep]], [v[keep]]
    if vs and rs.max() > 0:
        donor = _Donor(vs, model.R)
        du, dv = _fragments(rng, model, T + donor.total)
        pu, pv = donor.to_ref(du), donor.to_ref(dv)
        mid = 0.5 * (np.where(np.isfinite(pu), pu, du) + np.where(np.isfinite(pv), pv, dv))
        keep = rng.random(du.size) < carrier_prob(mid)
        xs.append(pu[keep])
        xm.append(pv[keep])
    xp, xn = np.concatenate(xs), np.concatenate(xm)
    err = rng.random(xp.size) < model.p
    side = rng.random(xp.size) < 0.5
    xp = np.where(err & side, np.inf, np.round(xp))
    xn = np.where(err & ~side, np.inf, np.round(xn))
    ok = np.isfinite(xp) | np.isfinite(xn)
    return ReadPairs(xp[ok], xn[ok]).sorted()


# ---------------------------------------------------------------------------
# samplers: one scan maximum per call


@dataclass(frozen=True)
class MixtureScanSampler:
    """Scan maximum of a mixture statistic on windows ``[t - delta, t]``.

    The grid has ``m`` points spaced ``step`` apart starting at ``delta``;
    events cover ``[0, delta + (m - 1) * step]``. ``signal = (s, w, r)``
    plants a shifted-mark window.
    """

    model: NullModel
    regime: ScanRegime
    m: int
    step: float = 1.0
    signal: tuple[float, float, float] | None = None

    def __call__(self, rng: np.random.Generator) -> float:
        d = self.regime.delta
        L = d + (self.m - 1) * self.step
        if self.signal is None:
            ev = simulate_null_field(self.model, L, rng)
        else:
            s, w, r = self.signal
            ev = simulate_alternative_field(self.model, L, s, w, r, d, rng)
        grid = d + self.step * np.arange(self.m)
        return scan_max(ev, self.model, self.regime, grid).value


@dataclass(frozen=True)
class PairedScanSampler:
    """Maximum of ``Z^B`` or ``Z^H`` over a simulated template."""

    model: PairedEndModel
    statistic: str = "ZB"
    kind: str = "deletion"
    w: float = 30.0
    r: float = 0.1
    step: float = 10.0
    length: float | None = None
    variants: tuple = ()

    def __call__(self, rng: np.random.Generator) -> float:
        T = float(self.model.T if self.length is None else self.length)
        pairs = simulate_paired_end(self.model, rng, self.variants, T)
        size = int(T // self.step)
        if self.statistic == "ZB":
            tr = bracket_track(pairs, self.model, self.w, self.r, self.kind, 0.0, self.step, size)
        elif self.statistic == "ZH":
            tr = hanging_track(pairs, self.model, self.w, self.r, self.kind, 0.0, self.step, size)
        else:
            raise ContractError(f"unknown paired-end statistic {self.statistic!r}")
        return float(tr.max()) if tr.size else 0.0


# ---------------------------------------------------------------------------
# Monte Carlo oracles


@dataclass
class _Task:
    sampler: Callable[[np.random.Generator], float]
    seed: int

    def __call__(self, rep: int) -> float:
        return float(self.sampler(substream(self.seed, rep)))


def mc_replicates(sampler: Callable[[np.random.Generator], float], config: SimConfig) -> np.ndarray:
    """Sampler outputs for replications ``0 .. n-1``, in replication order."""
    task = _Task(sampler, config.seed)
    reps = range(config.replications)
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as ex:
            return np.fromiter(ex.map(task, reps, chunksize=8), float, config.replications)
    return np.fromiter(map(task, reps), float, config.replications)


def mc_pvalue(sampler: Callable[[np.random.Generator], float], x: float, config: SimConfig) -> MCEstimate:
    """Fraction of null replications whose scan maximum reaches ``x``."""
    vals = mc_replicates(sampler, config)
    return MCEstimate.from_hits(int(np.count_nonzero(vals >= x)), vals.size)


def mc_power(sampler: Callable[[np.random.Generator], float], x: float, config: SimConfig) -> MCEstimate:
    """As :func:`mc_pvalue` for a sampler that plants the alternative."""
    return mc_pvalue(sampler, x, config)


def poisson_count_gof(counts: np.ndarray, mean: float) -> float:
    """Chi-square goodness-of-fit p-value of counts against Poisson(mean)."""
    counts = np.asarray(counts)
    lo, hi = stats.poisson.ppf([1e-4, 1 - 1e-4], mean).astype(int)
    edges = np.arange(lo, hi + 2)
    obs = np.array([np.count_nonzero(counts < lo)]
                   + [np.count_nonzero(counts == k) for k in edges[:-1]]
                   + [np.count_nonzero(counts > hi)])
    exp = np.concatenate([[stats.poisson.cdf(lo - 1, mean)], stats.poisson.pmf(edges[:-1], mean),
                          [stats.poisson.sf(hi, mean)]]) * counts.size
    keep = exp > 5
    o = np.concatenate([obs[keep], [obs[~keep].sum()]])
    e = np.concatenate([exp[keep], [exp[~keep].sum()]])
    if e[-1] == 0:
        o, e = o[:-1], e[:-1]
    return float(stats.chisquare(o, e * o.sum() / e.sum()).pvalue)
