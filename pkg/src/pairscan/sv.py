"""Paired-end structural-variant model.

Read pairs are stored as two float arrays (plus-read and minus-read leftmost
positions) with ``inf`` for an unmapped read. For a hypothesis (deletion of
``[s, s+w)`` or insertion of ``w`` bases after ``s``) every pair falls in one of
five classes: covering (SC), bracketing (SB), hanging-plus (Splus, plus read
unmapped), hanging-minus (Sminus, minus read unmapped) or uninformative (S0).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from ._backend import interval_accumulate, profile_accumulate
from .core import ContractError, MarkDistribution, ModelDomainError, Moments, composite_gauss

UNMAPPED = np.inf


class PairClass(enum.IntEnum):
    S0 = 0
    SC = 1
    SB = 2
    Splus = 3
    Sminus = 4


@dataclass(frozen=True)
class PairedEndModel:
    """Library and sequencing parameters.

    ``kappa2`` is the read-pair rate per base, ``p`` the null hanging
    probability, ``R`` the read length and ``T`` the template length.
    """

    R: int = 36
    delta: float = 200.0
    sigma: float = 10.0
    p: float = 0.03
    kappa2: float = 0.27
    T: int = 1_000_000
    insert: MarkDistribution | None = None

    def __post_init__(self) -> None:
        if not 0 < self.p < 1:
            raise ModelDomainError("hanging probability p must lie in (0, 1)")
        if not self.kappa2 > 0:
            raise ModelDomainError("read-pair rate must be positive")
        if not self.R < self.delta:
            raise ModelDomainError("read length must be below the mean insert length")
        if self.insert is None:
            object.__setattr__(self, "insert", MarkDistribution.normal(self.delta, self.sigma))

    @property
    def rho1(self) -> float:
        """Rate of properly mapped pairs per base."""
        return (1.0 - self.p) * self.kappa2

    @property
    def rate_hanging(self) -> float:
        """Rate of hanging pairs of one strand per base."""
        return 0.5 * self.p * self.kappa2

    def f(self, x):
        return self.insert.pdf(x)

    def F(self, x):
        return self.insert.cdf(x)

    def upper(self, w: float = 0.0) -> float:
        return self.delta + 12.0 * self.sigma + abs(w) + self.R


@dataclass(frozen=True)
class SVHypothesis:
    kind: str
    s: float
    w: float = 30.0
    r: float = 0.1

    def __post_init__(self) -> None:
        if self.kind not in ("deletion", "insertion"):
            raise ContractError(f"unknown variant type {self.kind!r}")
        if self.w < 0:
            raise ContractError("variant width must be nonnegative")
        if not 0 <= self.r < 1:
            raise ModelDomainError("carrier proportion must lie in [0, 1)")


@dataclass(frozen=True)
class ReadPairs:
    """Plus/minus leftmost positions; ``inf`` marks an unmapped read."""

    x_plus: np.ndarray
    x_minus: np.ndarray

    def __post_init__(self) -> None:
        u = np.asarray(self.x_plus, dtype=float)
        v = np.asarray(self.x_minus, dtype=float)
        if u.shape != v.shape or u.ndim != 1:
            raise ContractError("x_plus and x_minus must be 1-D arrays of equal length")
        if np.any(np.isinf(u) & np.isinf(v)):
            raise ContractError("pairs with both reads unmapped are not part of the data model")
        object.__setattr__(self, "x_plus", u)
        object.__setattr__(self, "x_minus", v)

    def __len__(self) -> int:
        return self.x_plus.size

    @classmethod
    def empty(cls) -> "ReadPairs":
        return cls(np.zeros(0), np.zeros(0))

    def sorted(self) -> "ReadPairs":
        """Order by plus position; unmapped-plus pairs are keyed by the minus position."""
        key = np.where(np.isinf(self.x_plus), self.x_minus, self.x_plus)
        o = np.lexsort((self.x_minus, key))
        return ReadPairs(self.x_plus[o], self.x_minus[o])

    @property
    def mapped(self) -> np.ndarray:
        return np.isfinite(self.x_plus) & np.isfinite(self.x_minus)

    @property
    def hanging_minus(self) -> np.ndarray:
        """Minus read unmapped."""
        return np.isfinite(self.x_plus) & np.isinf(self.x_minus)

    @property
    def hanging_plus(self) -> np.ndarray:
        """Plus read unmapped."""
        return np.isinf(self.x_plus) & np.isfinite(self.x_minus)


# ---------------------------------------------------------------------------
# classification and kernels


def classify(pairs: ReadPairs, hyp: SVHypothesis, model: PairedEndModel) -> np.ndarray:
    """Class code (``PairClass``) of every pair under ``hyp``."""
    u, v = pairs.x_plus, pairs.x_minus
    s, R = hyp.s, model.R
    right = s + hyp.w if hyp.kind == "deletion" else s
    if hyp.kind == "deletion":
        inside = lambda x: (x > s - R) & (x < s + hyp.w)
    else:
        inside = lambda x: (x > s - R) & (x <= s)
    out = np.full(u.shape, PairClass.S0, dtype=np.int8)
    cover = inside(u) | inside(v)
    fu, fv = np.isfinite(u), np.isfinite(v)
    brk = fu & fv & (u <= s - R) & (v > right)
    hp = ~fu & (v > right)
    hm = fu & (u <= s - R) & ~fv
    out[hm] = PairClass.Sminus
    out[hp] = PairClass.Splus
    out[brk] = PairClass.SB
    out[cover] = PairClass.SC
    return out


def classify_pair(x_plus: float, x_minus: float, hyp: SVHypothesis, model: PairedEndModel) -> PairClass:
    pairs = ReadPairs(np.array([x_plus], dtype=float), np.array([x_minus], dtype=float))
    return PairClass(int(classify(pairs, hyp, model)[0]))


def _hanging_c(model: PairedEndModel, r: float) -> float:
    return 2.0 * r * (1.0 - model.p) / model.p


def hanging_minus_weight(a, w: float, r: float, model: PairedEndModel, kind: str):
    """Kernel for a minus-hanging pair whose plus read sits ``a = s - u`` before ``s``."""
    a = np.asarray(a, dtype=float)
    F = model.F
    if kind == "deletion":
        d = F(a) - F(a - model.R)
    else:
        d = F(a + min(w, 150.0)) - F(a - model.R)
    return np.where(a >= model.R, np.log1p(_hanging_c(model, r) * d), 0.0)


def hanging_plus_weight(b, w: float, r: float, model: PairedEndModel, kind: str):
    """Kernel for a plus-hanging pair whose minus read sits ``b`` past the right breakpoint."""
    b = np.asarray(b, dtype=float)
    F = model.F
    if kind == "deletion":
        d = F(b + model.R) - F(b)
    else:
        d = F(b + min(w, 150.0) + model.R) - F(b)
    return np.where(b > 0, np.log1p(_hanging_c(model, r) * d), 0.0)


def _hanging_derivs(a, b, w: float, r: float, model: PairedEndModel, kind: str):
    f, F, R, c = model.f, model.F, model.R, _hanging_c(model, r)
    we = 0.0 if kind == "deletion" else min(w, 150.0)
    dm = F(a + we) - F(a - R)
    dp = F(b + we + R) - F(b)
    hm = np.log1p(c * dm)
    hp = np.log1p(c * dp)
    hm_a = c * (f(a + we) - f(a - R)) / (1 + c * dm)
    hp_b = c * (f(b + we + R) - f(b)) / (1 + c * dp)
    return hm, hp, hm_a, hp_b


def bracket_weight(x, w: float, r: float, model: PairedEndModel, kind: str):
    """``log(1 - r + r f(x -+ w)/f(x))`` for observed insert ``x``: minus for deletions."""
    x = np.asarray(x, dtype=float)
    shift = w if kind == "deletion" else -w
    if r == 0.0 or w == 0.0:
        return np.zeros_like(x)
    lf0 = model.insert.logpdf(x)
    lf1 = model.insert.logpdf(x - shift)
    return np.logaddexp(np.log1p(-r), np.log(r) + lf1 - lf0)


def sv_kernel(pairs: ReadPairs, hyp: SVHypothesis, model: PairedEndModel) -> tuple[np.ndarray, np.ndarray]:
    """Class codes and kernel values of all pairs under ``hyp``."""
    cls = classify(pairs, hyp, model)
    k = np.zeros(len(pairs))
    if hyp.r == 0.0:
        return cls, k
    u, v = pairs.x_plus, pairs.x_minus
    k[cls == PairClass.SC] = np.log1p(-hyp.r)
    m = cls == PairClass.SB
    k[m] = bracket_weight(v[m] - u[m], hyp.w, hyp.r, model, hyp.kind)
    m = cls == PairClass.Sminus
    k[m] = hanging_minus_weight(hyp.s - u[m], hyp.w, hyp.r, model, hyp.kind)
    m = cls == PairClass.Splus
    right = hyp.s + hyp.w if hyp.kind == "deletion" else hyp.s
    k[m] = hanging_plus_weight(v[m] - right, hyp.w, hyp.r, model, hyp.kind)
    return cls, k


def kernel_deletion(x_plus: float, x_minus: float, hyp: SVHypothesis, model: PairedEndModel) -> float:
    if hyp.kind != "deletion":
        raise ContractError("kernel_deletion needs a deletion hypothesis")
    pairs = ReadPairs(np.array([x_plus], float), np.array([x_minus], float))
    return float(sv_kernel(pairs, hyp, model)[1][0])


def kernel_insertion(x_plus: float, x_minus: float, hyp: SVHypothesis, model: PairedEndModel) -> float:
    if hyp.kind != "insertion":
        raise ContractError("kernel_insertion needs an insertion hypothesis")
    pairs = ReadPairs(np.array([x_plus], float), np.array([x_minus], float))
    return float(sv_kernel(pairs, hyp, model)[1][0])


@dataclass(frozen=True)
class SVScores:
    ZC: float
    ZB: float
    Zplus: float
    Zminus: float

    @property
    def total(self) -> float:
        return self.ZC + self.ZB + self.Zplus + self.Zminus


def sv_scores(pairs: ReadPairs, hyp: SVHypothesis, model: PairedEndModel) -> SVScores:
    cls, k = sv_kernel(pairs, hyp, model)
    s = lambda c: float(np.sum(k[cls == c]))
    return SVScores(s(PairClass.SC), s(PairClass.SB), s(PairClass.Splus), s(PairClass.Sminus))


# ---------------------------------------------------------------------------
# cumulants


@dataclass
class BracketFamily:
    """Per-unit cumulants of the bracketing score for a homogeneous process.

    ``moments`` returns ``psi1`` and its derivatives, where
    ``psi1(beta) = int_lo^inf (x - lo) f(x) (exp(beta g(x)) - 1) dx`` and
    ``lo = w + R`` for deletions, ``R`` for insertions. Multiply by
    ``model.rho1`` for the score's cumulants. ``drift`` gives the integrals
    without the ``(x - lo)`` carrier weight, which set the jump size of the
    bracketing score between neighbouring positions.
    """

    model: PairedEndModel
    w: float = 30.0
    r: float = 0.1
    kind: str = "deletion"
    _nodes: tuple = field(default=(), init=False, repr=False)

    def __post_init__(self) -> None:
        lo = self.lo
        x, qw = composite_gauss(lo, self.model.upper(self.w), panel=self.model.sigma / 4.0)
        f = self.model.f(x)
        g = bracket_weight(x, self.w, self.r, self.model, self.kind)
        self._nodes = (x, qw * f, qw * f * (x - lo), g)

    @property
    def lo(self) -> float:
        return self.w + self.model.R if self.kind == "deletion" else float(self.model.R)

    def moments(self, beta: float) -> Moments:
        _, _, mw, g = self._nodes
        e = mw * np.exp(beta * g)
        return Moments(beta, float(np.sum(mw * np.expm1(beta * g))), float(np.sum(e * g)),
                       float(np.sum(e * g * g)))

    def drift(self, beta: float) -> tuple[float, float]:
        _, mf, _, g = self._nodes
        e = mf * np.exp(beta * g)
        return float(np.sum(e * g)), float(np.sum(e * g * g))


def psi_ZB(model: PairedEndModel, hyp: SVHypothesis, beta: float) -> float:
    """Cumulant generating function of the bracketing score per unit position."""
    if beta == 0.0 or hyp.r == 0.0:
        return 0.0
    return model.rho1 * BracketFamily(model, hyp.w, hyp.r, hyp.kind).moments(beta).psi


@dataclass
class HangingFamily:
    """Tilted moments of the hanging-read score ``Z^- (s) + Z^+ (s)``.

    The score is a shot-noise field in ``s``; besides cumulants this supplies
    the derivative covariances needed for crossing-rate approximations.
    """

    model: PairedEndModel
    w: float = 30.0
    r: float = 0.1
    kind: str = "insertion"
    _tab: tuple = field(default=(), init=False, repr=False)

    def __post_init__(self) -> None:
        hi = self.model.upper(self.w)
        R = float(self.model.R)
        a, qa = composite_gauss(R, hi, panel=self.model.sigma / 4.0)
        b, qb = composite_gauss(0.0, hi - R, panel=self.model.sigma / 4.0)
        hm, _, hm_a, _ = _hanging_derivs(a, a, self.w, self.r, self.model, self.kind)
        _, hp, _, hp_b = _hanging_derivs(b, b, self.w, self.r, self.model, self.kind)
        self._tab = (qa, hm, hm_a, qb, hp, hp_b)

    def field(self, beta: float) -> dict[str, float]:
        qa, hm, hm_a, qb, hp, hp_b = self._tab
        rh = self.model.rate_hanging
        em = qa * np.exp(beta * hm)
        ep = qb * np.exp(beta * hp)
        # d/ds acts as +d/da on the minus side and -d/db on the plus side
        psi_m = rh * float(np.sum(qa * np.expm1(beta * hm)))
        psi_p = rh * float(np.sum(qb * np.expm1(beta * hp)))
        mean_m = rh * float(np.sum(em * hm))
        mean_p = rh * float(np.sum(ep * hp))
        return {
            "psi": psi_m + psi_p,
            "mean": mean_m + mean_p,
            "var": rh * float(np.sum(em * hm * hm) + np.sum(ep * hp * hp)),
            "psi_minus": psi_m,
            "psi_plus": psi_p,
            "mean_minus": mean_m,
            "mean_plus": mean_p,
            "dvar_minus": rh * float(np.sum(em * hm_a * hm_a)),
            "dvar_plus": rh * float(np.sum(ep * hp_b * hp_b)),
            "cov_minus": rh * float(np.sum(em * hm * hm_a)),
            "cov_plus": -rh * float(np.sum(ep * hp * hp_b)),
            "var_minus": rh * float(np.sum(em * hm * hm)),
            "var_plus": rh * float(np.sum(ep * hp * hp)),
        }

    def moments(self, beta: float) -> Moments:
        q = self.field(beta)
        return Moments(beta, q["psi"], q["mean"], q["var"], q)


# ---------------------------------------------------------------------------
# score tracks on a regular grid s_i = start + i*step


def _ceil_index(x, start: float, step: float) -> np.ndarray:
    return np.ceil((np.asarray(x, dtype=float) - start) / step - 1e-12).astype(np.int64)


def _floor_index(x, start: float, step: float) -> np.ndarray:
    return np.floor((np.asarray(x, dtype=float) - start) / step + 1e-12).astype(np.int64)


def bracket_track(pairs: ReadPairs, model: PairedEndModel, w: float, r: float, kind: str,
                  start: float, step: float, size: int) -> np.ndarray:
    """Bracketing score ``Z^B(s)`` on the grid.

    A mapped pair brackets ``s`` when ``u + R <= s < v - w`` (deletion) or
    ``u + R <= s < v`` (insertion).
    """
    m = pairs.mapped
    u, v = pairs.x_plus[m], pairs.x_minus[m]
    g = bracket_weight(v - u, w, r, model, kind)
    right = v - w if kind == "deletion" else v
    lo = _ceil_index(u + model.R, start, step)
    hi = _ceil_index(right, start, step)
    return interval_accumulate(lo, hi, g, size)


def coverage_track(pairs: ReadPairs, model: PairedEndModel, w: float, r: float, kind: str,
                   start: float, step: float, size: int) -> np.ndarray:
    """``Z^C(s)``: ``log(1-r)`` times the number of pairs with a read in the window."""
    if r == 0.0:
        return np.zeros(size)
    # a read at x intersects the window for s in (x - w, x + R) (deletion) or [x, x + R)
    ivals = []
    for x in (pairs.x_plus, pairs.x_minus):
        x = np.where(np.isfinite(x), x, start)
        if kind == "deletion":
            lo = _floor_index(x - w, start, step) + 1
        else:
            lo = _ceil_index(x, start, step)
        hi = _ceil_index(x + model.R, start, step)
        ivals.append((lo, hi))
    (lu, hu), (lv, hv) = ivals
    fu, fv = np.isfinite(pairs.x_plus), np.isfinite(pairs.x_minus)
    lu, hu = np.where(fu, lu, 0), np.where(fu, hu, 0)
    lv, hv = np.where(fv, lv, 0), np.where(fv, hv, 0)
    # merge the two intervals of a pair so it is counted once
    overlap = fu & fv & (lv <= hu)
    lo1 = np.where(overlap, np.minimum(lu, lv), lu)
    hi1 = np.where(overlap, np.maximum(hu, hv), hu)
    lo2 = np.where(overlap, 0, lv)
    hi2 = np.where(overlap, 0, hv)
    ones = np.ones(len(pairs))
    cnt = interval_accumulate(lo1, hi1, ones, size) + interval_accumulate(lo2, hi2, ones, size)
    return np.log1p(-r) * cnt


def _int_grid(start: float, step: float) -> tuple[int, int]:
    if float(start) != int(start) or float(step) != int(step) or step < 1:
        raise ContractError("hanging tracks need an integer grid")
    return int(start), int(step)


def hanging_minus_track(pairs: ReadPairs, model: PairedEndModel, w: float, r: float, kind: str,
                        start: float, step: float, size: int) -> np.ndarray:
    """``Z^-(s)`` summed over minus-hanging pairs at distance ``a = s - u``."""
    start_i, step_i = _int_grid(start, step)
    m = pairs.hanging_minus
    u = np.round(pairs.x_plus[m]).astype(np.int64)
    L = int(np.ceil(model.upper(w)))
    table = hanging_minus_weight(np.arange(L, dtype=float), w, r, model, kind)
    return profile_accumulate(u, np.ones(u.size), table, 0, start_i, step_i, size)


def hanging_plus_track(pairs: ReadPairs, model: PairedEndModel, w: float, r: float, kind: str,
                       start: float, step: float, size: int) -> np.ndarray:
    """``Z^+`` at right breakpoint ``s``, summed over plus-hanging pairs at ``b = v - s``."""
    start_i, step_i = _int_grid(start, step)
    m = pairs.hanging_plus
    v = np.round(pairs.x_minus[m]).astype(np.int64)
    L = int(np.ceil(model.upper(w)))
    # d = s - v + (L-1) runs over [0, L); b = v - s = L - 1 - d
    b = (L - 1) - np.arange(L, dtype=float)
    table = hanging_plus_weight(b, w, r, model, kind)
    return profile_accumulate(v, np.ones(v.size), table, -(L - 1), start_i, step_i, size)


def hanging_track(pairs: ReadPairs, model: PairedEndModel, w: float, r: float, kind: str,
                  start: float, step: float, size: int, w_range: tuple[float, float] = (0.0, 150.0)
                  ) -> np.ndarray:
    """Combined hanging score ``Z^H(s)``.

    Insertions add both sides at ``s``. Deletions add ``Z^-(s)`` to the best
    ``Z^+(s + w')`` with ``w'`` in ``w_range``.
    """
    zm = hanging_minus_track(pairs, model, w, r, kind, start, step, size)
    if kind == "insertion":
        return zm + hanging_plus_track(pairs, model, w, r, kind, start, step, size)
    k0 = int(np.ceil(w_range[0] / step - 1e-12))
    k1 = int(np.floor(w_range[1] / step + 1e-12))
    ext = size + k1
    zp = hanging_plus_track(pairs, model, w, r, kind, start, step, ext)
    # forward-looking running max over zp[i + k0 : i + k1 + 1]
    fwd = np.lib.stride_tricks.sliding_window_view(zp[k0:], k1 - k0 + 1).max(axis=1)
    return zm + fwd[:size]


def align_hanging_peaks(pairs: ReadPairs, s: float, model: PairedEndModel, r: float = 0.1,
                        w_range: tuple[float, float] = (0.0, 150.0), kind: str = "deletion",
                        w_step: float = 1.0) -> tuple[float, float]:
    """Best ``Z^-(s) + Z^+(s + w)`` over ``w`` in ``w_range`` and its maximizer.

    For insertions both sides peak at ``s`` and are simply added.
    """
    zm_hyp = SVHypothesis(kind, s, 0.0 if kind == "deletion" else 30.0, r)
    cls, k = sv_kernel(pairs, zm_hyp, model)
    zm = float(np.sum(k[cls == PairClass.Sminus]))
    if kind == "insertion":
        return zm + float(np.sum(k[cls == PairClass.Splus])), 0.0
    hp = pairs.hanging_plus
    v = pairs.x_minus[hp]
    ws = np.arange(w_range[0], w_range[1] + 0.5 * w_step, w_step)
    vals = np.array([np.sum(hanging_plus_weight(v - (s + w), 0.0, r, model, "deletion")) for w in ws])
    j = int(np.argmax(vals)) if vals.size else 0
    return zm + (float(vals[j]) if vals.size else 0.0), float(ws[j]) if ws.size else 0.0


def simplified_hanging_count(pairs: ReadPairs, s: float, model: PairedEndModel) -> int:
    """Hanging reads whose mapped end sits exactly one mean insert from ``s``."""
    hm, hp = pairs.hanging_minus, pairs.hanging_plus
    u, v = pairs.x_plus[hm], pairs.x_minus[hp]
    d, R = model.delta, model.R
    a = np.count_nonzero((u >= s - d) & (u <= s - d + R))
    b = np.count_nonzero((v >= s + d - R) & (v <= s + d))
    return int(a + b)


def estimate_p(pairs: ReadPairs) -> float:
    """Share of pairs with an unmapped read."""
    if len(pairs) == 0:
        raise ContractError("need at least one pair to estimate p")
    return float((np.count_nonzero(np.isinf(pairs.x_plus)) + np.count_nonzero(np.isinf(pairs.x_minus)))
                 / len(pairs))
