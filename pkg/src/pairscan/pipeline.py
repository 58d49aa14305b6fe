"""Genome scanning workflow: parameter estimation, score tracks, calls, overlaps."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import ContractError, MarkDistribution, ModelDomainError, SolveError
from .io import Call, PairTable
from .pvalue import ThresholdRequest, threshold_for
from .sv import (
    PairedEndModel,
    ReadPairs,
    bracket_track,
    estimate_p,
    hanging_minus_track,
    hanging_plus_track,
    hanging_track,
)

SCORE_TYPES = ("ZB", "Zminus", "Zplus", "ZH")
MAD_SCALE = 1.4826


@dataclass(frozen=True)
class InsertEstimate:
    delta: float
    sigma_mle: float
    sigma_robust: float
    n: int
    degenerate: bool


def _all_pairs(data) -> list[ReadPairs]:
    if isinstance(data, PairTable):
        return list(data.pairs.values())
    if isinstance(data, ReadPairs):
        return [data]
    return list(data)


def estimate_insert_params(data, min_pairs: int = 1000) -> InsertEstimate:
    """Mean, sample sd and scaled-MAD sd of mapped insert lengths."""
    ys = [rp.x_minus[rp.mapped] - rp.x_plus[rp.mapped] for rp in _all_pairs(data)]
    y = np.concatenate(ys) if ys else np.zeros(0)
    if y.size < min_pairs:
        raise ContractError(f"need at least {min_pairs} mapped pairs, got {y.size}")
    med = float(np.median(y))
    robust = MAD_SCALE * float(np.median(np.abs(y - med)))
    sd = float(np.std(y, ddof=1))
    return InsertEstimate(float(np.mean(y)), sd, robust, int(y.size), sd == 0.0 or robust == 0.0)


def estimate_kappa2(data, T: float, R: int) -> float:
    """Read pairs per base: mapped reads over ``2 (T - R + 1)``."""
    n = sum(int(np.isfinite(rp.x_plus).sum() + np.isfinite(rp.x_minus).sum()) for rp in _all_pairs(data))
    return n / (2.0 * (T - R + 1))


def estimate_hanging_p(data) -> float:
    return estimate_p(ReadPairs(np.concatenate([rp.x_plus for rp in _all_pairs(data)]),
                                np.concatenate([rp.x_minus for rp in _all_pairs(data)])))


@dataclass
class ScoreTrack:
    chrom: str
    start: float
    step: float
    values: np.ndarray
    score_type: str

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.values)):
            raise ModelDomainError("score track has non-finite values")


def merge_calls(track: ScoreTrack, threshold: float, alpha: float, gap: int = 0) -> list[Call]:
    """Runs of grid points at or above ``threshold``, joined across gaps of at most ``gap`` points.

    A call spans ``[first, last + step)`` and reports the leftmost peak.
    """
    v = track.values
    idx = np.flatnonzero(v >= threshold)
    if idx.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(idx) > gap + 1)
    starts = np.concatenate([[0], breaks + 1])
    ends = np.concatenate([breaks, [idx.size - 1]])
    out = []
    for a, b in zip(starts, ends):
        i0, i1 = idx[a], idx[b]
        seg = v[i0:i1 + 1]
        j = i0 + int(np.argmax(seg))
        pos = lambda i: int(round(track.start + i * track.step))
        out.append(Call(track.chrom, pos(i0), pos(i1) + int(round(track.step)), track.score_type,
                        float(v[j]), pos(j), float(threshold), float(alpha)))
    return out


@dataclass
class ScanOutput:
    tracks: list[ScoreTrack]
    calls: list[Call]
    thresholds: dict[str, float]
    diagnostics: list[str] = field(default_factory=list)


def _template_length(rp: ReadPairs, model: PairedEndModel) -> float:
    pos = np.concatenate([rp.x_plus[np.isfinite(rp.x_plus)], rp.x_minus[np.isfinite(rp.x_minus)]])
    return float(pos.max()) + model.R + 1 if pos.size else 0.0


def scan_genome(table: PairTable, model: PairedEndModel, statistics=("ZB", "Zminus", "Zplus"),
                alpha: float = 0.05, thresholds: dict[str, float] | None = None, step: int = 10,
                kind: str = "deletion", w: float = 30.0, r: float = 0.1, pooled: bool = True,
                lengths: dict[str, float] | None = None, nu_mode: str = "evaluated") -> ScanOutput:
    """Score tracks and merged calls for every chromosome of ``table``.

    Thresholds not given explicitly come from the analytic approximations at
    level ``alpha``, with ``m`` the pooled number of grid points (or the
    chromosome's own count when ``pooled`` is false). ``nu_mode='evaluated'``
    applies the overshoot correction for the grid spacing to ``Z^B``.
    """
    for s in statistics:
        if s not in SCORE_TYPES:
            raise ContractError(f"unknown score type {s!r}")
    if int(step) != step or step < 1:
        raise ContractError("step must be a positive integer number of bases")
    sizes = {}
    for chrom in sorted(table.pairs):
        T = (lengths or {}).get(chrom) or _template_length(table.pairs[chrom], model)
        sizes[chrom] = int(np.ceil(T / step)) if T > 0 else 0
    total = sum(sizes.values())
    out = ScanOutput([], [], {})
    fixed = dict(thresholds or {})

    def thr_for(stat: str, m: int) -> float | None:
        if stat in fixed:
            return fixed[stat]
        try:
            return threshold_for(ThresholdRequest(stat, alpha=alpha, m=max(m, 1), step=float(step),
                                                  model=model, kind=kind, sv_w=w, sv_r=r, nu_mode=nu_mode))
        except (SolveError, ModelDomainError) as exc:
            out.diagnostics.append(f"{stat}: threshold solve failed ({exc}); statistic skipped")
            return None

    pooled_thr = {s: thr_for(s, total) for s in statistics} if pooled and total else {}
    builders = {
        "ZB": lambda rp, n: bracket_track(rp, model, w, r, kind, 0.0, step, n),
        "Zminus": lambda rp, n: hanging_minus_track(rp, model, w, r, kind, 0.0, step, n),
        "Zplus": lambda rp, n: hanging_plus_track(rp, model, w, r, kind, 0.0, step, n),
        "ZH": lambda rp, n: hanging_track(rp, model, w, r, kind, 0.0, step, n),
    }
    for chrom in sorted(table.pairs):
        n = sizes[chrom]
        if n == 0:
            continue
        rp = table.pairs[chrom]
        for stat in statistics:
            x = pooled_thr.get(stat) if pooled else thr_for(stat, n)
            if x is None:
                continue
            out.thresholds[stat if pooled else f"{chrom}:{stat}"] = x
            tr = ScoreTrack(chrom, 0.0, float(step), builders[stat](rp, n), stat)
            out.tracks.append(tr)
            out.calls.extend(merge_calls(tr, x, alpha))
    out.calls.sort(key=lambda c: (c.chrom, c.start, c.score_type))
    return out


def _closed_hit(a0: int, a1: int, b0: int, b1: int) -> bool:
    return a0 <= b1 and b0 <= a1


def overlap_analysis(calls_zb: list[Call], calls_zminus: list[Call], calls_zplus: list[Call]) -> dict:
    """Count bracketing calls flanked by a minus-hanging call on the left and a plus-hanging call on the right.

    Calls are closed intervals ``[start, end - 1]``. The left end is the left
    half of the bracketing call and the right end its right half.
    """
    flanked = 0
    for c in calls_zb:
        mid = (c.start + c.end - 1) // 2
        left = any(m.chrom == c.chrom and _closed_hit(c.start, mid, m.start, m.end - 1) for m in calls_zminus)
        right = any(p.chrom == c.chrom and _closed_hit(mid, c.end - 1, p.start, p.end - 1) for p in calls_zplus)
        flanked += left and right
    n = len(calls_zb)
    return {"ZB": n, "Zminus": len(calls_zminus), "Zplus": len(calls_zplus), "flanked": flanked,
            "flanked_pct": 100.0 * flanked / n if n else 0.0}


def model_from_estimates(est: InsertEstimate, R: int, p: float, kappa2: float, robust: bool = True) -> PairedEndModel:
    sd = est.sigma_robust if robust else est.sigma_mle
    if est.degenerate or not sd > 0:
        raise ModelDomainError("degenerate insert-length estimate")
    return PairedEndModel(R=R, delta=est.delta, sigma=sd, p=p, kappa2=kappa2,
                          insert=MarkDistribution.normal(est.delta, sd))
