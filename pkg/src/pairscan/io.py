"""File formats: pair tables, calls, score tracks and JSON reports."""

from __future__ import annotations

import json
import math
import sys
from dataclasses import asdict, dataclass, is_dataclass
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .sv import ReadPairs

PAIR_HEADER = "#chrom\tx_plus\tx_minus"
CALL_HEADER = "#chrom\tstart\tend\tscore_type\tpeak\tpeak_pos\tthreshold\talpha"
SCHEMA_VERSION = 1


class ParseError(ValueError):
    """Malformed input; ``line`` is 1-based."""

    def __init__(self, msg: str, line: int | None = None):
        super().__init__(f"line {line}: {msg}" if line is not None else msg)
        self.line = line


@dataclass
class PairTable:
    """Read pairs grouped by chromosome."""

    pairs: dict[str, ReadPairs]
    meta: dict
    rejected: int = 0
    resorted: bool = False

    def chromosomes(self) -> list[str]:
        return list(self.pairs)


def _parse_pos(tok: str, line: int) -> float:
    if tok == "inf":
        return math.inf
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(f"bad position {tok!r}", line) from None
    return float(v)


def read_pairs(path: str | Path) -> PairTable:
    """Parse a pair table. Rows with both ends ``inf`` are dropped and counted."""
    cols: dict[str, tuple[list, list]] = {}
    meta: dict = {}
    rejected = 0
    seen_header = False
    with open(path) as fh:
        for i, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("##"):
                k, _, v = line[2:].partition("=")
                meta[k.strip()] = v.strip()
                continue
            if line.startswith("#"):
                if line != PAIR_HEADER:
                    raise ParseError(f"unexpected header {line!r}", i)
                seen_header = True
                continue
            f = line.split("\t")
            if len(f) != 3:
                raise ParseError(f"expected 3 fields, got {len(f)}", i)
            u, v = _parse_pos(f[1], i), _parse_pos(f[2], i)
            if math.isinf(u) and math.isinf(v):
                rejected += 1
                continue
            a, b = cols.setdefault(f[0], ([], []))
            a.append(u)
            b.append(v)
    if not seen_header:
        raise ParseError("missing header line " + repr(PAIR_HEADER))
    out, resorted = {}, False
    for chrom, (a, b) in cols.items():
        rp = ReadPairs(np.array(a), np.array(b))
        srt = rp.sorted()
        if not (np.array_equal(srt.x_plus, rp.x_plus) and np.array_equal(srt.x_minus, rp.x_minus)):
            resorted = True
        out[chrom] = srt
    if resorted:
        print("notice: pair table was not sorted; sorted on input", file=sys.stderr)
    return PairTable(out, meta, rejected, resorted)


def _fmt_pos(x: float) -> str:
    return "inf" if math.isinf(x) else str(int(x))


def write_pairs(path: str | Path, table: PairTable | dict[str, ReadPairs], meta: dict | None = None) -> None:
    pairs = table.pairs if isinstance(table, PairTable) else table
    meta = (table.meta if isinstance(table, PairTable) else meta) or {}
    with open(path, "w") as fh:
        for k, v in meta.items():
            fh.write(f"##{k}={v}\n")
        fh.write(PAIR_HEADER + "\n")
        for chrom, rp in pairs.items():
            for u, v in zip(rp.x_plus, rp.x_minus):
                fh.write(f"{chrom}\t{_fmt_pos(u)}\t{_fmt_pos(v)}\n")


@dataclass(frozen=True)
class Call:
    """Merged exceedance region, 0-based half-open ``[start, end)``."""

    chrom: str
    start: int
    end: int
    score_type: str
    peak: float
    peak_pos: int
    threshold: float
    alpha: float

    def __post_init__(self) -> None:
        if not self.start < self.end:
            raise ValueError("call must have start < end")


def write_calls(fh: TextIO, calls: Iterable[Call]) -> None:
    fh.write(CALL_HEADER + "\n")
    for c in calls:
        fh.write(f"{c.chrom}\t{c.start}\t{c.end}\t{c.score_type}\t{c.peak:.6g}\t{c.peak_pos}"
                 f"\t{c.threshold:.6g}\t{c.alpha:g}\n")


def read_calls(path: str | Path) -> list[Call]:
    out = []
    with open(path) as fh:
        for i, line in enumerate(fh, 1):
            if not line.strip() or line.startswith("#"):
                continue
            f = line.rstrip("\n").split("\t")
            if len(f) != 8:
                raise ParseError(f"expected 8 fields, got {len(f)}", i)
            try:
                out.append(Call(f[0], int(f[1]), int(f[2]), f[3], float(f[4]), int(f[5]), float(f[6]),
                                float(f[7])))
            except ValueError as exc:
                raise ParseError(str(exc), i) from None
    return out


def write_track(fh: TextIO, chrom: str, start: float, step: float, values: np.ndarray, score_type: str) -> None:
    fh.write(f"#chrom={chrom}\tscore={score_type}\tstart={start:g}\tstep={step:g}\n#pos\tvalue\n")
    for i, v in enumerate(values):
        fh.write(f"{start + i * step:g}\t{v:.6g}\n")


def _jsonable(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dump_json(fh: TextIO, kind: str, payload) -> None:
    json.dump({"schema_version": SCHEMA_VERSION, "kind": kind, "data": _jsonable(payload)}, fh,
              indent=2, sort_keys=True)
    fh.write("\n")
