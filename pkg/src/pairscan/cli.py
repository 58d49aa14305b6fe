"""Command-line entry point: ``pairscan <subcommand> ...``.

Exit codes: 0 success, 2 input/parse error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import contextlib
import sys
from pathlib import Path

from .core import ContractError, MarkDistribution, ModelDomainError, SolveError
from .io import ParseError, PairTable, dump_json, read_calls, read_pairs, write_calls, write_pairs, write_track

EXIT_PARSE = 2
EXIT_NUMERIC = 3


def _model_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("library model")
    g.add_argument("--R", type=int, default=36, help="read length")
    g.add_argument("--delta", type=float, default=200.0, help="mean insert length")
    g.add_argument("--sigma", type=float, default=10.0, help="insert length sd")
    g.add_argument("--p", type=float, default=0.03, help="null hanging probability")
    g.add_argument("--kappa2", type=float, default=0.27, help="read pairs per base")


def _model(a):
    from .sv import PairedEndModel

    return PairedEndModel(R=a.R, delta=a.delta, sigma=a.sigma, p=a.p, kappa2=a.kappa2)


def _variant(text: str):
    from .sv import SVHypothesis

    try:
        kind, s, w, r = text.split(":")
        return SVHypothesis(kind, float(s), float(w), float(r))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"variant must be kind:s:w:r ({exc})") from None


def _out(a):
    return open(a.out, "w") if getattr(a, "out", None) else contextlib.nullcontext(sys.stdout)


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(a) -> int:
    from .simulate import simulate_paired_end, substream

    model = _model(a)
    rng = substream(a.seed, 0)
    rp = simulate_paired_end(model, rng, a.variant or (), a.length)
    write_pairs(a.out, {a.chrom: rp}, {"R": a.R, "source": "pairscan simulate", "seed": a.seed,
                                       "length": int(a.length)})
    return 0


def cmd_estimate(a) -> int:
    from .pipeline import estimate_hanging_p, estimate_insert_params, estimate_kappa2

    tab = read_pairs(a.pairs)
    est = estimate_insert_params(tab, a.min_pairs)
    res = {"delta": est.delta, "sigma_mle": est.sigma_mle, "sigma_robust": est.sigma_robust,
           "n_mapped": est.n, "degenerate": est.degenerate, "p": estimate_hanging_p(tab),
           "rejected_rows": tab.rejected}
    if a.length:
        res["kappa2"] = estimate_kappa2(tab, a.length, a.R)
    with _out(a) as fh:
        dump_json(fh, "estimate", res)
    return 0


def _pvalue_report(a, x: float):
    from . import pvalue as pv

    mark = MarkDistribution.normal(0.0, a.mark_sd)
    s = a.statistic
    if s == "fixed":
        return pv.pvalue_fixed_mixture(a.m, x, a.rho, a.window, a.w, a.r, a.mark_sd, a.od_alpha, a.grid_step)
    if s in ("max_w_ell", "max_w_Z"):
        return pv.pvalue_max_w(a.m, x, a.rho, a.window, a.r, a.w0, a.w1, s[-1] if s.endswith("Z") else "ell",
                               mark, a.grid_step)
    if s == "laplace":
        return pv.pvalue_laplace(a.m, x, a.rho, a.window, a.r, a.w0, a.w1, "Z", mark, a.grid_step)
    if s == "max_wr":
        return pv.pvalue_max_wr(a.m, x, a.rho, a.window, a.w0, a.w1, a.r0, a.r1, mark, a.grid_step)
    if s == "ZB":
        return pv.pvalue_zb(a.m, x, _model(a), a.sv_w, a.sv_r, a.kind, a.grid_step)
    if s == "ZH":
        return pv.pvalue_hanging(a.m * a.grid_step, x, _model(a), a.kind, a.sv_w, a.sv_r)
    raise ContractError(f"unknown statistic {s!r}")


def _stat_args(p: argparse.ArgumentParser, choices) -> None:
    p.add_argument("--statistic", choices=choices, required=True)
    p.add_argument("--m", type=float, default=1e6, help="number of grid points")
    p.add_argument("--grid-step", type=float, default=1.0, help="grid spacing in bases")
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--window", type=float, default=200.0, help="scan window length")
    p.add_argument("--w", type=float, default=2.0)
    p.add_argument("--r", type=float, default=0.1)
    p.add_argument("--w0", type=float, default=0.5)
    p.add_argument("--w1", type=float, default=5.0)
    p.add_argument("--r0", type=float, default=0.03)
    p.add_argument("--r1", type=float, default=0.3)
    p.add_argument("--mark-sd", type=float, default=1.0)
    p.add_argument("--od-alpha", type=float, default=None, help="gamma-mixing index")
    p.add_argument("--kind", choices=("deletion", "insertion"), default="deletion")
    p.add_argument("--sv-w", type=float, default=30.0)
    p.add_argument("--sv-r", type=float, default=0.1)
    _model_args(p)


def cmd_pvalue(a) -> int:
    rep = _pvalue_report(a, a.x)
    with _out(a) as fh:
        dump_json(fh, "pvalue", rep)
    return 0


def cmd_threshold(a) -> int:
    from .pvalue import ThresholdRequest, threshold_for

    name = {"fixed": "fixed"}.get(a.statistic, a.statistic)
    req = ThresholdRequest(name, alpha=a.alpha, m=a.m, rho=a.rho, delta=a.window, w=a.w, r=a.r, w0=a.w0,
                           w1=a.w1, r0=a.r0, r1=a.r1, sigma=a.mark_sd, step=a.grid_step, nu_mode=a.nu_mode,
                           model=_model(a), kind=a.kind, sv_w=a.sv_w, sv_r=a.sv_r)
    with _out(a) as fh:
        dump_json(fh, "threshold", {"statistic": a.statistic, "alpha": a.alpha, "threshold": threshold_for(req)})
    return 0


def cmd_power(a) -> int:
    from .power import Alternative, Statistic, marginal_power

    alt = Alternative(a.true_r, a.true_w, a.alt_kind)
    st = Statistic(a.statistic, rho=a.rho, delta=a.window, w=a.w if a.statistic not in ("ZB", "ZH") else a.sv_w,
                   r=a.r if a.statistic not in ("ZB", "ZH") else a.sv_r, sigma=a.mark_sd, model=_model(a))
    x = tuple(a.threshold) if a.statistic == "bonferroni" else a.threshold[0]
    with _out(a) as fh:
        dump_json(fh, "power", marginal_power(st, alt, x))
    return 0


def cmd_scan(a) -> int:
    from .pipeline import scan_genome

    tab = read_pairs(a.pairs)
    res = scan_genome(tab, _model(a), tuple(a.scores), a.alpha, None, a.step, a.kind, a.sv_w, a.sv_r,
                      pooled=not a.per_chromosome, nu_mode=a.nu_mode)
    for d in res.diagnostics:
        print("warning:", d, file=sys.stderr)
    if a.tracks:
        tdir = Path(a.tracks)
        tdir.mkdir(parents=True, exist_ok=True)
        for tr in res.tracks:
            with open(tdir / f"{tr.chrom}.{tr.score_type}.tsv", "w") as fh:
                write_track(fh, tr.chrom, tr.start, tr.step, tr.values, tr.score_type)
    with _out(a) as fh:
        if a.json:
            dump_json(fh, "calls", {"thresholds": res.thresholds, "calls": res.calls})
        else:
            write_calls(fh, res.calls)
    return 0


def cmd_tables(a) -> int:
    from . import tables

    if a.name == "table1":
        data = tables.table1(a.mc_reps, a.seed, a.threads)
    else:
        data = tables.TABLES[a.name]()
    with _out(a) as fh:
        dump_json(fh, a.name, data)
    return 0


def cmd_overlap(a) -> int:
    from .pipeline import overlap_analysis

    res = overlap_analysis(read_calls(a.zb), read_calls(a.zminus), read_calls(a.zplus))
    with _out(a) as fh:
        dump_json(fh, "overlap", res)
    return 0


def _global_args(p: argparse.ArgumentParser, defaults: dict | None) -> None:
    d = defaults or {}
    sup = argparse.SUPPRESS
    p.add_argument("--seed", type=int, default=d.get("seed", sup))
    p.add_argument("--threads", type=int, default=d.get("threads", sup))
    p.add_argument("--step", type=int, default=d.get("step", sup), help="scan grid spacing in bases")
    p.add_argument("--alpha", type=float, default=d.get("alpha", sup))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pairscan", description="Scan statistics for paired-end structural variants")
    _global_args(p, dict(seed=0, threads=1, step=10, alpha=0.05))
    # the same flags after the subcommand override the ones before it
    common = argparse.ArgumentParser(add_help=False)
    _global_args(common, None)
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser
    sub.add_parser = lambda *a, **k: _add(*a, parents=[common], **k)

    s = sub.add_parser("simulate", help="simulate a read-pair table")
    _model_args(s)
    s.add_argument("--length", type=float, default=1e6)
    s.add_argument("--chrom", default="chrSim")
    s.add_argument("--variant", type=_variant, action="append", help="kind:s:w:r (repeatable)")
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_simulate)

    s = sub.add_parser("estimate", help="estimate insert-length and coverage parameters")
    s.add_argument("pairs")
    s.add_argument("--R", type=int, default=36)
    s.add_argument("--length", type=float, default=None, help="template length for the coverage rate")
    s.add_argument("--min-pairs", type=int, default=1000)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_estimate)

    s = sub.add_parser("pvalue", help="analytic false-positive rate")
    _stat_args(s, ("fixed", "max_w_ell", "max_w_Z", "laplace", "max_wr", "ZB", "ZH"))
    s.add_argument("--x", type=float, required=True)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_pvalue)

    s = sub.add_parser("threshold", help="threshold for a target level")
    _stat_args(s, ("fixed", "max_w_ell", "max_w_Z", "max_wr", "bonferroni", "ZB", "ZH", "Zminus", "Zplus"))
    s.add_argument("--nu-mode", choices=("unit", "evaluated"), default="unit")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_threshold)

    s = sub.add_parser("power", help="normal-approximation marginal power")
    _stat_args(s, ("fixed_ell", "fixed_Z", "max_w_ell", "max_w_Z", "max_wr", "bonferroni", "ZB", "ZH"))
    s.add_argument("--threshold", type=float, nargs="+", required=True)
    s.add_argument("--true-r", type=float, required=True)
    s.add_argument("--true-w", type=float, required=True)
    s.add_argument("--alt-kind", choices=("mixture", "deletion", "insertion"), default="mixture")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_power)

    s = sub.add_parser("scan", help="scan a pair table and emit calls")
    s.add_argument("pairs")
    _model_args(s)
    s.add_argument("--scores", nargs="+", default=["ZB", "Zminus", "Zplus"],
                   choices=("ZB", "Zminus", "Zplus", "ZH"))
    s.add_argument("--kind", choices=("deletion", "insertion"), default="deletion")
    s.add_argument("--sv-w", type=float, default=30.0)
    s.add_argument("--sv-r", type=float, default=0.1)
    s.add_argument("--per-chromosome", action="store_true", help="per-chromosome thresholds instead of pooled")
    s.add_argument("--nu-mode", choices=("unit", "evaluated"), default="evaluated")
    s.add_argument("--tracks", help="directory for per-score track TSVs")
    s.add_argument("--json", action="store_true")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_scan)

    s = sub.add_parser("tables", help="recompute a published table")
    s.add_argument("name", choices=("table1", "table2", "table4", "table5", "table6", "sec62",
                                    "overdispersion", "combination", "thresholds"))
    s.add_argument("--mc-reps", type=int, default=0, help="Monte Carlo replications (table1)")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_tables)

    s = sub.add_parser("overlap", help="bracketing calls flanked by hanging-read calls")
    s.add_argument("zb")
    s.add_argument("zminus")
    s.add_argument("zplus")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_overlap)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    try:
        return a.fn(a)
    except (ParseError, FileNotFoundError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (SolveError, ModelDomainError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
