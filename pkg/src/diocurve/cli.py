"""Command line interface.

Subcommands: residues, congruence, reduce, cover, scan, experiment.  All
emit CSV (default) or JSON-lines with a '#'-prefixed config echo block.
Exit codes: 0 on success, 2 on usage/precondition errors, 1 on internal
errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from ._kernels import backend_name
from ._version import __version__
from .arithmetic import PreconditionError
from .counting import AlphaValue, CountCurve, HitFlags, find_hits
from .covers import (
    GcdBand,
    banded_cover_record,
    cover_measure,
    restricted_series_partial,
    tail_sum,
)
from .curve import (
    IntPolynomial,
    derivative_sup_bound,
    lift_constrained,
    reduce_simultaneous,
)
from .experiments import (
    ExperimentConfig,
    critical_band_experiment,
    geometric_schedule,
    growth_exponent_experiment,
    stabilization_experiment,
    svolume_experiment,
    threshold_experiment,
)
from .residues import PowerResidueProfile, hensel_lift, power_residues

_ECHO_KEYS = ("seed", "format")  # threads omitted: outputs are thread-invariant


def _echo_lines(args, **extra) -> list[str]:
    items = {"library": f"diocurve {__version__}", "backend": backend_name()}
    for key in _ECHO_KEYS:
        if hasattr(args, key):
            items[key] = getattr(args, key)
    items.update(extra)
    return [f"# {k} = {v}" for k, v in items.items()]


def _emit(args, header: list[str], rows: list[tuple], echo: list[str]) -> None:
    out = []
    out.extend(echo)
    if args.format == "csv":
        out.append(",".join(header))
        out.extend(",".join(str(x) for x in row) for row in rows)
    else:
        out.extend(
            json.dumps(dict(zip(header, row)), default=str) for row in rows
        )
    text = "\n".join(out) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational {text!r}: {exc}")


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    parser.add_argument("--output", help="write to this path instead of stdout")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument(
        "--dump-gnuplot",
        metavar="PREFIX",
        help="also write plain two-column data files, one per curve",
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="diocurve",
        description="exact-arithmetic toolkit for constrained Diophantine "
        "approximation on translated polynomial curves",
    )
    ap.add_argument("--version", action="version", version=f"diocurve {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("residues", help="power-residue profiles and sets")
    _common(p)
    p.add_argument("--q", type=int)
    p.add_argument("--qlo", type=int)
    p.add_argument("--qhi", type=int)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--elements", action="store_true", help="also list the residue set")
    p.add_argument("--ad", type=int, default=1)

    p = sub.add_parser("congruence", help="solution counts and Hensel lifts")
    _common(p)
    p.add_argument("--mode", choices=("count", "lift"), default="count")
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--ad", type=int, default=1)
    p.add_argument("--poly", help="coefficients, constant first (lift mode)")
    p.add_argument("--ptilde", type=int, help="base solution mod q (lift mode)")

    p = sub.add_parser("reduce", help="simultaneous-to-constrained round trip")
    _common(p)
    p.add_argument("--poly", required=True)
    p.add_argument("--alpha", type=_fraction, required=True)
    p.add_argument("--x", type=_fraction, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--tau", type=_fraction, required=True)
    p.add_argument("--M", type=int, default=0)

    p = sub.add_parser("cover", help="cover measures, tail sums, L series")
    _common(p)
    p.add_argument("--mode", choices=("measures", "tail", "series"), default="measures")
    p.add_argument("--tau", type=_fraction)
    p.add_argument("--d", type=int)
    p.add_argument("--ad", type=int, default=1)
    p.add_argument("--q", type=int)
    p.add_argument("--qlo", type=int)
    p.add_argument("--qhi", type=int)
    p.add_argument("--band", type=GcdBand.parse, default=GcdBand.full())
    p.add_argument("--z", type=_fraction, help="series weight z")
    p.add_argument("--s", type=_fraction, help="series exponent s")
    p.add_argument("--n", type=int, default=1, help="series coprimality modulus")
    p.add_argument("--qmax", type=int, help="series cutoff")

    p = sub.add_parser("scan", help="constrained hit scan / counting curve")
    _common(p)
    p.add_argument("--poly", required=True)
    p.add_argument("--tau", type=_fraction, required=True)
    p.add_argument("--alpha", type=_fraction, required=True)
    p.add_argument("--qmax", type=int, required=True)
    p.add_argument("--band", type=GcdBand.parse, default=GcdBand.full())
    p.add_argument("--primitive", action="store_true")
    p.add_argument("--coprime", action="store_true")
    p.add_argument("--omega-max", type=int)
    p.add_argument(
        "--curve",
        action="store_true",
        help="emit the (Q, N) counting curve along a doubling schedule "
        "instead of individual hits",
    )

    p = sub.add_parser("experiment", help="the four experiment drivers")
    _common(p)
    p.add_argument(
        "--kind",
        choices=("threshold", "growth", "critical-band", "svolume", "stabilization"),
        required=True,
    )
    p.add_argument("--poly", default="0,0,-1")
    p.add_argument("--tau", type=_fraction, default=Fraction(5, 2))
    p.add_argument("--taus", help="semicolon list for threshold, e.g. '5/2;3;7/2'")
    p.add_argument("--band", type=GcdBand.parse, default=GcdBand.full())
    p.add_argument("--delta", type=_fraction, default=Fraction(1, 4))
    p.add_argument("--alpha-count", type=int, default=20)
    p.add_argument("--alpha-bits", type=int, default=0)
    p.add_argument("--schedule", help="LOEXP:HIEXP powers of two, e.g. 6:20")
    p.add_argument("--qmax", type=int, help="svolume scan depth")
    p.add_argument("--qlo", type=int, help="stabilization window start")
    p.add_argument("--qhi", type=int, help="stabilization window end")
    p.add_argument("--s-grid", help="semicolon list of s values for svolume")

    return ap


def _cmd_residues(args) -> None:
    if args.q is None and args.qlo is None:
        raise PreconditionError("need --q or --qlo/--qhi")
    qs = [args.q] if args.q is not None else list(range(args.qlo, args.qhi + 1))
    header = ["q", "u", "e", "r"]
    rows = []
    for q in qs:
        prof = PowerResidueProfile.compute(q, args.d)
        row = (q, prof.u, prof.e, prof.r)
        if args.elements:
            elems = power_residues(q, args.d, args.ad).elements
            row = row + (" ".join(map(str, elems)),)
        rows.append(row)
    if args.elements:
        header.append("elements")
    _emit(args, header, rows, _echo_lines(args, d=args.d, ad=args.ad))


def _cmd_congruence(args) -> None:
    if args.mode == "count":
        from .residues import count_solutions

        d = args.d
        if d is None:
            raise PreconditionError("count mode needs --d")
        c = count_solutions(args.b, args.q, d, args.ad)
        rows = [(args.q, args.b, d, args.ad, c, str(c > 0).lower())]
        _emit(
            args,
            ["q", "b", "d", "ad", "solutions", "solvable"],
            rows,
            _echo_lines(args),
        )
        return
    if not args.poly or args.ptilde is None:
        raise PreconditionError("lift mode needs --poly and --ptilde")
    poly = IntPolynomial.parse(args.poly)
    d, a_d = poly.degree, poly.lead_negated
    p = hensel_lift(args.ptilde, args.b, args.q, d, a_d, poly)
    rows = [(args.q, args.b, args.ptilde, p, args.q ** (d - 1))]
    _emit(args, ["q", "b", "ptilde", "p", "modulus"], rows, _echo_lines(args))


def _cmd_reduce(args) -> None:
    poly = IntPolynomial.parse(args.poly)
    bound = derivative_sup_bound(poly, args.M)
    hit = reduce_simultaneous(
        args.alpha, args.x, args.p, args.q, args.r, args.tau, bound, poly
    )
    r_back, radius = lift_constrained(
        args.alpha, hit.b, hit.q, args.p, args.tau, bound, poly
    )
    rows = [
        (
            hit.q,
            hit.b,
            hit.error.numerator,
            hit.error.denominator,
            hit.gcd_bq,
            bound.value,
            r_back,
            f"{radius.numerator}/{radius.denominator}",
        )
    ]
    _emit(
        args,
        ["q", "b", "error_num", "error_den", "gcd_bq", "K", "r", "radius"],
        rows,
        _echo_lines(args, M=args.M, tau=args.tau),
    )


def _cmd_cover(args) -> None:
    if args.mode == "series":
        if args.z is None or args.s is None or args.qmax is None:
            raise PreconditionError("series mode needs --z, --s, --qmax")
        lo, hi = restricted_series_partial(args.z, args.s, args.n, args.qmax)
        rows = [(str(args.z), str(args.s), args.n, args.qmax, float(lo), float(hi))]
        _emit(args, ["z", "s", "n", "Q", "sum_lo", "sum_hi"], rows, _echo_lines(args))
        return
    if args.tau is None or args.d is None:
        raise PreconditionError("cover needs --tau and --d")
    if args.mode == "tail":
        if args.qlo is None or args.qhi is None:
            raise PreconditionError("tail mode needs --qlo and --qhi")
        lo, hi = tail_sum(args.tau, args.d, args.ad, args.qlo, args.qhi, args.band)
        rows = [(str(args.tau), args.qlo, args.qhi, float(lo), float(hi))]
        _emit(args, ["tau", "qlo", "qhi", "sum_lo", "sum_hi"], rows, _echo_lines(args))
        return
    if args.q is None and args.qlo is None:
        raise PreconditionError("need --q or --qlo/--qhi")
    qs = [args.q] if args.q is not None else list(range(args.qlo, args.qhi + 1))
    rows = []
    for q in qs:
        if args.band.is_full:
            rec = cover_measure(q, args.tau, args.d, args.ad)
        else:
            rec = banded_cover_record(q, args.tau, args.d, args.ad, args.band)
        rows.append(
            (
                rec.q,
                rec.center_count,
                rec.count_source,
                f"{rec.measure_lo.numerator}/{rec.measure_lo.denominator}",
                f"{rec.measure_hi.numerator}/{rec.measure_hi.denominator}",
            )
        )
    _emit(
        args,
        ["q", "center_count", "count_source", "measure_lo", "measure_hi"],
        rows,
        _echo_lines(args, tau=args.tau, d=args.d, ad=args.ad, band=args.band.format()),
    )


def _cmd_scan(args) -> None:
    poly = IntPolynomial.parse(args.poly)
    d, a_d = poly.degree, poly.lead_negated
    flags = HitFlags(args.primitive, args.coprime, args.omega_max)
    alpha = AlphaValue.user(args.alpha)
    hits = find_hits(
        alpha, d, a_d, args.tau, args.band, args.qmax, flags, threads=args.threads
    )
    echo = _echo_lines(
        args,
        poly=poly.format(),
        tau=args.tau,
        alpha=args.alpha,
        band=args.band.format(),
        flags=flags.describe(),
    )
    if args.curve:
        hi_exp = max(2, (args.qmax**d).bit_length() - 1)
        schedule = geometric_schedule(2, hi_exp)
        curve = CountCurve.from_hits(
            alpha, d, a_d, Fraction(args.tau), args.band, flags, hits, schedule
        )
        rows = list(curve.samples)
        _emit(args, ["Q", "N"], rows, echo)
        if args.dump_gnuplot:
            Path(f"{args.dump_gnuplot}_curve.dat").write_text(
                "\n".join(f"{Q} {n}" for Q, n in rows) + "\n"
            )
        return
    rows = [
        (
            h.q,
            h.b,
            h.error.numerator,
            h.error.denominator,
            h.gcd_bq,
            flags.describe(),
        )
        for h in hits
    ]
    _emit(
        args,
        ["q", "b", "error_num", "error_den", "gcd_bq", "flags_passed"],
        rows,
        echo,
    )


def _parse_schedule(text: str) -> tuple[int, ...]:
    lo, hi = text.split(":")
    return geometric_schedule(int(lo), int(hi))


def _cmd_experiment(args) -> None:
    poly = IntPolynomial.parse(args.poly)
    cfg = ExperimentConfig(
        polynomial=poly,
        tau=args.tau,
        band=args.band,
        alpha_count=args.alpha_count,
        alpha_bits=args.alpha_bits,
        seed=args.seed,
        q_schedule=_parse_schedule(args.schedule) if args.schedule else (),
        threads=args.threads,
    )
    if args.kind == "threshold":
        taus = (
            [Fraction(t) for t in args.taus.split(";")]
            if args.taus
            else [cfg.tau]
        )
        report = threshold_experiment(cfg, taus)
        plot_key = "tau"
        plot_cols = ("Q", "sum_hi")
    elif args.kind == "growth":
        report = growth_exponent_experiment(cfg)
        plot_key = "alpha_index"
        plot_cols = ("Q", "N")
    elif args.kind == "critical-band":
        report = critical_band_experiment(cfg, args.delta)
        plot_key = None
        plot_cols = None
    elif args.kind == "svolume":
        if not args.qmax:
            raise PreconditionError("svolume needs --qmax")
        grid = (
            [Fraction(s) for s in args.s_grid.split(";")]
            if args.s_grid
            else [Fraction(k, 40) for k in range(1, 11)] + [Fraction(1)]
        )
        report = svolume_experiment(cfg, grid, args.qmax)
        plot_key = None
        plot_cols = None
    else:
        if not args.qlo or not args.qhi:
            raise PreconditionError("stabilization needs --qlo and --qhi")
        report = stabilization_experiment(cfg, args.qlo, args.qhi)
        plot_key = None
        plot_cols = None
    text = report.render(args.format)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if args.dump_gnuplot and plot_cols:
        curves = report.gnuplot_columns(*plot_cols, key=plot_key)
        for label, data in curves.items():
            safe = label.replace("/", "_")
            Path(f"{args.dump_gnuplot}_{safe}.dat").write_text(data)


_COMMANDS = {
    "residues": _cmd_residues,
    "congruence": _cmd_congruence,
    "reduce": _cmd_reduce,
    "cover": _cmd_cover,
    "scan": _cmd_scan,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except (PreconditionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - internal failure boundary
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
