"""Desk-scale experiment drivers: the convergence threshold of the cover
series, growth exponents of the banded counting function, the critical
gcd band, and s-volume partial sums, plus deterministic report emission.

Verdicts at finite scale need explicit rules, so they are spelled out
here and echoed into every report:

* sums are sampled along a geometric Q schedule; Cauchy increments are
  taken over consecutive non-overlapping quadruplings of Q (per-doubling
  increments of a barely-convergent series shrink by less than the 1.5
  cut, quadrupling restores the margin);
* "flattening" means the last three such increments each shrink by a
  factor >= 1.5; "unbounded" means they are non-shrinking and the total
  exceeds 10x the first schedule increment;
* exponent fits are least squares on log-log points over the top half of
  the schedule only, always reported with residual and window;
* almost-everywhere claims are checked as supermajorities over seeded
  random alphas, never as universals.
"""

from __future__ import annotations

import bisect
import io
import json
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from ._kernels import backend_name
from ._version import __version__
from .arithmetic import Rational, iroot
from .counting import AlphaValue, CountCurve, HitFlags, find_hits, required_alpha_bits
from .covers import DEFAULT_ORACLE_LIMIT, GcdBand, IntervalSum, tail_sum
from .curve import IntPolynomial
from .residues import count_solutions


def geometric_schedule(lo_exp: int, hi_exp: int, ratio_exp: int = 1) -> tuple[int, ...]:
    """Powers of two 2^lo_exp .. 2^hi_exp stepping by 2^ratio_exp."""
    return tuple(1 << k for k in range(lo_exp, hi_exp + 1, ratio_exp))


@dataclass(frozen=True)
class VerdictRules:
    shrink_factor: float = 1.5
    growth_total_factor: float = 10.0
    flat_slope: float = 0.1
    log_slope_cut: float = 0.15  # below this a diverging sum is tagged logarithmic
    svolume_rel_tol: float = 0.1  # sparse-sum flattening: relative top-half growth


@dataclass(frozen=True)
class ExperimentConfig:
    polynomial: IntPolynomial
    tau: Fraction
    band: GcdBand
    alpha_count: int = 20
    alpha_bits: int = 0  # 0 = derive from (d, tau, qmax) with a 128-bit floor
    seed: int = 0
    q_schedule: tuple[int, ...] = ()
    threads: int = 1
    oracle_limit: int = DEFAULT_ORACLE_LIMIT
    rules: VerdictRules = field(default_factory=VerdictRules)

    def __post_init__(self):
        object.__setattr__(self, "tau", Fraction(self.tau))
        if self.alpha_count < 1:
            raise ValueError("alpha count must be >= 1")
        if self.q_schedule and any(
            a >= b for a, b in zip(self.q_schedule, self.q_schedule[1:])
        ):
            raise ValueError("Q schedule must be strictly increasing")

    @property
    def d(self) -> int:
        return self.polynomial.degree

    @property
    def a_d(self) -> int:
        return self.polynomial.lead_negated

    def schedule(self, default: tuple[int, ...]) -> tuple[int, ...]:
        return self.q_schedule if self.q_schedule else default

    def alphas(self, qmax: int) -> list[AlphaValue]:
        bits = self.alpha_bits or required_alpha_bits(self.d, self.tau, qmax)
        import random

        rng = random.Random(self.seed)
        return [
            AlphaValue(
                Fraction(rng.getrandbits(bits) | 1, 1 << bits),
                f"dyadic-random(seed={self.seed}, bits={bits}, index={i})",
            )
            for i in range(self.alpha_count)
        ]

    def echo(self, **extra) -> list[str]:
        """Config echo block for report files."""
        items = {
            "library": f"diocurve {__version__}",
            "backend": backend_name(),
            "poly": self.polynomial.format(),
            "tau": str(self.tau),
            "band": self.band.format(),
            "alpha_count": self.alpha_count,
            "alpha_bits": self.alpha_bits or "auto",
            "seed": self.seed,
            # thread count deliberately omitted: reports are byte-identical
            # for any --threads value
            "oracle_limit": self.oracle_limit,
            "count_source_policy": f"oracle for q <= {self.oracle_limit}, formula above",
            **extra,
        }
        return [f"# {k} = {v}" for k, v in items.items()]


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares slope of log(value) against log(Q) over a stated window."""

    slope: float
    residual: float
    window: tuple[int, int]
    npoints: int


def fit_loglog(samples: Sequence[tuple[int, float]], window: tuple[int, int]) -> ExponentFit:
    """Fit over samples with positive value inside [window_lo, window_hi];
    fewer than two usable points reads as flat (slope 0)."""
    lo, hi = window
    pts = [
        (math.log(Q), math.log(v)) for Q, v in samples if lo <= Q <= hi and v > 0
    ]
    if len(pts) < 2:
        return ExponentFit(0.0, 0.0, window, len(pts))
    n = len(pts)
    sx = sum(x for x, _ in pts)
    sy = sum(y for _, y in pts)
    sxx = sum(x * x for x, _ in pts)
    sxy = sum(x * y for x, y in pts)
    denom = n * sxx - sx * sx
    if denom == 0:
        return ExponentFit(0.0, 0.0, window, n)
    slope = (n * sxy - sx * sy) / denom
    intercept = (sy - slope * sx) / n
    residual = math.sqrt(
        sum((y - slope * x - intercept) ** 2 for x, y in pts) / n
    )
    return ExponentFit(slope, residual, window, n)


def top_half_window(schedule: Sequence[int]) -> tuple[int, int]:
    half = list(schedule)[len(schedule) // 2 :]
    return half[0], half[-1]


def _quadrupling_increments(values: Sequence[float]) -> list[float]:
    """Increments over consecutive non-overlapping quadruplings, newest last,
    assuming the underlying schedule has ratio 2."""
    out = []
    i = len(values) - 1
    while i - 2 >= 0:
        out.append(values[i] - values[i - 2])
        i -= 2
    return list(reversed(out))


def series_verdict(
    schedule: Sequence[int], sums: Sequence[float], rules: VerdictRules
) -> str:
    """Classify a nondecreasing partial-sum trace as converging/diverging."""
    incs = _quadrupling_increments(sums)
    if len(incs) < 4 or len(sums) < 3:
        return "indeterminate"
    last = incs[-3:]
    prev = incs[-4:-1]
    shrinking = all(
        new == 0 or (old / new) >= rules.shrink_factor for old, new in zip(prev, last)
    )
    if shrinking:
        return "converging"
    # not geometrically flattening: call it diverging once the total has
    # visibly outgrown the first schedule increment, tagging the slow
    # (logarithmic-looking) cases by their log-log slope
    first_inc = sums[1] - sums[0]
    if first_inc > 0 and sums[-1] >= rules.growth_total_factor * first_inc:
        fit = fit_loglog(list(zip(schedule, sums)), top_half_window(schedule))
        if fit.slope < rules.log_slope_cut:
            return "diverging (logarithmic)"
        return "diverging"
    return "indeterminate"


# ---------------------------------------------------------------------------
# reports


@dataclass
class Report:
    """Rows plus config echo; renders to CSV or JSON-lines deterministically.

    Numeric sum columns are display approximations of the certified
    bounds; the exact rationals live in the library API.
    """

    header: list[str]
    rows: list[tuple]
    echo_lines: list[str]
    summary: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for line in self.echo_lines:
            buf.write(line + "\n")
        for k, v in self.summary.items():
            buf.write(f"# {k} = {v}\n")
        buf.write(",".join(self.header) + "\n")
        for row in self.rows:
            buf.write(",".join(str(x) for x in row) + "\n")
        return buf.getvalue()

    def to_jsonl(self) -> str:
        buf = io.StringIO()
        for line in self.echo_lines:
            buf.write(line + "\n")
        for k, v in self.summary.items():
            buf.write(f"# {k} = {v}\n")
        for row in self.rows:
            buf.write(
                json.dumps(dict(zip(self.header, row)), default=str, sort_keys=False)
                + "\n"
            )
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "jsonl":
            return self.to_jsonl()
        raise ValueError(f"unknown format {fmt!r}")

    def gnuplot_columns(self, xcol: str, ycol: str, *, key: Optional[str] = None):
        """Two-column plain data blocks keyed by `key` (one dict per curve)."""
        xi, yi = self.header.index(xcol), self.header.index(ycol)
        curves: dict[str, list[str]] = {}
        ki = self.header.index(key) if key else None
        for row in self.rows:
            label = str(row[ki]) if ki is not None else "curve"
            curves.setdefault(label, []).append(f"{row[xi]} {row[yi]}")
        return {label: "\n".join(lines) + "\n" for label, lines in curves.items()}


DEFAULT_THRESHOLD_SCHEDULE = geometric_schedule(2, 16)
DEFAULT_COUNT_SCHEDULE = geometric_schedule(6, 20)


def threshold_experiment(
    cfg: ExperimentConfig, taus: Sequence[Rational]
) -> Report:
    """Partial sums of the per-q cover measures for each tau, with a
    convergence verdict per tau and a growth-exponent fit when diverging."""
    schedule = cfg.schedule(DEFAULT_THRESHOLD_SCHEDULE)
    rows = []
    verdicts = {}
    for tau in taus:
        tau = Fraction(tau)
        lo_acc = Fraction(0)
        hi_acc = Fraction(0)
        sums = []
        prev_q = 0
        for Q in schedule:
            lo, hi = tail_sum(
                tau,
                cfg.d,
                cfg.a_d,
                prev_q + 1,
                Q,
                cfg.band,
                oracle_limit=cfg.oracle_limit,
            )
            lo_acc += lo
            hi_acc += hi
            prev_q = Q
            mid = float((lo_acc + hi_acc) / 2)
            sums.append(mid)
            rows.append((str(tau), Q, f"{float(lo_acc):.12g}", f"{float(hi_acc):.12g}", ""))
        verdict = series_verdict(schedule, sums, cfg.rules)
        fit = fit_loglog(list(zip(schedule, sums)), top_half_window(schedule))
        if verdict.startswith("diverging"):
            verdicts[str(tau)] = f"{verdict} slope={fit.slope:.4f}"
        else:
            verdicts[str(tau)] = verdict
        rows[-1] = rows[-1][:4] + (verdicts[str(tau)],)
    report = Report(
        header=["tau", "Q", "sum_lo", "sum_hi", "verdict"],
        rows=rows,
        echo_lines=cfg.echo(
            experiment="threshold",
            taus=";".join(str(Fraction(t)) for t in taus),
            schedule=f"{schedule[0]}..{schedule[-1]}x2",
        ),
        summary={f"verdict tau={t}": v for t, v in verdicts.items()},
    )
    return report


def _count_samples(
    cfg: ExperimentConfig,
    alpha: AlphaValue,
    band: GcdBand,
    schedule: Sequence[int],
    flags: HitFlags = HitFlags(),
) -> CountCurve:
    qmax = iroot(schedule[-1], cfg.d)
    hits = find_hits(alpha, cfg.d, cfg.a_d, cfg.tau, band, qmax, flags)
    return CountCurve.from_hits(
        alpha, cfg.d, cfg.a_d, cfg.tau, band, flags, hits, schedule
    )


def _per_alpha_fits(
    cfg: ExperimentConfig, band: GcdBand, schedule: Sequence[int]
) -> tuple[list[CountCurve], list[ExponentFit]]:
    qmax = iroot(schedule[-1], cfg.d)
    alphas = cfg.alphas(qmax)
    window = top_half_window(schedule)

    def run(alpha: AlphaValue) -> CountCurve:
        return _count_samples(cfg, alpha, band, schedule)

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            curves = list(pool.map(run, alphas))
    else:
        curves = [run(a) for a in alphas]
    fits = [
        fit_loglog([(Q, float(n)) for Q, n in c.samples], window) for c in curves
    ]
    return curves, fits


def growth_exponent_experiment(cfg: ExperimentConfig) -> Report:
    """Per-alpha exponent fits of N(Q) for the banded counting function,
    plus the cross-alpha median."""
    schedule = cfg.schedule(DEFAULT_COUNT_SCHEDULE)
    curves, fits = _per_alpha_fits(cfg, cfg.band, schedule)
    rows = []
    for i, (curve, fit) in enumerate(zip(curves, fits)):
        for Q, n in curve.samples:
            rows.append((i, Q, n, "", "", ""))
        rows[-1] = (
            i,
            curve.samples[-1][0],
            curve.samples[-1][1],
            f"{fit.slope:.6f}",
            f"{fit.residual:.6f}",
            f"{fit.window[0]}..{fit.window[1]}",
        )
    median = statistics.median(f.slope for f in fits)
    return Report(
        header=["alpha_index", "Q", "N", "slope", "residual", "fit_window"],
        rows=rows,
        echo_lines=cfg.echo(
            experiment="growth-exponent",
            schedule=f"{schedule[0]}..{schedule[-1]}x2",
        ),
        summary={
            "median_slope": f"{median:.6f}",
            "slopes": ";".join(f"{f.slope:.4f}" for f in fits),
        },
    )


def critical_band_experiment(cfg: ExperimentConfig, delta: Rational) -> Report:
    """Growth fits in the critical band eps = 1 + d - tau; verdict
    'subpolynomial' per alpha when the top-window slope stays small."""
    eps = Fraction(1 + cfg.d) - cfg.tau
    if not 0 <= eps < 1:
        raise ValueError(f"critical band eps = {eps} outside [0, 1); need tau in (d, d+1]")
    band = GcdBand(eps, Fraction(delta))
    schedule = cfg.schedule(DEFAULT_COUNT_SCHEDULE)
    curves, fits = _per_alpha_fits(cfg, band, schedule)
    rows = []
    flat = 0
    for i, (curve, fit) in enumerate(zip(curves, fits)):
        verdict = "subpolynomial" if fit.slope <= cfg.rules.flat_slope else "growing"
        flat += verdict == "subpolynomial"
        rows.append(
            (
                i,
                curve.samples[-1][1],
                f"{fit.slope:.6f}",
                f"{fit.residual:.6f}",
                f"{fit.window[0]}..{fit.window[1]}",
                verdict,
            )
        )
    return Report(
        header=["alpha_index", "final_N", "slope", "residual", "fit_window", "verdict"],
        rows=rows,
        echo_lines=cfg.echo(
            experiment="critical-band",
            eps=str(eps),
            delta=str(Fraction(delta)),
            schedule=f"{schedule[0]}..{schedule[-1]}x2",
        ),
        summary={
            "subpolynomial_fraction": f"{flat}/{len(fits)}",
        },
    )


def svolume_experiment(
    cfg: ExperimentConfig, s_grid: Sequence[Rational], qmax: int
) -> Report:
    """s-volume partial sums V(s, Q) = sum over hits of 2 c_n q_n^(-tau s),
    with a flattening verdict per s and the critical s* per alpha.

    Boundedness of V(s, .) as the scan deepens witnesses a vanishing
    s-dimensional sum at that s; s* is the smallest grid s that flattens.
    """
    s_grid = sorted(Fraction(s) for s in s_grid)
    if any(not 0 < s <= 1 for s in s_grid):
        raise ValueError("s grid must lie in (0, 1]")
    alphas = cfg.alphas(qmax)
    schedule = list(cfg.schedule(DEFAULT_COUNT_SCHEDULE))
    rows = []
    stars = []
    for i, alpha in enumerate(alphas):
        hits = find_hits(alpha, cfg.d, cfg.a_d, cfg.tau, cfg.band, qmax)
        weights = [
            (h.q, count_solutions(h.b % h.q, h.q, cfg.d, cfg.a_d)) for h in hits
        ]
        s_star = None
        for s in s_grid:
            exponent = cfg.tau * s
            u, v = exponent.numerator, exponent.denominator
            # enclose each hit's term once, then read prefix sums along the
            # schedule (the roots dominate the cost)
            acc = IntervalSum(64)
            qs_sorted = []
            prefix = [(0, 0)]
            for qn, c in sorted(weights):
                acc.add_ratio_with_root(2 * c, qn, u, v)
                qs_sorted.append(qn)
                prefix.append((acc.lo, acc.hi))
            sums = []
            for Q in schedule:
                idx = bisect.bisect_right(qs_sorted, iroot(Q, cfg.d))
                lo, hi = prefix[idx]
                sums.append(float(Fraction(lo + hi, 1 << 65)))
            # sparse sums have no steady Cauchy trace; flattening here means
            # the top half of the schedule adds at most svolume_rel_tol of
            # the final value
            rel = (
                (sums[-1] - sums[len(sums) // 2]) / sums[-1] if sums[-1] > 0 else 0.0
            )
            flattened = rel <= cfg.rules.svolume_rel_tol
            verdict = "flattening" if flattened else "growing"
            rows.append((i, str(s), f"{sums[-1]:.10g}", verdict, f"relgrow={rel:.4f}"))
            if flattened and s_star is None:
                s_star = s
        stars.append(s_star)
        rows.append((i, "s*", "" if s_star is None else str(s_star), "", ""))
    finite = [float(s) for s in stars if s is not None]
    summary = {
        "s_star_per_alpha": ";".join(str(s) if s is not None else "none" for s in stars),
    }
    if finite:
        summary["s_star_median"] = f"{statistics.median(finite):.6f}"
        summary["s_star_spread"] = f"{min(finite):.6f}..{max(finite):.6f}"
    return Report(
        header=["alpha_index", "s", "V_final", "verdict", "note"],
        rows=rows,
        echo_lines=cfg.echo(
            experiment="svolume",
            qmax=qmax,
            s_grid=";".join(str(s) for s in s_grid),
        ),
        summary=summary,
    )


def stabilization_experiment(
    cfg: ExperimentConfig, q_lo: int, q_hi: int
) -> Report:
    """Fraction of seeded alphas with no hit at all for q in [q_lo, q_hi]
    (emptiness witness for the regime above the convergence threshold)."""
    alphas = cfg.alphas(q_hi)

    def run(alpha: AlphaValue) -> int:
        hits = find_hits(alpha, cfg.d, cfg.a_d, cfg.tau, cfg.band, q_hi)
        return sum(1 for h in hits if h.q >= q_lo)

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            counts = list(pool.map(run, alphas))
    else:
        counts = [run(a) for a in alphas]
    rows = [
        (i, q_lo, q_hi, c, "stable" if c == 0 else "new-hits")
        for i, c in enumerate(counts)
    ]
    stable = sum(1 for c in counts if c == 0)
    return Report(
        header=["alpha_index", "q_lo", "q_hi", "new_hits", "verdict"],
        rows=rows,
        echo_lines=cfg.echo(experiment="stabilization", q_lo=q_lo, q_hi=q_hi),
        summary={"stable_fraction": f"{stable}/{len(counts)}"},
    )
