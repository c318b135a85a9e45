"""Cover measures for the limsup interval families, gcd-banded center
counts, certified tail sums, and the omega-weighted restricted series.

Sums over large q-ranges accumulate in fixed point: each term contributes
exact integer lower/upper bounds at scale 2^-S, so the reported interval
certifiably contains the true sum while denominators stay bounded (exact
rational accumulation would blow up on ranges like q <= 2^16).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import _kernels
from .arithmetic import (
    Rational,
    cmp_frac_qpow,
    divisors,
    factorize,
    iroot,
    root_enclosure,
)
from .residues import power_residue_count, scaled_power_residue_count

DEFAULT_ORACLE_LIMIT = 10**4
SUM_BITS = 96


@dataclass(frozen=True)
class GcdBand:
    """The constraint q^eps <= gcd(b, q) < q^(eps+delta), or FULL (none).

    Band membership is decided exactly via the integer power rule; the
    exponents are rationals in [0, 1] with eps + delta <= 1.
    """

    eps: Optional[Fraction]
    delta: Optional[Fraction]

    def __post_init__(self):
        if (self.eps is None) != (self.delta is None):
            raise ValueError("eps and delta must both be set, or both None")
        if self.eps is not None:
            object.__setattr__(self, "eps", Fraction(self.eps))
            object.__setattr__(self, "delta", Fraction(self.delta))
            if not (0 <= self.eps and self.delta > 0 and self.eps + self.delta <= 1):
                raise ValueError(
                    f"need 0 <= eps < eps + delta <= 1, got eps={self.eps}, delta={self.delta}"
                )

    @classmethod
    def full(cls) -> "GcdBand":
        return cls(None, None)

    @classmethod
    def parse(cls, text: str) -> "GcdBand":
        """CLI format: 'full' or 'EPS,DELTA' with rational entries like 1/4."""
        text = text.strip().lower()
        if text == "full":
            return cls.full()
        try:
            eps_s, delta_s = text.split(",")
            return cls(Fraction(eps_s), Fraction(delta_s))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad band {text!r}: {exc}") from None

    def format(self) -> str:
        if self.is_full:
            return "full"
        return f"{self.eps},{self.delta}"

    @property
    def is_full(self) -> bool:
        return self.eps is None

    def contains(self, g: int, q: int) -> bool:
        """Is gcd value g admissible for modulus q?"""
        if self.is_full:
            return True
        return (
            cmp_frac_qpow(Fraction(g), q, self.eps) >= 0
            and cmp_frac_qpow(Fraction(g), q, self.eps + self.delta) < 0
        )

    def divisors_in(self, q: int) -> list[int]:
        """Divisors a of q with q^eps <= a < q^(eps+delta); all of them if FULL."""
        ds = divisors(factorize(q))
        if self.is_full:
            return ds
        return [a for a in ds if self.contains(a, q)]


@dataclass(frozen=True)
class CoverRecord:
    """Per-q cover data: center count and a certified measure enclosure.

    measure_lo == measure_hi whenever tau is an integer.  count_source
    records whether the center count came from enumeration ('oracle') or
    from the closed-form/divisor-sum path ('formula').
    """

    q: int
    center_count: int
    measure_lo: Fraction
    measure_hi: Fraction
    count_source: str

    def __post_init__(self):
        if self.measure_lo > self.measure_hi:
            raise ValueError("measure_lo must not exceed measure_hi")


def _measure_enclosure(count: int, q: int, tau: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    lo_p, hi_p = root_enclosure(q, Fraction(tau), bits)
    return Fraction(2 * count) / hi_p, Fraction(2 * count) / lo_p


def cover_measure(
    q: int, tau: Rational, d: int, a_d: int, *, bits: int = SUM_BITS
) -> CoverRecord:
    """Formula measure 2 * r_d(q~) * q^(d-1) / q^tau of the q-th cover layer.

    Requires tau > d (below that the layers stop being unions of short
    intervals).  For small q the intervals may overlap or spill out of
    [0,1]; ``exact_union_measure`` exists to certify where the formula
    value is the true Lebesgue measure.
    """
    tau = Fraction(tau)
    if tau <= d:
        raise ValueError(f"cover measure needs tau > d, got tau={tau}, d={d}")
    count = scaled_power_residue_count(q, d, a_d) * q ** (d - 1)
    lo, hi = _measure_enclosure(count, q, tau, bits)
    return CoverRecord(q, count, lo, hi, "formula")


def exact_union_measure(
    q: int, tau: int, d: int, a_d: int, *, limit: int = DEFAULT_ORACLE_LIMIT
) -> tuple[Fraction, bool]:
    """True Lebesgue measure of the union of intervals of radius q^-tau
    around the admissible centers b/q^d, plus an overlap flag.

    Integer tau only (the merge runs over a common denominator q^tau).
    Unlike the formula path this validator accepts tau <= d, where
    overlapping intervals actually occur; for integer tau > d adjacent
    centers are at least q^-d apart and never overlap.
    """
    if not isinstance(tau, int) or tau < 1:
        raise ValueError("exact_union_measure requires integer tau >= 1")
    from .residues import power_residues

    residues = power_residues(q, d, a_d, limit=limit).elements
    scale = q ** (tau - d)  # center spacing unit in the q^-tau grid
    radius = 1  # one unit of q^-tau... scaled below
    # positions of centers in units of q^-tau: (b + j q) * q^(tau - d)
    starts = []
    for j in range(q ** (d - 1)):
        base = j * q
        for b in residues:
            starts.append((base + b) * scale)
    starts.sort()
    total = 0
    overlap = False
    cur_lo = cur_hi = None
    for c in starts:
        lo, hi = c - radius, c + radius
        if cur_hi is None:
            cur_lo, cur_hi = lo, hi
        elif lo <= cur_hi:
            # touching open intervals only share an endpoint: same measure,
            # no overlap; anything closer genuinely overlaps
            if lo < cur_hi:
                overlap = True
            cur_hi = max(cur_hi, hi)
        else:
            total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
    if cur_hi is not None:
        total += cur_hi - cur_lo
    return Fraction(total, q**tau), overlap


@dataclass(frozen=True)
class BandedCenterCount:
    """Enumerated vs divisor-sum center counts for one modulus.

    The two disagree in general (q=12, d=2, a_d=1, band {2,3}: oracle 1,
    formula 6); the oracle is ground truth, the formula is the upper
    bound the series estimates use.  oracle is None above the
    enumeration threshold.
    """

    q: int
    oracle: Optional[int]
    formula: int


def banded_center_count(
    q: int,
    band: GcdBand,
    d: int,
    a_d: int,
    *,
    oracle_limit: int = DEFAULT_ORACLE_LIMIT,
) -> BandedCenterCount:
    """Count residues b in a_d G_d(q) with gcd(b, q) in the band, two ways."""
    if band.is_full:
        formula = scaled_power_residue_count(q, d, a_d)
    else:
        formula = sum(power_residue_count(q // a, d) for a in band.divisors_in(q))
    oracle = None
    if q <= oracle_limit:
        arr = _kernels.residue_set(q, d, a_d)
        oracle = sum(
            1 for b in map(int, arr) if band.contains(math.gcd(b, q) if b else q, q)
        )
    return BandedCenterCount(q, oracle, formula)


def banded_cover_record(
    q: int,
    tau: Rational,
    d: int,
    a_d: int,
    band: GcdBand,
    *,
    oracle_limit: int = DEFAULT_ORACLE_LIMIT,
    bits: int = SUM_BITS,
) -> CoverRecord:
    """Cover record for the gcd-banded layer; oracle counts below the
    threshold, divisor-sum formula above (source recorded)."""
    tau = Fraction(tau)
    if tau <= d:
        raise ValueError(f"needs tau > d, got tau={tau}, d={d}")
    if band.is_full:
        counts = banded_center_count(q, band, d, a_d, oracle_limit=0)
        per_residue, source = counts.formula, "formula"
    else:
        counts = banded_center_count(q, band, d, a_d, oracle_limit=oracle_limit)
        if counts.oracle is not None:
            per_residue, source = counts.oracle, "oracle"
        else:
            per_residue, source = counts.formula, "formula"
    count = per_residue * q ** (d - 1)
    lo, hi = _measure_enclosure(count, q, tau, bits)
    return CoverRecord(q, count, lo, hi, source)


# ---------------------------------------------------------------------------
# certified fixed-point accumulation


class IntervalSum:
    """Accumulates certified [lo, hi] enclosures at fixed scale 2^-bits."""

    def __init__(self, bits: int = SUM_BITS):
        self.bits = bits
        self.lo = 0
        self.hi = 0

    def add_fraction(self, x: Fraction) -> None:
        scaled = x * (1 << self.bits)
        self.lo += math.floor(scaled)
        self.hi += math.ceil(scaled)

    def add_ratio_with_root(self, numerator: int, q: int, u: int, v: int) -> None:
        """Add numerator / q^(u/v) (u, v > 0) with outward rounding."""
        if v == 1:
            num = numerator << self.bits
            self.lo += num // q**u
            self.hi += -((-num) // q**u)
            return
        r = iroot(q**u << (v * self.bits), v)  # floor(2^bits * q^(u/v))
        num = numerator << (2 * self.bits)
        self.lo += num // (r + 1)
        self.hi += -((-num) // r)

    def merge(self, other: "IntervalSum") -> None:
        if other.bits != self.bits:
            raise ValueError("cannot merge interval sums at different scales")
        self.lo += other.lo
        self.hi += other.hi

    def interval(self) -> tuple[Fraction, Fraction]:
        return Fraction(self.lo, 1 << self.bits), Fraction(self.hi, 1 << self.bits)


def tail_sum(
    tau: Rational,
    d: int,
    a_d: int,
    N: int,
    Q: int,
    band: GcdBand,
    *,
    oracle_limit: int = DEFAULT_ORACLE_LIMIT,
    bits: int = SUM_BITS,
) -> tuple[Fraction, Fraction]:
    """Certified interval containing sum_{q=N..Q} of the per-q layer measure
    2 * count(q) * q^(d-1) / q^tau under the band's count source policy.

    Empty range (N > Q) sums to zero.  Monotone nondecreasing in Q.
    """
    tau = Fraction(tau)
    if tau <= d:
        raise ValueError(f"needs tau > d, got tau={tau}, d={d}")
    u, v = tau.numerator, tau.denominator
    acc = IntervalSum(bits)
    for q in range(N, Q + 1):
        if band.is_full:
            per_residue = scaled_power_residue_count(q, d, a_d)
        else:
            rec = banded_center_count(q, band, d, a_d, oracle_limit=oracle_limit)
            per_residue = rec.oracle if rec.oracle is not None else rec.formula
        if per_residue == 0:
            continue
        acc.add_ratio_with_root(2 * per_residue * q ** (d - 1), q, u, v)
    return acc.interval()


def restricted_series_partial(
    z: Rational,
    s: Rational,
    n: int,
    Q: int,
    *,
    bits: int = 64,
) -> tuple[Fraction, Fraction]:
    """Certified interval for sum_{q<=Q, gcd(q,n)=1} z^omega(q) / q^s."""
    z = Fraction(z)
    s = Fraction(s)
    if z <= 0 or s <= 0:
        raise ValueError("z and s must be positive")
    if Q < 1:
        raise ValueError("Q must be >= 1")
    u, v = s.numerator, s.denominator
    omega = _kernels.omega_table(Q)
    coprime = bytearray([1]) * (Q + 1)
    for p, _ in factorize(n).factors:
        coprime[p::p] = bytearray(len(range(p, Q + 1, p)))
    wmax = int(omega.max()) if Q >= 2 else 0
    znum = [z.numerator**w for w in range(wmax + 1)]
    zden = [z.denominator**w for w in range(wmax + 1)]

    acc = IntervalSum(bits)
    acc.lo += 1 << bits  # q = 1 term is exactly 1
    acc.hi += 1 << bits
    if v == 1:
        shift = bits
        for q in range(2, Q + 1):
            if not coprime[q]:
                continue
            w = omega[q]
            den = zden[w] * q**u
            num = znum[w] << shift
            acc.lo += num // den
            acc.hi += -((-num) // den)
    else:
        shift = 2 * bits
        for q in range(2, Q + 1):
            if not coprime[q]:
                continue
            w = omega[q]
            r = iroot(q**u << (v * bits), v)
            num = znum[w] << shift
            acc.lo += num // (zden[w] * (r + 1))
            acc.hi += -((-num) // (zden[w] * r))
    return acc.interval()


def euler_product_partial(z: Rational, s: int, n: int, prime_limit: int) -> Fraction:
    """Truncated Euler product prod_{pi coprime to n, pi <= limit}
    (1 + z / (pi^s - 1)); integer s only.  Cross-check for the series at s=2."""
    from .arithmetic import get_sieve

    z = Fraction(z)
    sieve = get_sieve(prime_limit)
    out = Fraction(1)
    for p in map(int, sieve.primes):
        if p > prime_limit:
            break
        if n % p == 0:
            continue
        out *= 1 + z / (p**s - 1)
    return out
