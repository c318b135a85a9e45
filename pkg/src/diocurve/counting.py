"""Hit scanning for constrained approximations of alpha and the associated
counting functions.

Every hit predicate is decided in exact integer arithmetic: alpha is an
exact rational (dyadic when randomly drawn, with enough bits that no
scanned q can produce a boundary tie), and comparisons against q^(u/v)
use the integer power rule.  The scan tests only the one or two integers
b nearest q^d alpha whenever the approximation radius is below 1/2, and
falls back to a full neighbourhood walk otherwise (q = 1, or tau <= d).
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .arithmetic import Rational, factorize, iroot
from .covers import GcdBand
from .curve import ConstrainedHit
from .residues import (
    is_power_residue,
    is_primitive_power_residue,
    solution_witness,
)


@dataclass(frozen=True)
class AlphaValue:
    """An exact rational target with a declared provenance."""

    value: Fraction
    provenance: str

    @classmethod
    def user(cls, value: Union[str, Rational]) -> "AlphaValue":
        return cls(Fraction(value), "user-supplied")

    @classmethod
    def dyadic_random(cls, seed: int, bits: int, index: int = 0) -> "AlphaValue":
        """Odd numerator over 2^bits; deterministic in (seed, index)."""
        rng = random.Random(seed)
        num = 0
        for _ in range(index + 1):
            num = rng.getrandbits(bits) | 1
        return cls(
            Fraction(num, 1 << bits),
            f"dyadic-random(seed={seed}, bits={bits}, index={index})",
        )

    @classmethod
    def named_constant(cls, name: str, bits: int) -> "AlphaValue":
        """Dyadic truncation of a named irrational in (0, 1)."""
        radicands = {"sqrt2": 2, "sqrt3": 3, "sqrt5": 5, "golden": 5}
        if name not in radicands:
            raise ValueError(f"unknown constant {name!r}; know {sorted(radicands)}")
        r = math.isqrt(radicands[name] << (2 * bits))  # floor(2^bits sqrt(m))
        if name == "golden":
            num = (r - (1 << bits)) >> 1  # (sqrt5 - 1) / 2
            return cls(Fraction(num, 1 << bits), f"truncation-of-golden({bits})")
        num = r - (r >> bits << bits)  # fractional part
        return cls(Fraction(num, 1 << bits), f"truncation-of-{name}({bits})")


def required_alpha_bits(d: int, tau: Fraction, qmax: int, floor_bits: int = 128) -> int:
    """Enough dyadic bits that every scan predicate up to qmax is tie-free."""
    est = math.ceil(float(d + tau) * math.log2(max(qmax, 2))) + 16
    return max(floor_bits, est)


@dataclass(frozen=True)
class HitFlags:
    """Optional hit filters: unit-class numerators, gcd(q, d*a_d) = 1,
    and a cap on the number of distinct prime factors of q."""

    primitive_only: bool = False
    coprime_to_d_ad: bool = False
    omega_max: Optional[int] = None

    def describe(self) -> str:
        parts = []
        if self.primitive_only:
            parts.append("primitive")
        if self.coprime_to_d_ad:
            parts.append("coprime")
        if self.omega_max is not None:
            parts.append(f"omega<={self.omega_max}")
        return "|".join(parts) if parts else "none"


def _hits_for_range(
    alpha: Fraction,
    d: int,
    a_d: int,
    tau: Fraction,
    band: GcdBand,
    qlo: int,
    qhi: int,
    flags: HitFlags,
    p_witness_limit: int,
) -> list[ConstrainedHit]:
    an, ad = alpha.numerator, alpha.denominator
    u, v = tau.numerator, tau.denominator
    residue_test = is_primitive_power_residue if flags.primitive_only else is_power_residue
    hits: list[ConstrainedHit] = []
    for q in range(qlo, qhi + 1):
        if flags.coprime_to_d_ad and math.gcd(q, d * abs(a_d)) != 1:
            continue
        if flags.omega_max is not None and len(factorize(q).factors) > flags.omega_max:
            continue
        t = q**d
        num = t * an
        b0, rem = divmod(num, ad)
        rhs = (ad * t) ** v * q ** max(0, -u)
        qu = q ** max(0, u)

        def admissible(dist_num: int) -> bool:
            # |alpha - b/t| < q^(-u/v)  <=>  dist^v q^u < (ad t)^v
            return dist_num**v * qu < rhs

        # radius >= 1/2 forces a widening walk; detected exactly:
        # q^(d - tau) >= 1/2  <=>  2^v q^(dv - u) >= 1
        wide = q == 1 or (
            2**v * q ** (d * v - u) >= 1 if d * v >= u else 2**v >= q ** (u - d * v)
        )
        candidates: list[tuple[int, int]] = []
        if wide:
            b = b0
            dist = rem
            while admissible(dist):
                candidates.append((b, dist))
                b -= 1
                dist += ad
            b = b0 + 1
            dist = ad - rem
            while admissible(dist):
                candidates.append((b, dist))
                b += 1
                dist += ad
        else:
            if admissible(rem):
                candidates.append((b0, rem))
            if admissible(ad - rem):
                candidates.append((b0 + 1, ad - rem))
        for b, dist in sorted(candidates):
            g = math.gcd(b, q)  # gcd(0, q) = q by convention
            if not band.contains(g, q):
                continue
            if not residue_test(b % q, q, d, a_d):
                continue
            p = None
            if q <= p_witness_limit:
                p = solution_witness(b % q, q, d, a_d, limit=p_witness_limit)
                if flags.primitive_only and p is not None and math.gcd(p, q) != 1:
                    p = next(
                        (
                            x
                            for x in range(q)
                            if math.gcd(x, q) == 1
                            and a_d * pow(x, d, q) % q == b % q
                        ),
                        None,
                    )
            hits.append(ConstrainedHit(q, b, p, Fraction(dist, ad * t), g))
    return hits


def find_hits(
    alpha: AlphaValue,
    d: int,
    a_d: int,
    tau: Rational,
    band: GcdBand,
    qmax: int,
    flags: HitFlags = HitFlags(),
    *,
    threads: int = 1,
    p_witness_limit: int = 2000,
) -> list[ConstrainedHit]:
    """All (q, b) with q <= qmax, |alpha - b/q^d| < q^-tau, b in the scaled
    residue class set, gcd(b, q) in the band, and all flags satisfied.

    Deterministic for fixed inputs regardless of thread count: the q-range
    splits into disjoint chunks whose results are concatenated in order.
    """
    value = alpha.value
    if not 0 <= value <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {value}")
    if qmax < 1:
        raise ValueError("qmax must be >= 1")
    if a_d == 0:
        raise ValueError("a_d must be nonzero")
    tau = Fraction(tau)
    if threads <= 1 or qmax < 64:
        return _hits_for_range(
            value, d, a_d, tau, band, 1, qmax, flags, p_witness_limit
        )
    chunk = max(32, qmax // (threads * 4))
    ranges = [(lo, min(lo + chunk - 1, qmax)) for lo in range(1, qmax + 1, chunk)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = pool.map(
            lambda r: _hits_for_range(
                value, d, a_d, tau, band, r[0], r[1], flags, p_witness_limit
            ),
            ranges,
        )
        out: list[ConstrainedHit] = []
        for part in parts:
            out.extend(part)
    return out


def counting_function(
    alpha: AlphaValue,
    d: int,
    a_d: int,
    tau: Rational,
    band: GcdBand,
    Q: int,
    flags: HitFlags = HitFlags(),
    *,
    count_denominators: bool = False,
    threads: int = 1,
) -> int:
    """N(Q): number of moduli q with q^d <= Q (default reading) admitting at
    least one hit.  ``count_denominators=True`` switches to counting q <= Q
    directly; both normalisations appear in practice and differ only by
    the Q scale.
    """
    if Q < 1:
        raise ValueError("Q must be >= 1")
    qmax = Q if count_denominators else iroot(Q, d)
    if qmax < 1:
        return 0
    hits = find_hits(alpha, d, a_d, tau, band, qmax, flags, threads=threads)
    return len({h.q for h in hits})


@dataclass(frozen=True)
class CountCurve:
    """Samples (Q, N(Q)) of a counting function along a Q schedule."""

    alpha: AlphaValue
    d: int
    a_d: int
    tau: Fraction
    band: GcdBand
    flags: HitFlags
    samples: tuple[tuple[int, int], ...]
    count_denominators: bool = False

    @classmethod
    def from_hits(
        cls,
        alpha: AlphaValue,
        d: int,
        a_d: int,
        tau: Fraction,
        band: GcdBand,
        flags: HitFlags,
        hits: Sequence[ConstrainedHit],
        schedule: Sequence[int],
        count_denominators: bool = False,
    ) -> "CountCurve":
        qs = sorted({h.q for h in hits})
        samples = []
        for Q in schedule:
            qcap = Q if count_denominators else iroot(Q, d)
            n = sum(1 for q in qs if q <= qcap)
            samples.append((Q, n))
        return cls(
            alpha, d, a_d, tau, band, flags, tuple(samples), count_denominators
        )


def phi_psi_sums(
    measure_at: Callable[[int], Union[Fraction, tuple[Fraction, Fraction]]],
    Q: int,
) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
    """Partial sums Phi(Q) = sum lambda(I_q) and Psi(Q) = sum lambda(I_q) tau(q)
    for a per-q measure source returning exact values or enclosures.

    Returns certified interval pairs ((phi_lo, phi_hi), (psi_lo, psi_hi));
    both are exact when the source is exact.
    """
    from .arithmetic import divisor_count

    phi_lo = phi_hi = Fraction(0)
    psi_lo = psi_hi = Fraction(0)
    for q in range(1, Q + 1):
        m = measure_at(q)
        lo, hi = m if isinstance(m, tuple) else (Fraction(m), Fraction(m))
        tq = divisor_count(factorize(q))
        phi_lo += lo
        phi_hi += hi
        psi_lo += lo * tq
        psi_hi += hi * tq
    return (phi_lo, phi_hi), (psi_lo, psi_hi)
