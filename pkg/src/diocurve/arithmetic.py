"""Exact integer arithmetic: factorization and multiplicative functions.

A smallest-prime-factor sieve answers factorization queries in O(log n);
beyond the sieve a deterministic Miller-Rabin test plus Brent's rho take
over (good far past the 2^63 moduli ceiling this package supports).

Quantities of the form q^(u/v) are never materialised as floats.  Order
comparisons against them are decided by raising both sides to the v-th
power in exact integers, and certified rational enclosures come from
integer v-th roots at a configurable precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from . import _kernels

DEFAULT_SIEVE_LIMIT = 1 << 24
_MIN_SIEVE_LIMIT = 1 << 16

# deterministic Miller-Rabin witness set, valid for n < 3.3 * 10^24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

Rational = Union[int, Fraction]


class PreconditionError(ValueError):
    """An operation's stated precondition does not hold for these inputs."""


@dataclass(frozen=True)
class Factorization:
    """Prime-power decomposition of a positive integer.

    factors is ordered by prime; Factorization(1) has an empty list.
    """

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"malformed factor list for {self.value}")
            prod *= p**e
            last = p
        if prod != self.value or self.value < 1:
            raise ValueError(f"factor list does not recompose {self.value}")

    def recompose(self) -> int:
        return math.prod(p**e for p, e in self.factors)

    def valuation(self, p: int) -> int:
        for prime, e in self.factors:
            if prime == p:
                return e
        return 0


class SpfSieve:
    """Smallest-prime-factor table, immutable once built."""

    def __init__(self, limit: int):
        self.limit = int(limit)
        self.spf = _kernels.spf_sieve(self.limit)
        self._primes = None

    @property
    def primes(self):
        if self._primes is None:
            import numpy as np

            idx = np.arange(self.limit + 1, dtype=self.spf.dtype)
            self._primes = np.nonzero(self.spf == idx)[0][2:]
        return self._primes

    def factor_pairs(self, n: int) -> list[tuple[int, int]]:
        spf = self.spf
        out = []
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out


_sieve: SpfSieve | None = None


def get_sieve(need: int = _MIN_SIEVE_LIMIT) -> SpfSieve:
    """Return the shared sieve, growing it (power-of-two sized) on demand."""
    global _sieve
    if _sieve is None or _sieve.limit < need:
        limit = _MIN_SIEVE_LIMIT
        while limit < need:
            limit <<= 1
        _sieve = SpfSieve(limit)
    return _sieve


def is_probable_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24 (ample for this package)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent_rho(n: int) -> int:
    """A nontrivial factor of composite odd n; deterministic parameter walk."""
    for c in range(1, 64):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = 2
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r <<= 1
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"rho failed to split {n}")  # pragma: no cover


def factorize(n: int) -> Factorization:
    """Factorization of n >= 1; rejects n <= 0. Deterministic."""
    if n < 1:
        raise ValueError(f"factorize requires n >= 1, got {n}")
    if n == 1:
        return Factorization(1, ())
    if n <= DEFAULT_SIEVE_LIMIT:
        return Factorization(n, tuple(get_sieve(n).factor_pairs(n)))
    # beyond the sieve: strip sieve primes, then MR + rho on the remainder
    sieve = get_sieve(min(DEFAULT_SIEVE_LIMIT, _MIN_SIEVE_LIMIT << 4))
    pairs: dict[int, int] = {}
    rem = n
    for p in map(int, sieve.primes):
        if p * p > rem:
            break
        while rem % p == 0:
            pairs[p] = pairs.get(p, 0) + 1
            rem //= p
    stack = [rem] if rem > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            pairs[m] = pairs.get(m, 0) + 1
            continue
        g = _brent_rho(m)
        stack.append(g)
        stack.append(m // g)
    return Factorization(n, tuple(sorted(pairs.items())))


def _as_factorization(f: Union[int, Factorization]) -> Factorization:
    return f if isinstance(f, Factorization) else factorize(f)


def euler_phi(f: Union[int, Factorization]) -> int:
    f = _as_factorization(f)
    out = 1
    for p, e in f.factors:
        out *= p ** (e - 1) * (p - 1)
    return out


def divisor_count(f: Union[int, Factorization]) -> int:
    f = _as_factorization(f)
    return math.prod(e + 1 for _, e in f.factors)


def distinct_prime_count(f: Union[int, Factorization]) -> int:
    return len(_as_factorization(f).factors)


def divisors(f: Union[int, Factorization]) -> list[int]:
    f = _as_factorization(f)
    out = [1]
    for p, e in f.factors:
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


def divisors_in_range(
    f: Union[int, Factorization], lo: Rational, hi: Rational
) -> list[int]:
    """Sorted divisors a of n with lo <= a < hi, compared exactly."""
    lo = Fraction(lo)
    hi = Fraction(hi)
    if lo > hi:
        raise ValueError("divisors_in_range requires lo <= hi")
    return [a for a in divisors(f) if lo <= a < hi]


# ---------------------------------------------------------------------------
# exact handling of rational-exponent powers


def iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) in exact integers, n >= 0, k >= 1."""
    if n < 0 or k < 1:
        raise ValueError("iroot requires n >= 0 and k >= 1")
    if k == 1 or n == 0:
        return n
    if k == 2:
        return math.isqrt(n)
    bl = n.bit_length()
    if bl <= 52:
        x = int(n ** (1.0 / k)) + 1
    else:
        shift = bl - 52
        shift += (-shift) % k
        x = (int(((n >> shift) + 1) ** (1.0 / k)) + 1) << (shift // k)
    # Newton from above, then exact adjustment (float seed is only a hint)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def cmp_frac_qpow(x: Rational, q: int, exponent: Fraction) -> int:
    """Sign of x - q**exponent for x >= 0, q >= 1, rational exponent.

    Decided exactly: x ? q^(u/v) becomes x^v ? q^u in integers.
    """
    x = Fraction(x)
    if x < 0:
        raise ValueError("cmp_frac_qpow requires x >= 0")
    if q < 1:
        raise ValueError("cmp_frac_qpow requires q >= 1")
    exponent = Fraction(exponent)
    u, v = exponent.numerator, exponent.denominator
    if u >= 0:
        lhs = x.numerator**v
        rhs = x.denominator**v * q**u
    else:
        lhs = x.numerator**v * q**-u
        rhs = x.denominator**v
    return (lhs > rhs) - (lhs < rhs)


def frac_lt_qpow(x: Rational, q: int, exponent: Fraction) -> bool:
    """x < q**exponent, exactly."""
    return cmp_frac_qpow(x, q, exponent) < 0


def root_enclosure(q: int, exponent: Fraction, bits: int = 64) -> tuple[Fraction, Fraction]:
    """Rational (lo, hi) with lo <= q**exponent <= hi, width <= hi * 2^(1-bits).

    Exact (lo == hi) when the exponent is an integer.
    """
    if q < 1:
        raise ValueError("root_enclosure requires q >= 1")
    exponent = Fraction(exponent)
    u, v = exponent.numerator, exponent.denominator
    if v == 1:
        exact = Fraction(q**u) if u >= 0 else Fraction(1, q**-u)
        return exact, exact
    au = abs(u)
    r = iroot(q**au << (v * bits), v)
    lo, hi = Fraction(r, 1 << bits), Fraction(r + 1, 1 << bits)
    if u < 0:
        lo, hi = 1 / hi, 1 / lo
    return lo, hi
