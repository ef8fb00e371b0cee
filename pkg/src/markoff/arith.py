"""Exact integer and rational primitives.

Integers are plain Python ``int`` (unbounded) and rationals are
:class:`fractions.Fraction` (always reduced, positive denominator).  The
only new value type here is :class:`RationalInterval`, used to enclose
irrational quantities such as square roots with exact endpoints.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "DETERMINISTIC_MR_LIMIT",
    "RationalInterval",
    "factorize",
    "gcd",
    "integer_nth_root",
    "is_prime",
    "prime_power_decompose",
    "sqrt_enclosure",
]

# (bound, bases): Miller-Rabin with the first k prime bases is exact below
# bound (Jaeschke 1993; Sorenson & Webster 2015).
_MR_TIERS = (
    (2047, 1),
    (1373653, 2),
    (25326001, 3),
    (3215031751, 4),
    (2152302898747, 5),
    (3474749660383, 6),
    (341550071728321, 7),
    (3825123056546413051, 9),
    (318665857834031151167461, 12),
    (3317044064679887385961981, 13),
)
DETERMINISTIC_MR_LIMIT = _MR_TIERS[-1][0]
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
# Rounds used above the deterministic range; error probability <= 4**-64.
PROBABILISTIC_ROUNDS = 64

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def gcd(x: int, y: int) -> int:
    """Nonnegative gcd; ``gcd(0, 0) == 0``."""
    return math.gcd(x, y)


def _is_strong_probable_prime(n: int, base: int, odd_part: int, twos: int) -> bool:
    x = pow(base, odd_part, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(twos - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Miller-Rabin primality test.

    Deterministic for ``n < DETERMINISTIC_MR_LIMIT`` (about 3.3e24).  Above
    that, 64 rounds with random bases are used, so a composite is reported
    prime with probability at most ``4**-64``.  That is acceptable for an
    audit tool: Markoff numbers leave every deterministic range quickly.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    odd_part, twos = n - 1, 0
    while odd_part % 2 == 0:
        odd_part //= 2
        twos += 1
    if n < DETERMINISTIC_MR_LIMIT:
        count = next(k for bound, k in _MR_TIERS if n < bound)
        bases = _MR_BASES[:count]
    else:
        bases = tuple(random.randrange(2, n - 1) for _ in range(PROBABILISTIC_ROUNDS))
    return all(_is_strong_probable_prime(n, b, odd_part, twos) for b in bases)


def integer_nth_root(x: int, n: int) -> int:
    """Return ``floor(x ** (1/n))`` exactly."""
    if x < 0:
        raise ValueError("integer_nth_root requires x >= 0")
    if n < 1:
        raise ValueError("integer_nth_root requires n >= 1")
    if n == 1 or x < 2:
        return x
    if n == 2:
        return math.isqrt(x)
    if x < 1 << 52:
        # float guess is within one of the answer here; fix it exactly
        r = int(round(x ** (1.0 / n)))
        while r**n > x:
            r -= 1
        while (r + 1) ** n <= x:
            r += 1
        return r
    # Newton iteration from an overestimate; decreases monotonically to the floor.
    r = 1 << -(-x.bit_length() // n)
    while True:
        s = ((n - 1) * r + x // r ** (n - 1)) // n
        if s >= r:
            return r
        r = s


def prime_power_decompose(x: int) -> tuple[int, int] | None:
    """Return ``(p, n)`` with ``x == p**n`` and ``p`` prime, or ``None``.

    Tries exact n-th roots from ``floor(log2 x)`` down to 1, so no general
    factorization is needed.
    """
    if x < 2:
        raise ValueError("prime_power_decompose requires x >= 2")
    if x % 2 == 0:
        # only powers of two survive an even x
        return (2, x.bit_length() - 1) if x & (x - 1) == 0 else None
    top = int(x.bit_length() / math.log2(3)) + 1
    while 3**top > x:
        top -= 1
    for n in range(top, 0, -1):
        r = integer_nth_root(x, n)
        if r**n == x and is_prime(r):
            return r, n
    return None


def _pollard_brent(n: int, seed: int) -> int:
    """Return a nontrivial factor of the odd composite ``n`` (may retry)."""
    rng = random.Random(seed)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
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
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int) -> dict[int, int]:
    """Prime factorization ``{p: e}`` of ``n >= 1`` by trial division + Pollard rho."""
    if n < 1:
        raise ValueError("factorize requires n >= 1")
    factors: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        root = math.isqrt(m)
        if root * root == m:
            stack += [root, root]
            continue
        d = _pollard_brent(m, seed=m)
        stack += [d, m // d]
    return dict(sorted(factors.items()))


@dataclass(frozen=True)
class RationalInterval:
    """Closed interval ``[lo, hi]`` with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: Fraction | int) -> RationalInterval:
        return cls(Fraction(x), Fraction(x))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x: Fraction | int) -> bool:
        return self.lo <= x <= self.hi

    def __add__(self, other: RationalInterval | Fraction | int) -> RationalInterval:
        if isinstance(other, RationalInterval):
            return RationalInterval(self.lo + other.lo, self.hi + other.hi)
        return RationalInterval(self.lo + other, self.hi + other)

    __radd__ = __add__

    def __neg__(self) -> RationalInterval:
        return RationalInterval(-self.hi, -self.lo)

    def __sub__(self, other: RationalInterval | Fraction | int) -> RationalInterval:
        return self + (-other)

    def __rsub__(self, other: Fraction | int) -> RationalInterval:
        return (-self) + other

    def scale(self, factor: Fraction | int) -> RationalInterval:
        """Multiply by an exact scalar (endpoints swap for negative factors)."""
        a, b = self.lo * factor, self.hi * factor
        return RationalInterval(min(a, b), max(a, b))

    def precedes(self, other: RationalInterval) -> bool:
        """True when every point of ``self`` is strictly below every point of ``other``."""
        return self.hi < other.lo

    def to_decimal(self, digits: int) -> tuple[str, str]:
        """Outward-rounded decimal strings with ``digits`` places."""
        return _decimal_str(self.lo, digits, upward=False), _decimal_str(self.hi, digits, upward=True)


def _decimal_str(x: Fraction, digits: int, upward: bool) -> str:
    scaled = x * 10**digits
    q = math.ceil(scaled) if upward else math.floor(scaled)
    sign = "-" if q < 0 else ""
    q = abs(q)
    if digits == 0:
        return f"{sign}{q}"
    whole, frac = divmod(q, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def sqrt_enclosure(x: int, digits: int) -> RationalInterval:
    """Rational ``[lo, hi]`` with ``lo**2 <= x <= hi**2`` and ``hi - lo <= 10**-digits``.

    Exact when ``x`` is a perfect square.
    """
    if x < 0:
        raise ValueError("sqrt_enclosure requires x >= 0")
    if digits < 1:
        raise ValueError("digits must be positive")
    scale = 10**digits
    target = x * scale * scale
    s = math.isqrt(target)
    lo = Fraction(s, scale)
    hi = lo if s * s == target else Fraction(s + 1, scale)
    return RationalInterval(lo, hi)
