from __future__ import annotations

import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from markoff.arith import (
    DETERMINISTIC_MR_LIMIT,
    RationalInterval,
    factorize,
    gcd,
    integer_nth_root,
    is_prime,
    prime_power_decompose,
    sqrt_enclosure,
)


def trial_division_is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def smallest_factor_sieve(limit: int) -> list[int]:
    spf = list(range(limit + 1))
    for i in range(2, math.isqrt(limit) + 1):
        if spf[i] == i:
            for j in range(i * i, limit + 1, i):
                if spf[j] == j:
                    spf[j] = i
    return spf


@pytest.mark.parametrize("x, y, expected", [(12, 18, 6), (5, -5, 5), (0, 7, 7), (0, 0, 0)])
def test_gcd_examples(x: int, y: int, expected: int) -> None:
    assert gcd(x, y) == expected


@given(st.integers(-(10**30), 10**30), st.integers(-(10**30), 10**30))
def test_gcd_divides_both(x: int, y: int) -> None:
    g = gcd(x, y)
    assert g >= 0
    if g:
        assert x % g == 0 and y % g == 0
    if x > 0 and y > 0:
        assert g * math.lcm(x, y) == x * y


@pytest.mark.parametrize("n, expected", [(433, True), (169, False), (1, False), (0, False), (2, True)])
def test_is_prime_examples(n: int, expected: bool) -> None:
    assert is_prime(n) is expected


def test_is_prime_matches_trial_division_below_20000() -> None:
    assert [n for n in range(20000) if is_prime(n)] == [n for n in range(20000) if trial_division_is_prime(n)]


@pytest.mark.parametrize(
    "n, expected",
    [
        (3215031751, False),  # strong pseudoprime to bases 2, 3, 5, 7
        (3825123056546413051, False),  # strong pseudoprime to bases 2..23
        (318665857834031151167461, False),
        (2**61 - 1, True),
        (2**89 - 1, True),  # above the deterministic range
        (2**127 - 1, True),
        ((2**61 - 1) * (2**89 - 1), False),
        (561, False),
    ],
)
def test_is_prime_hard_cases(n: int, expected: bool) -> None:
    assert is_prime(n) is expected


def test_deterministic_threshold_documented() -> None:
    assert 3.3e24 < DETERMINISTIC_MR_LIMIT < 3.4e24


@pytest.mark.parametrize("x, n, expected", [(221, 2, 14), (169, 2, 13), (7, 1, 7), (0, 5, 0), (1, 9, 1), (10**30, 3, 10**10)])
def test_integer_nth_root_examples(x: int, n: int, expected: int) -> None:
    assert integer_nth_root(x, n) == expected


@given(st.integers(0, 10**200), st.integers(1, 40))
def test_integer_nth_root_brackets(x: int, n: int) -> None:
    r = integer_nth_root(x, n)
    assert r**n <= x < (r + 1) ** n


@pytest.mark.parametrize("x, expected", [(169, (13, 2)), (433, (433, 1)), (34, None), (2, (2, 1)), (1024, (2, 10)), (4, (2, 2))])
def test_prime_power_decompose_examples(x: int, expected: tuple[int, int] | None) -> None:
    assert prime_power_decompose(x) == expected


def test_prime_power_decompose_matches_sieve_up_to_a_million() -> None:
    limit = 10**6
    spf = smallest_factor_sieve(limit)
    for x in range(2, limit + 1):
        p, y, n = spf[x], x, 0
        while y % p == 0:
            y //= p
            n += 1
        expected = (p, n) if y == 1 else None
        assert prime_power_decompose(x) == expected, x


def test_prime_power_decompose_large() -> None:
    p = 2**89 - 1
    assert prime_power_decompose(p**3) == (p, 3)
    assert prime_power_decompose(5 * p**3) is None


def test_factorize_against_sympy() -> None:
    samples = [1, 2, 97, 2 * 3 * 5 * 7, 2**10 * 3**5, 610, 985, 10**12 + 39, 1000003 * 1000033, 6466 * 75025 * 13]
    samples += [(2**31 - 1) * (2**61 - 1), 433**4, 999999999989 * 2]
    for n in samples:
        assert factorize(n) == sympy.factorint(n), n


@pytest.mark.parametrize("x, digits", [(4, 10), (5, 5), (0, 3), (221, 7), (9 * 985**2 - 4, 60)])
def test_sqrt_enclosure_brackets(x: int, digits: int) -> None:
    iv = sqrt_enclosure(x, digits)
    assert iv.lo**2 <= x <= iv.hi**2
    assert iv.width <= Fraction(1, 10**digits)


def test_sqrt_enclosure_examples() -> None:
    assert sqrt_enclosure(4, 10) == RationalInterval(Fraction(2), Fraction(2))
    # isqrt(5 * 10**10) = 223606
    assert sqrt_enclosure(5, 5) == RationalInterval(Fraction(223606, 10**5), Fraction(223607, 10**5))
    assert sqrt_enclosure(0, 3) == RationalInterval(Fraction(0), Fraction(0))


@given(st.integers(0, 10**40), st.integers(1, 80))
def test_sqrt_enclosure_property(x: int, digits: int) -> None:
    iv = sqrt_enclosure(x, digits)
    assert iv.lo**2 <= x <= iv.hi**2
    assert iv.hi - iv.lo <= Fraction(1, 10**digits)


def test_interval_arithmetic() -> None:
    a = RationalInterval(Fraction(1, 3), Fraction(1, 2))
    b = RationalInterval(Fraction(1), Fraction(2))
    assert a + b == RationalInterval(Fraction(4, 3), Fraction(5, 2))
    assert 3 - a == RationalInterval(Fraction(5, 2), Fraction(8, 3))
    assert a.scale(-2) == RationalInterval(Fraction(-1), Fraction(-2, 3))
    assert a.precedes(b) and not b.precedes(a)
    assert Fraction(2, 5) in a
    assert a.to_decimal(3) == ("0.333", "0.500")
    assert (-a).to_decimal(2) == ("-0.50", "-0.33")
    with pytest.raises(ValueError):
        RationalInterval(Fraction(1), Fraction(0))
