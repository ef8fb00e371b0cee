"""Generator matrices A, B and the Farey-indexed words in them.

``W(0/1) = A``, ``W(1/1) = B`` and, for Farey neighbours ``l < r``,
``W(mediant(l, r)) = W(l) @ W(r)``.  Every such word has trace three times
its lower-left entry, and that entry runs through the Markoff numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from markoff.triples import MarkoffTriple


@dataclass(frozen=True)
class Mat2:
    """Row-major 2x2 integer matrix ``[[a, b], [c, d]]``."""

    a: int
    b: int
    c: int
    d: int

    def __matmul__(self, other: Mat2) -> Mat2:
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> Mat2:
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    def adjugate(self) -> Mat2:
        """Inverse when ``det == 1``."""
        return Mat2(self.d, -self.b, -self.c, self.a)

    def rows(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]

    def to_json(self) -> list[list[str]]:
        return [[str(self.a), str(self.b)], [str(self.c), str(self.d)]]

    @classmethod
    def from_json(cls, rows: list[list[str]]) -> Mat2:
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))


IDENTITY = Mat2(1, 0, 0, 1)
A = Mat2(2, 1, 1, 1)
B = Mat2(1, 1, 1, 2)


def generators() -> tuple[Mat2, Mat2]:
    return A, B


def commutator() -> Mat2:
    """``A B^-1 A^-1 B``."""
    return A @ B.adjugate() @ A.adjugate() @ B


def commutator_check() -> bool:
    """The commutator equals ``-T^6`` exactly."""
    return commutator() == Mat2(-1, -6, 0, -1)


def parse_fraction(text: str) -> Fraction:
    """Parse ``"p/q"`` and require it reduced and in [0, 1]."""
    num, sep, den = text.partition("/")
    p, q = int(num), int(den) if sep else 1
    f = Fraction(p, q)
    if (f.numerator, f.denominator) != (p, q):
        raise ValueError(f"fraction {text!r} is not in lowest terms")
    _check_unit(f)
    return f


def _check_unit(f: Fraction) -> None:
    if not 0 <= f <= 1:
        raise ValueError(f"fraction {f} outside [0, 1]")


def farey_parents(f: Fraction) -> tuple[Fraction, Fraction]:
    """The Farey neighbours ``(left, right)`` whose mediant is ``f``."""
    _check_unit(f)
    p, q = f.numerator, f.denominator
    if q == 1:
        raise ValueError(f"{f} is an endpoint and has no Farey parents")
    # left = u/v with p*v - q*u = 1 and 0 < v < q
    v = pow(p, -1, q)
    u = (p * v - 1) // q
    return Fraction(u, v), Fraction(p - u, q - v)


def are_neighbours(left: Fraction, right: Fraction) -> bool:
    return left < right and right.numerator * left.denominator - left.numerator * right.denominator == 1


def mediant(left: Fraction, right: Fraction) -> Fraction:
    return Fraction(left.numerator + right.numerator, left.denominator + right.denominator)


class FareyWords:
    """Memo of ``W(f)`` over Stern-Brocot ancestry.

    Each key is written once with a value determined by the key, so
    concurrent identical inserts are harmless.
    """

    def __init__(self) -> None:
        self._memo: dict[Fraction, Mat2] = {Fraction(0): A, Fraction(1): B}

    def __len__(self) -> int:
        return len(self._memo)

    def word(self, f: Fraction) -> Mat2:
        _check_unit(f)
        memo = self._memo
        if f in memo:
            return memo[f]
        # Explicit stack: Stern-Brocot depth can reach the denominator.
        stack = [f]
        while stack:
            g = stack[-1]
            if g in memo:
                stack.pop()
                continue
            left, right = farey_parents(g)
            missing = [h for h in (left, right) if h not in memo]
            if missing:
                stack.extend(missing)
            else:
                memo[g] = memo[left] @ memo[right]
                stack.pop()
        return memo[f]


_DEFAULT = FareyWords()


def farey_word(f: Fraction) -> Mat2:
    return _DEFAULT.word(f)


def farey_letters(f: Fraction) -> str:
    """The word ``W(f)`` spelled in the letters ``A`` and ``B``."""
    _check_unit(f)
    out: list[str] = []
    stack = [f]
    while stack:
        g = stack.pop()
        if g == 0:
            out.append("A")
        elif g == 1:
            out.append("B")
        else:
            left, right = farey_parents(g)
            stack += [right, left]
    return "".join(out)


def trace_correspondence(f: Fraction) -> tuple[int, int]:
    """Return ``(c, trace)`` of ``W(f)``; raises if ``trace != 3c``."""
    w = farey_word(f)
    if not (w.trace == 3 * w.c and min(w.a, w.b, w.c, w.d) > 0 and w.det == 1):
        raise AssertionError(f"W({f}) = {w.rows()} breaks the trace correspondence")
    return w.c, w.trace


def triple_of_farey(left: Fraction, right: Fraction) -> MarkoffTriple:
    if not are_neighbours(left, right):
        raise ValueError(f"{left} and {right} are not Farey neighbours")
    _check_unit(left)
    _check_unit(right)
    cs = (farey_word(left).c, farey_word(right).c, farey_word(mediant(left, right)).c)
    return MarkoffTriple.normalized(*cs)


def iter_farey_by_c(c_bound: int, lo: Fraction = Fraction(0), hi: Fraction = Fraction(1)) -> Iterator[tuple[Fraction, Mat2]]:
    """Fractions in [0, 1] whose word has lower-left entry <= c_bound.

    Walks the Stern-Brocot tree; a mediant's entry exceeds both parents',
    so branches are cut once past the bound.  Yields in increasing order of
    the fraction.
    """
    if c_bound < 1:
        raise ValueError("c_bound must be >= 1")
    words = _DEFAULT
    found: list[tuple[Fraction, Mat2]] = [(Fraction(0), A), (Fraction(1), B)]
    stack = [(Fraction(0), Fraction(1))]
    while stack:
        left, right = stack.pop()
        m = mediant(left, right)
        w = words.word(m)
        if w.c > c_bound:
            continue
        found.append((m, w))
        stack += [(left, m), (m, right)]
    for f, w in sorted(found, key=lambda item: item[0]):
        if lo <= f <= hi:
            yield f, w
