"""McShane gaps on the circle R/Z.

A Markoff matrix with ``c > 0`` (up to inversion and ``T``-conjugation)
owns the open arc centred at ``a/c mod 1`` of width
``3 - sqrt(9c^2 - 4)/c``.  Widths are irrational; each gap carries an exact
rational enclosure of its width, and disjointness is decided on outward
enclosures, refining precision when two enclosures touch.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from markoff.arith import RationalInterval, sqrt_enclosure
from markoff.matrices import MarkoffMatrix, positive
from markoff.words import iter_farey_by_c

DEFAULT_DIGITS = 60
MAX_DIGITS = 480


def width_enclosure(c: int, digits: int) -> RationalInterval:
    """Enclosure of ``3 - sqrt(9c^2 - 4)/c`` of width at most ``10**-digits / c``."""
    root = sqrt_enclosure(9 * c * c - 4, digits)
    return 3 - root.scale(Fraction(1, c))


@dataclass(frozen=True)
class Gap:
    c: int
    center: Fraction
    width: RationalInterval
    digits: int

    @property
    def residue(self) -> int:
        """``a mod c`` of the class representative; with ``c`` it identifies the gap."""
        return int(self.center * self.c)

    def left(self) -> RationalInterval:
        return self.center - self.width.scale(Fraction(1, 2))

    def right(self) -> RationalInterval:
        return self.center + self.width.scale(Fraction(1, 2))

    def refine(self, digits: int) -> Gap:
        return Gap(self.c, self.center, width_enclosure(self.c, digits), digits)


def gap_of(m: MarkoffMatrix, digits: int = DEFAULT_DIGITS) -> Gap:
    m = positive(m)
    c = m.c
    return Gap(c, Fraction(m.a % c, c), width_enclosure(c, digits), digits)


def enumerate_gaps(c_bound: int, digits: int = DEFAULT_DIGITS) -> list[Gap]:
    """One gap per distinct centre among Farey words ``W(q)``, ``q`` in [0, 1), ``c <= c_bound``.

    Sorted by centre.  The number of gaps per ``c`` comes out of the
    deduplication; nothing assumes it.
    """
    gaps: dict[Fraction, Gap] = {}
    for f, w in iter_farey_by_c(c_bound):
        if f == 1:
            continue
        g = gap_of(MarkoffMatrix(w, f), digits)
        gaps.setdefault(g.center, g)
    return sorted(gaps.values(), key=lambda g: g.center)


class Verdict(enum.Enum):
    DISJOINT = "DISJOINT"
    OVERLAP = "OVERLAP"
    UNDECIDED = "UNDECIDED"


@dataclass
class DisjointReport:
    verdict: Verdict
    pairs_checked: int
    digits_used: int
    # (left gap, right gap) for an overlapping or undecided adjacency
    witness: tuple[Gap, Gap] | None = None
    min_separation: Fraction | None = None

    @property
    def ok(self) -> bool:
        return self.verdict is Verdict.DISJOINT


def _compare(g: Gap, h: Gap, wrap: int) -> tuple[Verdict, Fraction]:
    """Compare ``g``'s right end with ``h``'s left end (shifted by ``wrap``)."""
    end, start = g.right(), h.left() + wrap
    if end.precedes(start):
        return Verdict.DISJOINT, start.lo - end.hi
    if start.hi <= end.lo:
        return Verdict.OVERLAP, start.hi - end.lo
    return Verdict.UNDECIDED, Fraction(0)


def check_disjoint(gaps: list[Gap], max_digits: int = MAX_DIGITS) -> DisjointReport:
    """Pairwise disjointness of arcs on R/Z via adjacent pairs in centre order.

    The circle is cut at 0 and the last gap is compared with the first one
    shifted by 1, so the wrap-around adjacency is checked explicitly.  An
    undecided pair is refined with doubled precision up to ``max_digits``.
    """
    ordered = sorted(gaps, key=lambda g: g.center)
    n = len(ordered)
    digits_used = max((g.digits for g in ordered), default=0)
    if n <= 1:
        return DisjointReport(Verdict.DISJOINT, 0, digits_used)
    if len({g.center for g in ordered}) != n:
        dup = next((g, h) for g, h in zip(ordered, ordered[1:]) if g.center == h.center)
        return DisjointReport(Verdict.OVERLAP, 0, digits_used, witness=dup)
    min_sep: Fraction | None = None
    for i in range(n):
        g, h = ordered[i], ordered[(i + 1) % n]
        wrap = 1 if i == n - 1 else 0
        verdict, sep = _compare(g, h, wrap)
        while verdict is Verdict.UNDECIDED:
            digits = 2 * max(g.digits, h.digits)
            if digits > max_digits:
                return DisjointReport(Verdict.UNDECIDED, i + 1, digits_used, witness=(g, h))
            g, h = g.refine(digits), h.refine(digits)
            digits_used = max(digits_used, digits)
            verdict, sep = _compare(g, h, wrap)
        if verdict is Verdict.OVERLAP:
            return DisjointReport(Verdict.OVERLAP, i + 1, digits_used, witness=(g, h))
        min_sep = sep if min_sep is None else min(min_sep, sep)
    return DisjointReport(Verdict.DISJOINT, n, digits_used, min_separation=min_sep)


def partial_sum(gaps: list[Gap]) -> RationalInterval:
    total = RationalInterval.point(0)
    for g in gaps:
        total = total + g.width
    return total


@dataclass
class GapSummary:
    c_bound: int
    digits: int
    gaps: list[Gap]
    disjoint: DisjointReport
    total: RationalInterval = field(init=False)

    def __post_init__(self) -> None:
        self.total = partial_sum(self.gaps)

    def to_json(self) -> dict[str, object]:
        lo, hi = self.total.to_decimal(self.digits)
        return {
            "c_bound": str(self.c_bound),
            "digits": self.digits,
            "gap_count": len(self.gaps),
            "partial_sum": {"lo": lo, "hi": hi},
            "disjointness": self.disjoint.verdict.value,
            "digits_used": self.disjoint.digits_used,
        }


def summarize(c_bound: int, digits: int = DEFAULT_DIGITS) -> GapSummary:
    gaps = enumerate_gaps(c_bound, digits)
    return GapSummary(c_bound, digits, gaps, check_disjoint(gaps))
