"""Markoff matrices, the parabolic shift, and machine-checked equivalences.

A Markoff matrix ``[[a, b], [c, d]]`` has determinant 1 and ``a + d = 3|c|``.
Two of them are equivalent (``~``) when one, or its inverse, is a
``T``-conjugate of the other or of its diagonal swap ``[[d, b], [c, a]]``.

The shift ``M_k`` conjugates by the rational translation ``z -> z + k/c``;
it stays integral exactly when ``c | k(d - a - k)``.  For a prime power
``c`` the shift is then always ``T^l M T^-l`` or ``T^l M' T^-l``, and
:func:`uniqueness_certificate` produces that ``(k, branch, l)`` and replays
it with exact arithmetic.

Everything here uses the lower-left entry ``c`` of the stored matrix; the
helpers that need ``c > 0`` normalize through :func:`positive`.
"""

from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from markoff import triples
from markoff.arith import factorize
from markoff.triples import NumberClass, Tag, classify
from markoff.words import Mat2, farey_word, iter_farey_by_c

log = logging.getLogger(__name__)

DEFAULT_FACTOR_BOUND = 10**12
# admissible_shifts scans residues directly up to this |c|, and uses the
# factorization above it.
BRUTE_SHIFT_LIMIT = 10**4

T = Mat2(1, 1, 0, 1)
T_INV = Mat2(1, -1, 0, 1)
S = Mat2(0, -1, 1, 0)
S_INV = Mat2(0, 1, -1, 0)


class MarkoffInvariantError(ValueError):
    """A matrix offered as a Markoff matrix fails one of the defining checks."""

    def __init__(self, m: Mat2, check: str) -> None:
        super().__init__(f"{m.rows()} fails {check}")
        self.matrix = m
        self.check = check


def markoff_violation(m: Mat2) -> str | None:
    if m.det != 1:
        return "det == 1"
    if m.c == 0:
        return "c != 0"
    if m.trace != 3 * abs(m.c):
        return "a + d == 3|c|"
    return None


@dataclass(frozen=True)
class MarkoffMatrix:
    m: Mat2
    provenance: Fraction | None = None

    def __post_init__(self) -> None:
        bad = markoff_violation(self.m)
        if bad:
            raise MarkoffInvariantError(self.m, bad)

    @property
    def a(self) -> int:
        return self.m.a

    @property
    def b(self) -> int:
        return self.m.b

    @property
    def c(self) -> int:
        return self.m.c

    @property
    def d(self) -> int:
        return self.m.d

    def rows(self) -> list[list[int]]:
        return self.m.rows()


def from_farey(f: Fraction) -> MarkoffMatrix:
    return MarkoffMatrix(farey_word(f), provenance=f)


def t_power(n: int) -> Mat2:
    return Mat2(1, n, 0, 1)


def shift(m: MarkoffMatrix, k: int) -> MarkoffMatrix | None:
    """``M_k``, or ``None`` when it is not an integer matrix."""
    a, b, c, d = m.a, m.b, m.c, m.d
    num = k * (d - a - k)
    if num % c:
        return None
    return MarkoffMatrix(Mat2(a + k, b + num // c, c, d - k))


def _shift_roots_mod(p: int, e: int, D: int) -> list[int]:
    """Residues ``k`` mod ``p**e`` with ``k (D - k) = 0``."""
    q = p**e
    if D % p:
        # p cannot divide both k and D - k, so one of them carries all of p**e.
        return sorted({0, D % q})
    if q > 10**7:
        raise ValueError(f"no closed form for shifts mod {p}^{e} with {p} | d - a")
    return [k for k in range(q) if k * (D - k) % q == 0]


def admissible_shifts(m: MarkoffMatrix, factorization: dict[int, int] | None = None) -> set[int]:
    """All ``k`` in ``[0, |c|)`` with ``c | k(d - a - k)``."""
    c = abs(m.c)
    D = m.d - m.a
    if c <= BRUTE_SHIFT_LIMIT and factorization is None:
        return {k for k in range(c) if k * (D - k) % c == 0}
    if factorization is None:
        factorization = factorize(c)
    if math.prod(p**e for p, e in factorization.items()) != c:
        raise ValueError(f"factorization {factorization} does not multiply to {c}")
    # Chinese remaindering over the prime-power parts.
    sols, mod = [0], 1
    for p, e in factorization.items():
        q = p**e
        roots = _shift_roots_mod(p, e, D)
        inv = pow(mod, -1, q)
        sols = [s + mod * ((r - s) * inv % q) for s in sols for r in roots]
        mod *= q
    return {s % c for s in sols}


def t_conjugate(m: MarkoffMatrix, n: int) -> MarkoffMatrix:
    """``T^n M T^-n``."""
    a, b, c, d = m.a, m.b, m.c, m.d
    return MarkoffMatrix(Mat2(a + n * c, b + n * (d - a) - n * n * c, c, d - n * c))


def diagonal_swap(m: MarkoffMatrix) -> MarkoffMatrix:
    """``M'``: swap the diagonal; ``b = (ad - 1)/c`` is unchanged."""
    return MarkoffMatrix(Mat2(m.d, m.b, m.c, m.a))


def invert(m: MarkoffMatrix) -> Mat2:
    return m.m.adjugate()


def positive(m: MarkoffMatrix) -> MarkoffMatrix:
    """``m`` itself if ``c > 0``, else its inverse (which has ``c > 0``)."""
    if m.c > 0:
        return m
    return MarkoffMatrix(invert(m), m.provenance)


@dataclass(frozen=True, order=True)
class CanonicalKey:
    c_abs: int
    residue: int

    def __str__(self) -> str:
        return f"({self.c_abs}, {self.residue})"


def canonical_key(m: MarkoffMatrix) -> CanonicalKey:
    """Complete invariant for ``~``.

    Up to ``T``-conjugation a positive Markoff matrix is fixed by ``a mod c``;
    the swap sends ``a`` to ``d = -a (mod c)`` and inversion flips the sign
    of ``c``.
    """
    p = positive(m)
    c = p.c
    return CanonicalKey(c, min(p.a % c, (3 * c - p.a) % c))


def equivalent(m: MarkoffMatrix, n: MarkoffMatrix, same_geodesic: bool = False) -> bool:
    """``m ~ n``; with ``same_geodesic`` only ``T^3``-conjugation and inversion count."""
    if not same_geodesic:
        return canonical_key(m) == canonical_key(n)
    pm, pn = positive(m), positive(n)
    return pm.c == pn.c and (pm.a - pn.a) % (3 * pm.c) == 0


class Branch(enum.Enum):
    IDENTITY = "IDENTITY"
    DIAGONAL_SWAP = "DIAGONAL_SWAP"


@dataclass(frozen=True)
class EquivalenceCertificate:
    """``lhs = T^l M T^-l`` (IDENTITY) or ``T^l M' T^-l`` (DIAGONAL_SWAP); ``lhs = M_k``."""

    c: int
    k: int
    branch: Branch
    l: int  # noqa: E741
    lhs: Mat2

    def replay(self, m: MarkoffMatrix) -> Mat2:
        base = m if self.branch is Branch.IDENTITY else diagonal_swap(m)
        return t_conjugate(base, self.l).m

    def verify(self, m: MarkoffMatrix) -> bool:
        return self.replay(m) == self.lhs and self.lhs.a == m.a + self.k and self.lhs.c == self.c

    def to_json(self) -> dict[str, Any]:
        return {
            "c": str(self.c),
            "k": str(self.k),
            "branch": self.branch.value,
            "l": str(self.l),
            "lhs": self.lhs.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> EquivalenceCertificate:
        return cls(int(obj["c"]), int(obj["k"]), Branch(obj["branch"]), int(obj["l"]), Mat2.from_json(obj["lhs"]))


class CertificateReplayError(RuntimeError):
    pass


def uniqueness_certificate(m: MarkoffMatrix, other: MarkoffMatrix) -> EquivalenceCertificate | None:
    """Certificate that ``other`` is a ``T``-conjugate of ``m`` or of ``m'``.

    Both matrices must share the same positive ``c``.  Returns ``None`` when
    neither ``c | k`` nor ``c | (d - a - k)``, which a prime-power ``c``
    never allows.  Every certificate is replayed before it is returned.
    """
    c = m.c
    if c <= 0 or other.c != c:
        raise ValueError("uniqueness_certificate needs both matrices with the same positive c")
    k = other.a - m.a
    rest = m.d - m.a - k
    if k * rest % c:
        raise ValueError(f"shift k={k} is not integral for c={c}")
    if k % c == 0:
        cert = EquivalenceCertificate(c, k, Branch.IDENTITY, k // c, other.m)
    elif rest % c == 0:
        # T^l M' T^-l has a-entry d + l c = a + k.
        cert = EquivalenceCertificate(c, k, Branch.DIAGONAL_SWAP, -rest // c, other.m)
    else:
        return None
    if not cert.verify(m):
        raise CertificateReplayError(f"certificate {cert.to_json()} does not replay on {m.rows()}")
    return cert


@dataclass
class CFormReport:
    c: int
    not_multiple_of_4: bool
    minus_one_is_square: bool
    factorization: dict[int, int] | None
    bad_primes: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.not_multiple_of_4 and self.minus_one_is_square and not self.bad_primes


def check_c_form(m: MarkoffMatrix, factor_bound: int = DEFAULT_FACTOR_BOUND) -> CFormReport:
    """``|c|`` is not divisible by 4 and its odd primes are ``1 mod 4``.

    The congruence ``d^2 = -1 (mod |c|)`` is always checked; the prime
    divisors only when ``|c| <= factor_bound``.
    """
    c = abs(m.c)
    rep = CFormReport(c, c % 4 != 0, (m.d * m.d + 1) % c == 0, None)
    if c <= factor_bound:
        rep.factorization = factorize(c)
        rep.bad_primes = [p for p in rep.factorization if p % 2 and p % 4 != 1]
    return rep


@dataclass
class GcdReport:
    c: int
    k: int
    gcd: int
    bad_prime_powers: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.gcd in (1, 2) and not self.bad_prime_powers


def check_gcd_bound(m: MarkoffMatrix, k: int, prime_powers: list[int] | None = None) -> GcdReport:
    """``gcd(c, k, d - a - k)`` is 1 or 2, and each supplied exact odd prime
    power divisor of ``c`` is coprime to ``k`` or to ``d - a - k``."""
    c = abs(m.c)
    rest = m.d - m.a - k
    rep = GcdReport(c, k, math.gcd(c, k, rest))
    for q in prime_powers or ():
        if math.gcd(q, k) != 1 and math.gcd(q, rest) != 1:
            rep.bad_prime_powers.append(q)
    return rep


def _conj(x: Mat2, m: Mat2) -> Mat2:
    return x @ m @ x.adjugate()


def conjugacy_min_scan(m: MarkoffMatrix | Mat2, max_word_len: int) -> int:
    """Smallest ``|c'|`` over conjugates by words of length <= max_word_len in T, S and inverses."""
    if max_word_len < 0:
        raise ValueError("max_word_len must be >= 0")
    start = m.m if isinstance(m, MarkoffMatrix) else m
    seen = {start}
    level = [start]
    best = abs(start.c)
    for _ in range(max_word_len):
        nxt = []
        for cur in level:
            for g in (T, T_INV, S, S_INV):
                y = _conj(g, cur)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if y.c:
                        best = min(best, abs(y.c))
        level = nxt
    return best


@dataclass(frozen=True)
class ConjugacyWitness:
    """``conjugate = conjugator @ m @ conjugator^-1`` with ``|conjugate.c| == min_abs_c``."""

    min_abs_c: int
    conjugator: Mat2
    conjugate: Mat2
    complete: bool

    def verify(self, m: Mat2) -> bool:
        return (
            self.conjugator.det == 1
            and _conj(self.conjugator, m) == self.conjugate
            and abs(self.conjugate.c) == self.min_abs_c
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "min_abs_c": str(self.min_abs_c),
            "conjugator": self.conjugator.to_json(),
            "conjugate": self.conjugate.to_json(),
        }


def conjugacy_minimum(m: MarkoffMatrix | Mat2, below: int | None = None, max_steps: int = 10**6) -> ConjugacyWitness:
    """Exact ``min |c'|`` over the SL(2, Z)-conjugacy class of a hyperbolic ``m``.

    The lower-left entry of ``X M X^-1`` is the value of the binary form
    ``c x^2 + (a - d) x y - b y^2`` at the bottom row of ``X``, so the
    minimum is the least value the form takes at a primitive vector.  For
    an indefinite form that minimum, when below ``sqrt(disc)/2``, occurs as
    a leading coefficient on the cycle of reduced forms; we reduce and walk
    the cycle, tracking the conjugator.  With ``below`` set, stops at the
    first conjugate with ``|c'| < below`` (``complete=False``).
    """
    cur = m.m if isinstance(m, MarkoffMatrix) else m
    x = Mat2(1, 0, 0, 1)
    disc = (cur.a - cur.d) ** 2 + 4 * cur.b * cur.c
    s = math.isqrt(disc)
    if disc <= 0 or s * s == disc:
        raise ValueError("conjugacy_minimum needs a hyperbolic matrix with irrational fixed points")

    def form(y: Mat2) -> tuple[int, int, int]:
        return y.c, y.a - y.d, -y.b

    def is_reduced(f: tuple[int, int, int]) -> bool:
        A, Bm, _ = f
        return 1 <= Bm <= s and 2 * abs(A) + Bm >= s + 1 and 2 * abs(A) - Bm <= s

    def rho(y: Mat2, x: Mat2) -> tuple[Mat2, Mat2]:
        # conjugate by S (form (A, B, C) -> (C, -B, A)), then by T^t so the
        # new middle coefficient lands in the normalizing window
        y, x = _conj(S, y), S @ x
        A, Bm, _ = form(y)
        two_a = 2 * abs(A)
        if abs(A) <= s:
            r = s - (s - Bm) % two_a
        else:
            r = Bm % two_a
            if r > abs(A):
                r -= two_a
        t = (r - Bm) // (2 * A)
        return _conj(t_power(t), y), t_power(t) @ x

    best = ConjugacyWitness(abs(cur.c), x, cur, False)

    def consider(y: Mat2, x: Mat2) -> bool:
        nonlocal best
        if abs(y.c) < best.min_abs_c:
            best = ConjugacyWitness(abs(y.c), x, y, False)
        return below is not None and best.min_abs_c < below

    steps = 0
    while not is_reduced(form(cur)):
        cur, x = rho(cur, x)
        steps += 1
        if consider(cur, x):
            return best
        if steps > max_steps:
            raise RuntimeError("reduction did not terminate")
    first = form(cur)
    while True:
        cur, x = rho(cur, x)
        steps += 1
        if consider(cur, x):
            return best
        if form(cur) == first:
            break
        if steps > max_steps:
            raise RuntimeError("cycle walk exceeded max_steps")
    return ConjugacyWitness(best.min_abs_c, best.conjugator, best.conjugate, True)


# ---------------------------------------------------------------------------
# Theorem audit


class Outcome(enum.Enum):
    EQUIVALENT = "EQUIVALENT"
    EXCLUDED = "EXCLUDED"
    COUNTEREXAMPLE = "COUNTEREXAMPLE"


@dataclass
class ShiftRecord:
    k: int
    outcome: Outcome
    certificate: EquivalenceCertificate | None = None
    exclusion: ConjugacyWitness | None = None

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"k": str(self.k), "outcome": self.outcome.value}
        if self.certificate:
            out["certificate"] = self.certificate.to_json()
        if self.exclusion:
            out["exclusion"] = self.exclusion.to_json()
        return out


@dataclass
class ClassAudit:
    c: int
    classification: NumberClass
    fraction: Fraction | None
    matrix: Mat2
    shifts: list[ShiftRecord] = field(default_factory=list)
    c_form: CFormReport | None = None
    gcd_checked: int = 0
    skipped: str | None = None
    failures: list[dict[str, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, check: str, **witness: Any) -> None:
        self.failures.append({"c": str(self.c), "check": check, "matrix": self.matrix.to_json(), **witness})

    def to_json(self) -> dict[str, Any]:
        return {
            "c": str(self.c),
            "classification": str(self.classification),
            "fraction": None if self.fraction is None else str(self.fraction),
            "matrix": self.matrix.to_json(),
            "shifts": [s.to_json() for s in self.shifts],
            "c_form_ok": None if self.c_form is None else self.c_form.ok,
            "gcd_checked": self.gcd_checked,
            "skipped": self.skipped,
            "status": "PASS" if self.ok else "FAIL",
            "failures": self.failures,
        }


@dataclass
class TheoremReport:
    c_bound: int
    classes: list[ClassAudit]
    failures: list[dict[str, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and all(cls.ok for cls in self.classes)

    def all_failures(self) -> list[dict[str, Any]]:
        return self.failures + [f for cls in self.classes for f in cls.failures]

    def counts(self) -> dict[str, int]:
        out = {tag.value: 0 for tag in Tag}
        for cls in self.classes:
            out[cls.classification.tag.value] += 1
        return out

    def to_json(self) -> dict[str, Any]:
        return {
            "c_bound": str(self.c_bound),
            "classes": [cls.to_json() for cls in self.classes],
            "summary": {
                "classes": len(self.classes),
                "passed": sum(cls.ok for cls in self.classes),
                "failed": sum(not cls.ok for cls in self.classes),
                "classification": self.counts(),
                "global_failures": self.failures,
                "ok": self.ok,
            },
        }


def _known_factorization(c: int, cls: NumberClass) -> dict[int, int] | None:
    if cls.tag is Tag.OTHER:
        return None
    out = {cls.p: cls.n}
    if cls.cofactor > 1:
        out[cls.cofactor] = out.get(cls.cofactor, 0) + 1
    return dict(sorted(out.items()))


def audit_class(c: int, matrix: Mat2, fraction: Fraction | None = None, factor_bound: int = DEFAULT_FACTOR_BOUND) -> ClassAudit:
    """Audit one Markoff number through its representative matrix."""
    cls = classify(c)
    rec = ClassAudit(c, cls, fraction, matrix)
    try:
        m = MarkoffMatrix(matrix, fraction)
    except MarkoffInvariantError as err:
        rec.fail("markoff_matrix", violated=err.check)
        return rec
    if m.c != c:
        rec.fail("representative_c", found=str(m.c))
        return rec
    if (m.a * m.a + 1) % c or (m.d * m.d + 1) % c:
        rec.fail("a^2 = d^2 = -1 mod c")

    rec.c_form = check_c_form(m, factor_bound)
    if not rec.c_form.ok:
        rec.fail("c_form", bad_primes=[str(p) for p in rec.c_form.bad_primes])

    factorization = _known_factorization(c, cls)
    if factorization is None and c > BRUTE_SHIFT_LIMIT:
        factorization = rec.c_form.factorization
        if factorization is None:
            rec.skipped = f"c exceeds factor bound {factor_bound}; shifts not enumerated"
            return rec
    shifts = sorted(admissible_shifts(m, factorization))
    odd_parts = [p**e for p, e in (factorization or factorize(c)).items() if p % 2]
    key = canonical_key(m)
    D = m.d - m.a

    for k in shifts:
        g = check_gcd_bound(m, k, odd_parts)
        rec.gcd_checked += 1
        if not g.ok:
            rec.fail("gcd_bound", k=str(k), gcd=str(g.gcd), bad=[str(q) for q in g.bad_prime_powers])
        mk = shift(m, k)
        if mk is None:
            rec.fail("shift_integral", k=str(k))
            continue
        if (mk.m.det, mk.m.trace, mk.c) != (1, m.m.trace, c):
            rec.fail("shift_preserves", k=str(k), shifted=mk.m.to_json())
            continue
        cert = uniqueness_certificate(m, mk)
        if cert is not None:
            if canonical_key(mk) != key:
                rec.fail("key_equality", k=str(k), certificate=cert.to_json())
            expected = Branch.IDENTITY if k % c == 0 else Branch.DIAGONAL_SWAP
            if cls.tag is Tag.PRIME_POWER and cert.branch is not expected:
                rec.fail("dichotomy_branch", k=str(k), certificate=cert.to_json())
            rec.shifts.append(ShiftRecord(k, Outcome.EQUIVALENT, certificate=cert))
            continue
        if cls.tag is Tag.PRIME_POWER or k % c == 0 or (D - k) % c == 0:
            rec.fail("dichotomy", k=str(k), shifted=mk.m.to_json())
            rec.shifts.append(ShiftRecord(k, Outcome.COUNTEREXAMPLE))
            continue
        # Not ~ m.  It is harmless only if it is not a Markoff matrix at all,
        # i.e. some conjugate has a smaller lower-left entry.
        wit = conjugacy_minimum(mk, below=c)
        if wit.min_abs_c < c and wit.verify(mk.m):
            rec.shifts.append(ShiftRecord(k, Outcome.EXCLUDED, exclusion=wit))
        else:
            rec.shifts.append(ShiftRecord(k, Outcome.COUNTEREXAMPLE))
            rec.fail("distinct_class", k=str(k), shifted=mk.m.to_json(), key=str(canonical_key(mk)))
    return rec


def _audit_job(args: tuple[int, list[list[str]], str | None, int]) -> ClassAudit:
    c, rows, frac, factor_bound = args
    return audit_class(c, Mat2.from_json(rows), None if frac is None else Fraction(frac), factor_bound)


def representatives(c_bound: int) -> dict[int, tuple[Fraction, Mat2]]:
    """Farey representative in [0, 1/2] for every Markoff number <= c_bound."""
    reps: dict[int, tuple[Fraction, Mat2]] = {}
    for f, w in iter_farey_by_c(c_bound, hi=Fraction(1, 2)):
        reps.setdefault(w.c, (f, w))
    return reps


def audit_theorem(
    c_bound: int,
    factor_bound: int = DEFAULT_FACTOR_BOUND,
    workers: int = 1,
    override: dict[int, Mat2] | None = None,
) -> TheoremReport:
    """Audit every Markoff number up to ``c_bound``.

    For each one: the Farey representative satisfies the Markoff-matrix
    invariants and the congruence checks; every admissible shift is either
    certified equivalent (and for prime powers, on the predicted branch) or
    excluded by a conjugate with smaller lower-left entry.  ``override``
    replaces representatives and exists for fault injection.
    """
    if c_bound < 1:
        raise ValueError("c_bound must be >= 1")
    numbers = triples.audit_uniqueness(c_bound).markoff_numbers
    reps = representatives(c_bound)
    report = TheoremReport(c_bound, [])
    if sorted(reps) != numbers:
        report.failures.append(
            {
                "check": "farey_bijection",
                "tree_only": [str(c) for c in sorted(set(numbers) - set(reps))],
                "farey_only": [str(c) for c in sorted(set(reps) - set(numbers))],
            }
        )
    jobs = []
    for c in numbers:
        frac, w = reps.get(c, (None, None))
        if override and c in override:
            w = override[c]
        if w is None:
            continue
        jobs.append((c, w.to_json(), None if frac is None else str(frac), factor_bound))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            report.classes = list(pool.map(_audit_job, jobs))
    else:
        report.classes = [_audit_job(j) for j in jobs]
    report.classes.sort(key=lambda r: r.c)
    for rec in report.classes:
        log.info("c=%s %s %s", rec.c, rec.classification, "PASS" if rec.ok else "FAIL")
    return report
