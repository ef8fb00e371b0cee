"""Markoff triples: validation, the Vieta tree, and classification of maxima.

Triples are always stored sorted, ``a <= b <= c``; the six permutations of a
solution are never materialized.  The tree is walked from ``(1, 1, 1)``
with two labelled moves on the sorted triple:

* ``L`` replaces the smallest entry: ``(a, b, c) -> (b, c, 3bc - a)``
* ``R`` replaces the middle entry:   ``(a, b, c) -> (a, c, 3ac - b)``

At ``(1, 1, 1)`` and ``(1, 1, 2)`` both moves give the same triple; only
``L`` is taken there, so every triple has exactly one path (``(1, 1, 2)``
is ``"L"``, ``(1, 2, 5)`` is ``"LL"``).  The orientation is a convention of
this package.
"""

from __future__ import annotations

import enum
import json
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

from markoff.arith import prime_power_decompose

ROOT_PATH = ""


def is_markoff_triple(a: int, b: int, c: int) -> bool:
    return a > 0 and b > 0 and c > 0 and a * a + b * b + c * c == 3 * a * b * c


@dataclass(frozen=True, order=True)
class MarkoffTriple:
    a: int
    b: int
    c: int

    def __post_init__(self) -> None:
        if not (0 < self.a <= self.b <= self.c):
            raise ValueError(f"triple must be positive and sorted: {self.as_tuple()}")
        if not is_markoff_triple(self.a, self.b, self.c):
            raise ValueError(f"not a Markoff triple: {self.as_tuple()}")

    @classmethod
    def normalized(cls, x: int, y: int, z: int) -> MarkoffTriple:
        return cls(*sorted((x, y, z)))

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def key(self) -> str:
        """Decimal serialization used for deduplication."""
        return f"{self.a},{self.b},{self.c}"

    def left(self) -> MarkoffTriple:
        a, b, c = self.as_tuple()
        return MarkoffTriple.normalized(b, c, 3 * b * c - a)

    def right(self) -> MarkoffTriple:
        a, b, c = self.as_tuple()
        return MarkoffTriple.normalized(a, c, 3 * a * c - b)


ROOT = MarkoffTriple(1, 1, 1)


@dataclass(frozen=True)
class TreeNode:
    triple: MarkoffTriple
    path: str = ROOT_PATH

    def children(self) -> list[TreeNode]:
        t = self.triple
        kids = [TreeNode(t.left(), self.path + "L")]
        if t.a != t.b:
            kids.append(TreeNode(t.right(), self.path + "R"))
        return kids

    def to_record(self) -> dict[str, str]:
        t = self.triple
        return {"a": str(t.a), "b": str(t.b), "c": str(t.c), "path": self.path}

    def to_json(self) -> str:
        return json.dumps(self.to_record())

    @classmethod
    def from_record(cls, rec: dict[str, str]) -> TreeNode:
        node = cls(MarkoffTriple(int(rec["a"]), int(rec["b"]), int(rec["c"])), rec["path"])
        if replay_path(node.path) != node.triple:
            raise ValueError(f"path {node.path!r} does not reach {node.triple.as_tuple()}")
        return node


def replay_path(path: str) -> MarkoffTriple:
    t = ROOT
    for step in path:
        if step == "L":
            t = t.left()
        elif step == "R":
            t = t.right()
        else:
            raise ValueError(f"bad path symbol {step!r}")
    return t


def vieta_neighbors(t: MarkoffTriple) -> tuple[MarkoffTriple, MarkoffTriple, MarkoffTriple]:
    """The three Vieta involutions, each result re-sorted."""
    a, b, c = t.as_tuple()
    return (
        MarkoffTriple.normalized(3 * b * c - a, b, c),
        MarkoffTriple.normalized(a, 3 * a * c - b, c),
        MarkoffTriple.normalized(a, b, 3 * a * b - c),
    )


def _walk(start: TreeNode, c_bound: int) -> Iterator[TreeNode]:
    # Away from the root every child's maximum exceeds its parent's,
    # so a branch can be cut as soon as it passes the bound.
    stack = [start]
    while stack:
        node = stack.pop()
        if node.triple.c > c_bound:
            continue
        yield node
        stack.extend(reversed(node.children()))


def iter_tree(c_bound: int) -> Iterator[TreeNode]:
    """Depth-first traversal (``L`` before ``R``) of all nodes with max <= c_bound."""
    if c_bound < 1:
        raise ValueError("c_bound must be >= 1")
    return _walk(TreeNode(ROOT), c_bound)


def _subtree_nodes(args: tuple[dict[str, str], int]) -> list[TreeNode]:
    rec, c_bound = args
    return list(_walk(TreeNode.from_record(rec), c_bound))


def enumerate_nodes(c_bound: int, workers: int = 1) -> list[TreeNode]:
    """All tree nodes with max entry <= c_bound, sorted by triple.

    With ``workers > 1`` the subtrees below a small frontier are walked in
    separate processes; the final sort makes the result independent of the
    worker count.
    """
    if c_bound < 1:
        raise ValueError("c_bound must be >= 1")
    if workers <= 1:
        nodes = list(iter_tree(c_bound))
    else:
        # Split off a frontier of a few dozen subtrees.
        nodes, frontier = [], [TreeNode(ROOT)]
        while frontier and len(frontier) < 8 * workers:
            node = frontier.pop(0)
            if node.triple.c > c_bound:
                continue
            nodes.append(node)
            frontier.extend(node.children())
        jobs = [(n.to_record(), c_bound) for n in frontier]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_subtree_nodes, jobs):
                nodes.extend(part)
    nodes.sort(key=lambda n: n.triple)
    return nodes


def enumerate(c_bound: int, workers: int = 1) -> list[MarkoffTriple]:
    """Every Markoff triple with max entry <= c_bound, each once, sorted."""
    seen: dict[str, MarkoffTriple] = {}
    for node in enumerate_nodes(c_bound, workers):
        seen.setdefault(node.triple.key(), node.triple)
    return sorted(seen.values())


@dataclass
class UniquenessReport:
    c_bound: int
    triple_count: int
    markoff_numbers: list[int]
    duplicates: dict[int, list[MarkoffTriple]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.duplicates


def audit_uniqueness(c_bound: int, workers: int = 1) -> UniquenessReport:
    """Group triples by their maximum; any maximum hit twice is reported."""
    by_max: dict[int, list[MarkoffTriple]] = defaultdict(list)
    triples = enumerate(c_bound, workers)
    for t in triples:
        by_max[t.c].append(t)
    return UniquenessReport(
        c_bound=c_bound,
        triple_count=len(triples),
        markoff_numbers=sorted(by_max),
        duplicates={c: ts for c, ts in sorted(by_max.items()) if len(ts) > 1},
    )


class Tag(enum.Enum):
    PRIME_POWER = "PRIME_POWER"
    TWO_TIMES_PRIME_POWER = "TWO_TIMES_PRIME_POWER"
    FIVE_TIMES_PRIME_POWER = "FIVE_TIMES_PRIME_POWER"
    OTHER = "OTHER"


@dataclass(frozen=True)
class NumberClass:
    tag: Tag
    p: int | None = None
    n: int | None = None

    def __str__(self) -> str:
        if self.tag is Tag.OTHER:
            return "OTHER"
        return f"{self.tag.value}({self.p},{self.n})"

    @property
    def cofactor(self) -> int:
        return {Tag.PRIME_POWER: 1, Tag.TWO_TIMES_PRIME_POWER: 2, Tag.FIVE_TIMES_PRIME_POWER: 5}[self.tag]


def classify(c: int) -> NumberClass:
    """Which case of the prime-power theorem and its extensions covers ``c``."""
    if c < 1:
        raise ValueError("classify requires c >= 1")
    if c == 1:
        return NumberClass(Tag.OTHER)
    pp = prime_power_decompose(c)
    if pp:
        return NumberClass(Tag.PRIME_POWER, *pp)
    if c % 2 == 0 and c // 2 >= 3:
        pp = prime_power_decompose(c // 2)
        if pp and pp[0] != 2:
            return NumberClass(Tag.TWO_TIMES_PRIME_POWER, *pp)
    if c % 5 == 0 and c // 5 >= 2:
        pp = prime_power_decompose(c // 5)
        if pp and pp[0] != 5:
            return NumberClass(Tag.FIVE_TIMES_PRIME_POWER, *pp)
    return NumberClass(Tag.OTHER)
