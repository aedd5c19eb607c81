"""Finite abelian groups, permutation G-spaces, subsets and partitions.

Points are dense integers ``0..n-1``. A configuration is a strictly
increasing tuple of point indices; a partition doubles as an equivalence
relation (block system) and as a coloring.
"""

from __future__ import annotations

import json
import math
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from kaleido.search import CapExceeded

Configuration = tuple[int, ...]

DEFAULT_GROUP_CAP = 10**7


def as_config(points: Iterable[int], point_count: int | None = None) -> Configuration:
    """Normalize ``points`` to a sorted tuple, rejecting duplicates and
    out-of-range indices."""
    pts = [int(p) for p in points]
    out = tuple(sorted(set(pts)))
    if len(out) != len(pts):
        raise ValueError(f"duplicate points in {pts}")
    if out and out[0] < 0:
        raise ValueError(f"negative point {out[0]}")
    if point_count is not None and out and out[-1] >= point_count:
        raise ValueError(f"point {out[-1]} out of range for {point_count} points")
    return out


# ---------------------------------------------------------------------------
# abelian groups

_SPEC_RE = re.compile(r"^\s*C(\d+)((?:\s*[xX×]\s*C\d+)*)\s*$")


@dataclass(frozen=True)
class AbelianGroupSpec:
    """Direct sum of cyclic groups ``C_{n_1} + ... + C_{n_k}``.

    Elements are residue vectors, indexed in mixed-radix order with the
    first factor most significant.
    """

    orders: tuple[int, ...]

    def __post_init__(self):
        orders = tuple(int(n) for n in self.orders)
        object.__setattr__(self, "orders", orders)
        if not orders:
            raise ValueError("group type needs at least one cyclic factor")
        for n in orders:
            if n < 2:
                raise ValueError(f"cyclic factor C{n} has order below 2")

    @property
    def order(self) -> int:
        return math.prod(self.orders)

    def __str__(self) -> str:
        return "x".join(f"C{n}" for n in self.orders)

    def residues(self, index: int) -> tuple[int, ...]:
        out = []
        for n in reversed(self.orders):
            index, r = divmod(index, n)
            out.append(r)
        return tuple(reversed(out))

    def index(self, residues: Sequence[int]) -> int:
        if len(residues) != len(self.orders):
            raise ValueError(f"expected {len(self.orders)} residues, got {len(residues)}")
        i = 0
        for r, n in zip(residues, self.orders):
            i = i * n + (int(r) % n)
        return i

    @cached_property
    def add_table(self) -> tuple[tuple[int, ...], ...]:
        els = [self.residues(i) for i in range(self.order)]
        return tuple(
            tuple(self.index([x + y for x, y in zip(a, b)]) for b in els) for a in els
        )

    @cached_property
    def neg_table(self) -> tuple[int, ...]:
        return tuple(self.index([-x for x in self.residues(i)]) for i in range(self.order))

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def translate(self, a: Iterable[int], g: int) -> Configuration:
        row = self.add_table[g]
        return tuple(sorted(row[x] for x in a))

    def negate(self, a: Iterable[int]) -> Configuration:
        return tuple(sorted(self.neg_table[x] for x in a))


def parse_group_spec(text: str) -> AbelianGroupSpec:
    """Parse ``"C4xC2"`` style group types."""
    m = _SPEC_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse group type {text!r}; expected e.g. C4xC2")
    orders = [int(m.group(1))] + [int(n) for n in re.findall(r"\d+", m.group(2))]
    for n in orders:
        if n < 2:
            raise ValueError(f"cyclic factor C{n} in {text!r} has order below 2")
    return AbelianGroupSpec(tuple(orders))


def _partitions(n: int, largest: int | None = None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def abelian_group_types(order: int) -> list[AbelianGroupSpec]:
    """All abelian groups of the given order up to isomorphism, each in
    invariant-factor form (``n_1 | n_2 | ...`` written largest first)."""
    if order < 2:
        raise ValueError("order must be at least 2")
    per_prime = [
        [(p, part) for part in _partitions(e)] for p, e in sorted(_factorize(order).items())
    ]
    out = []

    def combine(i, chosen):
        if i == len(per_prime):
            width = max(len(part) for _, part in chosen)
            factors = [1] * width
            for p, part in chosen:
                for j, e in enumerate(part):
                    factors[j] *= p**e
            out.append(AbelianGroupSpec(tuple(factors)))
            return
        for choice in per_prime[i]:
            combine(i + 1, chosen + [choice])

    combine(0, [])
    return sorted(out, key=lambda s: (len(s.orders), [-n for n in s.orders]))


# ---------------------------------------------------------------------------
# G-spaces


def _orbit_of_zero(n: int, generators) -> set[int]:
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for g in generators:
            y = g[x]
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


@dataclass(frozen=True)
class GSpace:
    """A transitive action given by generator permutations (image arrays)."""

    point_count: int
    generators: tuple[tuple[int, ...], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        n = int(self.point_count)
        if n < 1:
            raise ValueError("a G-space needs at least one point")
        gens = tuple(tuple(int(x) for x in g) for g in self.generators)
        for i, g in enumerate(gens):
            if len(g) != n or sorted(g) != list(range(n)):
                raise ValueError(f"generator {i} is not a permutation of 0..{n - 1}")
        object.__setattr__(self, "point_count", n)
        object.__setattr__(self, "generators", gens)
        if len(_orbit_of_zero(n, gens)) != n:
            raise ValueError("action is not transitive")

    @property
    def points(self) -> range:
        return range(self.point_count)

    def image(self, gen: Sequence[int], a: Iterable[int]) -> Configuration:
        return tuple(sorted(gen[x] for x in a))

    def to_json(self) -> dict:
        return {"points": self.point_count, "generators": [list(g) for g in self.generators]}

    @classmethod
    def from_json(cls, data: dict) -> "GSpace":
        try:
            return cls(int(data["points"]), tuple(tuple(g) for g in data["generators"]))
        except KeyError as exc:
            raise ValueError(f"G-space JSON is missing key {exc}") from None

    @classmethod
    def load(cls, path) -> "GSpace":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def cayley_space(spec: AbelianGroupSpec) -> GSpace:
    """Regular action of the group on itself by translation."""
    gens = []
    for i in range(len(spec.orders)):
        unit = [0] * len(spec.orders)
        unit[i] = 1
        e = spec.index(unit)
        gens.append(tuple(spec.add(e, x) for x in range(spec.order)))
    return GSpace(spec.order, tuple(gens), name=str(spec))


def set_orbit(space: GSpace, a: Iterable[int]) -> list[Configuration]:
    """The family ``G[A] = {gA : g in G}``, sorted lexicographically."""
    start = as_config(a, space.point_count)
    if not start:
        raise ValueError("set orbit of the empty configuration is not defined")
    seen = {start}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for g in space.generators:
            t = tuple(sorted(g[x] for x in s))
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return sorted(seen)


def group_order(space: GSpace, cap: int = DEFAULT_GROUP_CAP) -> tuple[int, int]:
    """Order of the generated permutation group and of the stabilizer of
    point 0, by breadth-first closure. Raises ``CapExceeded`` past ``cap``."""
    n = space.point_count
    identity = tuple(range(n))
    seen = {identity}
    queue = deque([identity])
    fixing = 0
    while queue:
        h = queue.popleft()
        if h[0] == 0:
            fixing += 1
        for g in space.generators:
            gh = tuple(g[x] for x in h)
            if gh not in seen:
                seen.add(gh)
                if len(seen) > cap:
                    raise CapExceeded(f"group order exceeds cap {cap}")
                queue.append(gh)
    return len(seen), fixing


# ---------------------------------------------------------------------------
# partitions and the congruence lattice


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        x, y = self.find(x), self.find(y)
        if x == y:
            return False
        if y < x:
            x, y = y, x
        self.parent[y] = x
        return True

    def labels(self) -> list[int]:
        return [self.find(x) for x in range(len(self.parent))]


@dataclass(frozen=True)
class Partition:
    """Partition of ``0..n-1``; blocks sorted internally and by least element."""

    blocks: tuple[tuple[int, ...], ...]
    block_of: tuple[int, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        blocks = tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        n = sum(len(b) for b in blocks)
        block_of = [-1] * n
        for i, b in enumerate(blocks):
            if not b:
                raise ValueError("empty block")
            for x in b:
                if x < 0 or x >= n or block_of[x] != -1:
                    raise ValueError("blocks must be disjoint and cover 0..n-1")
                block_of[x] = i
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "block_of", tuple(block_of))

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        groups: dict[int, list[int]] = {}
        for x, lab in enumerate(labels):
            groups.setdefault(lab, []).append(x)
        return cls(tuple(tuple(b) for b in groups.values()))

    @classmethod
    def discrete(cls, n: int) -> "Partition":
        return cls(tuple((x,) for x in range(n)))

    @classmethod
    def full(cls, n: int) -> "Partition":
        return cls((tuple(range(n)),))

    @property
    def point_count(self) -> int:
        return len(self.block_of)

    def __len__(self) -> int:
        return len(self.blocks)

    def block(self, x: int) -> tuple[int, ...]:
        return self.blocks[self.block_of[x]]

    def saturate(self, a: Iterable[int]) -> Configuration:
        """``[A]_E``: union of the blocks meeting ``a``."""
        ids = {self.block_of[x] for x in a}
        return tuple(sorted(x for i in ids for x in self.blocks[i]))

    def refines(self, other: "Partition") -> bool:
        return all(len({other.block_of[x] for x in b}) == 1 for b in self.blocks)

    def is_invariant(self, space: GSpace) -> bool:
        for g in space.generators:
            for b in self.blocks:
                if len({self.block_of[g[x]] for x in b}) != 1:
                    return False
        return True

    def join(self, other: "Partition") -> "Partition":
        uf = UnionFind(self.point_count)
        for part in (self, other):
            for b in part.blocks:
                for x in b[1:]:
                    uf.union(b[0], x)
        return Partition.from_labels(uf.labels())

    def meet(self, other: "Partition") -> "Partition":
        return Partition.from_labels(
            [(self.block_of[x], other.block_of[x]) for x in range(self.point_count)]
        )

    def sort_key(self):
        return (-len(self.blocks), self.blocks)

    def to_json(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]


def principal_congruence(space: GSpace, x: int, y: int) -> Partition:
    """Least invariant equivalence containing ``(x, y)``."""
    uf = UnionFind(space.point_count)
    queue = deque([(x, y)])
    while queue:
        a, b = queue.popleft()
        if uf.union(a, b):
            for g in space.generators:
                queue.append((g[a], g[b]))
    return Partition.from_labels(uf.labels())


def congruences(space: GSpace) -> list[Partition]:
    """All G-invariant equivalence relations, sorted by block count
    descending then lexicographically.

    Every congruence is a join of principal ones, and by transitivity each
    principal congruence is generated by a pair ``(0, y)``.
    """
    n = space.point_count
    found = {Partition.discrete(n)}
    for y in range(1, n):
        found.add(principal_congruence(space, 0, y))
    frontier = list(found)
    while frontier:
        new = []
        current = list(found)
        for p in frontier:
            for q in current:
                j = p.join(q)
                if j not in found:
                    found.add(j)
                    new.append(j)
        frontier = new
    return sorted(found, key=Partition.sort_key)
