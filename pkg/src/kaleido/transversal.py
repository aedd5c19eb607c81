"""Transversals and kaleidoscopic (rainbow) colorings of hypergraphs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from kaleido.group_core import Configuration, GSpace, as_config, set_orbit
from kaleido.search import Budget, as_budget


@dataclass(frozen=True)
class Coloring:
    colors: tuple[int, ...]
    palette: int

    def __post_init__(self):
        object.__setattr__(self, "colors", tuple(int(c) for c in self.colors))
        if self.palette < 1:
            raise ValueError("palette must be positive")

    def classes(self) -> list[Configuration]:
        out: list[list[int]] = [[] for _ in range(self.palette)]
        for x, c in enumerate(self.colors):
            if 0 <= c < self.palette:
                out[c].append(x)
        return [tuple(b) for b in out]

    def to_json(self) -> dict:
        return {"palette": self.palette, "colors": list(self.colors)}

    @classmethod
    def from_json(cls, data: dict) -> "Coloring":
        return cls(tuple(data["colors"]), int(data["palette"]))


def is_transversal(family: Sequence[Iterable[int]], t: Iterable[int]) -> bool:
    """True iff every member of ``family`` meets ``t`` in exactly one point."""
    if not family:
        raise ValueError("family must be non-empty")
    ts = set(t)
    return all(sum(1 for x in f if x in ts) == 1 for f in family)


def rainbow_coloring(
    point_count: int,
    edges: Sequence[Sequence[int]],
    palette: int,
    budget: Budget | int | None = None,
) -> Coloring | None:
    """Least coloring (in ``colors`` order) that is injective on every edge.

    Every edge must have exactly ``palette`` points, so injectivity on an edge
    is bijectivity onto the palette. The lexicographically least edge is
    pre-colored ``0, 1, ..., palette-1``; among such colorings the search
    returns the least one. ``None`` means no coloring exists.
    """
    budget = as_budget(budget)
    edges = sorted({tuple(sorted(e)) for e in edges})
    for e in edges:
        if len(e) != palette:
            raise ValueError(f"edge {e} has {len(e)} points, palette is {palette}")
    colors = [-1] * point_count
    if not edges:
        return Coloring(tuple(0 for _ in colors), palette)

    full = (1 << palette) - 1
    used = [0] * len(edges)
    point_edges: list[list[int]] = [[] for _ in range(point_count)]
    for i, e in enumerate(edges):
        for x in e:
            point_edges[x].append(i)

    def legal(p: int) -> int:
        m = 0
        for i in point_edges[p]:
            m |= used[i]
        return ~m & full

    def assign(p: int, c: int) -> None:
        colors[p] = c
        bit = 1 << c
        for i in point_edges[p]:
            used[i] |= bit

    def unassign(p: int) -> None:
        bit = 1 << colors[p]
        colors[p] = -1
        for i in point_edges[p]:
            used[i] &= ~bit

    def dead_neighbour(p: int) -> bool:
        for i in point_edges[p]:
            for q in edges[i]:
                if colors[q] < 0 and not legal(q):
                    return True
        return False

    for c, x in enumerate(edges[0]):
        if colors[x] >= 0 or not legal(x) >> c & 1:
            return None
        assign(x, c)
    order = [x for x in range(point_count) if colors[x] < 0]

    def rec(k: int) -> bool:
        budget.tick()
        if k == len(order):
            return True
        p = order[k]
        free = legal(p)
        while free:
            low = free & -free
            free ^= low
            assign(p, low.bit_length() - 1)
            if not dead_neighbour(p) and rec(k + 1):
                return True
            unassign(p)
        return False

    if not rec(0):
        return None
    return Coloring(tuple(colors), palette)


def find_kaleidoscopic_coloring(
    space: GSpace, a: Iterable[int], budget: Budget | int | None = None
) -> Coloring | None:
    """A coloring of the space with ``|a|`` colors bijective on every ``gA``."""
    a = as_config(a, space.point_count)
    if not a:
        raise ValueError("configuration must be non-empty")
    if space.point_count % len(a):
        return None
    return rainbow_coloring(space.point_count, set_orbit(space, a), len(a), budget)


def kaleidoscopic_defects(space: GSpace, a: Iterable[int], chi: Coloring) -> list[str]:
    """Reasons ``chi`` fails to certify ``a``; empty when it certifies."""
    a = as_config(a, space.point_count)
    problems = []
    if len(chi.colors) != space.point_count:
        return [f"coloring covers {len(chi.colors)} points, space has {space.point_count}"]
    if chi.palette != len(a):
        problems.append(f"palette {chi.palette} differs from |A| = {len(a)}")
    for c in chi.colors:
        if not 0 <= c < chi.palette:
            problems.append(f"color {c} outside palette")
            break
    for e in set_orbit(space, a):
        seen = {chi.colors[x] for x in e}
        if len(seen) != len(e) or seen != set(range(chi.palette)):
            problems.append(f"translate {list(e)} is not colored bijectively")
            break
    return problems


def verify_kaleidoscopic(space: GSpace, a: Iterable[int], chi: Coloring) -> bool:
    return not kaleidoscopic_defects(space, a, chi)


def transversal_partition(
    space: GSpace, a: Iterable[int], budget: Budget | int | None = None
) -> list[Configuration] | None:
    """Partition of the space into ``G[A]``-transversals, or ``None``."""
    chi = find_kaleidoscopic_coloring(space, a, budget)
    return None if chi is None else chi.classes()
