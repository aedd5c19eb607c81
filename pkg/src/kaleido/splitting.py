"""Splittable configurations over chains of invariant equivalences."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from kaleido.group_core import (
    Configuration,
    GSpace,
    Partition,
    as_config,
    congruences,
)
from kaleido.search import CapExceeded

PARALLEL = "parallel"
ORTHOGONAL = "orthogonal"
NEITHER = "neither"

DEFAULT_LATTICE_CAP = 256


def relative_position(k: Iterable[int], e: Partition, f: Partition) -> str:
    """Position of ``k`` relative to nested equivalences ``e`` within ``f``.

    parallel: ``[K]_e`` contains the whole ``f``-class of each point of K.
    orthogonal: ``[K]_e`` meets the ``f``-class of each point x of K only in
    ``[x]_e``.
    """
    if e.point_count != f.point_count:
        raise ValueError("partitions live on different point sets")
    if not e.refines(f):
        raise ValueError("first partition does not refine the second")
    k = as_config(k, e.point_count)
    if not k:
        raise ValueError("configuration must be non-empty")
    saturated = set(e.saturate(k))
    parallel = all(set(f.block(x)) <= saturated for x in k)
    if parallel:
        return PARALLEL
    orthogonal = all(
        saturated.intersection(f.block(x)) == set(e.block(x)) for x in k
    )
    return ORTHOGONAL if orthogonal else NEITHER


@dataclass(frozen=True)
class SplittingChain:
    chain: tuple[Partition, ...]
    steps: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "type": "chain",
            "partitions": [p.to_json() for p in self.chain],
            "steps": list(self.steps),
        }

    @classmethod
    def from_json(cls, data: dict) -> "SplittingChain":
        return cls(
            tuple(Partition(tuple(tuple(b) for b in blocks)) for blocks in data["partitions"]),
            tuple(data["steps"]),
        )


def chain_defects(space: GSpace, k: Iterable[int], chain: SplittingChain) -> list[str]:
    """Reasons a chain fails to witness splittability of ``k``."""
    n = space.point_count
    k = as_config(k, n)
    parts = chain.chain
    if not parts:
        return ["empty chain"]
    if any(p.point_count != n for p in parts):
        return ["chain partition on the wrong number of points"]
    out = []
    if parts[0] != Partition.discrete(n):
        out.append("chain does not start at the diagonal")
    if parts[-1] != Partition.full(n):
        out.append("chain does not end at the full relation")
    if len(chain.steps) != len(parts) - 1:
        out.append("step count does not match chain length")
    for i, p in enumerate(parts):
        if not p.is_invariant(space):
            out.append(f"level {i} is not invariant")
    for i in range(len(parts) - 1):
        e, f = parts[i], parts[i + 1]
        if e == f or not e.refines(f):
            out.append(f"level {i} does not strictly refine level {i + 1}")
            continue
        if i < len(chain.steps):
            pos = relative_position(k, e, f)
            if pos == NEITHER or pos != chain.steps[i]:
                out.append(f"step {i} is {pos}, declared {chain.steps[i]}")
    return out


def _lattice(space: GSpace, cap: int) -> list[Partition]:
    lattice = congruences(space)
    if len(lattice) > cap:
        raise CapExceeded(f"{len(lattice)} congruences exceed cap {cap}")
    return lattice


def _cover_graph(lattice: list[Partition]) -> dict[int, list[int]]:
    """Strict refinements ``i -> j`` (all, not only covers), in index order."""
    up = {}
    for i, e in enumerate(lattice):
        up[i] = [j for j, f in enumerate(lattice) if j != i and len(f) < len(e) and e.refines(f)]
    return up


def is_splittable(
    space: GSpace,
    k: Iterable[int],
    lattice: list[Partition] | None = None,
    cap: int = DEFAULT_LATTICE_CAP,
) -> SplittingChain | None:
    """Shortest (then least by lattice index) splitting chain for ``k``."""
    k = as_config(k, space.point_count)
    if not k:
        raise ValueError("configuration must be non-empty")
    if lattice is None:
        lattice = _lattice(space, cap)
    bottom = 0
    top = len(lattice) - 1
    if bottom == top:
        return SplittingChain((lattice[0],), ())
    up = _cover_graph(lattice)
    parent: dict[int, tuple[int, str]] = {}
    queue = deque([bottom])
    seen = {bottom}
    while queue:
        i = queue.popleft()
        if i == top:
            break
        for j in up[i]:
            if j in seen:
                continue
            pos = relative_position(k, lattice[i], lattice[j])
            if pos == NEITHER:
                continue
            seen.add(j)
            parent[j] = (i, pos)
            queue.append(j)
    if top not in seen:
        return None
    path, steps = [top], []
    while path[-1] != bottom:
        i, pos = parent[path[-1]]
        path.append(i)
        steps.append(pos)
    return SplittingChain(
        tuple(lattice[i] for i in reversed(path)), tuple(reversed(steps))
    )


def maximal_chains(lattice: list[Partition]) -> list[list[int]]:
    """Maximal chains bottom to top, as lists of lattice indices."""
    up = _cover_graph(lattice)
    covers = {
        i: [j for j in js if not any(m in up[i] and j in up[m] for m in js if m != j)]
        for i, js in up.items()
    }
    top = len(lattice) - 1
    out = []

    def walk(path):
        i = path[-1]
        if i == top:
            out.append(list(path))
            return
        for j in covers[i]:
            walk(path + [j])

    walk([0])
    return out


def _descend(upper: frozenset, e: Partition, f: Partition, parallel: bool) -> set[frozenset]:
    """Lift a set of ``f``-blocks to sets of ``e``-blocks along one step."""
    children: dict[int, list[tuple[int, ...]]] = {}
    for b in e.blocks:
        children.setdefault(f.block_of[b[0]], []).append(b)
    if parallel:
        return {frozenset(eb for fb in upper for eb in children[fb])}
    out = {frozenset()}
    for fb in upper:
        out = {acc | {eb} for acc in out for eb in children[fb]}
    return out


def generate_splittable(
    space: GSpace, cap: int = DEFAULT_LATTICE_CAP
) -> list[Configuration]:
    """Every splittable configuration, built top-down along maximal chains.

    Starting from the single point of the top quotient, each step down either
    takes the full preimage or picks one class per class above (every
    choice). Refining a splitting chain keeps it splitting, so maximal
    chains reach every splittable set.
    """
    lattice = _lattice(space, cap)
    found: set[Configuration] = set()
    for chain in maximal_chains(lattice):
        top = lattice[chain[-1]]
        level: set[frozenset] = {frozenset(range(len(top.blocks)))}
        for hi, lo in zip(reversed(chain), list(reversed(chain))[1:]):
            e, f = lattice[lo], lattice[hi]
            nxt: set[frozenset] = set()
            for upper in level:
                for parallel in (True, False):
                    for lifted in _descend(upper, e, f, parallel):
                        nxt.add(frozenset(e.block_of[b[0]] for b in lifted))
            level = nxt
        bottom = lattice[chain[0]]
        for ids in level:
            found.add(tuple(sorted(x for i in ids for x in bottom.blocks[i])))
    return sorted(found)
