"""Search plumbing shared by the backtracking engines."""

from __future__ import annotations

from typing import Hashable, Iterator, Sequence


class SearchBudgetExceeded(RuntimeError):
    """Raised when a search visits more nodes than its budget allows.

    Distinct from a negative answer: the search was cut short, so the
    verdict is unknown.
    """

    def __init__(self, nodes: int):
        super().__init__(f"search budget exhausted after {nodes} nodes")
        self.nodes = nodes


class CapExceeded(OverflowError):
    """Input is larger than an exhaustive method is configured to handle."""


class Budget:
    """Node counter; ``limit=None`` means unbounded."""

    def __init__(self, limit: int | None = None):
        self.limit = limit
        self.nodes = 0

    def tick(self) -> None:
        self.nodes += 1
        if self.limit is not None and self.nodes > self.limit:
            raise SearchBudgetExceeded(self.nodes)


def as_budget(budget: Budget | int | None) -> Budget:
    if isinstance(budget, Budget):
        return budget
    return Budget(budget)


def mask_of(points) -> int:
    m = 0
    for p in points:
        m |= 1 << p
    return m


def points_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def exact_covers(
    size: int,
    rows: Sequence[tuple[Hashable, int]],
    *,
    chosen: Sequence[Hashable] = (),
    budget: Budget | None = None,
) -> Iterator[list]:
    """Yield every exact cover of ``{0, ..., size-1}`` by the given rows.

    ``rows`` are ``(label, bitmask)`` pairs. Labels in ``chosen`` are forced
    into every cover. Branches on the least uncovered element, trying rows
    in their given order; each yielded cover lists labels in pick order.
    """
    full = (1 << size) - 1
    by_label = dict(rows)
    by_elem: list[list[tuple[Hashable, int]]] = [[] for _ in range(size)]
    for label, mask in rows:
        m = mask
        while m:
            low = m & -m
            by_elem[low.bit_length() - 1].append((label, mask))
            m ^= low

    covered = 0
    for label in chosen:
        mask = by_label[label]
        if mask & covered:
            return
        covered |= mask
    budget = budget if budget is not None else Budget()
    picked = list(chosen)

    def rec(covered: int) -> Iterator[list]:
        budget.tick()
        if covered == full:
            yield list(picked)
            return
        free = ~covered & full
        x = (free & -free).bit_length() - 1
        for label, mask in by_elem[x]:
            if mask & covered:
                continue
            picked.append(label)
            yield from rec(covered | mask)
            picked.pop()

    yield from rec(covered)
