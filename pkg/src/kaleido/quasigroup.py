"""Latin squares as quasigroups; completing partial Latin rectangles.

Symbols are 1-based at the I/O boundary and 0-based internally. A
:class:`LatinSquare` of order ``n`` is the quasigroup ``x * y = table[x][y]``
on ``{0, ..., n-1}``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from kaleido.group_core import AbelianGroupSpec, Configuration, as_config
from kaleido.search import Budget, as_budget, exact_covers, mask_of
from kaleido.transversal import Coloring, rainbow_coloring


def _is_latin(rows: Sequence[Sequence[int]], n: int) -> bool:
    if any(len(set(r)) != len(r) for r in rows):
        return False
    cols = list(zip(*rows)) if rows else []
    if any(len(set(c)) != len(c) for c in cols):
        return False
    return all(0 <= x < n for r in rows for x in r)


@dataclass(frozen=True)
class LatinSquare:
    n: int
    table: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        table = tuple(tuple(int(x) for x in row) for row in self.table)
        object.__setattr__(self, "table", table)
        if len(table) != self.n or any(len(r) != self.n for r in table):
            raise ValueError(f"Latin square of order {self.n} needs {self.n}x{self.n} entries")
        if not _is_latin(table, self.n):
            raise ValueError("rows and columns must be permutations of the symbols")

    @classmethod
    def from_symbols(cls, rows: Sequence[Sequence[int]]) -> "LatinSquare":
        """Build from 1-based symbols."""
        return cls(len(rows), tuple(tuple(x - 1 for x in r) for r in rows))

    def symbols(self) -> list[list[int]]:
        return [[x + 1 for x in r] for r in self.table]

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def rdiv(self, b: int, a: int) -> int:
        """``b / a``: the ``y`` with ``y * a = b``."""
        return self._rdiv[a][b]

    def ldiv(self, a: int, b: int) -> int:
        """``a \\ b``: the ``x`` with ``a * x = b``."""
        return self.table[a].index(b)

    @property
    def _rdiv(self):
        cached = self.__dict__.get("_rdiv_cache")
        if cached is None:
            cached = [[0] * self.n for _ in range(self.n)]
            for y in range(self.n):
                for a in range(self.n):
                    cached[a][self.table[y][a]] = y
            self.__dict__["_rdiv_cache"] = cached
        return cached

    @classmethod
    def cayley(cls, spec: AbelianGroupSpec) -> "LatinSquare":
        return cls(spec.order, spec.add_table)

    def to_text(self) -> str:
        return "\n".join([str(self.n)] + [" ".join(map(str, r)) for r in self.symbols()]) + "\n"

    @classmethod
    def parse(cls, text: str) -> "LatinSquare":
        toks = text.split()
        if not toks:
            raise ValueError("empty Latin square file")
        n = int(toks[0])
        vals = [int(t) for t in toks[1:]]
        if len(vals) != n * n:
            raise ValueError(f"expected {n * n} symbols after the order, got {len(vals)}")
        return cls.from_symbols([vals[i * n : (i + 1) * n] for i in range(n)])


@dataclass(frozen=True)
class PartialRectangle:
    """Fully filled ``r x s`` rectangle over ``n`` symbols (0-based)."""

    n: int
    table: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        table = tuple(tuple(int(x) for x in row) for row in self.table)
        object.__setattr__(self, "table", table)
        if not table or not table[0]:
            raise ValueError("rectangle must have at least one cell")
        if any(len(r) != len(table[0]) for r in table):
            raise ValueError("rectangle rows differ in length")
        if self.r > self.n or self.s > self.n:
            raise ValueError(f"a {self.r}x{self.s} rectangle does not fit order {self.n}")
        if not _is_latin(table, self.n):
            raise ValueError("symbols repeat within a row or column, or fall outside 1..n")

    @property
    def r(self) -> int:
        return len(self.table)

    @property
    def s(self) -> int:
        return len(self.table[0])

    @classmethod
    def from_symbols(cls, n: int, rows: Sequence[Sequence[int]]) -> "PartialRectangle":
        return cls(n, tuple(tuple(x - 1 for x in r) for r in rows))

    def symbols(self) -> list[list[int]]:
        return [[x + 1 for x in r] for r in self.table]

    def counts(self) -> list[int]:
        out = [0] * self.n
        for row in self.table:
            for x in row:
                out[x] += 1
        return out

    def to_text(self) -> str:
        head = f"{self.n} {self.r} {self.s}"
        return "\n".join([head] + [" ".join(map(str, r)) for r in self.symbols()]) + "\n"

    @classmethod
    def parse(cls, text: str) -> "PartialRectangle":
        toks = text.split()
        if len(toks) < 3:
            raise ValueError("rectangle file must start with 'n r s'")
        n, r, s = (int(t) for t in toks[:3])
        vals = [int(t) for t in toks[3:]]
        if len(vals) != r * s:
            raise ValueError(f"expected {r * s} symbols, got {len(vals)}")
        return cls.from_symbols(n, [vals[i * s : (i + 1) * s] for i in range(r)])


def order9_rectangle() -> PartialRectangle:
    """First three columns of an order-9 quasigroup with a self-complemented,
    non-kaleidoscopic subset ``{1, 2, 3}``."""
    rows = [
        (1, 4, 5), (6, 2, 7), (8, 9, 3),
        (4, 1, 6), (5, 6, 1),
        (2, 7, 8), (7, 8, 2), (3, 5, 9), (9, 3, 4),
    ]  # fmt: skip
    return PartialRectangle.from_symbols(9, rows)


paper_example9 = order9_rectangle


def ryser_completable(rect: PartialRectangle) -> bool:
    """Each symbol occurs at least ``r + s - n`` times."""
    need = rect.r + rect.s - rect.n
    return all(c >= need for c in rect.counts())


def _add_column(rows: list[list[int]], n: int, rng: random.Random | None) -> None:
    """Extend an ``r x s`` Latin rectangle (Ryser condition holding) by one
    column, keeping the condition for ``s + 1``.

    Symbols that already occur the minimum number of times must appear in
    the new column. Padding with ``n - r`` dummy rows gives a regular
    bipartite multigraph of degree ``n - s``, so a perfect matching exists
    and restricted to the real rows it is the column.
    """
    r, s = len(rows), len(rows[0])
    counts = [0] * n
    for row in rows:
        for x in row:
            counts[x] += 1
    big = float(n * n + 1)
    cost = np.full((n, n), big)
    for i, row in enumerate(rows):
        present = set(row)
        for k in range(n):
            if k not in present:
                cost[i, k] = 0.0
    slack = []
    for k in range(n):
        slack += [k] * (counts[k] - (r + s - n))
    for j, k in enumerate(slack):
        cost[r + j % (n - r), k] = 0.0
    if rng is not None:
        cost = np.where(cost < big, np.array([[rng.random() for _ in range(n)] for _ in range(n)]), big)
    else:
        cost = np.where(cost < big, np.arange(n)[None, :] * 1e-3, big)
    rr, cc = linear_sum_assignment(cost)
    if cost[rr, cc].max() >= big:
        raise AssertionError("no perfect matching; Ryser condition violated")
    for i, k in zip(rr, cc):
        if i < r:
            rows[i].append(int(k))


def complete_rectangle(
    rect: PartialRectangle, rng: random.Random | int | None = None
) -> LatinSquare | None:
    """Complete to an order-``n`` Latin square extending ``rect`` (top-left).

    Columns are added one at a time by perfect matching, then rows the same
    way on the transpose. ``None`` exactly when the Ryser condition fails.
    Passing ``rng`` randomizes tie-breaking to sample different completions.
    """
    if not ryser_completable(rect):
        return None
    if isinstance(rng, int):
        rng = random.Random(rng)
    n = rect.n
    rows = [list(r) for r in rect.table]
    while len(rows[0]) < n:
        _add_column(rows, n, rng)
    cols = [list(c) for c in zip(*rows)]
    while len(cols[0]) < n:
        _add_column(cols, n, rng)
    table = tuple(tuple(r) for r in zip(*cols))
    return LatinSquare(n, table)


def extends(square: LatinSquare, rect: PartialRectangle) -> bool:
    return square.n == rect.n and all(
        square.table[i][: rect.s] == row for i, row in enumerate(rect.table)
    )


# ---------------------------------------------------------------------------
# subsets of quasigroups


def _bijective(values: Iterable[int], n: int) -> bool:
    vals = list(values)
    return len(vals) == n and len(set(vals)) == n


def is_complemented_by(square: LatinSquare, a: Configuration, b: Configuration) -> bool:
    """Right division ``B x A -> X, (b, a) -> b / a`` is bijective."""
    return _bijective((square.rdiv(y, x) for y in b for x in a), square.n)


def _complements(square: LatinSquare, a: Configuration, budget: Budget) -> list[Configuration]:
    rows = [(b, mask_of(square.rdiv(b, x) for x in a)) for b in range(square.n)]
    rows = [(b, m) for b, m in rows if bin(m).count("1") == len(a)]
    return sorted(tuple(sorted(c)) for c in exact_covers(square.n, rows, budget=budget))


def _multiplication_partners(square: LatinSquare, a: Configuration, budget: Budget):
    """All ``B`` with ``A x B -> X, (a, b) -> a * b`` bijective."""
    rows = [(b, mask_of(square.mul(x, b) for x in a)) for b in range(square.n)]
    return sorted(tuple(sorted(c)) for c in exact_covers(square.n, rows, budget=budget))


@dataclass(frozen=True)
class QuasiFlags:
    complemented: Configuration | None
    doubly: Configuration | None
    self_complemented: bool

    def to_json(self) -> dict:
        one = lambda c: None if c is None else [x + 1 for x in c]  # noqa: E731
        return {
            "complemented": one(self.complemented),
            "doubly": one(self.doubly),
            "self_complemented": self.self_complemented,
        }


def quasi_classify_subset(
    square: LatinSquare, a: Iterable[int], budget: Budget | int | None = None
) -> QuasiFlags:
    """Complementedness flags of a subset (0-based elements).

    ``complemented`` is the least ``B`` with right division ``B x A``
    bijective; ``doubly`` the least complemented ``B`` with multiplication
    ``A x B`` bijective.
    """
    a = as_config(a, square.n)
    if not a:
        raise ValueError("subset must be non-empty")
    budget = as_budget(budget)
    comps = _complements(square, a, budget)
    doubly = None
    for b in _multiplication_partners(square, a, budget):
        if _complements(square, b, budget):
            doubly = b
            break
    self_comp = _bijective((square.mul(x, y) for x in a for y in a), square.n) and _bijective(
        (square.rdiv(x, y) for x in a for y in a), square.n
    )
    return QuasiFlags(comps[0] if comps else None, doubly, self_comp)


def quasi_kaleidoscopic(
    square: LatinSquare, a: Iterable[int], budget: Budget | int | None = None
) -> Coloring | None:
    """Coloring with ``|a|`` colors bijective on every left translate ``x * A``."""
    a = as_config(a, square.n)
    if not a:
        raise ValueError("subset must be non-empty")
    edges = [tuple(square.mul(x, y) for y in a) for x in range(square.n)]
    return rainbow_coloring(square.n, edges, len(a), budget)


def verify_quasi_kaleidoscopic(square: LatinSquare, a: Iterable[int], chi: Coloring) -> bool:
    a = as_config(a, square.n)
    if chi.palette != len(a) or len(chi.colors) != square.n:
        return False
    return all(
        sorted(chi.colors[square.mul(x, y)] for y in a) == list(range(len(a)))
        for x in range(square.n)
    )
