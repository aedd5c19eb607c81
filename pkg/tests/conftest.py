"""Independent brute-force oracles shared by the test modules.

Nothing here calls the search code under test; group arithmetic is redone
from residues so a bug in the cached tables would show up as a mismatch.
"""

import itertools

from kaleido.group_core import abelian_group_types

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def groups_up_to(n):
    return [spec for order in range(2, n + 1) for spec in abelian_group_types(order)]


def add(spec, x, y):
    rx, ry = spec.residues(x), spec.residues(y)
    return spec.index(tuple((a + b) % m for a, b, m in zip(rx, ry, spec.orders)))


def neg(spec, x):
    return spec.index(tuple((-a) % m for a, m in zip(spec.residues(x), spec.orders)))


def oracle_factorization(spec, a, b):
    sums = [add(spec, x, y) for x in a for y in b]
    return len(sums) == spec.order and len(set(sums)) == spec.order


def oracle_complements(spec, a):
    """All B containing 0 with G = A + B."""
    n = spec.order
    if not a or n % len(a):
        return []
    k = n // len(a)
    return [
        b
        for b in itertools.combinations(range(n), k)
        if b[0] == 0 and oracle_factorization(spec, a, b)
    ]


def oracle_periodic(spec, a):
    s = set(a)
    return [g for g in range(1, spec.order) if {add(spec, x, g) for x in s} == s]


def oracle_translates(spec, a):
    return {tuple(sorted(add(spec, x, g) for x in a)) for g in range(spec.order)}


def oracle_colorings(n, edges, palette):
    """Every coloring bijective on each edge, in lexicographic order."""
    for colors in itertools.product(range(palette), repeat=n):
        if all(sorted(colors[x] for x in e) == list(range(palette)) for e in edges):
            yield colors


def oracle_set_partitions(points):
    points = list(points)
    if not points:
        yield []
        return
    first, rest = points[0], points[1:]
    for part in oracle_set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


def oracle_relative_position(k, e_blocks, f_blocks):
    e_of = {x: frozenset(b) for b in e_blocks for x in b}
    f_of = {x: frozenset(b) for b in f_blocks for x in b}
    sat = set().union(*(e_of[x] for x in k))
    if all(f_of[x] <= sat for x in k):
        return "parallel"
    if all(sat & f_of[x] == e_of[x] for x in k):
        return "orthogonal"
    return "neither"


def oracle_latin_completions(n, rows, limit=1):
    """Up to ``limit`` completions of a top-left block by cell backtracking."""
    grid = [[None] * n for _ in range(n)]
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            grid[i][j] = x
    cells = [(i, j) for i in range(n) for j in range(n) if grid[i][j] is None]
    out = []

    def rec(t):
        if len(out) >= limit:
            return
        if t == len(cells):
            out.append([list(r) for r in grid])
            return
        i, j = cells[t]
        used = set(grid[i]) | {grid[r][j] for r in range(n)}
        for x in range(n):
            if x not in used:
                grid[i][j] = x
                rec(t + 1)
                grid[i][j] = None

    rec(0)
    return out


def reduced_latin_squares(n):
    """Squares whose first row and first column are 0, 1, ..., n-1."""
    perms = list(itertools.permutations(range(n)))
    out = []

    def rec(rows):
        if len(rows) == n:
            out.append(tuple(rows))
            return
        for p in perms:
            if p[0] == len(rows) and all(p[j] != r[j] for r in rows for j in range(n)):
                rec(rows + [p])

    rec([tuple(range(n))] if n else [])
    return out
