"""Finite homogeneous ultrametric spaces and planar rigidity.

A finite isometrically homogeneous ultrametric space is the leaf set of a
leveled tree in which every node at depth ``i`` has ``b_{i+1}`` children;
its isometries are the level-preserving tree automorphisms. Leaves are
indexed by their addresses in mixed radix, root level most significant.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from kaleido.group_core import Configuration, GSpace, Partition, set_orbit
from kaleido.search import CapExceeded
from kaleido.splitting import NEITHER, relative_position
from kaleido.transversal import Coloring, find_kaleidoscopic_coloring

ULTRA_CAP = 12


@dataclass(frozen=True)
class UltrametricSpec:
    branching: tuple[int, ...]
    scale: tuple[Fraction, ...] = ()

    def __post_init__(self):
        branching = tuple(int(b) for b in self.branching)
        if not branching or any(b < 2 for b in branching):
            raise ValueError("branching factors must be >= 2 and non-empty")
        scale = tuple(Fraction(s) for s in self.scale) or tuple(
            Fraction(i) for i in range(1, len(branching) + 1)
        )
        if len(scale) != len(branching):
            raise ValueError("need one scale value per level")
        if scale[0] <= 0 or any(x >= y for x, y in zip(scale, scale[1:])):
            raise ValueError("scale must be positive and strictly increasing")
        object.__setattr__(self, "branching", branching)
        object.__setattr__(self, "scale", scale)

    @property
    def leaf_count(self) -> int:
        return math.prod(self.branching)

    def address(self, leaf: int) -> tuple[int, ...]:
        out = []
        for b in reversed(self.branching):
            leaf, r = divmod(leaf, b)
            out.append(r)
        return tuple(reversed(out))

    def leaf(self, address: Sequence[int]) -> int:
        i = 0
        for r, b in zip(address, self.branching):
            i = i * b + r
        return i

    def distance(self, x: int, y: int) -> Fraction:
        """Scale value of the level where the addresses first differ;
        splitting at the root is the largest distance."""
        if x == y:
            return Fraction(0)
        ax, ay = self.address(x), self.address(y)
        depth = next(i for i, (u, v) in enumerate(zip(ax, ay)) if u != v)
        return self.scale[len(self.branching) - 1 - depth]


def _subtree_swap(spec: UltrametricSpec, prefix: tuple[int, ...], mapping) -> tuple[int, ...]:
    depth = len(prefix)
    perm = []
    for x in range(spec.leaf_count):
        a = spec.address(x)
        if a[:depth] == prefix:
            a = a[:depth] + (mapping(a[depth]),) + a[depth + 1 :]
        perm.append(spec.leaf(a))
    return tuple(perm)


def ultrametric_space(spec: UltrametricSpec) -> GSpace:
    """Leaves under the tree automorphism group.

    Per internal node: swap of the first two child subtrees and a cyclic
    rotation of all children. These generate the symmetric group on each
    node's children, hence the whole iterated wreath product.
    """
    gens: list[tuple[int, ...]] = []
    for depth, b in enumerate(spec.branching):
        for prefix in itertools.product(*(range(c) for c in spec.branching[:depth])):
            swap = _subtree_swap(spec, prefix, lambda c: {0: 1, 1: 0}.get(c, c))
            rot = _subtree_swap(spec, prefix, lambda c, b=b: (c + 1) % b)
            for g in (swap, rot):
                if g not in gens:
                    gens.append(g)
    label = "tree(" + ",".join(map(str, spec.branching)) + ")"
    return GSpace(spec.leaf_count, tuple(gens), name=label)


def epsilon_chain(spec: UltrametricSpec) -> list[Partition]:
    """Closed-ball partitions for radii ``0 = eps_0 < eps_1 < ... < eps_n``."""
    n = len(spec.branching)
    out = []
    for i in range(n + 1):
        keep = n - i
        out.append(Partition.from_labels([spec.address(x)[:keep] for x in range(spec.leaf_count)]))
    return out


@dataclass
class UltraEntry:
    subset: Configuration
    coloring: Coloring
    steps: tuple[str, ...]

    def to_json(self) -> dict:
        return {"subset": list(self.subset), "coloring": self.coloring.to_json(), "steps": list(self.steps)}


@dataclass
class UltraReport:
    spec: UltrametricSpec
    entries: list[UltraEntry] = field(default_factory=list)
    violations: list[UltraEntry] = field(default_factory=list)
    subsets_checked: int = 0

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "type": "ultra_report",
            "branching": list(self.spec.branching),
            "subsets_checked": self.subsets_checked,
            "kaleidoscopic": [e.to_json() for e in self.entries],
            "violations": [e.to_json() for e in self.violations],
        }


def verify_ultrametric_splittability(spec: UltrametricSpec, cap: int = ULTRA_CAP) -> UltraReport:
    """Check that every kaleidoscopic subset splits along the ball chain.

    Subsets whose size does not divide the leaf count are skipped: they
    cannot be kaleidoscopic. Violations are collected, not raised.
    """
    n = spec.leaf_count
    if n > cap:
        raise CapExceeded(f"{n} leaves exceed cap {cap}")
    space = ultrametric_space(spec)
    chain = epsilon_chain(spec)
    report = UltraReport(spec)
    for size in range(1, n + 1):
        if n % size:
            continue
        for k in itertools.combinations(range(n), size):
            report.subsets_checked += 1
            chi = find_kaleidoscopic_coloring(space, k)
            if chi is None:
                continue
            steps = tuple(relative_position(k, e, f) for e, f in zip(chain, chain[1:]))
            entry = UltraEntry(k, chi, steps)
            report.entries.append(entry)
            if NEITHER in steps:
                report.violations.append(entry)
    return report


# ---------------------------------------------------------------------------
# rigidity of finite planar sets

Point = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class PlanarPointSet:
    points: tuple[Point, ...]

    def __post_init__(self):
        pts = tuple((Fraction(x), Fraction(y)) for x, y in self.points)
        if len(set(pts)) != len(pts):
            raise ValueError("points must be pairwise distinct")
        object.__setattr__(self, "points", pts)

    @classmethod
    def parse(cls, text: str) -> "PlanarPointSet":
        """One ``x y`` pair per line (or per ``;``); entries like ``3``,
        ``-1/2``."""
        pts = []
        for raw in text.replace(";", "\n").splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            toks = line.replace(",", " ").split()
            if len(toks) != 2:
                raise ValueError(f"expected 'x y' but got {raw.strip()!r}")
            try:
                pts.append((Fraction(toks[0]), Fraction(toks[1])))
            except (ValueError, ZeroDivisionError):
                raise ValueError(f"bad rational coordinate in {raw.strip()!r}") from None
        return cls(tuple(pts))


@dataclass(frozen=True)
class CommonPoint:
    """``base + sqrt(root) * direction``; rational when ``root`` is 0."""

    base: Point
    direction: Point = (Fraction(0), Fraction(0))
    root: Fraction = Fraction(0)

    @property
    def is_rational(self) -> bool:
        return self.root == 0

    def squared_distance(self, c: Point) -> tuple[Fraction, Fraction]:
        """``|P - c|^2`` as ``rational + coefficient * sqrt(root)``."""
        dx, dy = self.base[0] - c[0], self.base[1] - c[1]
        wx, wy = self.direction
        rational = dx * dx + dy * dy + self.root * (wx * wx + wy * wy)
        return rational, 2 * (dx * wx + dy * wy)

    def to_json(self) -> dict:
        return {
            "base": [str(self.base[0]), str(self.base[1])],
            "direction": [str(self.direction[0]), str(self.direction[1])],
            "root": str(self.root),
        }

    @classmethod
    def from_json(cls, data: dict) -> "CommonPoint":
        return cls(
            tuple(Fraction(v) for v in data["base"]),
            tuple(Fraction(v) for v in data["direction"]),
            Fraction(data["root"]),
        )


@dataclass(frozen=True)
class RigidityWitness:
    triple: tuple[int, int, int]
    squared_radii: tuple[Fraction, Fraction, Fraction]
    point: CommonPoint

    def to_json(self) -> dict:
        return {
            "type": "rigidity_witness",
            "triple": list(self.triple),
            "squared_radii": [str(r) for r in self.squared_radii],
            "point": self.point.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "RigidityWitness":
        return cls(
            tuple(int(i) for i in data["triple"]),
            tuple(Fraction(r) for r in data["squared_radii"]),
            CommonPoint.from_json(data["point"]),
        )


def _sqd(p: Point, q: Point) -> Fraction:
    return (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def circle_triple_intersection(
    centers: Sequence[Point], squared_radii: Sequence[Fraction]
) -> list[CommonPoint]:
    """Exact common points of three circles with distinct centers."""
    c1, c2, c3 = ((Fraction(x), Fraction(y)) for x, y in centers)
    r1, r2, r3 = (Fraction(r) for r in squared_radii)
    if len({c1, c2, c3}) != 3:
        raise ValueError("circle centers must be distinct")
    # subtracting circle equations: 2 (cj - c1) . P = r1 - rj + |cj|^2 - |c1|^2
    u = (c2[0] - c1[0], c2[1] - c1[1])
    v = (c3[0] - c1[0], c3[1] - c1[1])
    n1 = c1[0] ** 2 + c1[1] ** 2
    alpha = (r1 - r2 + c2[0] ** 2 + c2[1] ** 2 - n1) / 2
    beta = (r1 - r3 + c3[0] ** 2 + c3[1] ** 2 - n1) / 2
    det = u[0] * v[1] - u[1] * v[0]
    if det != 0:
        p = ((alpha * v[1] - beta * u[1]) / det, (u[0] * beta - v[0] * alpha) / det)
        return [CommonPoint(p)] if _sqd(p, c1) == r1 else []
    # collinear centers: v = t u
    t = v[0] / u[0] if u[0] != 0 else v[1] / u[1]
    if beta != t * alpha:
        return []
    uu = u[0] ** 2 + u[1] ** 2
    mu = (alpha - (u[0] * c1[0] + u[1] * c1[1])) / uu
    foot = (c1[0] + mu * u[0], c1[1] + mu * u[1])
    w = (-u[1], u[0])
    lam_sq = (r1 - mu * mu * uu) / uu  # |w| = |u|
    if lam_sq < 0:
        return []
    if lam_sq == 0:
        return [CommonPoint(foot)]
    lam = _rational_sqrt(lam_sq)
    if lam is None:
        return [CommonPoint(foot, w, lam_sq), CommonPoint(foot, (-w[0], -w[1]), lam_sq)]
    pts = [(foot[0] + s * lam * w[0], foot[1] + s * lam * w[1]) for s in (1, -1)]
    return [CommonPoint(p) for p in sorted(pts)]


def rigidity_check(k: PlanarPointSet | Iterable[Point]) -> tuple[bool, RigidityWitness | None]:
    """Decide rigidity of a finite planar set in exact rational arithmetic.

    Radii range over the squared distance set of ``k`` (0 included). Triples
    and radius triples are scanned in index order, so the witness returned is
    the first one found.
    """
    if not isinstance(k, PlanarPointSet):
        k = PlanarPointSet(tuple(k))
    pts = k.points
    if len(pts) < 3:
        raise ValueError("rigidity needs at least 3 points")
    inside = set(pts)
    radii = sorted({_sqd(p, q) for p in pts for q in pts})
    for triple in itertools.combinations(range(len(pts)), 3):
        centers = [pts[i] for i in triple]
        for rr in itertools.product(radii, repeat=3):
            for cp in circle_triple_intersection(centers, rr):
                if not cp.is_rational or cp.base not in inside:
                    return False, RigidityWitness(triple, rr, cp)
    return True, None


def verify_rigidity_witness(k: PlanarPointSet, w: RigidityWitness) -> bool:
    """Independent re-check: the point lies on all three spheres, outside
    ``k``, and the radii come from the distance set."""
    pts = k.points
    if len(set(w.triple)) != 3 or any(not 0 <= i < len(pts) for i in w.triple):
        return False
    radii = {_sqd(p, q) for p in pts for q in pts}
    if any(r not in radii for r in w.squared_radii):
        return False
    for i, r in zip(w.triple, w.squared_radii):
        rational, irrational = w.point.squared_distance(pts[i])
        if rational != r or (w.point.root != 0 and irrational != 0):
            return False
    return not (w.point.is_rational and w.point.base in set(pts))
