"""Factorizations ``G = A + B`` of finite abelian groups and Hajós properties.

Subsets are configurations of element indices (see
:class:`~kaleido.group_core.AbelianGroupSpec`). Enumerations normalize both
factors to contain ``0``; translating a factor preserves both factorization
and periodicity, so nothing is lost.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

from kaleido.group_core import (
    AbelianGroupSpec,
    Configuration,
    _factorize,
    as_config,
)
from kaleido.search import Budget, CapExceeded, as_budget, exact_covers, mask_of

HAJOS_CAP = 24
SEMI_CAP = 30


@dataclass(frozen=True)
class FactorizationCertificate:
    a: Configuration
    b: Configuration
    group: AbelianGroupSpec

    def verify(self) -> bool:
        return is_factorization(self.group, self.a, self.b)

    def to_json(self) -> dict:
        return {
            "type": "factorization",
            "group": str(self.group),
            "a": list(self.a),
            "b": list(self.b),
        }


class HajosResult(NamedTuple):
    holds: bool
    counterexample: FactorizationCertificate | None


def is_factorization(spec: AbelianGroupSpec, a: Iterable[int], b: Iterable[int]) -> bool:
    """True iff every element of G is uniquely ``x + y`` with x in a, y in b."""
    a = as_config(a, spec.order)
    b = as_config(b, spec.order)
    if not a or not b or len(a) * len(b) != spec.order:
        return False
    table = spec.add_table
    sums = {table[x][y] for x in a for y in b}
    return len(sums) == spec.order


def _translate_masks(spec: AbelianGroupSpec, a: Configuration) -> list[int]:
    return [mask_of(spec.add_table[g][x] for x in a) for g in range(spec.order)]


def iter_complements(
    spec: AbelianGroupSpec, a: Iterable[int], budget: Budget | int | None = None
) -> Iterator[Configuration]:
    """Every complementer factor of ``a`` containing 0 (exact cover order)."""
    a = as_config(a, spec.order)
    if not a:
        raise ValueError("subset must be non-empty")
    if spec.order % len(a):
        return
    masks = _translate_masks(spec, a)
    rows = list(enumerate(masks))
    for cover in exact_covers(spec.order, rows, chosen=[0], budget=as_budget(budget)):
        yield tuple(sorted(cover))


def find_complement(
    spec: AbelianGroupSpec, a: Iterable[int], budget: Budget | int | None = None
) -> Configuration | None:
    """Lexicographically least complementer factor ``B`` of ``a`` with 0 in B.

    Elements of B are chosen in increasing order; the least uncovered element
    bounds how far ahead the next element may lie, which keeps the search in
    lexicographic order so the first hit is the least.
    """
    a = as_config(a, spec.order)
    if not a:
        raise ValueError("subset must be non-empty")
    n = spec.order
    if n % len(a):
        return None
    budget = as_budget(budget)
    masks = _translate_masks(spec, a)
    full = (1 << n) - 1
    neg = spec.neg_table
    table = spec.add_table
    chosen = [0]

    def rec(covered: int, last: int) -> bool:
        budget.tick()
        if covered == full:
            return True
        free = ~covered & full
        x = (free & -free).bit_length() - 1
        # translates g with x in A + g are g = x - a
        reach = max(
            (g for g in (table[x][neg[y]] for y in a) if g > last and not masks[g] & covered),
            default=-1,
        )
        for g in range(last + 1, reach + 1):
            if masks[g] & covered:
                continue
            chosen.append(g)
            if rec(covered | masks[g], g):
                return True
            chosen.pop()
        return False

    if rec(masks[0], 0):
        return tuple(chosen)
    return None


def periods(spec: AbelianGroupSpec, a: Iterable[int]) -> list[int]:
    """Non-zero ``g`` with ``a + g = a``, ascending."""
    a = as_config(a, spec.order)
    return [g for g in range(1, spec.order) if spec.translate(a, g) == a]


def is_periodic(spec: AbelianGroupSpec, a: Iterable[int]) -> int | None:
    """Least non-zero period of ``a`` (as an element index), or ``None``."""
    a = as_config(a, spec.order)
    if not a:
        raise ValueError("subset must be non-empty")
    for g in range(1, spec.order):
        if spec.translate(a, g) == a:
            return g
    return None


def is_doubly_complemented(
    spec: AbelianGroupSpec, a: Iterable[int], budget: Budget | int | None = None
) -> tuple[Configuration, Configuration] | None:
    """A pair ``(B, C)`` with ``G = A + B = B + C``, or ``None``.

    Complements ``B`` are tried in lexicographic order, and for each the
    least complement ``C`` of ``B`` is sought.
    """
    a = as_config(a, spec.order)
    budget = as_budget(budget)
    for b in sorted(iter_complements(spec, a, budget)):
        c = find_complement(spec, b, budget)
        if c is not None:
            return b, c
    return None


# ---------------------------------------------------------------------------
# Hajós properties by exhaustive enumeration


def _normalized_subsets(spec: AbelianGroupSpec, small: bool) -> Iterator[Configuration]:
    """Subsets containing 0 whose size properly divides |G| and is > 1.

    ``small`` keeps sizes with ``k*k <= |G|``, otherwise ``k*k > |G|``.
    """
    n = spec.order
    for k in range(2, n):
        if n % k or (k * k <= n) != small:
            continue
        for rest in itertools.combinations(range(1, n), k - 1):
            yield (0,) + rest


def _check_cap(spec: AbelianGroupSpec, cap: int) -> None:
    if spec.order > cap:
        raise CapExceeded(f"|G| = {spec.order} exceeds the exhaustive cap {cap}")


def hajos_brute(
    spec: AbelianGroupSpec, cap: int = HAJOS_CAP, budget: Budget | int | None = None
) -> HajosResult:
    """Does every factorization ``G = A + B`` have a periodic factor?

    The roles of the factors are symmetric, so only the smaller factor
    ``A`` (``|A|^2 <= |G|``) is enumerated. The counterexample is the first
    non-periodic ``A`` in (size, lexicographic) order paired with its least
    non-periodic complement.
    """
    _check_cap(spec, cap)
    budget = as_budget(budget)
    for a in _normalized_subsets(spec, small=True):
        if is_periodic(spec, a) is not None:
            continue
        bad = [b for b in iter_complements(spec, a, budget) if is_periodic(spec, b) is None]
        if bad:
            return HajosResult(False, FactorizationCertificate(a, min(bad), spec))
    return HajosResult(True, None)


def _complement_table(spec: AbelianGroupSpec, budget: Budget):
    """Small complemented sets with their complements, and for each large
    complemented set whether some (necessarily small) complement is periodic.

    Returns ``(small, large)`` where ``small`` maps ``S`` to
    ``(S periodic, complements of S)`` and ``large`` maps ``L`` to
    ``(L periodic, some complement periodic, least complement)``.
    """
    n = spec.order
    small: dict[Configuration, tuple[bool, list[Configuration]]] = {}
    large: dict[Configuration, list] = {}
    periodic_cache: dict[Configuration, bool] = {}

    def periodic(x: Configuration) -> bool:
        if x not in periodic_cache:
            periodic_cache[x] = is_periodic(spec, x) is not None
        return periodic_cache[x]

    for s in _normalized_subsets(spec, small=True):
        comps = list(iter_complements(spec, s, budget))
        if not comps:
            continue
        s_periodic = periodic(s)
        small[s] = (s_periodic, comps)
        for c in comps:
            if len(c) * len(c) <= n:
                continue
            entry = large.get(c)
            if entry is None:
                large[c] = [periodic(c), s_periodic, s]
            else:
                entry[1] = entry[1] or s_periodic
                entry[2] = min(entry[2], s)
    return small, large, periodic


def hajos_check(
    spec: AbelianGroupSpec,
    variant: str,
    cap: int = SEMI_CAP,
    budget: Budget | int | None = None,
) -> HajosResult:
    """Exhaustive semi- or demi-Hajós check.

    semi: every complemented proper subset is periodic or has a periodic
    complementer factor. demi: in every factorization some factor has that
    property. All complements of a set are examined, not just the least.
    """
    if variant not in ("semi", "demi"):
        raise ValueError(f"unknown variant {variant!r}; expected 'semi' or 'demi'")
    _check_cap(spec, cap)
    budget = as_budget(budget)
    small, large, periodic = _complement_table(spec, budget)

    def good(x: Configuration) -> bool:
        if len(x) * len(x) <= spec.order:
            s_periodic, comps = small[x]
            return s_periodic or any(periodic(c) for c in comps)
        l_periodic, has_periodic, _ = large[x]
        return l_periodic or has_periodic

    if variant == "semi":
        failures = []
        for s, (_, comps) in small.items():
            if not good(s):
                failures.append(FactorizationCertificate(s, min(comps), spec))
        for lg, (_, _, least) in large.items():
            if not good(lg):
                failures.append(FactorizationCertificate(lg, least, spec))
        if failures:
            return HajosResult(False, min(failures, key=lambda c: (len(c.a), c.a, c.b)))
        return HajosResult(True, None)

    for s, (_, comps) in small.items():
        if good(s):
            continue
        bad = [c for c in comps if not good(c)]
        if bad:
            return HajosResult(False, FactorizationCertificate(s, min(bad), spec))
    return HajosResult(True, None)


# ---------------------------------------------------------------------------
# classification of Hajós groups

HAJOS_FAMILIES = (
    "(p^n,q)", "(p^2,q^2)", "(p^2,q,r)", "(p,q,r,s)", "(p,p)", "(p,3,3)", "(3^2,3)",
    "(p^3,2,2)", "(p^2,2,2,2)", "(p,2^2,2)", "(p,2,2,2,2)", "(p,q,2,2)", "(2^n,2)",
    "(2^2,2^2)",
)  # fmt: skip

_UNBOUNDED = float("inf")


def _parse_family(text: str) -> list[tuple[str | int, float]]:
    slots = []
    for tok in text.strip("()").split(","):
        m = re.fullmatch(r"([a-z]|\d+)(?:\^(\d+|n))?", tok)
        if not m:
            raise ValueError(f"bad family slot {tok!r}")
        base = m.group(1)
        exp = m.group(2) or "1"
        slots.append(
            (base if base.isalpha() else int(base), _UNBOUNDED if exp == "n" else int(exp))
        )
    return slots


def _prime_profile(orders: Sequence[int]) -> dict[int, list[int]]:
    """Per prime, the exponents of the cyclic p-parts, descending."""
    out: dict[int, list[int]] = {}
    for n in orders:
        for p, e in _factorize(n).items():
            out.setdefault(p, []).append(e)
    return {p: sorted(es, reverse=True) for p, es in out.items()}


def _fits(group_exps: list[int], slot_exps: list[float]) -> bool:
    slot_exps = sorted(slot_exps, reverse=True)
    if len(group_exps) > len(slot_exps):
        return False
    return all(g <= s for g, s in zip(group_exps, slot_exps))


def hajos_family(orders: Sequence[int]) -> tuple[str, dict[str, int]] | None:
    """A listed family (and prime assignment) into which the group embeds.

    Prime variables take pairwise distinct values; a variable may coincide
    with a prime written explicitly in the family. Variables not needed for
    the group's primes are left free.
    """
    orders = [int(n) for n in orders]
    if any(n < 1 for n in orders):
        raise ValueError("cyclic orders must be positive")
    profile = _prime_profile([n for n in orders if n > 1])
    primes = sorted(profile)
    for family in HAJOS_FAMILIES:
        slots = _parse_family(family)
        variables = sorted({b for b, _ in slots if isinstance(b, str)})
        for choice in itertools.product([None] + primes, repeat=len(variables)):
            used = [c for c in choice if c is not None]
            if len(used) != len(set(used)):
                continue
            assign = dict(zip(variables, choice))
            per_prime: dict[int, list[float]] = {}
            for base, exp in slots:
                p = assign[base] if isinstance(base, str) else base
                if p is not None:
                    per_prime.setdefault(p, []).append(exp)
            if all(_fits(profile[p], per_prime.get(p, [])) for p in primes):
                return family, {v: p for v, p in assign.items() if p is not None}
    return None


def hajos_classify(query: Sequence[int] | AbelianGroupSpec) -> bool:
    """Does the group of this type have the Hajós property (by the
    classification of Hajós groups)?"""
    orders = query.orders if isinstance(query, AbelianGroupSpec) else query
    return hajos_family(orders) is not None


def verify_family_embedding(orders: Sequence[int], family: str, assignment: dict) -> bool:
    """Re-check a certificate returned by :func:`hajos_family`."""
    if family not in HAJOS_FAMILIES:
        return False
    values = [int(v) for v in assignment.values()]
    if len(values) != len(set(values)) or any(len(_factorize(v)) != 1 or _factorize(v).get(v) != 1 for v in values):
        return False
    profile = _prime_profile([int(n) for n in orders if int(n) > 1])
    per_prime: dict[int, list[float]] = {}
    for base, exp in _parse_family(family):
        p = assignment.get(base) if isinstance(base, str) else base
        if p is not None:
            per_prime.setdefault(int(p), []).append(exp)
    return all(_fits(profile[p], per_prime.get(p, [])) for p in profile)
