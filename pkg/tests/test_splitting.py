import itertools

import pytest

from kaleido import metric
from kaleido.factorization import hajos_check, hajos_classify
from kaleido.group_core import (
    GSpace,
    Partition,
    abelian_group_types,
    cayley_space,
    congruences,
    parse_group_spec,
)
from kaleido.search import CapExceeded
from kaleido.splitting import (
    ORTHOGONAL,
    PARALLEL,
    SplittingChain,
    chain_defects,
    generate_splittable,
    is_splittable,
    maximal_chains,
    relative_position,
)
from kaleido.transversal import find_kaleidoscopic_coloring

from conftest import groups_up_to, oracle_relative_position

Z4 = cayley_space(parse_group_spec("C4"))
PARITY = Partition(((0, 2), (1, 3)))
DELTA4 = Partition.discrete(4)


def test_relative_position_examples():
    assert relative_position([0, 1], DELTA4, PARITY) == "orthogonal"
    assert relative_position([0, 2], DELTA4, PARITY) == "parallel"
    assert relative_position([0, 1, 2], DELTA4, PARITY) == "neither"
    with pytest.raises(ValueError):
        relative_position([0], PARITY, DELTA4)


def test_is_splittable_examples():
    chain = is_splittable(Z4, [0, 1])
    assert [p.blocks for p in chain.chain] == [DELTA4.blocks, PARITY.blocks, ((0, 1, 2, 3),)]
    assert chain.steps == (ORTHOGONAL, PARALLEL)
    assert is_splittable(Z4, [0, 1, 2]) is None
    for space in (Z4, cayley_space(parse_group_spec("C6"))):
        single = is_splittable(space, [0])
        assert len(single.chain) == 2 and single.steps == (ORTHOGONAL,)


def test_generate_examples():
    klein = cayley_space(parse_group_spec("C2xC2"))
    got = generate_splittable(klein)
    assert len(got) == 11
    assert set(got) == {(x,) for x in range(4)} | set(itertools.combinations(range(4), 2)) | {(0, 1, 2, 3)}
    assert set(generate_splittable(Z4)) == {
        (0,), (1,), (2,), (3,), (0, 2), (1, 3), (0, 1), (1, 2), (2, 3), (0, 3), (0, 1, 2, 3),
    }  # fmt: skip
    assert generate_splittable(GSpace(1, ())) == [(0,)]


def _oracle_splittable(space, k, lattice):
    """Depth-first over every strictly increasing chain of the lattice."""
    blocks = [p.blocks for p in lattice]
    top = len(lattice) - 1

    def rec(i):
        if i == top:
            return True
        for j in range(len(lattice)):
            if j == i or len(lattice[j]) >= len(lattice[i]) or not lattice[i].refines(lattice[j]):
                continue
            if oracle_relative_position(k, blocks[i], blocks[j]) != "neither" and rec(j):
                return True
        return False

    return rec(0)


def _spaces():
    out = [cayley_space(s) for s in groups_up_to(8)]
    out += [metric.ultrametric_space(metric.UltrametricSpec(b)) for b in [(2,), (2, 2), (2, 3), (3, 2)]]
    return out


@pytest.mark.parametrize("space", _spaces(), ids=lambda s: s.name)
def test_generate_agrees_with_check_and_oracle(space):
    n = space.point_count
    lattice = congruences(space)
    generated = set(generate_splittable(space))
    for size in range(1, n + 1):
        for k in itertools.combinations(range(n), size):
            chain = is_splittable(space, k, lattice=lattice)
            assert (chain is not None) == (k in generated) == _oracle_splittable(space, k, lattice), k
            if chain is not None:
                assert not chain_defects(space, k, chain)
                # first step gives a non-trivial invariant relation
                assert chain.chain[1] != chain.chain[0]
    for k in generated:
        assert find_kaleidoscopic_coloring(space, k) is not None


@pytest.mark.parametrize("space", _spaces(), ids=lambda s: s.name)
def test_relative_position_matches_oracle(space):
    lattice = congruences(space)
    n = space.point_count
    for e, f in itertools.product(lattice, repeat=2):
        if not e.refines(f):
            continue
        for size in (1, 2, n // 2):
            for k in itertools.islice(itertools.combinations(range(n), size), 20):
                assert relative_position(k, e, f) == oracle_relative_position(k, e.blocks, f.blocks)


def test_chain_defects_catch_tampering():
    chain = is_splittable(Z4, [0, 1])
    bad_step = SplittingChain(chain.chain, (PARALLEL, PARALLEL))
    assert chain_defects(Z4, [0, 1], bad_step)
    skip_bottom = SplittingChain(chain.chain[1:], chain.steps[1:])
    assert chain_defects(Z4, [0, 1], skip_bottom)
    not_invariant = SplittingChain(
        (DELTA4, Partition(((0, 1), (2, 3))), Partition.full(4)), (PARALLEL, PARALLEL)
    )
    assert any("invariant" in d for d in chain_defects(Z4, [0, 1], not_invariant))
    assert SplittingChain.from_json(chain.to_json()) == chain


def test_maximal_chains_cover_lattice():
    klein = cayley_space(parse_group_spec("C2xC2"))
    chains = maximal_chains(congruences(klein))
    assert len(chains) == 3 and all(len(c) == 3 for c in chains)


def test_lattice_cap():
    with pytest.raises(CapExceeded):
        is_splittable(cayley_space(parse_group_spec("C2xC2xC2")), [0], cap=4)


def _kaleidoscopic_sets(space):
    n = space.point_count
    for size in range(1, n + 1):
        if n % size:
            continue
        for k in itertools.combinations(range(n), size):
            if find_kaleidoscopic_coloring(space, k) is not None:
                yield k


@pytest.mark.parametrize("spec", groups_up_to(12), ids=str)
def test_semi_hajos_groups_have_splittable_kaleidoscopic_sets(spec):
    """Groups whose subgroups all pass the semi check (in particular Hajós
    groups and square-free orders): every kaleidoscopic subset splits."""
    space = cayley_space(spec)
    subgroups_ok = all(
        hajos_check(h, "semi").holds
        for h in _subgroup_types(spec)
    )
    if not (subgroups_ok or hajos_classify(spec)):
        pytest.skip("hypothesis not met")
    lattice = congruences(space)
    for k in _kaleidoscopic_sets(space):
        assert is_splittable(space, k, lattice=lattice) is not None, k


def _order_of(spec, x):
    k, y = 1, x
    while y != 0:
        y, k = spec.add(y, x), k + 1
    return k


def _subgroup_types(spec):
    """Isomorphism types of the non-trivial subgroups, matched by their
    element-order profile (which determines a finite abelian group)."""
    out = []
    for p in congruences(cayley_space(spec)):
        h = p.block(0)
        if len(h) < 2:
            continue
        profile = sorted(_order_of(spec, x) for x in h)
        for t in abelian_group_types(len(h)):
            if sorted(_order_of(t, x) for x in range(t.order)) == profile:
                out.append(t)
                break
    return out
