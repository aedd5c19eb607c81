import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.combinatorics import Permutation, PermutationGroup

from kaleido import metric
from kaleido.group_core import (
    AbelianGroupSpec,
    GSpace,
    Partition,
    abelian_group_types,
    as_config,
    cayley_space,
    congruences,
    group_order,
    parse_group_spec,
    set_orbit,
)
from kaleido.search import CapExceeded

from conftest import add, groups_up_to, oracle_set_partitions


def test_parse_group_spec():
    spec = parse_group_spec("C4xC2")
    assert spec.orders == (4, 2) and spec.order == 8
    assert parse_group_spec("C6").order == 6
    assert str(parse_group_spec(" C3 x C5 ")) == "C3xC5"
    for bad in ("C1", "C4x", "Z4", "", "C0xC2"):
        with pytest.raises(ValueError):
            parse_group_spec(bad)


def test_residue_round_trip():
    spec = AbelianGroupSpec((4, 3, 2))
    for i in range(spec.order):
        assert spec.index(spec.residues(i)) == i
        assert all(0 <= r < m for r, m in zip(spec.residues(i), spec.orders))


def test_add_table_matches_residue_arithmetic():
    for spec in groups_up_to(12):
        for x in range(spec.order):
            assert spec.add(x, spec.neg(x)) == 0
            for y in range(spec.order):
                assert spec.add(x, y) == add(spec, x, y)


def test_abelian_group_types_counts():
    # number of abelian groups of order n
    expected = {1: 1, 2: 1, 4: 2, 8: 3, 12: 2, 16: 5, 32: 7, 36: 4, 72: 6}
    for n, count in expected.items():
        if n == 1:
            continue
        types = abelian_group_types(n)
        assert len(types) == count
        assert all(t.order == n for t in types)


def test_cayley_space_generators():
    assert cayley_space(parse_group_spec("C4")).generators == ((1, 2, 3, 0),)
    klein = cayley_space(parse_group_spec("C2xC2"))
    assert klein.point_count == 4 and len(klein.generators) == 2
    for g in klein.generators:
        perm = Permutation(list(g))
        assert perm.cycle_structure == {2: 2}
    c6 = cayley_space(parse_group_spec("C6"))
    assert Permutation(list(c6.generators[0])).cycle_structure == {6: 1}


def test_gspace_validation():
    with pytest.raises(ValueError):
        GSpace(3, ((0, 1, 1),))
    with pytest.raises(ValueError):
        GSpace(4, ((1, 0, 2, 3),))  # not transitive
    with pytest.raises(ValueError):
        GSpace(0, ())
    one = GSpace(1, ())
    assert congruences(one) == [Partition.full(1)]


def test_gspace_json_round_trip(tmp_path):
    space = metric.ultrametric_space(metric.UltrametricSpec((2, 3)))
    path = tmp_path / "space.json"
    import json

    path.write_text(json.dumps(space.to_json()))
    assert GSpace.load(path) == space
    with pytest.raises(ValueError):
        GSpace.from_json({"generators": []})


def test_set_orbit_examples():
    z4 = cayley_space(parse_group_spec("C4"))
    assert set_orbit(z4, [0, 1]) == [(0, 1), (0, 3), (1, 2), (2, 3)]
    assert set_orbit(z4, [0, 1, 2, 3]) == [(0, 1, 2, 3)]
    assert set_orbit(z4, [0]) == [(0,), (1,), (2,), (3,)]
    with pytest.raises(ValueError):
        set_orbit(z4, [])


def test_as_config_rejects_bad_points():
    with pytest.raises(ValueError):
        as_config([0, 0])
    with pytest.raises(ValueError):
        as_config([4], 4)
    assert as_config([3, 1]) == (1, 3)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(groups_up_to(16)), st.data())
def test_set_orbit_is_closed_family(spec, data):
    space = cayley_space(spec)
    a = data.draw(st.sets(st.integers(0, spec.order - 1), min_size=1))
    fam = set_orbit(space, a)
    assert len(fam) == len(set(fam))
    assert all(len(e) == len(a) for e in fam)
    for g in space.generators:
        assert all(space.image(g, e) in set(fam) for e in fam)
    # regular action: the family is exactly the translates
    assert set(fam) == {tuple(sorted(add(spec, x, g) for x in a)) for g in range(spec.order)}


def test_congruence_examples():
    z4 = cayley_space(parse_group_spec("C4"))
    lat = congruences(z4)
    assert [p.blocks for p in lat] == [((0,), (1,), (2,), (3,)), ((0, 2), (1, 3)), ((0, 1, 2, 3),)]
    assert len(congruences(cayley_space(parse_group_spec("C2xC2")))) == 5


def _brute_congruences(space):
    out = set()
    for blocks in oracle_set_partitions(range(space.point_count)):
        p = Partition(tuple(tuple(b) for b in blocks))
        if p.is_invariant(space):
            out.add(p)
    return out


@pytest.mark.parametrize(
    "space",
    [cayley_space(s) for s in groups_up_to(8)]
    + [metric.ultrametric_space(metric.UltrametricSpec(b)) for b in [(2,), (2, 2), (3, 2), (2, 3)]],
    ids=lambda s: s.name,
)
def test_congruences_match_brute_force(space):
    lat = congruences(space)
    assert set(lat) == _brute_congruences(space)
    assert lat[0] == Partition.discrete(space.point_count)
    assert lat[-1] == Partition.full(space.point_count)
    got = set(lat)
    for e, f in itertools.combinations(lat, 2):
        assert e.join(f) in got and e.meet(f) in got


def test_regular_congruences_are_subgroup_cosets():
    # in a regular abelian action, invariant partitions are coset partitions
    for spec in groups_up_to(12):
        space = cayley_space(spec)
        for p in congruences(space):
            h = set(p.block(0))
            assert all(add(spec, x, y) in h for x in h for y in h)
            for b in p.blocks:
                assert {add(spec, b[0], x) for x in h} == set(b)


def _sympy_order(space):
    gens = [Permutation(list(g)) for g in space.generators] or [Permutation(space.point_count - 1)]
    return PermutationGroup(gens).order()


@pytest.mark.parametrize("branching", [(2,), (2, 2), (2, 3), (3, 2), (2, 2, 2), (3, 3)])
def test_group_order_tree_matches_sympy(branching):
    space = metric.ultrametric_space(metric.UltrametricSpec(branching))
    order, stab = group_order(space)
    assert order == _sympy_order(space)
    assert order == space.point_count * stab


def test_group_order_examples():
    assert group_order(cayley_space(parse_group_spec("C4"))) == (4, 1)
    assert group_order(cayley_space(parse_group_spec("C2xC2"))) == (4, 1)
    assert group_order(metric.ultrametric_space(metric.UltrametricSpec((2, 2)))) == (8, 2)
    assert group_order(metric.ultrametric_space(metric.UltrametricSpec((2, 3))))[0] == 72
    with pytest.raises(CapExceeded):
        group_order(metric.ultrametric_space(metric.UltrametricSpec((2, 2, 2))), cap=50)


def test_partition_operations():
    p = Partition(((0, 2), (1, 3)))
    q = Partition(((0, 1), (2, 3)))
    assert p.join(q) == Partition.full(4)
    assert p.meet(q) == Partition.discrete(4)
    assert Partition.discrete(4).refines(p) and not p.refines(q)
    assert p.saturate([0]) == (0, 2)
    assert Partition.from_labels([5, 7, 5, 7]) == p
    with pytest.raises(ValueError):
        Partition(((0, 1), (1, 2)))
