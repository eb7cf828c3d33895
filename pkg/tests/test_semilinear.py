"""
半线性集测试
"""

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from core.errors import DimensionMismatchError, InvalidSpecError
from core.semilinear import LinearComponent, SemilinearSet
from core.zmodule import AbHom, FgAbGroup

Z2 = FgAbGroup.free(2)
vectors = st.tuples(st.integers(-3, 3), st.integers(-3, 3))


@settings(max_examples=80, deadline=None)
@given(vectors, st.lists(vectors, min_size=1, max_size=3), st.lists(st.integers(0, 4), min_size=3, max_size=3))
def test_combinations_are_members_with_witness(offset, periods, coefficients):
    layer = SemilinearSet.linear(Z2, offset, periods)
    point = list(offset)
    for k, p in zip(coefficients, periods):
        point = [a + k * b for a, b in zip(point, p)]
    witness = layer.member(point)
    assert witness is not None
    assert layer.evaluate(witness) == tuple(point)


def test_non_orthogonal_periods_use_solver():
    layer = SemilinearSet.linear(Z2, (0, 0), [(2, 1), (1, 2)])
    assert layer.contains((3, 3))
    assert layer.contains((4, 2))
    assert not layer.contains((1, 1))
    assert not layer.contains((-1, 0))


def test_whole_group_and_torsion():
    z3 = FgAbGroup.cyclic(3)
    whole = SemilinearSet.whole(z3)
    assert all(whole.contains((k,)) for k in range(3))
    assert whole.is_bounded()
    assert whole.elements() == [(0,), (1,), (2,)]
    assert SemilinearSet.whole(FgAbGroup.free(1)).contains((-7,))
    assert not SemilinearSet.whole(FgAbGroup.free(1)).is_bounded()


def test_strictly_positive_ray():
    z = FgAbGroup.free(1)
    ray = SemilinearSet.linear(z, (1,), [(1,)])
    assert ray.contains((5,))
    assert not ray.contains_zero()
    assert ray.elements(3) == [(1,), (2,), (3,), (4,)]
    with pytest.raises(InvalidSpecError):
        ray.elements(-1)


def test_components_are_normalized():
    z4 = FgAbGroup.cyclic(4)
    layer = SemilinearSet(z4, (LinearComponent((5,), ((0,), (6,))), LinearComponent((1,), ((2,),))))
    assert layer.components == (LinearComponent((1,), ((2,),)),)


def test_pushforward_and_union():
    z = FgAbGroup.free(1)
    ray = SemilinearSet.linear(z, (1,), [(1,)])
    mod3 = AbHom.from_images(z, FgAbGroup.cyclic(3), [(1,)])
    image = ray.pushforward(mod3)
    assert image.is_bounded()
    assert image.contains_zero()
    both = ray.union(SemilinearSet.singleton(z, (0,)))
    assert both.contains_zero()
    with pytest.raises(DimensionMismatchError):
        ray.union(image)


def test_minkowski_sum():
    z = FgAbGroup.free(1)
    evens = SemilinearSet.linear(z, (0,), [(2,)])
    odd = SemilinearSet.singleton(z, (1,))
    total = evens.minkowski_sum(odd)
    assert total.contains((5,))
    assert not total.contains((4,))


def test_intersection_witness():
    evens = SemilinearSet.linear(Z2, (0, 0), [(2, 0), (0, 1)])
    shifted = SemilinearSet.linear(Z2, (3, 0), [(1, 0)])
    common = shifted.intersection_witness(evens)
    assert common is not None
    assert evens.contains(common) and shifted.contains(common)
    odd = SemilinearSet.linear(Z2, (1, 0), [(2, 0)])
    assert evens.intersection_witness(odd) is None


def test_collision_under_projection():
    layer = SemilinearSet.linear(Z2, (0, 1), [(1, 0), (-1, 0), (0, 1)])
    first = AbHom.from_images(Z2, FgAbGroup.free(1), [(0,), (1,)])
    pair = layer.collision(first)
    assert pair is not None
    a, b = pair
    assert a != b and first.apply(a) == first.apply(b)
    injective = SemilinearSet.linear(FgAbGroup.free(1), (1,), [(1,)])
    assert injective.collision(AbHom.identity(FgAbGroup.free(1))) is None


def _numerical_semigroup(z):
    return SemilinearSet(z, tuple(LinearComponent((g,), ((4,), (5,), (6,))) for g in (4, 5, 6)))


def test_subset_finds_gap_beyond_small_multiples():
    z = FgAbGroup.free(1)
    ray = SemilinearSet.linear(z, (4,), [(1,)])
    semigroup = _numerical_semigroup(z)
    assert semigroup.is_subset(ray)
    gap = ray.subset_witness(semigroup)
    assert gap is not None
    assert ray.contains(gap) and not semigroup.contains(gap)
    assert not ray.is_subset(semigroup)


def test_subset_with_torsion_and_bounded_parts():
    mixed = FgAbGroup(1, (2,))
    everything = SemilinearSet.linear(mixed, (1, 0), [(1, 0), (0, 1)])
    even_part = SemilinearSet.linear(mixed, (2, 1), [(2, 0)])
    assert even_part.is_subset(everything)
    assert everything.subset_witness(even_part) is not None
    z4 = FgAbGroup.cyclic(4)
    assert SemilinearSet.linear(z4, (2,), []).is_subset(SemilinearSet.linear(z4, (0,), [(2,)]))
    assert SemilinearSet.whole(z4).subset_witness(SemilinearSet.linear(z4, (0,), [(2,)])) in {(1,), (3,)}
    assert SemilinearSet.empty(z4).is_subset(SemilinearSet.empty(z4))
