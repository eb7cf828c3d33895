"""
有限预序幺半群测试
"""

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from core.errors import MalformedStructureError
from core.premon import (
    FiniteMonoid, algebraic_preorder, grothendieck_finite, grothendieck_pair_classes, has_cancellation,
    has_infinite_element, ideal_join, ideals_of, is_scale,
)
from core.zmodule import FgAbGroup


def cyclic_group(n):
    return FiniteMonoid.from_function(range(n), lambda a, b: (a + b) % n, 0)


def capped(k):
    """{0, ..., k}，和截断到 k"""
    return FiniteMonoid.from_function(range(k + 1), lambda a, b: min(a + b, k), 0)


def o4_monoid():
    """{0} ⊔ Z/3"""
    labels = ['0', 0, 1, 2]

    def add(a, b):
        if a == '0':
            return b
        if b == '0':
            return a
        return (a + b) % 3
    return FiniteMonoid.from_function(labels, add, '0')


def chain_monoid(length):
    """{0, u1, ..., un}，u_i + u_j = u_max(i,j)"""
    return FiniteMonoid.from_function(range(length + 1), max, 0)


def product(m1, m2):
    labels = [(a, b) for a in m1.labels for b in m2.labels]

    def add(x, y):
        a = m1.labels[m1.add(m1.index(x[0]), m1.index(y[0]))]
        b = m2.labels[m2.add(m2.index(x[1]), m2.index(y[1]))]
        return a, b
    return FiniteMonoid.from_function(labels, add, (m1.labels[m1.neutral], m2.labels[m2.neutral]))


small_monoids = st.one_of(
    st.integers(1, 6).map(cyclic_group),
    st.integers(1, 4).map(capped),
    st.integers(1, 3).map(chain_monoid),
)


def test_axioms_are_checked():
    with pytest.raises(MalformedStructureError):
        FiniteMonoid(('a', 'b'), ((0, 1), (0, 0)), 0)
    with pytest.raises(MalformedStructureError):
        FiniteMonoid.from_function(range(3), lambda a, b: a + b, 0)


def test_o4_preorder_is_not_antisymmetric():
    m = o4_monoid()
    order = algebraic_preorder(m)
    one, two = m.index(1), m.index(2)
    assert order.leq(one, two) and order.leq(two, one)
    assert one != two


def test_o4_is_infinite_and_not_cancellative():
    m = o4_monoid()
    assert has_infinite_element(m)
    assert not has_cancellation(m)
    group, rho = grothendieck_finite(m)
    assert group == FgAbGroup.cyclic(3)
    assert rho['0'] == rho[0]


def test_group_is_its_own_grothendieck_group():
    group, _ = grothendieck_finite(cyclic_group(6))
    assert group == FgAbGroup.cyclic(6)
    assert has_cancellation(cyclic_group(6))


def test_absorbing_monoid_collapses():
    group, _ = grothendieck_finite(capped(3))
    assert group.is_trivial


@settings(max_examples=60, deadline=None)
@given(small_monoids, small_monoids)
def test_grothendieck_group_matches_pair_classes(m1, m2):
    m = product(m1, m2)
    if m.size > 12:
        m = m1
    group, _ = grothendieck_finite(m)
    assert group.order() == grothendieck_pair_classes(m)


@settings(max_examples=40, deadline=None)
@given(small_monoids)
def test_principal_ideals_agree_with_subset_search(m):
    assert ideals_of(m) == ideals_of(m, exhaustive=True)


@pytest.mark.parametrize('monoid, count', [
    (o4_monoid(), 2),
    (chain_monoid(3), 4),
    (capped(3), 2),
    (cyclic_group(4), 1),
])
def test_ideal_counts(monoid, count):
    assert len(ideals_of(monoid)) == count


def test_ideal_join_of_chain():
    m = chain_monoid(2)
    ideals = ideals_of(m)
    assert ideal_join(m, ideals[0], ideals[1]) == ideals[1]
    assert ideal_join(m, ideals[1], ideals[2]) == ideals[2]


def test_whole_positive_part_of_group_is_a_scale():
    m = cyclic_group(3)
    assert is_scale(m, range(m.size))
