"""
有限生成阿贝尔群与 Smith 标准形测试
"""

from itertools import combinations
from math import gcd

import pytest
import sympy
from hypothesis import given, settings
import hypothesis.strategies as st

from core.errors import DimensionMismatchError, MalformedStructureError
from core.zmodule import (
    AbHom, FgAbGroup, IntegerMatrix, cokernel, direct_sum, group_from_orders, is_exact_at, quotient,
    smith_normal_form, solve_linear, subgroup_contains, tensor_zn, tor_zn,
)


@st.composite
def matrices(draw, max_size=6):
    rows = draw(st.integers(min_value=1, max_value=max_size))
    cols = draw(st.integers(min_value=1, max_value=max_size))
    entries = draw(st.lists(st.lists(st.integers(-9, 9), min_size=cols, max_size=cols),
                            min_size=rows, max_size=rows))
    return IntegerMatrix.from_rows(entries, cols=cols)


def minor_gcds(matrix: IntegerMatrix):
    """D_k = 所有 k 阶子式的 gcd（sympy 行列式）"""
    full = sympy.Matrix(matrix.to_list())
    result = []
    for k in range(1, min(matrix.rows, matrix.cols) + 1):
        value = 0
        for rows in combinations(range(matrix.rows), k):
            for cols in combinations(range(matrix.cols), k):
                value = gcd(value, int(full.extract(list(rows), list(cols)).det(method='bareiss')))
        result.append(value)
    return result


@settings(max_examples=500, deadline=None)
@given(matrices())
def test_smith_decomposition_is_exact(matrix):
    u, s, v = smith_normal_form(matrix)
    assert u @ matrix @ v == s
    assert abs(u.determinant()) == 1
    assert abs(v.determinant()) == 1
    diag = [s.entries[i][i] for i in range(min(s.rows, s.cols))]
    assert all(s.entries[i][j] == 0 for i in range(s.rows) for j in range(s.cols) if i != j)
    assert all(d >= 0 for d in diag)
    nonzero = [d for d in diag if d]
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))


@settings(max_examples=150, deadline=None)
@given(matrices(max_size=4))
def test_invariant_factors_match_minor_gcds(matrix):
    _, s, _ = smith_normal_form(matrix)
    diag = [s.entries[i][i] for i in range(min(s.rows, s.cols))]
    expected = []
    previous = 1
    for d in minor_gcds(matrix):
        expected.append(0 if d == 0 else d // previous)
        previous = d if d else previous
    assert diag == expected


def test_cokernel_of_diagonal():
    group = cokernel(IntegerMatrix.diagonal([2, 3, 0]))
    assert group.rank == 1
    assert group.torsion == (6,)


def test_group_from_orders_drops_trivial_factors():
    group = group_from_orders([1, 4, 2])
    assert group == FgAbGroup(0, (2, 4))
    assert group.order() == 8


def test_witness_changes_coordinates():
    group = group_from_orders([2, 3])
    assert group == FgAbGroup(0, (6,))
    image = group.normalize(group.witness.to_canonical.apply((1, 0)))
    assert group.element_order(image) == 2


def test_invariant_factor_chain_is_enforced():
    with pytest.raises(MalformedStructureError):
        FgAbGroup(0, (4, 2))
    with pytest.raises(MalformedStructureError):
        FgAbGroup(0, (1,))


def test_normalize_and_arithmetic():
    group = FgAbGroup(1, (4,))
    assert group.normalize((5, 7)) == (5, 3)
    assert group.add((1, 3), (2, 3)) == (3, 2)
    assert group.neg((1, 1)) == (-1, 3)
    assert group.element_order((0, 2)) == 2
    assert group.element_order((1, 0)) == 0
    with pytest.raises(DimensionMismatchError):
        group.normalize((1,))


def test_elements_enumeration():
    group = FgAbGroup(0, (2, 2))
    assert len(list(group.elements())) == 4
    assert len(list(FgAbGroup.free(1).elements(2))) == 5


def test_solve_linear():
    matrix = IntegerMatrix.from_rows([[2, 0], [0, 3]])
    assert solve_linear(matrix, (4, 9)) == (2, 3)
    assert solve_linear(matrix, (1, 0)) is None


def test_hom_kernel_image_and_inverse():
    z = FgAbGroup.free(1)
    z2 = FgAbGroup.cyclic(2)
    reduction = AbHom.from_images(z, z2, [(1,)])
    assert reduction.is_surjective()
    assert not reduction.is_injective()
    kernel = reduction.kernel_generators()
    assert len(kernel) == 1 and kernel[0] in ((2,), (-2,))

    doubling = AbHom.multiplication(z, 2)
    assert doubling.is_injective() and not doubling.is_surjective()
    with pytest.raises(MalformedStructureError):
        doubling.inverse()

    swap = AbHom.from_images(FgAbGroup.free(2), FgAbGroup.free(2), [(0, 1), (1, 0)])
    assert swap.inverse().compose(swap) == AbHom.identity(FgAbGroup.free(2))


def test_well_defined_homs():
    z2, z4 = FgAbGroup.cyclic(2), FgAbGroup.cyclic(4)
    assert AbHom.from_images(z2, z4, [(2,)]).is_well_defined()
    assert not AbHom.from_images(z2, z4, [(1,)]).is_well_defined()


@pytest.mark.parametrize('f_images, g_images, exact', [
    ([(2,)], [(1,)], True),
    ([(2,)], [(0,)], False),
])
def test_exactness_examples(f_images, g_images, exact):
    z, z2 = FgAbGroup.free(1), FgAbGroup.cyclic(2)
    f = AbHom.from_images(z, z, f_images)
    g = AbHom.from_images(z, z2, g_images)
    assert is_exact_at(f, g) is exact


def test_exact_from_zero():
    z = FgAbGroup.free(1)
    assert is_exact_at(AbHom.zero(FgAbGroup(), z), AbHom.identity(z))


def test_exactness_requires_matching_middle():
    z, z2 = FgAbGroup.free(1), FgAbGroup.cyclic(2)
    with pytest.raises(MalformedStructureError):
        is_exact_at(AbHom.identity(z), AbHom.identity(z2))


def test_quotient_and_subgroup_membership():
    z = FgAbGroup.free(1)
    q, projection = quotient(z, [(6,)])
    assert q == FgAbGroup.cyclic(6)
    assert q.element_order(projection.apply((1,))) == 6
    assert projection.apply((6,)) == (0,)
    assert subgroup_contains(z, [(4,), (6,)], (2,)) is not None
    assert subgroup_contains(z, [(4,), (6,)], (3,)) is None


def test_direct_sum_injections_and_projections():
    groups = [FgAbGroup.cyclic(2), FgAbGroup.cyclic(3)]
    total, injections, projections = direct_sum(groups)
    assert total == FgAbGroup.cyclic(6)
    for inj, proj, g in zip(injections, projections, groups):
        assert proj.compose(inj) == AbHom.identity(g)


def test_tensor_and_tor():
    group = FgAbGroup(1, (4,))
    assert tensor_zn(group, 2)[0] == FgAbGroup(0, (2, 2))
    assert tor_zn(group, 2)[0] == FgAbGroup.cyclic(2)
    assert tor_zn(FgAbGroup.free(2), 3)[0].is_trivial
