"""
截断Λ-模测试
"""

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from core.errors import BudgetExceededError, InvalidSpecError, MalformedStructureError
from core.lambda_module import (
    CoefficientSet, LambdaMorphism, beta_variant_search, check_lambda_linear, find_beta_variant_pair,
    graded_iso_search, lambda_direct_sum, lambda_iso_search, standard_lambda_module,
    standard_lambda_morphism, twist_beta, validate_lambda_module, zero_lambda_module,
)
from core.search import SearchBudget
from core.zmodule import AbHom, FgAbGroup, IntegerMatrix

N = CoefficientSet((2, 3, 4, 6))


@st.composite
def small_groups(draw):
    """秩 ≤ 2、挠部分阶 ≤ 64 的群"""
    rank = draw(st.integers(0, 2))
    torsion = []
    order = 1
    for _ in range(draw(st.integers(0, 3))):
        base = torsion[-1] if torsion else 1
        choices = [base * k for k in (1, 2, 3, 4) if base * k >= 2 and order * base * k <= 64]
        if not choices:
            break
        d = draw(st.sampled_from(choices))
        torsion.append(d)
        order *= d
    return FgAbGroup(rank, tuple(torsion))


def fixture_pair():
    coefficients = CoefficientSet((2, 4))
    g0 = FgAbGroup(0, (2, 4))
    base = standard_lambda_module(g0, FgAbGroup(), coefficients)
    gamma = AbHom(g0, g0, IntegerMatrix.from_rows([[1, 0], [2, 1]]))
    return base, twist_beta(base, (1, 4), gamma)


def test_coefficient_set_must_be_divisor_closed():
    with pytest.raises(InvalidSpecError):
        CoefficientSet((4,))
    with pytest.raises(InvalidSpecError):
        CoefficientSet(())
    assert CoefficientSet.parse("6,2,3").moduli == (2, 3, 6)
    assert (2, 2) in CoefficientSet((2, 4)).pairs()


@settings(max_examples=100, deadline=None)
@given(small_groups(), small_groups())
def test_standard_module_passes_both_exactness_families(g0, g1):
    report = validate_lambda_module(standard_lambda_module(g0, g1, N))
    assert report.valid, report.errors


def test_standard_module_groups():
    module = standard_lambda_module(FgAbGroup.free(1), FgAbGroup(), N)
    assert module.group(0, 2) == FgAbGroup.cyclic(2)
    assert module.group(1, 3).is_trivial
    torsion = standard_lambda_module(FgAbGroup.cyclic(4), FgAbGroup(), N)
    # K1(Z/4; Z/2) = Tor(Z/4, Z/2)
    assert torsion.group(1, 2) == FgAbGroup.cyclic(2)
    assert torsion.group(0, 6) == FgAbGroup.cyclic(2)


def test_zero_module_is_trivial():
    assert zero_lambda_module(N).is_trivial()


def test_missing_map_is_malformed():
    module = standard_lambda_module(FgAbGroup.cyclic(2), FgAbGroup(), N)
    beta = dict(module.beta)
    del beta[(0, 2)]
    broken = type(module)(module.coefficients, module.groups, module.rho, beta,
                          module.kappa_up, module.kappa_down)
    with pytest.raises(MalformedStructureError):
        validate_lambda_module(broken)


def test_identity_is_lambda_linear():
    module = standard_lambda_module(FgAbGroup(1, (2,)), FgAbGroup.cyclic(3), N)
    assert check_lambda_linear(LambdaMorphism.identity(module))


def test_standard_morphism_of_multiplication_is_lambda_linear():
    z = FgAbGroup.free(1)
    module = standard_lambda_module(z, FgAbGroup(), N)
    phi = standard_lambda_morphism(AbHom.multiplication(z, 3), AbHom.zero(FgAbGroup(), FgAbGroup()),
                                   module, module)
    assert check_lambda_linear(phi)
    assert phi.component(0, 3).is_zero()


def test_direct_sum_projections_split_injections():
    first = standard_lambda_module(FgAbGroup.cyclic(2), FgAbGroup(), N)
    second = standard_lambda_module(FgAbGroup.free(1), FgAbGroup.cyclic(3), N)
    total, injections, projections = lambda_direct_sum([first, second])
    assert validate_lambda_module(total).valid
    for inj, proj, part in zip(injections, projections, (first, second)):
        assert check_lambda_linear(inj) and check_lambda_linear(proj)
        identity = LambdaMorphism.identity(part)
        assert proj.compose(inj).components == identity.components


def test_graded_and_lambda_search_agree_on_equal_modules():
    module = standard_lambda_module(FgAbGroup(0, (2, 4)), FgAbGroup.cyclic(2), CoefficientSet((2, 4)))
    assert graded_iso_search(module, module) is not None
    assert lambda_iso_search(module, module) is not None


def test_twisted_bockstein_is_graded_but_not_lambda_isomorphic():
    base, twisted = fixture_pair()
    assert validate_lambda_module(twisted).valid
    assert graded_iso_search(base, twisted) is not None
    assert lambda_iso_search(base, twisted) is None


def test_twist_requires_automorphism():
    base, _ = fixture_pair()
    g0 = base.group(0)
    with pytest.raises(MalformedStructureError):
        twist_beta(base, (1, 4), AbHom.zero(g0, g0))


def test_beta_variant_search_finds_two_classes():
    variants = beta_variant_search(FgAbGroup(0, (2, 4)), FgAbGroup(), CoefficientSet((2, 4)))
    assert len(variants) >= 2
    assert lambda_iso_search(variants[0], variants[1]) is None


def test_variant_search_finds_classes_differing_only_in_kappa():
    # (Z/2, Z/2)：每个槽位的 (ρ, β) 在规范变换下唯一，新类只能来自 κ
    g = FgAbGroup.cyclic(2)
    coefficients = CoefficientSet((2, 4))
    standard = standard_lambda_module(g, g, coefficients)
    variants = beta_variant_search(g, g, coefficients)
    assert len(variants) == 4
    assert variants[0] == standard
    for variant in variants[1:]:
        assert variant.rho == standard.rho
        assert variant.beta == standard.beta
        assert variant.kappa_up != standard.kappa_up
        assert validate_lambda_module(variant).valid
        assert graded_iso_search(standard, variant) is not None
        assert lambda_iso_search(standard, variant) is None


def test_beta_variant_search_rejects_infinite_groups():
    with pytest.raises(InvalidSpecError):
        beta_variant_search(FgAbGroup.free(1), FgAbGroup(), N)


def test_search_budget_is_reported():
    module = standard_lambda_module(FgAbGroup(0, (2, 4)), FgAbGroup.cyclic(2), CoefficientSet((2, 4)))
    with pytest.raises(BudgetExceededError):
        lambda_iso_search(module, module, budget=SearchBudget(1, 'tiny'))


def test_beta_pair_ladder():
    ladder = [(FgAbGroup(0, (2, 4)), FgAbGroup())]
    result = find_beta_variant_pair(CoefficientSet((2, 4)), ladder=ladder)
    assert result.found
    assert result.g0 == FgAbGroup(0, (2, 4))
    assert graded_iso_search(result.first, result.second) is not None
    assert lambda_iso_search(result.first, result.second) is None

    exhausted = find_beta_variant_pair(CoefficientSet((2, 4)), budget=1, ladder=ladder)
    assert not exhausted.found
    assert exhausted.attempts == [{'carrier': '(Z/2 + Z/4, 0, {2,4})', 'outcome': 'budget exceeded'}]
