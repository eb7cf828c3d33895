"""
V̲-态射与同构搜索测试
"""

from dataclasses import replace

import pytest

from core.catalog import BlockSpec, build_block, stabilize
from core.errors import BudgetExceededError, DimensionMismatchError, InvalidSpecError, NonComposableError
from core.lambda_module import LambdaMorphism, standard_lambda_morphism
from core.latticed import validate_latticed_module
from core.semilinear import LinearComponent, SemilinearSet
from core.vmorphism import VMorphism, check_v_morphism, iso_search_latticed
from core.zmodule import AbHom, FgAbGroup


def _scaled_endomorphism(model, n):
    top = model.fiber(model.top)
    k0, k1 = top.group(0), top.group(1)
    fibers = {model.bottom: LambdaMorphism.identity(model.fiber(model.bottom)),
              model.top: standard_lambda_morphism(AbHom.multiplication(k0, n), AbHom.multiplication(k1, n),
                                                  top, top)}
    return VMorphism(model, model, {i: i for i in model.lattice.elements}, fibers)


@pytest.mark.parametrize('fixture', ['o4', 'ktilde', 'kplus_o2_tilde'])
def test_identity_is_a_scaled_morphism(request, fixture):
    model = request.getfixturevalue(fixture)
    identity = VMorphism.identity(model)
    assert check_v_morphism(identity).valid
    x = model.layer_generators(model.top)[0]
    assert identity.apply(x) == x


def test_doubling_on_compacts(compacts):
    double = _scaled_endomorphism(compacts, 2)
    assert check_v_morphism(double).valid
    x = compacts.velem(compacts.top, (3,))
    assert double.apply(x) == compacts.velem(compacts.top, (6,))


def test_negation_leaves_the_layer(compacts):
    report = check_v_morphism(_scaled_endomorphism(compacts, -1))
    assert not report.valid
    assert any(name.startswith('layer-image') for name in report.errors)


def test_compose_and_inverse(ktilde):
    identity = VMorphism.identity(ktilde)
    assert identity.compose(identity).lattice_map == identity.lattice_map
    back = identity.inverse()
    assert back.fiber_maps == identity.fiber_maps


def test_compose_requires_matching_models(o4, ktilde):
    with pytest.raises(NonComposableError):
        VMorphism.identity(o4).compose(VMorphism.identity(ktilde))


def test_missing_fiber_map_is_rejected(o4):
    with pytest.raises(DimensionMismatchError):
        VMorphism(o4, o4, {i: i for i in o4.lattice.elements}, {})
    with pytest.raises(DimensionMismatchError):
        VMorphism(o4, o4, {o4.bottom: o4.bottom}, {})


def test_model_is_isomorphic_to_itself(o4, ktilde):
    for model in (o4, ktilde):
        result = iso_search_latticed(model, model)
        assert result.found
        assert result.reason == 'isomorphic'
        assert result.to_dict()['witness']['lattice_map'] == {i: i for i in sorted(model.lattice.elements)}


def test_lattice_size_distinguishes(ktilde, kplus_o2_tilde):
    result = iso_search_latticed(ktilde, kplus_o2_tilde)
    assert not result.found
    assert result.reason == 'lattice sizes 3 vs 5'


def test_stabilized_kirchberg_algebras(coefficients, o2_point):
    o2 = build_block(BlockSpec('O2', 'kirchberg', coefficients, unit=()))
    oinf = build_block(BlockSpec('Oinf', 'kirchberg', coefficients, k0=FgAbGroup.free(1),
                                 unit=(1,)))
    result = iso_search_latticed(stabilize(o2), stabilize(oinf))
    assert not result.found
    assert result.reason == 'layer shapes differ'
    assert iso_search_latticed(stabilize(o2), o2_point).found


def test_unit_must_be_preserved(coefficients):
    first = build_block(BlockSpec('S', 'compacts_like', coefficients, unit=(1,)))
    second = build_block(BlockSpec('S', 'compacts_like', coefficients, unit=(2,)))
    assert iso_search_latticed(first, second, mode='lambda').found
    assert not iso_search_latticed(first, second, mode='latticed').found


def test_search_arguments(o4, ktilde):
    with pytest.raises(InvalidSpecError):
        iso_search_latticed(o4, o4, mode='exact')
    with pytest.raises(BudgetExceededError):
        iso_search_latticed(ktilde, ktilde, budget=1)


def _with_top_layer(model, name, layer):
    return replace(model, name=name, layers={**model.layers, model.top: layer})


def test_layers_differing_past_small_multiples(compacts):
    z = compacts.k0(compacts.top)
    ray = _with_top_layer(compacts, 'Ray', SemilinearSet.linear(z, (4,), [(1,)]))
    semigroup = _with_top_layer(compacts, 'Semigroup', SemilinearSet(
        z, tuple(LinearComponent((g,), ((4,), (5,), (6,))) for g in (4, 5, 6))))
    assert validate_latticed_module(ray).valid
    assert validate_latticed_module(semigroup).valid

    result = iso_search_latticed(ray, semigroup)
    assert not result.found
    assert result.reason == 'no fiber isomorphism compatible with connecting maps and layers'

    fibers = {i: LambdaMorphism.identity(ray.fiber(i)) for i in ray.lattice.elements}
    report = check_v_morphism(VMorphism(ray, semigroup, {i: i for i in ray.lattice.elements}, fibers))
    assert f"layer-image[{ray.top}]" in report.errors
    assert check_v_morphism(VMorphism(semigroup, ray, {i: i for i in ray.lattice.elements}, fibers)).valid


def test_infinite_elements_are_compared_from_layer_data(o2_point):
    flagged = replace(o2_point, name='Flagged', purely_infinite=frozenset())
    result = iso_search_latticed(o2_point, flagged)
    assert result.found
