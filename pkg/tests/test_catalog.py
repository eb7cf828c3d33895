"""
模型目录测试 - 块、直和、单位化、稳定化与扩张
"""

import pytest

from core.catalog import (
    COUNTABLE_PRESET, EXTENSION_LAYER_PRESET, BlockSpec, ExplicitClass, build_block, build_extension,
    canonical_morphisms, direct_sum, relabel, stabilize, unitize, zero_model,
)
from core.errors import InvalidSpecError, ProvenanceMissingError
from core.latticed import detect_infinite, validate_latticed_module
from core.vmorphism import check_v_exactness, iso_search_latticed
from core.zmodule import AbHom, FgAbGroup


def test_zero_model_is_a_point(coefficients):
    model = zero_model(coefficients)
    assert model.lattice.size == 1
    assert validate_latticed_module(model).valid


def test_block_spec_rejects_unknown_kind(coefficients):
    with pytest.raises(InvalidSpecError):
        BlockSpec('X', 'type_iii', coefficients)
    with pytest.raises(InvalidSpecError):
        BlockSpec('X', 'kirchberg', coefficients, copies=0)


def test_stably_finite_simple_block(coefficients):
    spec = BlockSpec('S', 'stably_finite_simple', coefficients, k0=FgAbGroup.free(2),
                     cone=[(1, 0), (1, 1)], unit=(1, 0))
    model = build_block(spec)
    assert model.scale.kind == 'unit'
    assert not model.layers[model.top].contains_zero()
    assert validate_latticed_module(model).valid
    with pytest.raises(InvalidSpecError):
        build_block(BlockSpec('S', 'stably_finite_simple', coefficients, k0=FgAbGroup.free(1)))


def test_compacts_like_requires_integers(coefficients):
    with pytest.raises(InvalidSpecError):
        build_block(BlockSpec('K', 'compacts_like', coefficients, k0=FgAbGroup(0, (2,))))


def test_o2_stable_chain(coefficients):
    model = build_block(BlockSpec('O2', 'o2_stable', coefficients, shape='chain:3'))
    assert model.lattice.size == 4
    assert model.purely_infinite == frozenset({'O21', 'O22', 'O23'})
    assert validate_latticed_module(model).valid
    with pytest.raises(InvalidSpecError):
        build_block(BlockSpec('O2', 'o2_stable', coefficients, shape='chain:0'))
    with pytest.raises(InvalidSpecError):
        build_block(BlockSpec('O2', 'o2_stable', coefficients, shape='diamond'))
    with pytest.raises(InvalidSpecError):
        build_block(BlockSpec('O2', 'o2_stable', coefficients, k0=FgAbGroup.free(1)))


def test_copies_are_relabelled_direct_sums(coefficients):
    model = build_block(BlockSpec('K', 'compacts_like', coefficients, copies=2), truncated=True)
    assert model.name == 'K'
    assert model.lattice.size == 4
    assert COUNTABLE_PRESET in model.presets


def test_direct_sum_lattice_is_product(compacts, o2_point, o4):
    total = direct_sum(compacts, o2_point)
    assert total.lattice.size == 4
    assert total.scale.kind == 'full'
    assert detect_infinite(total)['infinite']

    units = direct_sum(o4, relabel(o4, {o4.top: 'P'}))
    assert units.scale.kind == 'unit'


def test_direct_sum_checks_coefficients(compacts, small_coefficients):
    other = build_block(BlockSpec('K', 'compacts_like', small_coefficients))
    with pytest.raises(InvalidSpecError):
        direct_sum(compacts, other)


def test_unitize_adds_a_top(compacts, ktilde):
    assert ktilde.lattice.size == compacts.lattice.size + 1
    assert ktilde.top == f"{compacts.top}~"
    assert ktilde.scale.unit.ideal == ktilde.top
    with pytest.raises(InvalidSpecError):
        unitize(ktilde)


def test_stabilize_forgets_the_unit(o4):
    stable = stabilize(o4)
    assert stable.scale.kind == 'full'
    assert stable.layers == o4.layers
    assert stable.name == 'O4(x)K'


def test_relabel_rejects_collisions(ktilde):
    with pytest.raises(InvalidSpecError):
        relabel(ktilde, {ktilde.top: 'K'})


def test_split_extension_of_compacts(compacts, complex_numbers, ktilde):
    extension = build_extension(compacts, complex_numbers, 'split', name='E1')
    assert extension.top == 'E1'
    assert EXTENSION_LAYER_PRESET in extension.presets
    assert validate_latticed_module(extension).valid

    iota, pi = canonical_morphisms(extension)
    report = check_v_exactness(iota, pi)
    assert report.valid, report.errors

    result = iso_search_latticed(extension, ktilde)
    assert result.found, result.reason


def test_extension_preconditions(compacts, complex_numbers, ktilde):
    with pytest.raises(InvalidSpecError):
        build_extension(ktilde, complex_numbers)
    with pytest.raises(InvalidSpecError):
        build_extension(compacts, stabilize(complex_numbers))
    with pytest.raises(InvalidSpecError):
        build_extension(compacts, complex_numbers, name=compacts.top)
    with pytest.raises(InvalidSpecError):
        build_extension(compacts, complex_numbers, 'nonsplit')


def test_explicit_class_must_be_exact(compacts, complex_numbers):
    z, trivial = FgAbGroup.free(1), FgAbGroup()
    broken = ExplicitClass(
        k0=z, k1=trivial,
        iota0=AbHom.identity(z), iota1=AbHom.zero(trivial, trivial),
        pi0=AbHom.zero(z, z), pi1=AbHom.zero(trivial, trivial),
    )
    with pytest.raises(InvalidSpecError):
        build_extension(compacts, complex_numbers, broken)


def test_canonical_morphisms_need_provenance(ktilde):
    with pytest.raises(ProvenanceMissingError):
        canonical_morphisms(ktilde)
