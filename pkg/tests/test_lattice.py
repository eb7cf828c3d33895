"""
有限格测试
"""

import pytest

from core.errors import InvalidSpecError, MalformedStructureError
from core.lattice import BOTTOM, FiniteLattice


def diamond():
    return FiniteLattice.from_relations(['0', 'a', 'b', '1'], [('0', 'a'), ('0', 'b'), ('a', '1'), ('b', '1')])


def test_chain_queries():
    chain = FiniteLattice.chain([BOTTOM, 'I', 'J'])
    assert chain.bottom == BOTTOM and chain.top == 'J'
    assert chain.join('I', BOTTOM) == 'I'
    assert chain.meet('I', 'J') == 'I'
    assert chain.down_set('I') == [BOTTOM, 'I']
    assert chain.topological_order() == [BOTTOM, 'I', 'J']


def test_diamond_join_and_meet():
    lattice = diamond()
    assert lattice.join('a', 'b') == '1'
    assert lattice.meet('a', 'b') == '0'
    assert len(lattice.comparable_pairs()) == 9


def test_non_lattice_is_rejected():
    with pytest.raises(MalformedStructureError):
        FiniteLattice.from_relations(['a', 'b'], [])
    with pytest.raises(MalformedStructureError):
        FiniteLattice.from_relations(['a', 'b'], [('a', 'b'), ('b', 'a')])
    with pytest.raises(MalformedStructureError):
        FiniteLattice.chain(['a', 'a'])


def test_product_of_two_chains_is_a_diamond():
    first = FiniteLattice.chain([BOTTOM, 'K'])
    second = FiniteLattice.chain([BOTTOM, 'O2'])
    product, names = first.product(second)
    assert product.size == 4
    assert names[('K', 'O2')] == 'K+O2'
    assert product.find_isomorphism(diamond()) is not None


def test_with_top_and_restrict():
    lattice = diamond().with_top('T')
    assert lattice.top == 'T'
    assert lattice.restrict('a').elements == ('0', 'a')
    with pytest.raises(InvalidSpecError):
        lattice.with_top('a')


def test_isomorphisms_prefer_identity_and_respect_order():
    lattice = diamond()
    first = next(lattice.iter_isomorphisms(lattice))
    assert all(k == v for k, v in first.items())
    assert len(list(lattice.iter_isomorphisms(lattice))) == 2
    assert FiniteLattice.chain(['0', 'x', 'y', 'z']).find_isomorphism(lattice) is None


def test_relabel_and_monotone():
    chain = FiniteLattice.chain([BOTTOM, 'I'])
    renamed = chain.relabel({'I': 'J'})
    assert renamed.top == 'J'
    assert chain.is_monotone({BOTTOM: BOTTOM, 'I': 'J'}, renamed)


def test_to_dict_lists_covers():
    data = FiniteLattice.chain([BOTTOM, 'I', 'J']).to_dict()
    assert data['covers'] == [[BOTTOM, 'I'], ['I', 'J']]
