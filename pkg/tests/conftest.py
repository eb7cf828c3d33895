"""
测试公共夹具
"""

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from core.catalog import BlockSpec, build_block, direct_sum, unitize  # noqa: E402
from core.lambda_module import CoefficientSet  # noqa: E402
from core.zmodule import FgAbGroup  # noqa: E402

CORPUS_DIR = ROOT / 'corpus'
FIXTURE_DIR = CORPUS_DIR / 'fixtures'


@pytest.fixture(scope='session')
def coefficients():
    return CoefficientSet((2, 3, 4, 6))


@pytest.fixture(scope='session')
def small_coefficients():
    return CoefficientSet((2,))


@pytest.fixture(scope='session')
def o4(coefficients):
    return build_block(BlockSpec('O4', 'kirchberg', coefficients, k0=FgAbGroup(0, (3,)), unit=(1,)))


@pytest.fixture(scope='session')
def compacts(coefficients):
    return build_block(BlockSpec('K', 'compacts_like', coefficients))


@pytest.fixture(scope='session')
def o2_point(coefficients):
    return build_block(BlockSpec('O2', 'o2_stable', coefficients))


@pytest.fixture(scope='session')
def ktilde(compacts):
    return unitize(compacts, name='Ktilde')


@pytest.fixture(scope='session')
def kplus_o2_tilde(compacts, o2_point):
    return unitize(direct_sum(compacts, o2_point), name='KplusO2tilde')


@pytest.fixture(scope='session')
def complex_numbers(coefficients):
    return build_block(BlockSpec('C', 'compacts_like', coefficients, unit=(1,)))


@pytest.fixture(scope='session')
def corpus_files():
    return [str(p) for p in sorted(CORPUS_DIR.glob('*.lkt'))]
