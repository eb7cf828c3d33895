"""
语料级验收测试 - Gr 恢复、理想对应、区分、正合性、不变量迁移、尺度吸收与确定性
"""

from pathlib import Path

import hypothesis.strategies as st
import pytest
from hypothesis import HealthCheck, given, settings

from core.catalog import canonical_morphisms, relabel
from core.lambda_module import CoefficientSet
from core.latticed import (
    detect_cancellation, detect_infinite, finitize_v, grothendieck_recover, ideals_of_latticed,
    scale_absorption,
)
from core.premon import grothendieck_finite, ideals_of
from core.reporter import EXIT_OK, Reporter
from core.vmorphism import check_v_exactness, iso_search_latticed
from program import ProgramExecutor

UNITAL = ['O4', 'Ktilde', 'KplusO2tilde', 'E1', 'E2', 'E2x']
EXTENSIONS = ['E1', 'E2', 'E2x']
TRANSPORTED = ['O4', 'Ktilde', 'E1', 'O2K', 'OinfK', 'O2chain']
FIXTURE_DIR = Path(__file__).resolve().parent.parent / 'corpus' / 'fixtures'


@pytest.fixture(scope='module')
def executor():
    return ProgramExecutor(CoefficientSet((2, 3, 4, 6)))


@pytest.fixture(scope='module')
def context(executor, corpus_files):
    context = executor.load(corpus_files)
    context.build_all()
    return context


def test_grothendieck_recovery(context):
    for name in ['O4', 'compacts', 'Ktilde', 'KplusO2tilde', 'E1', 'E2']:
        model = context.get(name)
        assert grothendieck_recover(model).fiber == model.fiber(model.top), name
    o4 = context.get('O4')
    group, _ = grothendieck_finite(finitize_v(o4))
    assert group.is_isomorphic(o4.k0(o4.top))


def test_ideal_lattice_bijection(context):
    for name in context.model_names():
        model = context.get(name)
        assert len(ideals_of_latticed(model)) == model.lattice.size, name
    for name in ['O4', 'O2']:
        model = context.get(name)
        assert len(ideals_of(finitize_v(model))) == model.lattice.size == 2


def test_distinguishing_pairs(context):
    result = iso_search_latticed(context.get('Ktilde'), context.get('KplusO2tilde'))
    assert (result.found, result.reason) == (False, 'lattice sizes 3 vs 5')
    result = iso_search_latticed(context.get('O2K'), context.get('OinfK'))
    assert (result.found, result.reason) == (False, 'layer shapes differ')


def test_beta_fixture(executor):
    outcome = executor.check_beta_fixture(str(FIXTURE_DIR / 'beta_variant_pair.yaml'))
    assert outcome.exit_code == EXIT_OK, outcome.data
    assert outcome.validation.valid


@pytest.mark.parametrize('name', EXTENSIONS)
def test_extension_exactness(context, name):
    iota, pi = canonical_morphisms(context.get(name))
    report = check_v_exactness(iota, pi)
    assert report.valid, report.errors


def test_explicit_split_class_matches_split(context):
    assert iso_search_latticed(context.get('E2'), context.get('E2x')).found


@settings(max_examples=20, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(name=st.sampled_from(TRANSPORTED), suffix=st.integers(min_value=0, max_value=999))
def test_invariants_transport_along_relabelling(context, name, suffix):
    model = context.get(name)
    mapping = {a: f"{a}_{suffix}" for a in model.lattice.elements if a != model.bottom}
    copy = relabel(model, mapping, name=f"{name}_{suffix}")
    result = iso_search_latticed(model, copy)
    assert result.found, result.reason
    assert detect_infinite(model)['infinite'] == detect_infinite(copy)['infinite']
    assert detect_cancellation(model)['cancellative'] == detect_cancellation(copy)['cancellative']


@pytest.mark.parametrize('name', UNITAL)
def test_scale_absorption(context, name):
    result = scale_absorption(context.get(name), bound=5, k_max=20)
    assert result['holds'], result['failures'][:3]


def test_compare_reports_are_reproducible(executor, context):
    reporter = Reporter(timestamp='2026-01-01T00:00:00Z')
    rendered = [
        reporter.render_json(executor.compare(context, 'E1', 'Ktilde', 'latticed', ['compare', 'E1', 'Ktilde']))
        for _ in range(2)
    ]
    assert rendered[0] == rendered[1]


def test_corpus_run(executor, corpus_files):
    fixtures = [str(p) for p in sorted(FIXTURE_DIR.glob('*.yaml'))]
    report = executor.corpus(corpus_files, fixtures, ['corpus'])
    assert report.exit_code == EXIT_OK, [s for s in report.sections if s.get('valid') is False]
    verdicts = {s['subject']: s['data'].get('verdict') for s in report.sections}
    assert verdicts['Ktilde vs KplusO2tilde (latticed)'] == 'distinguishable'
    assert verdicts['E1 vs Ktilde (latticed)'] == 'isomorphic'
    assert 'countable-sum-truncation' in report.provenance
