"""
报告生成与 schema 校验测试
"""

import json

from core.reporter import EXIT_BUDGET, EXIT_DISTINGUISHABLE, EXIT_INPUT_ERROR, EXIT_OK, Report, Reporter
from core.validator import ReportValidator, ValidationReport

STAMP = '2026-01-01T00:00:00Z'


def _sample_report() -> Report:
    validation = ValidationReport(subject='O4')
    validation.add('lattice', True)
    validation.add('layer-closure[O4,O4]', False, 'closure broken')
    validation.warn('V_p(O4) unbounded')
    report = Report('validate', ['validate', 'O4'])
    report.add_section('O4', {'size': 2}, validation)
    report.note_presets(['countable-sum-truncation', 'countable-sum-truncation'])
    report.fail('invalid', EXIT_DISTINGUISHABLE)
    return report


def test_fail_only_escalates():
    report = Report('compare')
    assert (report.verdict, report.exit_code) == ('pass', EXIT_OK)
    report.fail('budget-exceeded', EXIT_BUDGET)
    report.fail('distinguishable', EXIT_DISTINGUISHABLE)
    assert (report.verdict, report.exit_code) == ('budget-exceeded', EXIT_BUDGET)


def test_presets_are_recorded_once():
    assert _sample_report().provenance == ['countable-sum-truncation']


def test_json_is_deterministic():
    reporter = Reporter(timestamp=STAMP)
    first = reporter.render_json(_sample_report())
    second = reporter.render_json(_sample_report())
    assert first == second
    payload = json.loads(first)
    assert payload['generated_at'] == STAMP
    assert payload['sections'][0]['valid'] is False
    assert payload['sections'][0]['checks'][1] == {
        'name': 'layer-closure[O4,O4]', 'passed': False, 'detail': 'closure broken',
    }


def test_report_matches_schema():
    payload = _sample_report().to_dict(STAMP)
    result = ReportValidator().validate_report(payload)
    assert result['valid'], result['errors']
    assert result['warnings'] == []


def test_schema_rejects_malformed_reports():
    validator = ReportValidator()
    payload = _sample_report().to_dict(STAMP)
    payload['exit_code'] = 7
    payload['extra'] = True
    result = validator.validate_report(payload)
    assert not result['valid']
    assert len(result['errors']) == 2

    payload = _sample_report().to_dict(STAMP)
    payload['schema_version'] = '0.9'
    assert validator.validate_report(payload)['warnings']


def test_text_report_lists_checks():
    text = Reporter(timestamp=STAMP).render_text(_sample_report())
    assert 'verdict: invalid (exit 1)' in text
    assert 'PASS' in text and 'FAIL' in text
    assert 'closure broken' in text
    assert '! V_p(O4) unbounded' in text
    assert '- countable-sum-truncation' in text


def test_generate_report_writes_file(tmp_path):
    report = Report('validate', ['validate'])
    report.add_section('input', {'error': 'missing'})
    report.fail('input-error', EXIT_INPUT_ERROR)
    path = Reporter(timestamp=STAMP).generate_report(report, str(tmp_path / 'out' / 'report.json'))
    with open(path, 'r', encoding='utf-8') as f:
        payload = json.load(f)
    assert payload['exit_code'] == EXIT_INPUT_ERROR
    assert payload['verdict'] == 'input-error'
