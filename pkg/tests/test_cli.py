"""
命令行入口测试 - 退出码、JSON 报告与输入错误
"""

import json

import pytest

from core.reporter import EXIT_BUDGET, EXIT_DISTINGUISHABLE, EXIT_INPUT_ERROR, EXIT_OK
from core.validator import ReportValidator
from main import main


def _json_run(capsys, argv):
    code = main(argv + ['--json'])
    payload = json.loads(capsys.readouterr().out)
    assert ReportValidator().validate_report(payload)['valid']
    return code, payload


def test_validate_o4(capsys):
    code, payload = _json_run(capsys, ['validate', 'O4'])
    assert code == EXIT_OK
    assert payload['command'] == 'validate'
    assert payload['sections'][0]['subject'] == 'O4'
    assert payload['sections'][0]['valid']


def test_compare_distinguishes_unitizations(capsys):
    code, payload = _json_run(capsys, ['compare', 'Ktilde', 'KplusO2tilde', '--mode', 'latticed'])
    assert code == EXIT_DISTINGUISHABLE
    assert payload['verdict'] == 'distinguishable'
    assert payload['sections'][0]['data']['reason'] == 'lattice sizes 3 vs 5'


def test_compare_split_extension(capsys):
    code, payload = _json_run(capsys, ['compare', 'E1', 'Ktilde'])
    assert code == EXIT_OK
    assert payload['verdict'] == 'isomorphic'
    assert payload['witnesses']


def test_oracle_o4(capsys):
    code, payload = _json_run(capsys, ['oracle', 'O4', '--budget', 'default'])
    assert code == EXIT_OK
    data = payload['sections'][0]['data']
    assert data['grothendieck_finite'] == 'Z/3'
    assert data['truncation'] is None
    assert data['preorder_checked'] == 4


def test_oracle_saturates_unbounded_layers(capsys):
    code, payload = _json_run(capsys, ['oracle', 'compacts'])
    assert code == EXIT_OK
    data = payload['sections'][0]['data']
    assert data['monoid_size'] == 4
    assert data['truncation']['cap'] == 3
    assert list(data['truncation']['saturating'].values()) == [[0]]
    assert data['truncation']['wrapping'] == {}
    assert data['preorder_checked'] == 3
    assert 'grothendieck_finite' not in data


def test_budget_exhaustion_is_reported(capsys):
    code, payload = _json_run(capsys, ['compare', 'Ktilde', 'Ktilde', '--budget', '1'])
    assert code == EXIT_BUDGET
    assert payload['verdict'] == 'budget-exceeded'


@pytest.mark.parametrize('argv', [
    ['validate', '-f', 'does-not-exist.lkt'],
    ['compare', 'Ktilde', 'Nothing'],
    ['validate', 'O4', '--budget', 'lots'],
    ['validate', 'O4', '--coefficients', '4'],
])
def test_input_errors(capsys, argv):
    code, payload = _json_run(capsys, argv)
    assert code == EXIT_INPUT_ERROR
    assert payload['verdict'] == 'input-error'


def test_syntax_error_in_program(tmp_path, capsys):
    program = tmp_path / 'bad.lkt'
    program.write_text("block X { kind = kirchberg\n", encoding='utf-8')
    code, payload = _json_run(capsys, ['validate', '-f', str(program)])
    assert code == EXIT_INPUT_ERROR
    assert '[syntax]' in payload['sections'][0]['data']['error']


def test_report_file_is_written(tmp_path, capsys):
    output = tmp_path / 'reports' / 'o4.json'
    code = main(['validate', 'O4', '--json', '-o', str(output)])
    assert code == EXIT_OK
    assert '报告已生成' in capsys.readouterr().out
    payload = json.loads(output.read_text(encoding='utf-8'))
    assert payload['exit_code'] == EXIT_OK


def test_text_report(capsys):
    assert main(['validate', 'O4']) == EXIT_OK
    out = capsys.readouterr().out
    assert 'verdict: pass (exit 0)' in out
    assert '[O4]' in out


def test_compare_is_deterministic(capsys):
    runs = []
    for _ in range(2):
        _, payload = _json_run(capsys, ['compare', 'E1', 'Ktilde'])
        payload.pop('generated_at')
        runs.append(json.dumps(payload, sort_keys=True))
    assert runs[0] == runs[1]


def _sections_with_seed(capsys, seed):
    code, payload = _json_run(capsys, ['validate', 'O4', 'Ktilde', '--seed', str(seed)])
    assert code == EXIT_OK
    sections = {s['subject']: s for s in payload['sections']}
    properties = sections.pop(f'properties (seed {seed})')
    assert properties['valid']
    assert properties['data']['seed'] == seed
    assert properties['data']['cases'] == 4
    return sections, properties['data']['tags']


def test_seed_only_drives_the_property_section(capsys):
    first, first_tags = _sections_with_seed(capsys, 1)
    again, again_tags = _sections_with_seed(capsys, 1)
    second, second_tags = _sections_with_seed(capsys, 2)
    assert first_tags == again_tags
    assert first_tags != second_tags
    assert first == second == again

    _, plain = _json_run(capsys, ['validate', 'O4', 'Ktilde'])
    assert {s['subject']: s for s in plain['sections']} == first
