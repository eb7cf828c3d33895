"""
报告生成器 - 机器可读的JSON报告与对齐的文本报告
"""

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

from jinja2 import Environment, StrictUndefined

from .validator import ValidationReport

SCHEMA_VERSION = "1.0"

# 退出码: 成功/相等、可区分/校验失败、输入错误、预算耗尽
EXIT_OK = 0
EXIT_DISTINGUISHABLE = 1
EXIT_INPUT_ERROR = 2
EXIT_BUDGET = 3

TEXT_TEMPLATE = """\
{{ "=" * 72 }}
latticed-k {{ report.command }} {{ report.args | join(' ') }}
generated_at: {{ generated_at }}
verdict: {{ report.verdict }} (exit {{ report.exit_code }})
{{ "=" * 72 }}
{% for section in report.sections %}
[{{ section.subject }}]
{% for check in section.checks %}
  {{ "%-56s" | format(check.name) }} {{ "PASS" if check.passed else "FAIL" }}{% if check.detail %}  {{ check.detail }}{% endif %}
{% endfor %}
{% for key, value in section.data | dictsort %}
  {{ "%-24s" | format(key) }} {{ value }}
{% endfor %}
{% for message in section.warnings %}
  ! {{ message }}
{% endfor %}
{% endfor %}
{% if report.witnesses %}
witnesses:
{% for key, value in report.witnesses | dictsort %}
  {{ "%-24s" | format(key) }} {{ value }}
{% endfor %}
{% endif %}
{% if report.provenance %}
provenance:
{% for preset in report.provenance %}
  - {{ preset }}
{% endfor %}
{% endif %}
"""


@dataclass
class Report:
    """一次命令运行的结果"""
    command: str
    args: List[str] = field(default_factory=list)
    exit_code: int = EXIT_OK
    verdict: str = 'pass'
    sections: List[Dict[str, Any]] = field(default_factory=list)
    witnesses: Dict[str, Any] = field(default_factory=dict)
    provenance: List[str] = field(default_factory=list)

    def add_section(self, subject: str, data: Optional[Dict[str, Any]] = None,
                    validation: Optional[ValidationReport] = None) -> Dict[str, Any]:
        section = {
            'subject': subject,
            'checks': [c.to_dict() for c in validation.checks] if validation else [],
            'warnings': list(validation.warnings) if validation else [],
            'data': dict(data or {}),
        }
        if validation is not None:
            section['valid'] = validation.valid
        self.sections.append(section)
        return section

    def note_presets(self, presets: List[str]) -> None:
        """每个预设只记录一次"""
        for preset in presets:
            if preset not in self.provenance:
                self.provenance.append(preset)

    def fail(self, verdict: str, exit_code: int) -> None:
        """只升级，不降级"""
        if exit_code > self.exit_code or self.exit_code == EXIT_OK:
            self.verdict, self.exit_code = verdict, exit_code

    def to_dict(self, generated_at: str) -> Dict[str, Any]:
        return {
            'schema_version': SCHEMA_VERSION,
            'generated_at': generated_at,
            'command': self.command,
            'args': list(self.args),
            'exit_code': self.exit_code,
            'verdict': self.verdict,
            'sections': self.sections,
            'witnesses': self.witnesses,
            'provenance': list(self.provenance),
        }


class Reporter:
    """报告渲染器"""

    def __init__(self, timestamp: Optional[str] = None):
        """
        Args:
            timestamp: 固定的 generated_at（测试与复现用），默认取当前 UTC 时间
        """
        self.timestamp = timestamp
        self._env = Environment(trim_blocks=True, lstrip_blocks=True, undefined=StrictUndefined)
        self._template = self._env.from_string(TEXT_TEMPLATE)

    def _now(self) -> str:
        return self.timestamp or datetime.now(timezone.utc).strftime('%Y-%m-%dT%H:%M:%SZ')

    def render_json(self, report: Report) -> str:
        return json.dumps(report.to_dict(self._now()), sort_keys=True, indent=2, ensure_ascii=False)

    def render_text(self, report: Report) -> str:
        return self._template.render(report=report, generated_at=self._now())

    def generate_report(self, report: Report, output_path: str, as_json: bool = True) -> str:
        """
        写出报告文件

        Returns:
            生成的报告文件路径
        """
        output_file = Path(output_path)
        output_file.parent.mkdir(parents=True, exist_ok=True)
        content = self.render_json(report) if as_json else self.render_text(report)
        with open(output_file, 'w', encoding='utf-8') as f:
            f.write(content + '\n')
        return str(output_file)
