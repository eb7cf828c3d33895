"""
校验结果与报告验证器 - 逐项记录检查结论，并用JSON Schema验证机器报告
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from jsonschema import Draft7Validator


@dataclass
class CheckResult:
    """单项检查结论"""
    name: str
    passed: bool
    detail: str = ''

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'passed': self.passed, 'detail': self.detail}


@dataclass
class ValidationReport:
    """
    一组检查的汇总

    与原有验证器的返回约定一致: valid / errors / warnings，另带逐项 checks。
    """
    subject: str
    checks: List[CheckResult] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = '') -> bool:
        self.checks.append(CheckResult(name, bool(passed), detail))
        return bool(passed)

    def warn(self, message: str) -> None:
        if message not in self.warnings:
            self.warnings.append(message)

    def extend(self, other: 'ValidationReport', prefix: str = '') -> None:
        for check in other.checks:
            self.checks.append(CheckResult(f"{prefix}{check.name}", check.passed, check.detail))
        for message in other.warnings:
            self.warn(message)

    @property
    def valid(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def errors(self) -> List[str]:
        return [
            f"{check.name}: {check.detail}" if check.detail else check.name
            for check in self.checks if not check.passed
        ]

    def failed(self, prefix: str = '') -> List[CheckResult]:
        return [c for c in self.checks if not c.passed and c.name.startswith(prefix)]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'subject': self.subject,
            'valid': self.valid,
            'errors': self.errors,
            'warnings': list(self.warnings),
            'checks': [c.to_dict() for c in self.checks],
        }


class ReportValidator:
    """按版本化的JSON Schema验证机器可读报告"""

    def __init__(self, schema: Optional[Dict] = None, schema_path: Optional[str] = None):
        """
        初始化验证器

        Args:
            schema: 已加载的schema
            schema_path: schema文件路径（schema未给出时使用）
        """
        if schema is None:
            path = Path(schema_path) if schema_path else Path(__file__).resolve().parent.parent / 'config' / 'report_schema.json'
            with open(path, 'r', encoding='utf-8') as f:
                schema = json.load(f)
        self.schema = schema
        self._validator = Draft7Validator(schema)

    def validate_report(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        """
        验证报告

        Returns:
            验证结果字典，包含:
            - valid: bool - 是否验证通过
            - errors: List[str] - 错误列表
            - warnings: List[str] - 警告列表
        """
        result = {'valid': True, 'errors': [], 'warnings': []}
        for error in sorted(self._validator.iter_errors(payload), key=lambda e: [str(p) for p in e.path]):
            result['valid'] = False
            result['errors'].append(
                f"Schema验证失败: {error.message} (路径: {'.'.join(str(p) for p in error.path)})"
            )
        if payload.get('schema_version') != self.schema.get('properties', {}).get('schema_version', {}).get('const'):
            result['warnings'].append("报告的schema版本与当前schema不一致")
        return result
