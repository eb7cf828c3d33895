"""
latticed-k - 格化全K理论不变量计算工具 主程序入口
"""

import argparse
import sys
from pathlib import Path
from typing import Dict, List, Optional

import yaml
from colorama import Fore, Style, init as colorama_init

from core.errors import InvalidSpecError
from core.lambda_module import CoefficientSet
from core.reporter import EXIT_INPUT_ERROR, EXIT_OK, Report, Reporter
from core.validator import ReportValidator
from core.vmorphism import SEARCH_MODES
from program import LktError, ProgramExecutor

ROOT = Path(__file__).resolve().parent
DEFAULT_CONFIG = ROOT / 'config' / 'default_config.yaml'
CORPUS_DIR = ROOT / 'corpus'
FIXTURE_DIR = CORPUS_DIR / 'fixtures'

VERDICT_COLORS = {0: Fore.GREEN, 1: Fore.RED, 2: Fore.YELLOW, 3: Fore.MAGENTA}


def load_config(config_path: Optional[str] = None) -> Dict:
    """加载默认配置，再用指定的配置文件覆盖"""
    with open(DEFAULT_CONFIG, 'r', encoding='utf-8') as f:
        config = yaml.safe_load(f) or {}
    if config_path:
        with open(config_path, 'r', encoding='utf-8') as f:
            _merge(config, yaml.safe_load(f) or {})
    return config


def _merge(base: Dict, override: Dict) -> None:
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = value


def build_executor(args: argparse.Namespace, config: Dict) -> ProgramExecutor:
    """
    由配置与命令行参数构造执行器（命令行优先）

    Raises:
        InvalidSpecError: 系数集或预算无法解析
    """
    if args.coefficients:
        coefficients = CoefficientSet.parse(args.coefficients)
    else:
        coefficients = CoefficientSet(tuple(config.get('coefficients', [2, 3, 4, 6])))

    search = config.get('search', {})
    budget = search.get('budget', 200000)
    if args.budget and args.budget != 'default':
        try:
            budget = int(args.budget)
        except ValueError:
            raise InvalidSpecError(f"无法解析预算: {args.budget}") from None
        if budget < 1:
            raise InvalidSpecError("预算必须为正")

    execution = config.get('execution', {})
    enumeration = config.get('enumeration', {})
    return ProgramExecutor(
        coefficients=coefficients,
        budget=budget,
        generator_bound=search.get('generator_bound', 1),
        cap=args.cap or config.get('finitize', {}).get('cap', 3),
        bound=enumeration.get('bound', 5),
        scale_k_max=enumeration.get('scale_k_max', 20),
        countable_truncation=config.get('corpus', {}).get('countable_truncation', 2),
        parallel=args.parallel or execution.get('parallel', False),
        max_workers=execution.get('max_workers', 4),
        seed=args.seed,
        property_cases=config.get('properties', {}).get('cases', 2),
    )


def program_files(args: argparse.Namespace) -> List[str]:
    if args.files:
        return list(args.files)
    return [str(p) for p in sorted(CORPUS_DIR.glob('*.lkt'))]


def run_command(args: argparse.Namespace, argv: List[str]) -> Report:
    """执行子命令；输入错误以退出码 2 的报告返回"""
    try:
        config = load_config(args.config)
        executor = build_executor(args, config)
        if args.command == 'corpus':
            fixtures = [str(p) for p in sorted(FIXTURE_DIR.glob('*.yaml'))]
            return executor.corpus(program_files(args), fixtures, argv)
        context = executor.load(program_files(args))
    except (LktError, InvalidSpecError, FileNotFoundError, yaml.YAMLError) as e:
        report = Report(args.command, argv)
        report.add_section('input', {'error': str(e)})
        report.fail('input-error', EXIT_INPUT_ERROR)
        return report

    if args.command == 'validate':
        return executor.validate(context, args.names, argv)
    if args.command == 'compute':
        return executor.compute(context, args.names, argv)
    if args.command == 'oracle':
        return executor.oracle(context, args.names, argv)
    return executor.compare(context, args.first, args.second, args.mode, argv)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument('-f', '--file', dest='files', action='append',
                     help='.lkt 程序文件，可重复（默认: corpus/*.lkt）')
    sub.add_argument('-c', '--config', help='配置文件路径（YAML格式）')
    sub.add_argument('--coefficients', help='截断系数集，如 2,3,4,6')
    sub.add_argument('--budget', help='搜索预算（整数或 default）')
    sub.add_argument('--cap', type=int, help='有限化无界层时的饱和上界')
    sub.add_argument('--seed', type=int, help='随机性质测试的种子（计算结果与种子无关）')
    sub.add_argument('--parallel', action='store_true', help='并行执行各项检查')
    sub.add_argument('--json', action='store_true', help='输出JSON报告')
    sub.add_argument('-o', '--output', help='报告输出路径')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='格化全K理论不变量计算工具',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例:
  # 校验语料中的 O4 模型
  python main.py validate O4

  # 比较两个模型（格化模式）
  python main.py compare Ktilde KplusO2tilde --mode latticed

  # 有限化后与幺半群穷举结果交叉验证
  python main.py oracle O4 --budget default --json

  # 运行整个语料
  python main.py corpus -o reports/corpus.json --json
        """
    )
    commands = parser.add_subparsers(dest='command', required=True)
    for name, help_text in (('validate', '构造并校验模型'),
                            ('compute', '计算不变量'),
                            ('oracle', '有限化并与 premon 交叉验证')):
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument('names', nargs='*', help='模型名（默认: 全部）')
        _add_common(sub)

    sub = commands.add_parser('compare', help='同构搜索')
    sub.add_argument('first')
    sub.add_argument('second')
    sub.add_argument('--mode', choices=SEARCH_MODES, default='latticed', help='比较模式（默认: latticed）')
    _add_common(sub)

    sub = commands.add_parser('corpus', help='运行语料中的全部指令与夹具')
    _add_common(sub)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """主函数，返回退出码"""
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    colorama_init()

    quiet = args.json and not args.output
    if not quiet:
        print("=" * 60)
        print(f"🚀 latticed-k {args.command}")
        print("=" * 60)
        print(f"\n📖 程序文件: {len(program_files(args))}个")

    report = run_command(args, argv)
    reporter = Reporter()

    if args.json:
        check = ReportValidator().validate_report(report.to_dict(''))
        if not check['valid']:
            for error in check['errors']:
                print(f"❌ {error}", file=sys.stderr)

    if args.output:
        path = reporter.generate_report(report, args.output, as_json=args.json)
        print(f"\n📄 报告已生成: {path}")
    elif args.json:
        print(reporter.render_json(report))
    else:
        print(reporter.render_text(report))

    if not quiet:
        color = VERDICT_COLORS.get(report.exit_code, '')
        mark = "✓" if report.exit_code == EXIT_OK else "✗"
        print(f"{color}{mark} {report.verdict} (exit {report.exit_code}){Style.RESET_ALL}")
    return report.exit_code


if __name__ == '__main__':
    sys.exit(main())
