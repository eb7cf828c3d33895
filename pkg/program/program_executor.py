"""
程序执行器 - 在构造好的模型上运行 validate / compute / compare / oracle / corpus 命令
"""

import os
import random
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import yaml

from core.errors import BudgetExceededError, InvalidSpecError, LatticedKError
from core.lambda_module import (
    DEFAULT_LAMBDA_BUDGET, CoefficientSet, graded_iso_search, lambda_iso_search,
    standard_lambda_module, twist_beta,
)
from core.latticed import (
    LatticedKModule, add_v, detect_cancellation, detect_infinite, finitize_v, grothendieck_recover,
    ideals_of_latticed, preorder_agreement, scale_absorption, truncation, unique_support,
    validate_latticed_module,
)
from core.catalog import canonical_morphisms, relabel
from core.premon import grothendieck_finite, has_cancellation, has_infinite_element, ideals_of
from core.reporter import EXIT_BUDGET, EXIT_DISTINGUISHABLE, EXIT_INPUT_ERROR, EXIT_OK, Report
from core.search import SearchBudget
from core.validator import ValidationReport
from core.vmorphism import check_v_exactness, iso_search_latticed
from core.zmodule import AbHom, FgAbGroup, IntegerMatrix

from .lkt_parser import Directive, LktError, parse_file
from .model_context import ModelContext, load_context

WORKERS_ENV = 'LATTICED_WORKERS'


@dataclass
class Outcome:
    """单个检查的结果，随后并入 Report"""
    subject: str
    data: Dict[str, Any] = field(default_factory=dict)
    validation: Optional[ValidationReport] = None
    verdict: str = 'pass'
    exit_code: int = EXIT_OK
    witnesses: Dict[str, Any] = field(default_factory=dict)
    presets: List[str] = field(default_factory=list)

    def merge_into(self, report: Report) -> None:
        report.add_section(self.subject, self.data, self.validation)
        report.note_presets(self.presets)
        report.witnesses.update(self.witnesses)
        if self.exit_code != EXIT_OK:
            report.fail(self.verdict, self.exit_code)


def worker_count(configured: int) -> int:
    """环境变量 LATTICED_WORKERS 优先于配置"""
    value = os.environ.get(WORKERS_ENV)
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            pass
    return max(1, configured)


class ProgramExecutor:
    """命令执行器"""

    def __init__(self, coefficients: CoefficientSet, budget: int = DEFAULT_LAMBDA_BUDGET,
                 generator_bound: int = 1, cap: int = 3, bound: int = 5, scale_k_max: int = 20,
                 countable_truncation: int = 2, parallel: bool = False, max_workers: int = 4,
                 seed: Optional[int] = None, property_cases: int = 2):
        """
        Args:
            coefficients: 截断系数集 N
            budget: 每次穷举搜索的节点预算
            generator_bound: 同构搜索中生成元像的自由坐标范围
            cap: 有限化无界层时的饱和上界
            bound: 有界枚举的范围
            scale_k_max: 尺度吸收尝试的最大倍数
            countable_truncation: copies = countable 的截断副本数
            parallel: corpus 命令是否并行
            max_workers: 最大并行数
            seed: 随机性质检查的种子，None 时不运行
            property_cases: 每个模型的随机用例数
        """
        self.coefficients = coefficients
        self.budget = budget
        self.generator_bound = generator_bound
        self.cap = cap
        self.bound = bound
        self.scale_k_max = scale_k_max
        self.countable_truncation = countable_truncation
        self.parallel = parallel
        self.max_workers = worker_count(max_workers)
        self.seed = seed
        self.property_cases = property_cases

    # ------------------------------------------------------------ 加载

    def load(self, paths: Sequence[str]) -> ModelContext:
        """
        解析并合并程序文件

        Raises:
            LktError: 程序有误
            FileNotFoundError: 文件不存在
        """
        programs = [parse_file(p) for p in paths]
        return load_context(programs, self.coefficients, self.countable_truncation)

    def _input_error(self, report: Report, subject: str, error: Exception) -> Report:
        report.add_section(subject, {'error': str(error)})
        report.fail('input-error', EXIT_INPUT_ERROR)
        return report

    def _run(self, report: Report, context: ModelContext, jobs: List) -> Report:
        """按输入顺序把各个检查并入报告；构造失败记为输入错误"""
        try:
            outcomes = self.run_batch(jobs)
        except LktError as e:
            return self._input_error(report, 'program', e)
        for outcome in outcomes:
            outcome.merge_into(report)
        if context.warnings:
            report.add_section('context', {'warnings': list(context.warnings)})
        return report

    def run_batch(self, jobs: List) -> List[Outcome]:
        """
        运行一批无参检查，结果按输入顺序返回

        并行时先在主线程里构造好模型，检查本身只读模型。
        """
        if not self.parallel or len(jobs) < 2:
            return [job() for job in jobs]
        results: List[Optional[Outcome]] = [None] * len(jobs)
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            future_to_index = {executor.submit(job): i for i, job in enumerate(jobs)}
            for future in as_completed(future_to_index):
                results[future_to_index[future]] = future.result()
        return results

    def _names(self, context: ModelContext, names: Sequence[str]) -> List[str]:
        return list(names) if names else context.model_names()

    # ------------------------------------------------------------ validate

    def validate(self, context: ModelContext, names: Sequence[str] = (), args: Sequence[str] = ()) -> Report:
        report = Report('validate', list(args))
        try:
            models = [context.get(n) for n in self._names(context, names)]
        except LktError as e:
            return self._input_error(report, 'program', e)
        jobs = [lambda m=m: self.validate_model(m) for m in models]
        if self.seed is not None:
            jobs.append(lambda: self.property_suite(models))
        return self._run(report, context, jobs)

    def validate_model(self, model: LatticedKModule) -> Outcome:
        validation = validate_latticed_module(model)
        data = {'ideals': model.lattice.size, 'scale': model.scale.kind}
        outcome = Outcome(model.name, data, validation, presets=list(model.presets))
        if model.provenance is not None:
            iota, pi = canonical_morphisms(model)
            validation.extend(check_v_exactness(iota, pi), prefix='exactness.')
        if not validation.valid:
            outcome.verdict, outcome.exit_code = 'invalid', EXIT_DISTINGUISHABLE
        return outcome

    # ------------------------------------------------------------ compute

    def compute(self, context: ModelContext, names: Sequence[str] = (), args: Sequence[str] = ()) -> Report:
        report = Report('compute', list(args))
        try:
            models = [context.get(n) for n in self._names(context, names)]
        except LktError as e:
            return self._input_error(report, 'program', e)
        return self._run(report, context, [lambda m=m: self.compute_model(m) for m in models])

    def compute_model(self, model: LatticedKModule) -> Outcome:
        """不变量: 格、纤维、层、Gr 恢复、无限性、消去律、支撑唯一性、尺度吸收"""
        data = model.describe()
        data['recovered'] = grothendieck_recover(model, self.bound).to_dict()
        data['ideals_of_latticed'] = len(ideals_of_latticed(model))
        data['infinite'] = detect_infinite(model)
        data['cancellation'] = detect_cancellation(model)
        data['unique_support'] = unique_support(model, self.bound)
        outcome = Outcome(model.name, data, presets=list(model.presets))
        if model.scale.kind != 'full':
            absorption = scale_absorption(model, self.bound, self.scale_k_max)
            data['scale_absorption'] = absorption
            if not absorption['holds']:
                outcome.verdict, outcome.exit_code = 'scale-absorption-failed', EXIT_DISTINGUISHABLE
        return outcome

    # ------------------------------------------------------------ compare

    def compare(self, context: ModelContext, first: str, second: str, mode: str = 'latticed',
                args: Sequence[str] = ()) -> Report:
        report = Report('compare', list(args))
        try:
            x, y = context.get(first), context.get(second)
        except LktError as e:
            return self._input_error(report, 'program', e)
        return self._run(report, context, [lambda: self.compare_models(x, y, mode)])

    def compare_models(self, x: LatticedKModule, y: LatticedKModule, mode: str) -> Outcome:
        subject = f"{x.name} vs {y.name} ({mode})"
        outcome = Outcome(subject, presets=list(dict.fromkeys(x.presets + y.presets)))
        try:
            result = iso_search_latticed(x, y, mode, self.budget, self.generator_bound)
        except BudgetExceededError as e:
            outcome.data = {'error': str(e), 'budget': e.budget}
            outcome.verdict, outcome.exit_code = 'budget-exceeded', EXIT_BUDGET
            return outcome
        except InvalidSpecError as e:
            outcome.data = {'error': str(e)}
            outcome.verdict, outcome.exit_code = 'input-error', EXIT_INPUT_ERROR
            return outcome
        outcome.data = {'found': result.found, 'reason': result.reason,
                        'lattice_maps_tried': result.lattice_maps_tried}
        if result.found:
            outcome.verdict = 'isomorphic'
            outcome.witnesses[subject] = result.morphism.to_dict()
        else:
            outcome.verdict, outcome.exit_code = 'distinguishable', EXIT_DISTINGUISHABLE
            outcome.witnesses[subject] = result.reason
        return outcome

    # ------------------------------------------------------------ oracle

    def oracle(self, context: ModelContext, names: Sequence[str] = (), args: Sequence[str] = ()) -> Report:
        report = Report('oracle', list(args))
        try:
            models = [context.get(n) for n in self._names(context, names)]
        except LktError as e:
            return self._input_error(report, 'program', e)
        return self._run(report, context, [lambda m=m: self.oracle_model(m) for m in models])

    def oracle_model(self, model: LatticedKModule) -> Outcome:
        """
        有限化后与 premon 的穷举结果交叉验证

        理想个数与真实标签上的预序总是比较；层都有界时另比较 Gr、消去律与无限性。
        无界层按 cap 截断，截断会引入吸收元，所以后三项不再比较。
        """
        validation = ValidationReport(subject=model.name)
        bounded = all(layer.is_bounded() for layer in model.layers.values())
        cap = None if bounded else self.cap
        trunc = truncation(model, cap)
        monoid = finitize_v(model, cap)
        ideals = ideals_of(monoid)
        validation.add('ideal-count', len(ideals) == model.lattice.size,
                       f"premon {len(ideals)} vs lattice {model.lattice.size}")
        agreement = preorder_agreement(model, monoid, trunc)
        validation.add('preorder', agreement['holds'],
                       f"{len(agreement['mismatches'])} mismatches on {agreement['checked']} labels")
        data: Dict[str, Any] = {
            'monoid_size': monoid.size,
            'truncation': None if trunc is None else trunc.to_dict(),
            'preorder_checked': agreement['checked'],
        }
        if bounded:
            group, _ = grothendieck_finite(monoid)
            top = model.k0(model.top)
            data['grothendieck_finite'] = str(group)
            data['recovered_k0'] = str(grothendieck_recover(model, self.bound).fiber.group(0))
            validation.add('grothendieck', group.is_isomorphic(top), f"{group} vs {top}")
            cancellative = detect_cancellation(model)['cancellative']
            validation.add('cancellation', has_cancellation(monoid) == cancellative,
                           f"premon {has_cancellation(monoid)} vs latticed {cancellative}")
            infinite = detect_infinite(model)['infinite']
            validation.add('infinite', has_infinite_element(monoid) == infinite,
                           f"premon {has_infinite_element(monoid)} vs latticed {infinite}")
        else:
            validation.warn(f"无界层已按 cap={self.cap} 截断，只比较理想个数与真实标签上的预序")
        outcome = Outcome(model.name, data, validation, presets=list(model.presets))
        if not validation.valid:
            outcome.verdict, outcome.exit_code = 'oracle-mismatch', EXIT_DISTINGUISHABLE
        return outcome

    # ------------------------------------------------------------ 随机性质

    def property_suite(self, models: Sequence[LatticedKModule]) -> Outcome:
        """
        由 seed 驱动的随机性质检查

        每个用例随机重命名理想，要求同构搜索找回原模型、无限性与消去律结论一致，
        并在随机抽取的三个元素上检查 addV 的交换律与结合律。只有本节依赖 seed。
        """
        rng = random.Random(self.seed)
        validation = ValidationReport(subject=f"properties (seed {self.seed})")
        tags: List[int] = []
        skipped: List[str] = []
        for model in models:
            elements = model.elements(self.bound)
            for _ in range(self.property_cases):
                tag = rng.randrange(10 ** 6)
                tags.append(tag)
                name = f"{model.name}#{tag}"
                mapping = {a: f"{a}#{tag}" for a in model.lattice.elements if a != model.bottom}
                copy = relabel(model, mapping, name=name)
                try:
                    found = iso_search_latticed(model, copy, 'latticed', self.budget, self.generator_bound).found
                except BudgetExceededError:
                    skipped.append(name)
                    found = None
                if found is not None:
                    validation.add(f"relabel-transport[{name}]", found)
                validation.add(f"infinite-transport[{name}]",
                               detect_infinite(model)['infinite'] == detect_infinite(copy)['infinite'])
                validation.add(f"cancellation-transport[{name}]",
                               detect_cancellation(model)['cancellative'] == detect_cancellation(copy)['cancellative'])

                x, y, z = (rng.choice(elements) for _ in range(3))
                validation.add(f"addv-commutative[{name}]", add_v(model, x, y) == add_v(model, y, x))
                validation.add(f"addv-associative[{name}]",
                               add_v(model, add_v(model, x, y), z) == add_v(model, x, add_v(model, y, z)))

        if skipped:
            validation.warn(f"搜索预算耗尽，跳过同构检查: {', '.join(skipped)}")
        data = {'seed': self.seed, 'cases': len(tags), 'tags': tags, 'failures': validation.errors}
        outcome = Outcome(validation.subject, data, validation)
        if not validation.valid:
            outcome.verdict, outcome.exit_code = 'property-failed', EXIT_DISTINGUISHABLE
        return outcome

    # ------------------------------------------------------------ corpus

    def corpus(self, paths: Sequence[str], fixtures: Sequence[str] = (), args: Sequence[str] = ()) -> Report:
        """
        运行语料中每个程序的指令（check / compare / report），再检查数据夹具

        各文件合并为一个上下文，完全相同的重复定义只保留一份。
        """
        report = Report('corpus', list(args))
        try:
            context = self.load(paths)
            context.build_all()
        except (LktError, FileNotFoundError) as e:
            return self._input_error(report, 'program', e)

        jobs = []
        for directive in context.program.directives():
            jobs.append(self._directive_job(context, directive))
        for path in fixtures:
            jobs.append(lambda path=path: self.check_beta_fixture(path))
        if self.seed is not None:
            models = [context.get(n) for n in context.model_names()]
            jobs.append(lambda: self.property_suite(models))
        return self._run(report, context, jobs)

    def _directive_job(self, context: ModelContext, directive: Directive):
        models = [context.get(n) for n in directive.names]
        if directive.kind == 'check':
            return lambda: self.validate_model(models[0])
        if directive.kind == 'report':
            return lambda: self.compute_model(models[0])
        return lambda: self._recorded_compare(models[0], models[1], directive.mode)

    def _recorded_compare(self, x: LatticedKModule, y: LatticedKModule, mode: str) -> Outcome:
        """语料中的 compare 只记录结论；distinguishable 不算失败"""
        outcome = self.compare_models(x, y, mode)
        outcome.data['verdict'] = outcome.verdict
        if outcome.exit_code == EXIT_DISTINGUISHABLE:
            outcome.verdict, outcome.exit_code = 'pass', EXIT_OK
        return outcome

    def check_beta_fixture(self, path: str) -> Outcome:
        """
        Λ-结构夹具: 同一载体上两个 β 赋值分次同构但非Λ-同构
        """
        with open(path, 'r', encoding='utf-8') as f:
            fixture = yaml.safe_load(f)
        outcome = Outcome(f"fixture {os.path.basename(path)}")
        try:
            first, second = load_beta_fixture(fixture)
            budget = SearchBudget(self.budget, 'betaFixture')
            graded = graded_iso_search(first, second, 0, budget) is not None
            lam = lambda_iso_search(first, second, 0, budget) is not None
        except BudgetExceededError as e:
            outcome.data = {'error': str(e)}
            outcome.verdict, outcome.exit_code = 'budget-exceeded', EXIT_BUDGET
            return outcome
        except (LatticedKError, KeyError, TypeError) as e:
            outcome.data = {'error': str(e)}
            outcome.verdict, outcome.exit_code = 'input-error', EXIT_INPUT_ERROR
            return outcome

        expected = fixture.get('expected', {})
        validation = ValidationReport(subject=outcome.subject)
        validation.add('graded-isomorphic', graded == expected.get('graded_isomorphic', True),
                       f"found={graded}")
        validation.add('lambda-isomorphic', lam == expected.get('lambda_isomorphic', False),
                       f"found={lam}")
        outcome.validation = validation
        outcome.data = {'carrier': f"({first.group(0)}, {first.group(1)})",
                        'coefficients': str(first.coefficients)}
        if not validation.valid:
            outcome.verdict, outcome.exit_code = 'fixture-mismatch', EXIT_DISTINGUISHABLE
        return outcome


def load_beta_fixture(fixture: Dict[str, Any]):
    """
    由夹具数据构造 (标准模, 扭转 β 后的模)

    Args:
        fixture: {g0: {rank, torsion}, g1: {...}, coefficients: [...], twist: {slot, matrix}}
    """
    def group(data: Dict[str, Any]) -> FgAbGroup:
        return FgAbGroup(data.get('rank', 0), tuple(data.get('torsion', ())))

    coefficients = CoefficientSet(tuple(fixture['coefficients']))
    base = standard_lambda_module(group(fixture['g0']), group(fixture['g1']), coefficients)
    twist = fixture['twist']
    slot = tuple(twist['slot'])
    target = base.group(1 - slot[0])
    automorphism = AbHom(target, target, IntegerMatrix.from_rows(twist['matrix'], cols=target.ngens))
    return base, twist_beta(base, slot, automorphism)
