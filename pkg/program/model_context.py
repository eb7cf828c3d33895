"""
模型上下文 - 按名字惰性求值 .lkt 定义，管理内置与程序两个作用域
"""

from typing import Dict, List, Optional, Sequence

from core.catalog import (
    BlockSpec, ExplicitClass, build_block, build_extension, direct_sum, stabilize, unitize, zero_model,
)
from core.errors import LatticedKError
from core.lambda_module import CoefficientSet
from core.latticed import LatticedKModule
from core.semilinear import LinearComponent, SemilinearSet
from core.zmodule import AbHom, FgAbGroup, IntegerMatrix, Vector, group_from_orders

from .lkt_parser import (
    BUILTIN_NAMES, BlockDef, Call, ClassDef, Directive, GroupExpr, LetDef, LktError, Program, Ref,
    check_program,
)


class RawGroup:
    """
    书写坐标下的群 Z^r ⊕ Z/c1 ⊕ ...

    程序里的向量与矩阵都按书写的循环因子给坐标，这里换到规范坐标。
    """

    def __init__(self, expr: GroupExpr):
        self.orders = [0] * expr.free + list(expr.cyclic)
        if self.orders:
            self.group = group_from_orders(self.orders)
        else:
            self.group = FgAbGroup()

    @property
    def size(self) -> int:
        return len(self.orders)

    def vector(self, raw: Sequence[int], where: str) -> Vector:
        if len(raw) != self.size:
            raise LktError('type', f"{where}: 向量 {tuple(raw)} 的长度应为 {self.size}")
        if not self.group.ngens:
            return ()
        return self.group.normalize(self.group.witness.to_canonical.apply(raw))

    def hom_into(self, source: FgAbGroup, columns: Sequence[Sequence[int]], where: str) -> AbHom:
        """source 的规范生成元在本群书写坐标下的像"""
        if len(columns) != source.ngens:
            raise LktError('type', f"{where}: 需要 {source.ngens} 个像，给出了 {len(columns)} 个")
        if not (source.ngens and self.group.ngens):
            return AbHom.zero(source, self.group)
        raw = IntegerMatrix.from_columns([self._checked(c, self.size, where) for c in columns], rows=self.size)
        return AbHom(source, self.group, self.group.witness.to_canonical @ raw)

    def hom_from(self, target: FgAbGroup, columns: Sequence[Sequence[int]], where: str) -> AbHom:
        """本群每个书写生成元在 target 规范坐标下的像"""
        if len(columns) != self.size:
            raise LktError('type', f"{where}: 需要 {self.size} 个像，给出了 {len(columns)} 个")
        if not (target.ngens and self.group.ngens):
            return AbHom.zero(self.group, target)
        raw = IntegerMatrix.from_columns([self._checked(c, target.ngens, where) for c in columns],
                                         rows=target.ngens)
        return AbHom(self.group, target, raw @ self.group.witness.from_canonical)

    @staticmethod
    def _checked(column: Sequence[int], length: int, where: str) -> Sequence[int]:
        if len(column) != length:
            raise LktError('type', f"{where}: 像 {tuple(column)} 的长度应为 {length}")
        return column


def merge_programs(programs: Sequence[Program]) -> Program:
    """
    合并多个文件的程序；完全相同的重复定义只保留一份

    Raises:
        LktError: 同名但内容不同的定义
    """
    seen: Dict[str, object] = {}
    statements = []
    for program in programs:
        for stmt in program.statements:
            if not isinstance(stmt, Directive):
                if stmt.name in seen:
                    if seen[stmt.name] != stmt:
                        raise LktError('type', f"不同文件中 {stmt.name} 的定义冲突", stmt.line, 1)
                    continue
                seen[stmt.name] = stmt
            statements.append(stmt)
    merged = Program(tuple(statements))
    check_program(merged)
    return merged


class ModelContext:
    """
    惰性构造程序中定义的模型

    两个作用域：
    - builtin: zero 与 C
    - program: 程序中的 block / let 定义（class 定义在扩张时使用）
    """

    def __init__(self, program: Program, coefficients: CoefficientSet, countable_truncation: int = 2):
        self.program = program
        self.coefficients = coefficients
        self.countable_truncation = countable_truncation
        self.definitions = program.definitions()
        self.warnings: List[str] = []

        self.builtin_vars: Dict[str, LatticedKModule] = {}
        self.program_vars: Dict[str, LatticedKModule] = {}
        self._building: List[str] = []

    # ------------------------------------------------------------ 作用域

    def model_names(self) -> List[str]:
        return [n for n, s in self.definitions.items() if not isinstance(s, ClassDef)]

    def get(self, name: str) -> LatticedKModule:
        """
        取得模型（必要时构造）

        Raises:
            LktError: 未定义、循环定义或构造失败
        """
        if name in self.program_vars:
            return self.program_vars[name]
        if name in BUILTIN_NAMES and name not in self.definitions:
            return self._builtin(name)
        stmt = self.definitions.get(name)
        if stmt is None or isinstance(stmt, ClassDef):
            raise LktError('reference', f"未定义的模型: {name}")
        if name in self._building:
            cycle = " -> ".join(self._building[self._building.index(name):] + [name])
            raise LktError('reference', f"循环定义: {cycle}", stmt.line, 1)

        self._building.append(name)
        try:
            model = self._build_block(stmt) if isinstance(stmt, BlockDef) else self._build_let(stmt)
        except LatticedKError as e:
            raise LktError('type', f"{name}: {e}", stmt.line, 1) from e
        finally:
            self._building.pop()
        self.program_vars[name] = model
        return model

    def _builtin(self, name: str) -> LatticedKModule:
        if name not in self.builtin_vars:
            if name == 'zero':
                model = zero_model(self.coefficients)
            else:
                model = build_block(BlockSpec('C', 'compacts_like', self.coefficients, unit=(1,)))
            self.builtin_vars[name] = model
        return self.builtin_vars[name]

    # ------------------------------------------------------------ block

    def _build_block(self, stmt: BlockDef) -> LatticedKModule:
        kind = stmt.get('kind')
        default_k0 = GroupExpr(1) if kind == 'compacts_like' else GroupExpr()
        k0 = RawGroup(stmt.get('k0', default_k0))
        k1 = RawGroup(stmt.get('k1', GroupExpr()))

        unit = stmt.get('unit')
        layer = stmt.get('layer')
        copies = stmt.get('copies', 1)
        truncated = copies == 'countable'
        if truncated:
            copies = self.countable_truncation
            self.warnings.append(f"{stmt.name}: 可数直和截断为 {copies} 个副本")

        spec = BlockSpec(
            name=stmt.name, kind=kind, coefficients=self.coefficients,
            k0=k0.group, k1=k1.group,
            cone=[k0.vector(v, f"{stmt.name}.cone") for v in stmt.get('cone', ())],
            unit=k0.vector(unit, f"{stmt.name}.unit") if unit is not None else None,
            shape=stmt.get('shape', 'point'),
            copies=copies,
            layer=self._layer(k0, layer, stmt.name) if layer is not None else None,
        )
        return build_block(spec, truncated=truncated)

    @staticmethod
    def _layer(k0: RawGroup, layer, name: str) -> SemilinearSet:
        periods = tuple(k0.vector(p, f"{name}.layer") for p in layer.periods)
        components = tuple(LinearComponent(k0.vector(o, f"{name}.layer"), periods) for o in layer.offsets)
        return SemilinearSet(k0.group, components)

    # ------------------------------------------------------------ let

    def _build_let(self, stmt: LetDef) -> LatticedKModule:
        model = self._evaluate(stmt.expr, stmt.name)
        return model if model.name == stmt.name else model.renamed(stmt.name)

    def _evaluate(self, expr, name: Optional[str]) -> LatticedKModule:
        if isinstance(expr, Ref):
            return self.get(expr.name)
        assert isinstance(expr, Call)
        args = [self._evaluate(arg, None) for arg in expr.args]
        if expr.op == 'sum':
            total = args[0]
            for arg in args[1:]:
                total = direct_sum(total, arg)
            return total
        if expr.op == 'unitize':
            return unitize(args[0], name=name)
        if expr.op == 'stabilize':
            return stabilize(args[0], name=name)
        ideal_part, quotient_part = args
        extension_class = expr.extension_class
        if extension_class != 'split':
            extension_class = self._explicit_class(extension_class, ideal_part, quotient_part)
        return build_extension(ideal_part, quotient_part, extension_class, name=name or "E")

    def _explicit_class(self, name: str, ideal_part: LatticedKModule,
                        quotient_part: LatticedKModule) -> ExplicitClass:
        """
        把 class 定义换成规范坐标

        iota 给出 B 的规范生成元在 E 书写坐标下的像，
        pi 给出 E 每个书写生成元在 A 规范坐标下的像。
        """
        stmt = self.definitions[name]
        k0, k1 = RawGroup(stmt.get('k0')), RawGroup(stmt.get('k1'))
        b, a = ideal_part.fiber(ideal_part.top), quotient_part.fiber(quotient_part.top)
        return ExplicitClass(
            k0=k0.group, k1=k1.group,
            iota0=k0.hom_into(b.group(0), stmt.get('iota0'), f"{name}.iota0"),
            iota1=k1.hom_into(b.group(1), stmt.get('iota1'), f"{name}.iota1"),
            pi0=k0.hom_from(a.group(0), stmt.get('pi0'), f"{name}.pi0"),
            pi1=k1.hom_from(a.group(1), stmt.get('pi1'), f"{name}.pi1"),
        )

    # ------------------------------------------------------------ 批量

    def build_all(self) -> Dict[str, LatticedKModule]:
        return {name: self.get(name) for name in self.model_names()}


def load_context(programs: Sequence[Program], coefficients: CoefficientSet,
                 countable_truncation: int = 2) -> ModelContext:
    return ModelContext(merge_programs(programs), coefficients, countable_truncation)
