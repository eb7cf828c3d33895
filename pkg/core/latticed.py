"""
格化全K理论 - 以理想格分次、纤维为Λ-模的预序幺半群 V̲_u(A)

一个元素 VElem = (理想 I, V_p(I) 中的 K0 分量 v, 辅助分量 aux)。
aux 按槽位 aux_slots() 排列: K1 与每个 n ∈ N 的 (K0;Z/n, K1;Z/n)。
"""

from dataclasses import dataclass, field, replace
from functools import reduce
from itertools import combinations, product
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .errors import InvalidSpecError, LayerClosureError, MalformedStructureError
from .lambda_module import (
    CoefficientSet, LambdaModule, LambdaMorphism, Slot, check_lambda_linear, validate_lambda_module,
)
from .lattice import FiniteLattice
from .premon import FiniteMonoid, algebraic_preorder, is_scale
from .semilinear import LinearComponent, SemilinearSet
from .validator import ValidationReport
from .zmodule import FgAbGroup, Vector, lcm


@dataclass(frozen=True)
class VElem:
    """V̲ 的元素；相等性区分理想标签"""
    ideal: str
    v: Vector
    aux: Tuple[Vector, ...]

    def to_dict(self) -> Dict:
        return {'ideal': self.ideal, 'v': list(self.v), 'aux': [list(a) for a in self.aux]}

    def __str__(self) -> str:
        return f"({self.ideal}, {list(self.v)})" if not any(any(a) for a in self.aux) \
            else f"({self.ideal}, {list(self.v)}, {[list(a) for a in self.aux]})"


@dataclass(frozen=True)
class Scale:
    """尺度: unit（单位类生成）、generators（显式生成元）或 full（整个正部分）"""
    kind: str = 'full'
    elements: Tuple[VElem, ...] = ()

    def __post_init__(self):
        if self.kind not in ('unit', 'generators', 'full'):
            raise InvalidSpecError(f"未知的尺度类型: {self.kind}")
        if self.kind == 'unit' and len(self.elements) != 1:
            raise InvalidSpecError("单位尺度恰好需要一个单位类")

    @property
    def unit(self) -> Optional[VElem]:
        return self.elements[0] if self.kind == 'unit' else None

    def to_dict(self) -> Dict:
        return {'kind': self.kind, 'elements': [e.to_dict() for e in self.elements]}


@dataclass(frozen=True)
class ExtensionProvenance:
    """扩张构造的来源，供典范态射使用"""
    ideal_part: 'LatticedKModule'
    quotient_part: 'LatticedKModule'
    top: str
    iota_fiber: LambdaMorphism
    pi_fiber: LambdaMorphism


@dataclass(frozen=True)
class LatticedKModule:
    """
    V̲_u(A) 的有限模型

    Attributes:
        lattice: 理想格
        fibers: 每个理想的Λ-模 K̲(I)
        connect: 每对 I ≤ J 的 δ_{IJ}
        layers: 每个理想的 V_p(I) ⊆ K0(I)
        scale: 尺度
        purely_infinite: 允许层中含零类的理想（Kirchberg 型与 O2-稳定型）
        presets: 构造中触发的建模预设
    """
    name: str
    lattice: FiniteLattice
    fibers: Dict[str, LambdaModule]
    connect: Dict[Tuple[str, str], LambdaMorphism]
    layers: Dict[str, SemilinearSet]
    scale: Scale = Scale()
    purely_infinite: FrozenSet[str] = frozenset()
    presets: Tuple[str, ...] = ()
    provenance: Optional[ExtensionProvenance] = field(default=None, compare=False, repr=False)

    __hash__ = None

    @property
    def coefficients(self) -> CoefficientSet:
        return self.fibers[self.lattice.bottom].coefficients

    @property
    def top(self) -> str:
        return self.lattice.top

    @property
    def bottom(self) -> str:
        return self.lattice.bottom

    def fiber(self, ideal: str) -> LambdaModule:
        return self.fibers[ideal]

    def k0(self, ideal: str) -> FgAbGroup:
        return self.fibers[ideal].group(0)

    def delta(self, source: str, target: str) -> LambdaMorphism:
        try:
            return self.connect[(source, target)]
        except KeyError:
            raise MalformedStructureError(f"缺少连接映射 δ[{source},{target}]") from None

    def aux_slots(self) -> List[Slot]:
        return [(1, 0)] + [(j, n) for n in self.coefficients for j in (0, 1)]

    def aux_zero(self, ideal: str) -> Tuple[Vector, ...]:
        fiber = self.fibers[ideal]
        return tuple(fiber.groups[s].zero() for s in self.aux_slots())

    def neutral(self) -> VElem:
        return VElem(self.bottom, self.k0(self.bottom).zero(), self.aux_zero(self.bottom))

    def velem(self, ideal: str, v: Sequence[int], aux: Optional[Sequence[Sequence[int]]] = None) -> VElem:
        """构造并规范化元素（不检查层成员关系）"""
        fiber = self.fibers[ideal]
        if aux is None:
            aux_norm = self.aux_zero(ideal)
        else:
            aux_norm = tuple(fiber.groups[s].normalize(a) for s, a in zip(self.aux_slots(), aux))
        return VElem(ideal, fiber.group(0).normalize(v), aux_norm)

    def push(self, x: VElem, target: str) -> VElem:
        """沿 δ_{I_x, target} 推前"""
        if not self.lattice.leq(x.ideal, target):
            raise MalformedStructureError(f"无法把 {x.ideal} 推前到不在其上方的 {target}")
        delta = self.delta(x.ideal, target)
        v = delta.component(0, 0).apply(x.v)
        aux = tuple(delta.components[s].apply(a) for s, a in zip(self.aux_slots(), x.aux))
        return VElem(target, v, aux)

    def is_element(self, x: VElem) -> bool:
        return x.ideal in self.layers and self.layers[x.ideal].contains(x.v)

    def layer_elements(self, ideal: str, bound: int) -> List[VElem]:
        """层中 V-级（aux = 0）元素的有界枚举"""
        return [self.velem(ideal, v) for v in self.layers[ideal].elements(bound)]

    def elements(self, bound: int) -> List[VElem]:
        items: List[VElem] = []
        for ideal in self.lattice.topological_order():
            items.extend(self.layer_elements(ideal, bound))
        return items

    def layer_generators(self, ideal: str) -> List[VElem]:
        """层的 offset 以及 offset + period"""
        layer = self.layers[ideal]
        group = layer.ambient
        found: List[VElem] = []
        for comp in layer.components:
            for v in [comp.offset] + [group.add(comp.offset, p) for p in comp.periods]:
                x = self.velem(ideal, v)
                if x not in found:
                    found.append(x)
        return found

    def renamed(self, name: str) -> 'LatticedKModule':
        return replace(self, name=name)

    def with_preset(self, preset: str) -> 'LatticedKModule':
        if preset in self.presets:
            return self
        return replace(self, presets=self.presets + (preset,))

    def describe(self) -> Dict:
        return {
            'name': self.name,
            'lattice': self.lattice.to_dict(),
            'fibers': {i: self.fibers[i].describe() for i in self.lattice.topological_order()},
            'layers': {i: self.layers[i].to_dict() for i in self.lattice.topological_order()},
            'purely_infinite': sorted(self.purely_infinite),
            'scale': self.scale.to_dict(),
            'presets': list(self.presets),
        }


# ---------------------------------------------------------------- 加法与序

def add_v(model: LatticedKModule, a: VElem, b: VElem) -> VElem:
    """
    x + y: 理想取并，两边沿 δ 推前到并后在纤维中相加

    Raises:
        LayerClosureError: 结果不在目标层中（说明模型已损坏）
    """
    join = model.lattice.join(a.ideal, b.ideal)
    pa, pb = model.push(a, join), model.push(b, join)
    fiber = model.fiber(join)
    v = fiber.group(0).add(pa.v, pb.v)
    aux = tuple(fiber.groups[s].add(x, y) for s, x, y in zip(model.aux_slots(), pa.aux, pb.aux))
    if not model.layers[join].contains(v):
        raise LayerClosureError(f"{a} + {b} 的 K0 分量 {list(v)} 不在 V_p({join}) 中")
    return VElem(join, v, aux)


def multiple_v(model: LatticedKModule, k: int, x: VElem) -> VElem:
    result = model.neutral()
    for _ in range(k):
        result = add_v(model, result, x)
    return result


def leq_v(model: LatticedKModule, a: VElem, b: VElem) -> bool:
    """
    a ≤ b: I_a ≤ I_b，δ(aux_a) = aux_b，且存在 K ≤ I_b 与 z ∈ V_p(K)
    使 I_a ∨ K = I_b 且 δ(v_a) + δ(z) = v_b
    """
    lattice = model.lattice
    if not lattice.leq(a.ideal, b.ideal):
        return False
    pushed = model.push(a, b.ideal)
    if pushed.aux != b.aux:
        return False
    group = model.k0(b.ideal)
    gap = group.sub(b.v, pushed.v)
    for k in lattice.down_set(b.ideal):
        if lattice.join(a.ideal, k) != b.ideal:
            continue
        if k == lattice.bottom:
            if not any(gap):
                return True
            continue
        image = model.layers[k].pushforward(model.delta(k, b.ideal).component(0, 0))
        if image.contains(gap):
            return True
    return False


# ---------------------------------------------------------------- 校验

def _check_layers(model: LatticedKModule, report: ValidationReport) -> None:
    bottom = model.bottom
    for ideal in model.lattice.topological_order():
        layer = model.layers.get(ideal)
        if layer is None:
            raise MalformedStructureError(f"缺少层 V_p({ideal})")
        if layer.ambient != model.k0(ideal):
            raise MalformedStructureError(f"层 V_p({ideal}) 的环境群与 K0({ideal}) 不一致")
        if ideal == bottom:
            report.add("layer[0]=neutral",
                       layer.is_bounded() and layer.elements() == [layer.ambient.zero()],
                       "最小理想的层必须恰为 {0}")
            continue
        report.add(f"layer-nonempty[{ideal}]", not layer.is_empty())
        if ideal not in model.purely_infinite:
            report.add(f"layer-disjoint[{ideal}]", not layer.contains_zero(),
                       "零类只能出现在最小理想的层（或纯无限层）中")
        if not layer.is_bounded():
            report.warn(f"V_p({ideal}) 无界，闭包只在生成元上检查")


def _check_closure(model: LatticedKModule, report: ValidationReport) -> None:
    lattice = model.lattice
    ordered = lattice.topological_order()
    for i, first in enumerate(ordered):
        for second in ordered[i:]:
            if first == lattice.bottom or second == lattice.bottom:
                continue
            join = lattice.join(first, second)
            target = model.layers[join]
            ok = True
            for x in model.layer_generators(first):
                for y in model.layer_generators(second):
                    v = model.k0(join).add(model.push(x, join).v, model.push(y, join).v)
                    if not target.contains(v):
                        ok = False
                        break
                if not ok:
                    break
            report.add(f"layer-closure[{first},{second}]", ok)


def _check_connect(model: LatticedKModule, report: ValidationReport,
                   reference: Optional[LatticedKModule]) -> None:
    lattice = model.lattice
    pairs = lattice.comparable_pairs()
    for a, b in pairs:
        delta = model.delta(a, b)
        if delta.source != model.fibers[a]:
            raise MalformedStructureError(f"δ[{a},{b}] 的源不是 K̲({a})")
        if delta.target != model.fibers[b]:
            raise MalformedStructureError(f"δ[{a},{b}] 的目标不是 K̲({b})")
        if a == b:
            report.add(f"delta-identity[{a}]", delta.components == LambdaMorphism.identity(model.fibers[a]).components)
        report.add(f"delta-lambda-linear[{a},{b}]", check_lambda_linear(delta))
    for a, b in pairs:
        for c in lattice.up_set(b):
            if a == b or b == c:
                continue
            composite = model.delta(b, c).compose(model.delta(a, b))
            report.add(f"delta-functorial[{a},{b},{c}]", composite.components == model.delta(a, c).components)
    ordered = lattice.topological_order()
    for i, first in enumerate(ordered):
        for second in ordered[i + 1:]:
            meet, join = lattice.meet(first, second), lattice.join(first, second)
            left = model.delta(first, join).compose(model.delta(meet, first))
            right = model.delta(second, join).compose(model.delta(meet, second))
            report.add(f"gr-square[{first},{second}]", left.components == right.components)
    if reference is not None:
        iso = reference.lattice.find_isomorphism(model.lattice)
        if iso is None:
            report.add("gr-square-reference", False, "与参考模型的理想格不同构")
            return
        back = {y: x for x, y in iso.items()}
        for a, b in pairs:
            same = model.delta(a, b).components == reference.delta(back[a], back[b]).components
            report.add(f"gr-square-reference[{a},{b}]", same)


def _check_scale(model: LatticedKModule, report: ValidationReport) -> None:
    scale = model.scale
    for e in scale.elements:
        report.add(f"scale-element[{e.ideal}]",
                   model.is_element(e) and not any(any(a) for a in e.aux),
                   "尺度元素必须是正的层元素")
    if scale.kind == 'unit':
        report.add("scale-unit-full", scale.unit.ideal == model.top, "单位类必须在最大理想中满")
    if scale.kind == 'full':
        return
    if not all(layer.is_bounded() for layer in model.layers.values()):
        report.warn("层无界，尺度公理只在生成元上检查")
        return
    monoid = finitize_v(model)
    delta = _scale_down_set(model, monoid)
    report.add("scale-axioms", is_scale(monoid, delta))


def _scale_down_set(model: LatticedKModule, monoid: FiniteMonoid) -> List[int]:
    generators = list(model.scale.elements)
    return [
        i for i, x in enumerate(monoid.labels)
        if any(leq_v(model, x, g) for g in generators)
    ]


def validate_latticed_module(model: LatticedKModule,
                             reference: Optional[LatticedKModule] = None) -> ValidationReport:
    """
    检查 LatticedKModule 的全部不变量

    Args:
        model: 待检查模型
        reference: 参考模型（用于比对 δ，可选）

    Returns:
        ValidationReport

    Raises:
        MalformedStructureError: 结构缺失
    """
    report = ValidationReport(subject=model.name)
    lattice = model.lattice
    report.add("lattice", lattice.size >= 1)
    coefficients = model.coefficients
    for ideal in lattice.topological_order():
        fiber = model.fibers.get(ideal)
        if fiber is None:
            raise MalformedStructureError(f"缺少纤维 K̲({ideal})")
        if fiber.coefficients != coefficients:
            raise MalformedStructureError(f"纤维 K̲({ideal}) 的系数集不一致")
        report.extend(validate_lambda_module(fiber), prefix=f"fiber[{ideal}].")
    report.add("fiber[0]=zero", model.fibers[lattice.bottom].is_trivial())
    _check_connect(model, report, reference)
    _check_layers(model, report)
    _check_closure(model, report)
    _check_scale(model, report)
    return report


# ---------------------------------------------------------------- 理想

def restrict(model: LatticedKModule, ideal: str) -> LatticedKModule:
    """限制到下集 ↓ideal"""
    sub = model.lattice.restrict(ideal)
    keep = set(sub.elements)
    scale = model.scale if ideal == model.top else Scale('full')
    return LatticedKModule(
        name=f"{model.name}|{ideal}",
        lattice=sub,
        fibers={i: f for i, f in model.fibers.items() if i in keep},
        connect={k: d for k, d in model.connect.items() if k[0] in keep and k[1] in keep},
        layers={i: l for i, l in model.layers.items() if i in keep},
        scale=scale,
        purely_infinite=frozenset(model.purely_infinite & keep),
        presets=model.presets,
    )


def ideals_of_latticed(model: LatticedKModule) -> List[LatticedKModule]:
    """每个理想 I 对应限制到 ↓I 的子模型，与理想格序同构"""
    return [restrict(model, ideal) for ideal in model.lattice.topological_order()]


# ---------------------------------------------------------------- 有限化

@dataclass(frozen=True)
class Truncation:
    """
    无界层的坐标截断

    saturating 中的自由坐标在 cap 处饱和（≥ cap 的值都并为吸收元 cap），
    其余自由坐标按 modulus = lcm(cap, 挠指数) 取模。两者合起来是 V-级幺半群的同余。
    """
    cap: int
    modulus: int
    saturating: Dict[str, FrozenSet[int]]
    wrapping: Dict[str, FrozenSet[int]]

    def reduce(self, model: LatticedKModule, ideal: str, v: Sequence[int]) -> Vector:
        v = list(model.k0(ideal).normalize(v))
        for c in self.saturating[ideal]:
            v[c] = min(v[c], self.cap)
        for c in self.wrapping[ideal]:
            v[c] %= self.modulus
        return tuple(v)

    def is_exact(self, x: VElem) -> bool:
        """标签是否就是一个真实元素（没有取模坐标，饱和坐标都低于 cap）"""
        return not self.wrapping[x.ideal] and all(x.v[c] < self.cap for c in self.saturating[x.ideal])

    def to_dict(self) -> Dict:
        return {
            'cap': self.cap,
            'modulus': self.modulus,
            'saturating': {i: sorted(c) for i, c in sorted(self.saturating.items()) if c},
            'wrapping': {i: sorted(c) for i, c in sorted(self.wrapping.items()) if c},
        }


def _nonnegative_coordinates(layer: SemilinearSet) -> Set[int]:
    return {
        c for c in range(layer.ambient.rank)
        if all(comp.offset[c] >= 0 and all(p[c] >= 0 for p in comp.periods) for comp in layer.components)
    }


def truncation(model: LatticedKModule, cap: Optional[int]) -> Optional[Truncation]:
    """
    选出可以饱和的坐标

    从层上非负的自由坐标出发，反复降级直到与所有 δ 相容:
    饱和坐标只接收非负系数的饱和坐标，取模坐标（与挠坐标）从饱和坐标接收的系数必须整除于其模。

    Returns:
        层都有界时返回 None

    Raises:
        InvalidSpecError: 存在无界层而未给出 cap
    """
    unbounded = [i for i, layer in model.layers.items() if not layer.is_bounded()]
    if not unbounded:
        return None
    if cap is None:
        raise InvalidSpecError(f"层 {sorted(unbounded)} 无界，有限化需要坐标上界 cap")
    cap = max(int(cap), 1)
    modulus = reduce(lcm, [model.k0(i).exponent() for i in model.lattice.elements], cap)
    saturating = {i: _nonnegative_coordinates(model.layers[i]) for i in model.lattice.elements}

    changed = True
    while changed:
        changed = False
        for lower, upper in model.lattice.comparable_pairs():
            source, target = model.k0(lower), model.k0(upper)
            entries = model.delta(lower, upper).component(0, 0).matrix.entries
            for r in range(target.ngens):
                for c in range(source.rank):
                    entry = entries[r][c]
                    if r in saturating[upper]:
                        if entry < 0 or (entry and c not in saturating[lower]):
                            saturating[upper].discard(r)
                            changed = True
                    elif c in saturating[lower] and entry % (target.orders[r] or modulus):
                        saturating[lower].discard(c)
                        changed = True

    return Truncation(
        cap, modulus,
        {i: frozenset(s) for i, s in saturating.items()},
        {i: frozenset(range(model.k0(i).rank)) - frozenset(s) for i, s in saturating.items()},
    )


def _layer_classes(model: LatticedKModule, ideal: str, trunc: Truncation) -> Dict[Vector, Vector]:
    """截断后的类 -> 一个真实代表元；无限阶周期系数取 0..cap+modulus-1 即可覆盖所有类"""
    layer = model.layers[ideal]
    group = layer.ambient
    classes: Dict[Vector, Vector] = {}
    for comp in layer.components:
        ranges = [range(group.element_order(p) or trunc.cap + trunc.modulus) for p in comp.periods]
        for combo in product(*ranges):
            v = list(comp.offset)
            for k, p in zip(combo, comp.periods):
                v = [a + k * b for a, b in zip(v, p)]
            v = group.normalize(v)
            classes.setdefault(trunc.reduce(model, ideal, v), v)
    return dict(sorted(classes.items()))


def finitize_v(model: LatticedKModule, cap: Optional[int] = None) -> FiniteMonoid:
    """
    V-级正部分（aux = 0）的有限幺半群

    层有界时标签就是 VElem 本身；否则按 truncation() 截断: 饱和坐标在 cap 处吸收，
    其余坐标取模。cap 以下的真实元素原样嵌入。

    Raises:
        InvalidSpecError: 存在无界层而未给出 cap
    """
    trunc = truncation(model, cap)
    labels: List[VElem] = []
    representatives: Dict[VElem, Vector] = {}
    for ideal in model.lattice.topological_order():
        if trunc is None:
            classes = {v: v for v in model.layers[ideal].elements()}
        else:
            classes = _layer_classes(model, ideal, trunc)
        for label, rep in classes.items():
            x = VElem(ideal, label, model.aux_zero(ideal))
            labels.append(x)
            representatives[x] = rep

    index = {x: i for i, x in enumerate(labels)}
    lattice = model.lattice
    table = []
    for a in labels:
        row = []
        for b in labels:
            join = lattice.join(a.ideal, b.ideal)
            va = model.delta(a.ideal, join).component(0, 0).apply(representatives[a])
            vb = model.delta(b.ideal, join).component(0, 0).apply(representatives[b])
            v = model.k0(join).add(va, vb)
            key = VElem(join, v if trunc is None else trunc.reduce(model, join, v), model.aux_zero(join))
            if key not in index:
                raise LayerClosureError(f"有限化后 {a} + {b} 不在层中")
            row.append(index[key])
        table.append(tuple(row))

    # 最小理想排在拓扑序首位，其层恰为 {0}
    return FiniteMonoid(tuple(labels), tuple(table), 0)


def preorder_agreement(model: LatticedKModule, monoid: FiniteMonoid,
                       trunc: Optional[Truncation] = None) -> Dict:
    """在真实（未截断）标签上比较有限幺半群的代数预序与 leq_v"""
    order = algebraic_preorder(monoid)
    exact = [i for i, x in enumerate(monoid.labels) if trunc is None or trunc.is_exact(x)]
    mismatches = []
    for i in exact:
        for j in exact:
            x, y = monoid.labels[i], monoid.labels[j]
            if order.leq(i, j) != leq_v(model, x, y):
                mismatches.append({'x': x.to_dict(), 'y': y.to_dict(), 'premon': order.leq(i, j)})
    return {'holds': not mismatches, 'checked': len(exact), 'mismatches': mismatches}


# ---------------------------------------------------------------- Grothendieck 恢复

@dataclass
class RecoveredInvariant:
    """Gr(V̲) 及其正锥与尺度像"""
    fiber: LambdaModule
    positive_cone: SemilinearSet
    ordered: bool
    scale_kind: str
    scale_image: List[Vector] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            'fiber': self.fiber.describe(),
            'positive_cone': self.positive_cone.to_dict(),
            'ordered': self.ordered,
            'scale': {'kind': self.scale_kind, 'elements': [list(v) for v in self.scale_image]},
        }


def positive_cone(model: LatticedKModule) -> SemilinearSet:
    """
    由 {δ_{I,⊤}(V_p(I))} 生成的子半群，表示为半线性集

    每个使用到的分量子集 U 贡献 Σ_U offset + N{offset, period : U}。
    """
    top = model.top
    group = model.k0(top)
    pushed: List[LinearComponent] = []
    for ideal in model.lattice.topological_order():
        image = model.layers[ideal].pushforward(model.delta(ideal, top).component(0, 0))
        for comp in image.components:
            if comp not in pushed:
                pushed.append(comp)
    result: List[LinearComponent] = [LinearComponent(group.zero())]
    for r in range(1, len(pushed) + 1):
        for subset in combinations(pushed, r):
            offset = group.zero()
            periods: List[Vector] = []
            for comp in subset:
                offset = group.add(offset, comp.offset)
                periods.append(comp.offset)
                periods.extend(comp.periods)
            result.append(LinearComponent(offset, tuple(periods)))
    return SemilinearSet(group, tuple(result))


def grothendieck_recover(model: LatticedKModule, bound: int = 5) -> RecoveredInvariant:
    """
    Gr(V̲(X)) = K̲(⊤)，连同正锥与尺度像

    Args:
        model: 已校验的模型
        bound: 尺度像区间 [0, u] 的枚举界
    """
    top = model.top
    group = model.k0(top)
    cone = positive_cone(model)
    generators = [g for g in cone.generators() if any(g) and cone.contains(g)]
    ordered = not any(cone.contains(group.neg(g)) for g in generators)

    scale_image: List[Vector] = []
    if model.scale.kind != 'full':
        units = [model.push(e, top).v for e in model.scale.elements]
        for x in cone.elements(bound):
            if any(cone.contains(group.sub(u, x)) for u in units) and x not in scale_image:
                scale_image.append(x)
        scale_image.sort()
    return RecoveredInvariant(model.fiber(top), cone, ordered, model.scale.kind, scale_image)


# ---------------------------------------------------------------- 无限性与消去律

def _layer_kind(layer: SemilinearSet) -> str:
    if layer.ambient.is_trivial:
        return 'idempotent'
    if layer.is_bounded():
        return 'torsion'
    return 'free'


def infinite_witness(model: LatticedKModule) -> Optional[Tuple[VElem, VElem]]:
    """
    (x, z) 使 z ≠ 0 且 x + z = x

    这样的 z 存在当且仅当某个非零理想 I_z ≤ I_x 满足 0 ∈ δ_{I_z,I_x}(V_p(I_z))。
    """
    lattice = model.lattice
    for iz in lattice.topological_order():
        if iz == lattice.bottom:
            continue
        for ix in lattice.up_set(iz):
            if model.layers[ix].is_empty():
                continue
            hom = model.delta(iz, ix).component(0, 0)
            image = model.layers[iz].pushforward(hom)
            hit = image.member(image.ambient.zero())
            if hit is None:
                continue
            z = model.velem(iz, model.layers[iz].evaluate(hit))
            x = model.velem(ix, model.layers[ix].components[0].offset)
            return x, z
    return None


def detect_infinite(model: LatticedKModule) -> Dict:
    """
    检测无限元素

    Returns:
        {'infinite', 'witness', 'layers': 每个理想的层类型与自身是否含零类}
    """
    witness = infinite_witness(model)
    layers = {}
    for ideal in model.lattice.topological_order():
        if ideal == model.bottom:
            continue
        layer = model.layers[ideal]
        layers[ideal] = {'kind': _layer_kind(layer), 'self_infinite': layer.contains_zero()}
    return {
        'infinite': witness is not None,
        'witness': None if witness is None else {'x': witness[0].to_dict(), 'z': witness[1].to_dict()},
        'layers': layers,
        'quotient_top_infinite': layers.get(model.top, {}).get('self_infinite', False),
    }


def cancellation_witness(model: LatticedKModule) -> Optional[Tuple[VElem, VElem, VElem]]:
    """V-级 (a, b, c) 使 a + c = b + c 而 a ≠ b"""
    infinite = infinite_witness(model)
    if infinite is not None:
        x, z = infinite
        return z, model.neutral(), x
    lattice = model.lattice
    ideals = lattice.topological_order()
    nonempty = [i for i in ideals if not model.layers[i].is_empty()]
    for ia in ideals:
        for ib in ideals:
            for ic in nonempty:
                join = lattice.join(ia, ic)
                if lattice.join(ib, ic) != join:
                    continue
                if ia != ib:
                    if ideals.index(ia) > ideals.index(ib):
                        continue
                    left = model.layers[ia].pushforward(model.delta(ia, join).component(0, 0))
                    right = model.layers[ib].pushforward(model.delta(ib, join).component(0, 0))
                    common = left.intersection_witness(right)
                    if common is None:
                        continue
                    va = _preimage_in_layer(model, ia, join, common)
                    vb = _preimage_in_layer(model, ib, join, common)
                    c = model.velem(ic, model.layers[ic].components[0].offset)
                    return model.velem(ia, va), model.velem(ib, vb), c
                elif join != ia:
                    pair = model.layers[ia].collision(model.delta(ia, join).component(0, 0))
                    if pair is None:
                        continue
                    c = model.velem(ic, model.layers[ic].components[0].offset)
                    return model.velem(ia, pair[0]), model.velem(ia, pair[1]), c
    return None


def _preimage_in_layer(model: LatticedKModule, ideal: str, join: str, value: Vector) -> Vector:
    layer = model.layers[ideal]
    image = layer.pushforward(model.delta(ideal, join).component(0, 0))
    hit = image.member(value)
    return layer.evaluate(hit)


def detect_cancellation(model: LatticedKModule) -> Dict:
    witness = cancellation_witness(model)
    return {
        'cancellative': witness is None,
        'witness': None if witness is None else {
            'a': witness[0].to_dict(), 'b': witness[1].to_dict(), 'c': witness[2].to_dict(),
        },
    }


# ---------------------------------------------------------------- 尺度吸收与支撑唯一性

def scale_absorption(model: LatticedKModule, bound: int = 5, k_max: int = 20) -> Dict:
    """
    对每个有界枚举的 V-级元素 x，寻找 k ≤ k_max 使 x ≤ k·e（e 为尺度生成元）

    Raises:
        InvalidSpecError: 模型没有单位或显式生成元尺度
    """
    if model.scale.kind == 'full':
        raise InvalidSpecError("尺度吸收只对有单位（或显式生成元）的模型有意义")
    failures = []
    checked = 0
    multiples = {
        e: [multiple_v(model, k, e) for k in range(k_max + 1)]
        for e in model.scale.elements
    }
    for x in model.elements(bound):
        checked += 1
        if not any(leq_v(model, x, m) for ms in multiples.values() for m in ms):
            failures.append(x.to_dict())
    return {'holds': not failures, 'checked': checked, 'k_max': k_max, 'failures': failures}


def unique_support(model: LatticedKModule, bound: int = 5) -> Dict:
    """不同理想的层推到顶后互不相交（有界枚举）"""
    top = model.top
    images = {
        ideal: model.layers[ideal].pushforward(model.delta(ideal, top).component(0, 0))
        for ideal in model.lattice.topological_order()
    }
    clashes = []
    ideals = list(images)
    for i, first in enumerate(ideals):
        for second in ideals[i + 1:]:
            for v in images[first].elements(bound):
                if images[second].contains(v):
                    clashes.append({'ideals': [first, second], 'k0': list(v)})
                    break
    return {'holds': not clashes, 'clashes': clashes}
