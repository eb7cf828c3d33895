"""
模型目录 - 各类块、直和、单位化、稳定化与平凡边界扩张的构造器

所有构造器返回已通过 validate_latticed_module 的模型。
"""

from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple, Union

from .errors import InvalidSpecError, MalformedStructureError, ProvenanceMissingError
from .lambda_module import (
    CoefficientSet, LambdaModule, LambdaMorphism, check_lambda_linear, lambda_direct_sum,
    standard_lambda_module, standard_lambda_morphism, zero_lambda_module,
)
from .lattice import BOTTOM, FiniteLattice
from .latticed import ExtensionProvenance, LatticedKModule, Scale, VElem, validate_latticed_module
from .semilinear import LinearComponent, SemilinearSet
from .vmorphism import VMorphism
from .zmodule import AbHom, FgAbGroup, Vector, is_exact_at, subgroup_contains

BLOCK_KINDS = ('stably_finite_simple', 'kirchberg', 'o2_stable', 'compacts_like')

EXTENSION_LAYER_PRESET = "extension-top-layer: preimage of the quotient layer, K0 of the ideal unrestricted"
COUNTABLE_PRESET = "countable-sum-truncation"


@dataclass
class BlockSpec:
    """单个块的构造规格"""
    name: str
    kind: str
    coefficients: CoefficientSet
    k0: FgAbGroup = field(default_factory=FgAbGroup)
    k1: FgAbGroup = field(default_factory=FgAbGroup)
    cone: List[Vector] = field(default_factory=list)
    unit: Optional[Vector] = None
    shape: str = 'point'
    copies: int = 1
    fiber: Optional[LambdaModule] = None
    layer: Optional[SemilinearSet] = None

    def __post_init__(self):
        if self.kind not in BLOCK_KINDS:
            raise InvalidSpecError(f"未知的块类型: {self.kind}（可选: {', '.join(BLOCK_KINDS)}）")
        if self.copies < 1:
            raise InvalidSpecError("copies 至少为 1")


@dataclass
class ExplicitClass:
    """显式扩张类: K_*(E) 及两条短正合列中的映射"""
    k0: FgAbGroup
    k1: FgAbGroup
    iota0: AbHom
    iota1: AbHom
    pi0: AbHom
    pi1: AbHom


ExtensionClass = Union[str, ExplicitClass]


def certify(model: LatticedKModule) -> LatticedKModule:
    """校验失败时抛出 InvalidSpecError"""
    report = validate_latticed_module(model)
    if not report.valid:
        raise InvalidSpecError(f"{model.name} 未通过校验: {'; '.join(report.errors[:5])}")
    return model


def _two_point(name: str, fiber: LambdaModule, layer: SemilinearSet, scale: Scale,
               purely_infinite: bool) -> LatticedKModule:
    bottom_fiber = zero_lambda_module(fiber.coefficients)
    lattice = FiniteLattice.chain([BOTTOM, name])
    connect = {
        (BOTTOM, BOTTOM): LambdaMorphism.identity(bottom_fiber),
        (BOTTOM, name): LambdaMorphism.zero(bottom_fiber, fiber),
        (name, name): LambdaMorphism.identity(fiber),
    }
    layers = {BOTTOM: SemilinearSet.singleton(bottom_fiber.group(0), ()), name: layer}
    return LatticedKModule(
        name=name, lattice=lattice, fibers={BOTTOM: bottom_fiber, name: fiber},
        connect=connect, layers=layers, scale=scale,
        purely_infinite=frozenset({name}) if purely_infinite else frozenset(),
    )


def _unit_scale(model: LatticedKModule, unit: Optional[Vector]) -> LatticedKModule:
    if unit is None:
        return model
    return replace(model, scale=Scale('unit', (model.velem(model.top, unit),)))


def _o2_stable(spec: BlockSpec) -> LatticedKModule:
    coefficients = spec.coefficients
    if spec.shape == 'point':
        names = [spec.name]
    elif spec.shape.startswith('chain:'):
        try:
            length = int(spec.shape.split(':', 1)[1])
        except ValueError:
            raise InvalidSpecError(f"无法解析格形状: {spec.shape}") from None
        if length < 1:
            raise InvalidSpecError("链长至少为 1")
        names = [f"{spec.name}{k}" for k in range(1, length + 1)]
    else:
        raise InvalidSpecError(f"未知的格形状: {spec.shape}（可选: point, chain:n）")
    lattice = FiniteLattice.chain([BOTTOM] + names)
    zero = zero_lambda_module(coefficients)
    fibers = {a: zero for a in lattice.elements}
    connect = {(a, b): LambdaMorphism.identity(zero) for a, b in lattice.comparable_pairs()}
    point = SemilinearSet.singleton(zero.group(0), ())
    layers = {a: point for a in lattice.elements}
    return LatticedKModule(
        name=spec.name, lattice=lattice, fibers=fibers, connect=connect, layers=layers,
        purely_infinite=frozenset(names),
    )


def _single_block(spec: BlockSpec) -> LatticedKModule:
    coefficients = spec.coefficients
    if spec.kind == 'o2_stable':
        if not (spec.k0.is_trivial and spec.k1.is_trivial) or spec.fiber is not None:
            raise InvalidSpecError("O2-稳定块的 K-群必须为零")
        return _o2_stable(spec)

    k0 = spec.k0
    if spec.kind == 'compacts_like':
        if spec.k0 != FgAbGroup() and spec.k0 != FgAbGroup.free(1):
            raise InvalidSpecError("compacts_like 块的 K0 必须是 Z")
        k0 = FgAbGroup.free(1)
    fiber = spec.fiber or standard_lambda_module(k0, spec.k1, coefficients)
    if fiber.coefficients != coefficients:
        raise InvalidSpecError("显式纤维的系数集与块不一致")
    group = fiber.group(0)

    if spec.layer is not None:
        layer = spec.layer
    elif spec.kind == 'stably_finite_simple':
        gens = [group.normalize(g) for g in spec.cone]
        if not gens or any(not any(g) for g in gens):
            raise InvalidSpecError("稳定有限单块需要非零的正锥生成元")
        layer = SemilinearSet(group, tuple(LinearComponent(g, tuple(gens)) for g in gens))
    elif spec.kind == 'kirchberg':
        layer = SemilinearSet.whole(group)
    else:
        layer = SemilinearSet.linear(group, (1,), [(1,)])

    flagged = spec.kind == 'kirchberg'
    model = _two_point(spec.name, fiber, layer, Scale(), flagged)
    return _unit_scale(model, spec.unit)


def build_block(spec: BlockSpec, truncated: bool = False) -> LatticedKModule:
    """
    由块规格构造模型；copies > 1 时取重命名副本的直和

    Args:
        spec: 块规格
        truncated: copies 来自可数直和的截断（记录为预设）

    Raises:
        InvalidSpecError: 规格不满足前置条件或结果未通过校验
    """
    model = certify(_single_block(spec))
    if spec.copies == 1:
        return model
    copies = [
        relabel(model, {a: f"{a}{k}" for a in model.lattice.elements if a != BOTTOM}, name=f"{spec.name}{k}")
        for k in range(1, spec.copies + 1)
    ]
    total = copies[0]
    for copy in copies[1:]:
        total = direct_sum(total, copy)
    total = total.renamed(spec.name)
    return total.with_preset(COUNTABLE_PRESET) if truncated else total


def zero_model(coefficients: CoefficientSet, name: str = "zero") -> LatticedKModule:
    fiber = zero_lambda_module(coefficients)
    lattice = FiniteLattice.point()
    return LatticedKModule(
        name=name, lattice=lattice, fibers={BOTTOM: fiber},
        connect={(BOTTOM, BOTTOM): LambdaMorphism.identity(fiber)},
        layers={BOTTOM: SemilinearSet.singleton(fiber.group(0), ())},
    )


# ---------------------------------------------------------------- 直和

def direct_sum(x: LatticedKModule, y: LatticedKModule, name: Optional[str] = None) -> LatticedKModule:
    """
    X ⊕ Y: 乘积格、逐理想的Λ-直和、乘积层

    Raises:
        InvalidSpecError: 系数集不一致
    """
    if x.coefficients != y.coefficients:
        raise InvalidSpecError(f"直和的系数集不一致: {x.coefficients} 与 {y.coefficients}")
    lattice, names = x.lattice.product(y.lattice)
    sums: Dict[str, Tuple[LambdaModule, List[LambdaMorphism], List[LambdaMorphism]]] = {}
    for (a, b), label in names.items():
        sums[label] = lambda_direct_sum([x.fiber(a), y.fiber(b)])

    connect = {}
    for (a, b), source in names.items():
        _, _, projs = sums[source]
        for (c, d), target in names.items():
            if not lattice.leq(source, target):
                continue
            _, injs, _ = sums[target]
            first = injs[0].compose(x.delta(a, c)).compose(projs[0])
            second = injs[1].compose(y.delta(b, d)).compose(projs[1])
            connect[(source, target)] = first.add(second)

    layers, flagged = {}, set()
    for (a, b), label in names.items():
        module, injs, _ = sums[label]
        maps = [injs[0].component(0, 0), injs[1].component(0, 0)]
        layers[label] = x.layers[a].product(y.layers[b], module.group(0), maps)
        zero_left = a == x.bottom or a in x.purely_infinite
        zero_right = b == y.bottom or b in y.purely_infinite
        if label != lattice.bottom and zero_left and zero_right:
            flagged.add(label)

    fibers = {label: sums[label][0] for label in names.values()}
    model = LatticedKModule(
        name=name or f"{x.name}+{y.name}", lattice=lattice, fibers=fibers, connect=connect,
        layers=layers, purely_infinite=frozenset(flagged),
        presets=tuple(dict.fromkeys(x.presets + y.presets)),
    )
    if x.scale.kind == 'unit' and y.scale.kind == 'unit':
        _, injs, _ = sums[model.top]
        unit = model.k0(model.top).add(injs[0].component(0, 0).apply(x.scale.unit.v),
                                       injs[1].component(0, 0).apply(y.scale.unit.v))
        model = replace(model, scale=Scale('unit', (model.velem(model.top, unit),)))
    return certify(model)


# ---------------------------------------------------------------- 单位化与稳定化

def unitize(x: LatticedKModule, name: Optional[str] = None) -> LatticedKModule:
    """
    X~: 在顶上加新理想 ⊤′，纤维为旧顶纤维 ⊕ K̲(C)，
    顶层为 {(v, s): s ≥ 1}，单位为 (0, 1)

    Raises:
        InvalidSpecError: X 已经有单位
    """
    if x.scale.kind == 'unit':
        raise InvalidSpecError(f"{x.name} 已经有单位，不能再单位化")
    coefficients = x.coefficients
    top = f"{x.top}~"
    lattice = x.lattice.with_top(top)
    old = x.fiber(x.top)
    fiber, injs, _ = lambda_direct_sum([old, standard_lambda_module(FgAbGroup.free(1), FgAbGroup(), coefficients)])

    connect = dict(x.connect)
    for ideal in x.lattice.elements:
        connect[(ideal, top)] = injs[0].compose(x.delta(ideal, x.top))
    connect[(top, top)] = LambdaMorphism.identity(fiber)

    group = fiber.group(0)
    inner, scalar = injs[0].component(0, 0), injs[1].component(0, 0)
    old_group = old.group(0)
    one = scalar.apply((1,))
    periods = [one]
    for i, d in enumerate(old_group.orders):
        e = inner.apply(old_group.generator(i))
        periods.append(e)
        if d == 0:
            periods.append(group.neg(e))
    layers = dict(x.layers)
    layers[top] = SemilinearSet.linear(group, one, periods)

    fibers = dict(x.fibers)
    fibers[top] = fiber
    model = LatticedKModule(
        name=name or f"{x.name}~", lattice=lattice, fibers=fibers, connect=connect, layers=layers,
        purely_infinite=x.purely_infinite, presets=x.presets,
    )
    model = replace(model, scale=Scale('unit', (model.velem(top, one),)))
    return certify(model)


def stabilize(x: LatticedKModule, name: Optional[str] = None) -> LatticedKModule:
    """X ⊗ K: 同一个 V̲，尺度取整个正部分"""
    return replace(x, name=name or f"{x.name}(x)K", scale=Scale(), provenance=None)


def relabel(x: LatticedKModule, mapping: Dict[str, str], name: Optional[str] = None) -> LatticedKModule:
    """
    重命名理想

    Raises:
        InvalidSpecError: 重命名后有重名
    """
    rename = lambda a: mapping.get(a, a)
    if len({rename(a) for a in x.lattice.elements}) != x.lattice.size:
        raise InvalidSpecError("重命名后理想名重复")
    scale = Scale(x.scale.kind, tuple(VElem(rename(e.ideal), e.v, e.aux) for e in x.scale.elements))
    return LatticedKModule(
        name=name or x.name,
        lattice=x.lattice.relabel(mapping),
        fibers={rename(a): f for a, f in x.fibers.items()},
        connect={(rename(a), rename(b)): d for (a, b), d in x.connect.items()},
        layers={rename(a): layer for a, layer in x.layers.items()},
        scale=scale,
        purely_infinite=frozenset(rename(a) for a in x.purely_infinite),
        presets=x.presets,
    )


# ---------------------------------------------------------------- 扩张

def _lift(hom: AbHom, value: Vector) -> Vector:
    coeffs = subgroup_contains(hom.target, hom.images(), value)
    if coeffs is None:
        raise InvalidSpecError(f"{list(value)} 不在商映射的像中")
    return hom.source.normalize(coeffs)


def _preimage_layer(pi0: AbHom, layer: SemilinearSet) -> SemilinearSet:
    """π0 下的原像: 偏移与周期各取一个提升，再加上 ±核生成元"""
    group = pi0.source
    kernel: List[Vector] = []
    for k in pi0.kernel_generators():
        kernel.extend([k, group.neg(k)])
    comps = [
        LinearComponent(_lift(pi0, c.offset), tuple(_lift(pi0, p) for p in c.periods) + tuple(kernel))
        for c in layer.components
    ]
    return SemilinearSet(group, tuple(comps))


def _fiber_maps(b_top: LambdaModule, a_top: LambdaModule,
                extension_class: ExtensionClass) -> Tuple[LambdaModule, LambdaMorphism, LambdaMorphism]:
    if extension_class == 'split':
        fiber, injs, projs = lambda_direct_sum([b_top, a_top])
        return fiber, injs[0], projs[1]
    if not isinstance(extension_class, ExplicitClass):
        raise InvalidSpecError(f"未知的扩张类: {extension_class}")
    cls = extension_class
    for j, iota, pi in ((0, cls.iota0, cls.pi0), (1, cls.iota1, cls.pi1)):
        if not (iota.is_injective() and pi.is_surjective() and is_exact_at(iota, pi)):
            raise InvalidSpecError(f"显式扩张类在 K{j} 处不构成短正合列")
    fiber = standard_lambda_module(cls.k0, cls.k1, b_top.coefficients)
    try:
        iota = standard_lambda_morphism(cls.iota0, cls.iota1, b_top, fiber)
        pi = standard_lambda_morphism(cls.pi0, cls.pi1, fiber, a_top)
    except MalformedStructureError as e:
        raise InvalidSpecError(f"显式扩张类要求两端纤维为标准Λ-模: {e}") from e
    if not (check_lambda_linear(iota) and check_lambda_linear(pi)):
        raise InvalidSpecError("显式扩张类诱导的纤维映射不是Λ-线性的")
    return fiber, iota, pi


def build_extension(ideal_part: LatticedKModule, quotient_part: LatticedKModule,
                    extension_class: ExtensionClass = 'split', name: str = "E",
                    top_layer: Optional[SemilinearSet] = None) -> LatticedKModule:
    """
    平凡边界的单位扩张 0 → B → E → A → 0

    Args:
        ideal_part: B（稳定，尺度为整个正部分）
        quotient_part: A（单位单: 两元素理想格、单位尺度）
        extension_class: 'split' 或 ExplicitClass
        name: E 的名字，同时是新顶理想的名字
        top_layer: 显式给出的顶层（覆盖预设）

    Returns:
        保留了来源信息的已校验模型

    Raises:
        InvalidSpecError: 前置条件不满足或显式类不正合
    """
    b, a = ideal_part, quotient_part
    if b.scale.kind != 'full':
        raise InvalidSpecError(f"理想部分 {b.name} 必须是稳定的（尺度为整个正部分）")
    if a.lattice.size != 2 or a.scale.kind != 'unit':
        raise InvalidSpecError(f"商部分 {a.name} 必须是单位单模型（两元素理想格、单位尺度）")
    if a.coefficients != b.coefficients:
        raise InvalidSpecError("扩张两端的系数集不一致")
    if name in b.lattice.elements:
        raise InvalidSpecError(f"扩张名 {name} 与理想部分的理想重名")

    fiber, iota_fiber, pi_fiber = _fiber_maps(b.fiber(b.top), a.fiber(a.top), extension_class)
    lattice = b.lattice.with_top(name)
    connect = dict(b.connect)
    for ideal in b.lattice.elements:
        connect[(ideal, name)] = iota_fiber.compose(b.delta(ideal, b.top))
    connect[(name, name)] = LambdaMorphism.identity(fiber)

    pi0 = pi_fiber.component(0, 0)
    presets = list(dict.fromkeys(b.presets + a.presets))
    if top_layer is None:
        layer = _preimage_layer(pi0, a.layers[a.top])
        presets.append(EXTENSION_LAYER_PRESET)
    else:
        layer = top_layer
    layers = dict(b.layers)
    layers[name] = layer
    fibers = dict(b.fibers)
    fibers[name] = fiber

    flagged = set(b.purely_infinite)
    if layer.contains_zero():
        flagged.add(name)
    model = LatticedKModule(
        name=name, lattice=lattice, fibers=fibers, connect=connect, layers=layers,
        purely_infinite=frozenset(flagged), presets=tuple(presets),
        provenance=ExtensionProvenance(b, a, name, iota_fiber, pi_fiber),
    )
    unit = model.velem(name, _lift(pi0, a.scale.unit.v))
    model = replace(model, scale=Scale('unit', (unit,)))
    return certify(model)


def canonical_morphisms(model: LatticedKModule) -> Tuple[VMorphism, VMorphism]:
    """
    扩张的典范态射 ι: V̲(B) → V̲(E) 与 π: V̲(E) → V̲(A)

    Raises:
        ProvenanceMissingError: 模型不是由 build_extension 构造的
    """
    prov = model.provenance
    if prov is None:
        raise ProvenanceMissingError(f"{model.name} 没有扩张来源信息")
    b, a = prov.ideal_part, prov.quotient_part
    iota = VMorphism(
        b, model,
        {i: i for i in b.lattice.elements},
        {i: LambdaMorphism.identity(b.fiber(i)) for i in b.lattice.elements},
    )
    lattice_map = {i: a.bottom for i in b.lattice.elements}
    lattice_map[prov.top] = a.top
    fiber_maps = {i: LambdaMorphism.zero(model.fiber(i), a.fiber(a.bottom)) for i in b.lattice.elements}
    fiber_maps[prov.top] = prov.pi_fiber
    return iota, VMorphism(model, a, lattice_map, fiber_maps)

