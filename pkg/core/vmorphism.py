"""
V̲-态射 - 格化模型之间的态射、正合性检查与同构搜索
"""

from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Set, Tuple

from .errors import DimensionMismatchError, InvalidSpecError, LatticedKError, NonComposableError
from .lambda_module import (
    DEFAULT_LAMBDA_BUDGET, LambdaMorphism, Slot, check_lambda_linear, forced_images, squares_commute,
)
from .latticed import LatticedKModule, VElem, add_v, leq_v
from .search import SearchBudget, iter_isomorphisms
from .semilinear import SemilinearSet
from .validator import ValidationReport
from .zmodule import AbHom, Vector

SEARCH_MODES = ('graded', 'lambda', 'latticed')


@dataclass(frozen=True)
class VMorphism:
    """格映射加上每个源理想上的纤维Λ-态射"""
    source: LatticedKModule
    target: LatticedKModule
    lattice_map: Dict[str, str]
    fiber_maps: Dict[str, LambdaMorphism]

    __hash__ = None

    def __post_init__(self):
        for ideal in self.source.lattice.elements:
            image = self.lattice_map.get(ideal)
            if image not in self.target.lattice.elements:
                raise DimensionMismatchError(f"格映射没有给出 {ideal} 的合法像")
            phi = self.fiber_maps.get(ideal)
            if phi is None:
                raise DimensionMismatchError(f"缺少理想 {ideal} 上的纤维映射")
            if phi.source != self.source.fiber(ideal) or phi.target != self.target.fiber(image):
                raise DimensionMismatchError(f"理想 {ideal} 上纤维映射的源/目标不符")

    @classmethod
    def identity(cls, model: LatticedKModule) -> 'VMorphism':
        return cls(model, model, {i: i for i in model.lattice.elements},
                   {i: LambdaMorphism.identity(model.fiber(i)) for i in model.lattice.elements})

    def apply(self, x: VElem) -> VElem:
        phi = self.fiber_maps[x.ideal]
        v = phi.component(0, 0).apply(x.v)
        aux = tuple(phi.components[s].apply(a) for s, a in zip(self.source.aux_slots(), x.aux))
        return VElem(self.lattice_map[x.ideal], v, aux)

    def compose(self, inner: 'VMorphism') -> 'VMorphism':
        """self ∘ inner"""
        if not _same_model(inner.target, self.source):
            raise NonComposableError(f"{inner.target.name} 与 {self.source.name} 不是同一模型")
        return VMorphism(
            inner.source, self.target,
            {i: self.lattice_map[j] for i, j in inner.lattice_map.items()},
            {i: self.fiber_maps[inner.lattice_map[i]].compose(phi) for i, phi in inner.fiber_maps.items()},
        )

    def inverse(self) -> 'VMorphism':
        """格映射为双射且纤维映射逐槽位可逆时的逆"""
        back = {j: i for i, j in self.lattice_map.items()}
        if len(back) != len(self.lattice_map) or set(back) != set(self.target.lattice.elements):
            raise DimensionMismatchError("格映射不是双射，无法求逆")
        return VMorphism(self.target, self.source, back,
                         {self.lattice_map[i]: phi.inverse() for i, phi in self.fiber_maps.items()})

    def to_dict(self) -> Dict:
        return {
            'source': self.source.name,
            'target': self.target.name,
            'lattice_map': dict(sorted(self.lattice_map.items())),
            'fiber_maps': {i: phi.to_dict() for i, phi in sorted(self.fiber_maps.items())},
        }


def _same_model(first: LatticedKModule, second: LatticedKModule) -> bool:
    if first is second:
        return True
    return first.lattice == second.lattice and first.fibers == second.fibers and first.layers == second.layers


def _generator_points(layer: SemilinearSet) -> List[Vector]:
    group = layer.ambient
    points: List[Vector] = []
    for comp in layer.components:
        for v in [comp.offset] + [group.add(comp.offset, p) for p in comp.periods]:
            if v not in points:
                points.append(v)
    return points


# ---------------------------------------------------------------- 态射检查

def check_v_morphism(phi: VMorphism, scaled: bool = True, require_lambda: bool = True) -> ValidationReport:
    """
    检查 V̲-态射的全部条件

    Args:
        phi: 待检查态射
        scaled: 是否检查尺度保持
        require_lambda: 是否要求纤维映射Λ-线性（graded 模式下关闭）

    Returns:
        ValidationReport
    """
    source, target = phi.source, phi.target
    lat_s, lat_t = source.lattice, target.lattice
    f = phi.lattice_map
    report = ValidationReport(subject=f"{source.name} -> {target.name}")

    report.add("lattice-monotone", lat_s.is_monotone(f, lat_t))
    report.add("lattice-bottom", f[lat_s.bottom] == lat_t.bottom)
    report.add("lattice-join", all(
        f[lat_s.join(a, b)] == lat_t.join(f[a], f[b]) for a in lat_s.elements for b in lat_s.elements
    ))
    if require_lambda:
        for ideal, fiber_map in phi.fiber_maps.items():
            report.add(f"lambda-linear[{ideal}]", check_lambda_linear(fiber_map))

    for a, b in lat_s.comparable_pairs():
        if a == b:
            continue
        left = phi.fiber_maps[b].compose(source.delta(a, b))
        right = target.delta(f[a], f[b]).compose(phi.fiber_maps[a])
        report.add(f"prism[{a},{b}]", left.components == right.components)

    for ideal in lat_s.topological_order():
        image = source.layers[ideal].pushforward(phi.fiber_maps[ideal].component(0, 0))
        report.add(f"layer-image[{ideal}]", image.is_subset(target.layers[f[ideal]]))

    generators = [x for i in lat_s.topological_order() for x in source.layer_generators(i)]
    additive, ordered = True, True
    for x in generators:
        for y in generators:
            try:
                if phi.apply(add_v(source, x, y)) != add_v(target, phi.apply(x), phi.apply(y)):
                    additive = False
            except LatticedKError:
                additive = False
            if leq_v(source, x, y) and not leq_v(target, phi.apply(x), phi.apply(y)):
                ordered = False
    report.add("additive", additive)
    report.add("order-preserving", ordered)

    if scaled:
        report.add("scale-preserving", _preserves_scale(phi))
    return report


def _preserves_scale(phi: VMorphism) -> bool:
    source, target = phi.source, phi.target
    images = [phi.apply(e) for e in source.scale.elements]
    if target.scale.kind == 'full':
        return all(target.is_element(x) for x in images)
    return all(any(leq_v(target, x, g) for g in target.scale.elements) for x in images)


def check_v_exactness(iota: VMorphism, pi: VMorphism) -> ValidationReport:
    """
    0 → V̲(B) --ι--> V̲(E) --π--> V̲(A) → 0 在 V-级的正合性

    ι 单、π 在格与层生成元上满、π∘ι = 0、Ker π ⊆ Im ι（精确的半线性包含）。
    V̲-级的满射不要求。

    Raises:
        NonComposableError: ι 的目标不是 π 的源
    """
    if not _same_model(iota.target, pi.source):
        raise NonComposableError(f"ι 的目标 {iota.target.name} 不是 π 的源 {pi.source.name}")
    middle = pi.source
    report = ValidationReport(subject=f"{iota.source.name} -> {middle.name} -> {pi.target.name}")

    f, g = iota.lattice_map, pi.lattice_map
    report.add("iota-lattice-injective", len(set(f.values())) == len(f))
    report.add("iota-fiber-injective", all(m.is_componentwise_injective() for m in iota.fiber_maps.values()))

    target = pi.target
    report.add("pi-lattice-surjective", set(g.values()) == set(target.lattice.elements))
    surjective = True
    for ideal in target.lattice.topological_order():
        preimages = [i for i in middle.lattice.elements if g[i] == ideal]
        reachable = [
            middle.layers[i].pushforward(pi.fiber_maps[i].component(0, 0)) for i in preimages
        ]
        for point in _generator_points(target.layers[ideal]):
            if not any(r.contains(point) for r in reachable):
                surjective = False
    report.add("pi-layer-surjective", surjective)

    bottom = target.lattice.bottom
    report.add("pi-after-iota-zero", all(g[f[i]] == bottom for i in iota.source.lattice.elements))

    kernel_ok = True
    back = {j: i for i, j in f.items()}
    for ideal in middle.lattice.topological_order():
        if g[ideal] != bottom:
            continue
        if ideal not in back:
            kernel_ok = False
            continue
        pre = back[ideal]
        image = iota.source.layers[pre].pushforward(iota.fiber_maps[pre].component(0, 0))
        if not middle.layers[ideal].is_subset(image):
            kernel_ok = False
    report.add("kernel-in-image", kernel_ok)
    return report


# ---------------------------------------------------------------- 同构搜索

@dataclass
class IsoSearchResult:
    """同构搜索结果: 见证或不存在的理由"""
    mode: str
    morphism: Optional[VMorphism] = None
    reason: str = ''
    lattice_maps_tried: int = 0

    @property
    def found(self) -> bool:
        return self.morphism is not None

    def to_dict(self) -> Dict:
        return {
            'mode': self.mode,
            'found': self.found,
            'reason': self.reason,
            'lattice_maps_tried': self.lattice_maps_tried,
            'witness': self.morphism.to_dict() if self.morphism else None,
        }


def _layer_shape(layer: SemilinearSet) -> Tuple:
    if layer.is_bounded():
        return ('bounded', len(layer.elements()), layer.contains_zero())
    return ('unbounded', layer.contains_zero())


def _absorbing_pairs(model: LatticedKModule) -> Set[Tuple[str, str]]:
    """(I, J) 使 I ≤ J 且 0 ∈ δ_{IJ}(V_p(I))，即 V_p(I) 中有被 J 吸收的非零元"""
    pairs = set()
    for i, j in model.lattice.comparable_pairs():
        if i == model.bottom:
            continue
        if model.layers[i].pushforward(model.delta(i, j).component(0, 0)).contains_zero():
            pairs.add((i, j))
    return pairs


def _fibers_match(x: LatticedKModule, y: LatticedKModule, mapping: Dict[str, str]) -> bool:
    for ideal, image in mapping.items():
        first, second = x.fiber(ideal), y.fiber(image)
        if not all(first.groups[s].is_isomorphic(second.groups[s]) for s in first.slots()):
            return False
    return True


def _layers_equal(x: LatticedKModule, y: LatticedKModule, ideal: str, image: str,
                  hom: AbHom) -> bool:
    pushed = x.layers[ideal].pushforward(hom)
    return pushed.is_subset(y.layers[image]) and y.layers[image].is_subset(pushed)


class _FiberSearch:
    """在固定格同构下逐 (理想, 槽位) 回溯搜索纤维同构"""

    def __init__(self, x: LatticedKModule, y: LatticedKModule, mapping: Dict[str, str],
                 mode: str, budget: SearchBudget, generator_bound: int):
        self.x, self.y, self.mapping = x, y, mapping
        self.mode = mode
        self.budget = budget
        self.generator_bound = generator_bound
        self.order: List[Tuple[str, Slot]] = [
            (ideal, slot)
            for ideal in x.lattice.topological_order()
            for slot in x.fiber(ideal).slots()
        ]
        self.assigned: Dict[str, Dict[Slot, AbHom]] = {i: {} for i in x.lattice.elements}

    def _natural(self, ideal: str, slot: Slot, iso: AbHom) -> bool:
        x, y, f = self.x, self.y, self.mapping
        for lower in x.lattice.down_set(ideal):
            if lower == ideal or slot not in self.assigned[lower]:
                continue
            left = iso.compose(x.delta(lower, ideal).components[slot])
            right = y.delta(f[lower], f[ideal]).components[slot].compose(self.assigned[lower][slot])
            if left != right:
                return False
        return True

    def _candidates(self, ideal: str, slot: Slot) -> Iterator[AbHom]:
        first, second = self.x.fiber(ideal), self.y.fiber(self.mapping[ideal])
        own = self.assigned[ideal]
        j, n = slot
        fixed = None
        if n and self.mode != 'graded':
            fixed = forced_images(first, second, slot, own[(j, 0)])
        for iso in iter_isomorphisms(first.groups[slot], second.groups[slot],
                                     self.generator_bound, self.budget, fixed):
            if not self._natural(ideal, slot, iso):
                continue
            if slot == (0, 0) and not _layers_equal(self.x, self.y, ideal, self.mapping[ideal], iso):
                continue
            if self.mode != 'graded':
                own[slot] = iso
                commutes = squares_commute(first, second, slot, own)
                del own[slot]
                if not commutes:
                    continue
            yield iso

    def solutions(self, k: int = 0) -> Iterator[Dict[str, LambdaMorphism]]:
        if k == len(self.order):
            yield {
                ideal: LambdaMorphism(self.x.fiber(ideal), self.y.fiber(self.mapping[ideal]), dict(comps))
                for ideal, comps in self.assigned.items()
            }
            return
        ideal, slot = self.order[k]
        for iso in self._candidates(ideal, slot):
            self.assigned[ideal][slot] = iso
            yield from self.solutions(k + 1)
            del self.assigned[ideal][slot]


def _certified(phi: VMorphism, mode: str) -> bool:
    if mode == 'graded':
        return check_v_morphism(phi, scaled=False, require_lambda=False).valid
    if mode == 'lambda':
        return check_v_morphism(phi, scaled=False).valid
    return (check_v_morphism(phi, scaled=True).valid
            and check_v_morphism(phi.inverse(), scaled=True).valid)


def iso_search_latticed(x: LatticedKModule, y: LatticedKModule, mode: str = 'latticed',
                        budget: int = DEFAULT_LAMBDA_BUDGET, generator_bound: int = 1) -> IsoSearchResult:
    """
    搜索 X ≅ Y: 格同构 × 纤维同构 × 层双射

    Args:
        x: 第一个模型
        y: 第二个模型
        mode: graded（仅分次群同构）、lambda（Λ-线性）或 latticed（另加尺度并双向认证）
        budget: 搜索节点预算
        generator_bound: 生成元像中自由坐标的取值范围

    Returns:
        IsoSearchResult，见证在返回前已验证

    Raises:
        InvalidSpecError: 未知模式
        BudgetExceededError: 超出预算
    """
    if mode not in SEARCH_MODES:
        raise InvalidSpecError(f"未知的比较模式: {mode}")
    result = IsoSearchResult(mode)
    if x.coefficients != y.coefficients:
        result.reason = f"coefficient sets {x.coefficients} vs {y.coefficients}"
        return result
    if x.lattice.size != y.lattice.size:
        result.reason = f"lattice sizes {x.lattice.size} vs {y.lattice.size}"
        return result

    tracker = SearchBudget(budget, 'isoSearchLatticed')
    reasons: List[str] = []
    for mapping in x.lattice.iter_isomorphisms(y.lattice):
        tracker.tick()
        result.lattice_maps_tried += 1
        if any(_layer_shape(x.layers[i]) != _layer_shape(y.layers[j])
               for i, j in mapping.items()):
            reasons.append("layer shapes differ")
            continue
        if {(mapping[i], mapping[j]) for i, j in _absorbing_pairs(x)} != _absorbing_pairs(y):
            reasons.append("infinite elements differ")
            continue
        if not _fibers_match(x, y, mapping):
            reasons.append("fiber groups differ")
            continue
        search = _FiberSearch(x, y, mapping, mode, tracker, generator_bound)
        for fibers in search.solutions():
            phi = VMorphism(x, y, dict(mapping), fibers)
            if _certified(phi, mode):
                result.morphism = phi
                result.reason = 'isomorphic'
                return result
        reasons.append("no fiber isomorphism compatible with connecting maps and layers")

    if not result.lattice_maps_tried:
        result.reason = "ideal lattices are not isomorphic"
    else:
        result.reason = "; ".join(sorted(set(reasons)))
    return result
