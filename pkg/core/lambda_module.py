"""
截断Λ-模 - 带 ρ、κ、β 映射的 Z2×Z+ 分次群

槽位记为 (j, n)：n = 0 表示 G_j 本身，n ∈ N 表示系数群 G_{j,n}。
κ 映射按 (j, m, n) 索引（要求 m·n ∈ N）：
  kappa_up[(j, m, n)]   : G_{j,m}  -> G_{j,mn}
  kappa_down[(j, m, n)] : G_{j,mn} -> G_{j,n}
"""

from dataclasses import dataclass, field, replace
from itertools import product
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import BudgetExceededError, DimensionMismatchError, InvalidSpecError, MalformedStructureError
from .search import SearchBudget, iter_homs, iter_isomorphisms
from .validator import ValidationReport
from .zmodule import (
    AbHom, FgAbGroup, IntegerMatrix, PresentationWitness, direct_sum,
    group_from_orders, is_exact_at, subgroup_contains,
)

Slot = Tuple[int, int]
KappaKey = Tuple[int, int, int]

DEFAULT_LAMBDA_BUDGET = 200000


@dataclass(frozen=True)
class CoefficientSet:
    """有限、因子封闭的系数集 N"""
    moduli: Tuple[int, ...]

    def __post_init__(self):
        moduli = tuple(sorted({int(n) for n in self.moduli}))
        object.__setattr__(self, 'moduli', moduli)
        if not moduli:
            raise InvalidSpecError("系数集不能为空")
        for n in moduli:
            if n < 2:
                raise InvalidSpecError(f"系数必须 ≥ 2: {n}")
            for d in range(2, n):
                if n % d == 0 and d not in moduli:
                    raise InvalidSpecError(f"系数集不是因子封闭的: 缺少 {n} 的因子 {d}")

    @classmethod
    def parse(cls, text: str) -> 'CoefficientSet':
        """解析 "2,3,4,6" 形式"""
        try:
            return cls(tuple(int(part) for part in text.split(',') if part.strip()))
        except ValueError as e:
            raise InvalidSpecError(f"无法解析系数集: {text}") from e

    def pairs(self) -> List[Tuple[int, int]]:
        """所有满足 m·n ∈ N 的 (m, n)"""
        return [(m, n) for m in self.moduli for n in self.moduli if m * n in self.moduli]

    def __iter__(self):
        return iter(self.moduli)

    def __contains__(self, n: int) -> bool:
        return n in self.moduli

    def __str__(self) -> str:
        return ",".join(str(n) for n in self.moduli)


@dataclass(frozen=True)
class SlotCarrier:
    """标准模某槽位的分裂载体: ⊗-部分与 Tor-部分的原始循环坐标"""
    tensor_orders: Tuple[int, ...]
    tor_sources: Tuple[int, ...]
    tor_orders: Tuple[int, ...]
    witness: PresentationWitness

    @property
    def raw_size(self) -> int:
        return len(self.tensor_orders) + len(self.tor_orders)


@dataclass(frozen=True)
class LambdaModule:
    """截断Λ-模"""
    coefficients: CoefficientSet
    groups: Dict[Slot, FgAbGroup]
    rho: Dict[Slot, AbHom]
    beta: Dict[Slot, AbHom]
    kappa_up: Dict[KappaKey, AbHom]
    kappa_down: Dict[KappaKey, AbHom]
    carrier: Optional[Dict[Slot, SlotCarrier]] = field(default=None, compare=False, repr=False)

    __hash__ = None

    def group(self, j: int, n: int = 0) -> FgAbGroup:
        return self.groups[(j, n)]

    def slots(self) -> List[Slot]:
        return [(0, 0), (1, 0)] + [(j, n) for n in self.coefficients for j in (0, 1)]

    def beta_mn(self, j: int, m: int, n: int) -> AbHom:
        """β_{m,n}^j = ρ_m^{1-j} ∘ β_n^j : G_{j,n} -> G_{1-j,m}"""
        return self.rho[(1 - j, m)].compose(self.beta[(j, n)])

    def map_endpoints(self) -> List[Tuple[str, tuple, Slot, Slot]]:
        """(映射族, 键, 源槽位, 目标槽位)"""
        ends = []
        for j in (0, 1):
            for n in self.coefficients:
                ends.append(('rho', (j, n), (j, 0), (j, n)))
                ends.append(('beta', (j, n), (j, n), (1 - j, 0)))
            for m, n in self.coefficients.pairs():
                ends.append(('kappa_up', (j, m, n), (j, m), (j, m * n)))
                ends.append(('kappa_down', (j, m, n), (j, m * n), (j, n)))
        return ends

    def check_structure(self) -> None:
        """
        检查所有槽位与映射齐全、源目标正确

        Raises:
            MalformedStructureError: 缺少映射或源/目标不符
        """
        for slot in self.slots():
            if slot not in self.groups:
                raise MalformedStructureError(f"缺少分次群 G{slot}")
        for family, key, src, tgt in self.map_endpoints():
            hom = getattr(self, family).get(key)
            if hom is None:
                raise MalformedStructureError(f"缺少映射 {family}{key}")
            if hom.source != self.groups[src] or hom.target != self.groups[tgt]:
                raise MalformedStructureError(
                    f"映射 {family}{key} 的源/目标应为 G{src} -> G{tgt}，实际为 {hom.source} -> {hom.target}"
                )

    def is_trivial(self) -> bool:
        return all(g.is_trivial for g in self.groups.values())

    def with_beta(self, replacements: Dict[Slot, AbHom]) -> 'LambdaModule':
        beta = dict(self.beta)
        beta.update(replacements)
        return replace(self, beta=beta)

    def describe(self) -> Dict[str, str]:
        return {_slot_name(slot): str(self.groups[slot]) for slot in self.slots()}

    def to_dict(self) -> Dict:
        maps = {}
        for family, key, _, _ in self.map_endpoints():
            maps[f"{family}{_key_name(key)}"] = getattr(self, family)[key].matrix.to_list()
        return {
            'coefficients': list(self.coefficients.moduli),
            'groups': self.describe(),
            'maps': maps,
        }


def _slot_name(slot: Slot) -> str:
    j, n = slot
    return f"K{j}" if n == 0 else f"K{j};Z/{n}"


def _key_name(key: tuple) -> str:
    return "[" + ",".join(str(k) for k in key) + "]"


# ---------------------------------------------------------------- 标准构造

def _conjugated(raw_rows: List[List[int]], source: FgAbGroup, target: FgAbGroup,
                source_carrier: Optional[SlotCarrier], target_carrier: Optional[SlotCarrier]) -> AbHom:
    cols = source_carrier.raw_size if source_carrier else source.ngens
    raw = IntegerMatrix.from_rows(raw_rows, cols=cols)
    if target_carrier is not None:
        raw = target_carrier.witness.to_canonical @ raw
    if source_carrier is not None:
        raw = raw @ source_carrier.witness.from_canonical
    return AbHom(source, target, raw)


def standard_lambda_module(g0: FgAbGroup, g1: FgAbGroup, coefficients: CoefficientSet) -> LambdaModule:
    """
    分裂实现的标准Λ-模: G_{j,n} = (G_j ⊗ Z_n) ⊕ Tor(G_{1-j}, Z_n)

    Args:
        g0: K0
        g1: K1
        coefficients: 系数集

    Returns:
        通过 validate_lambda_module 的模
    """
    base = {0: g0, 1: g1}
    groups: Dict[Slot, FgAbGroup] = {(0, 0): g0, (1, 0): g1}
    carrier: Dict[Slot, SlotCarrier] = {}
    for j in (0, 1):
        own, other = base[j], base[1 - j]
        for n in coefficients:
            tensor_orders = tuple(gcd(d, n) for d in own.orders)
            tor_sources = tuple(other.rank + k for k in range(len(other.torsion)))
            tor_orders = tuple(gcd(d, n) for d in other.torsion)
            group = group_from_orders(tensor_orders + tor_orders)
            groups[(j, n)] = group
            carrier[(j, n)] = SlotCarrier(tensor_orders, tor_sources, tor_orders, group.witness)

    rho, beta, kappa_up, kappa_down = {}, {}, {}, {}
    for j in (0, 1):
        own, other = base[j], base[1 - j]
        t = own.ngens
        for n in coefficients:
            c = carrier[(j, n)]
            rows = [[1 if r == i else 0 for i in range(t)] for r in range(c.raw_size)]
            rho[(j, n)] = _conjugated(rows, own, groups[(j, n)], None, c)

            rows = [[0] * c.raw_size for _ in range(other.ngens)]
            for k, (src, g) in enumerate(zip(c.tor_sources, c.tor_orders)):
                rows[src][t + k] = other.orders[src] // g
            beta[(j, n)] = _conjugated(rows, groups[(j, n)], other, c, None)

        for m, n in coefficients.pairs():
            mn = m * n
            cm, cmn, cn = carrier[(j, m)], carrier[(j, mn)], carrier[(j, n)]
            up = [[0] * cm.raw_size for _ in range(cmn.raw_size)]
            down = [[0] * cmn.raw_size for _ in range(cn.raw_size)]
            for i in range(t):
                up[i][i] = n
                down[i][i] = 1
            for k, src in enumerate(cm.tor_sources):
                d = other.orders[src]
                up[t + k][t + k] = gcd(d, mn) // gcd(d, m)
                down[t + k][t + k] = m * gcd(d, n) // gcd(d, mn)
            kappa_up[(j, m, n)] = _conjugated(up, groups[(j, m)], groups[(j, mn)], cm, cmn)
            kappa_down[(j, m, n)] = _conjugated(down, groups[(j, mn)], groups[(j, n)], cmn, cn)

    return LambdaModule(coefficients, groups, rho, beta, kappa_up, kappa_down, carrier=carrier)


def zero_lambda_module(coefficients: CoefficientSet) -> LambdaModule:
    return standard_lambda_module(FgAbGroup(), FgAbGroup(), coefficients)


# ---------------------------------------------------------------- 态射

@dataclass(frozen=True)
class LambdaMorphism:
    """逐槽位的群同态族"""
    source: LambdaModule
    target: LambdaModule
    components: Dict[Slot, AbHom]

    __hash__ = None

    def __post_init__(self):
        if self.source.coefficients != self.target.coefficients:
            raise DimensionMismatchError("Λ-态射两端的系数集不一致")
        for slot in self.source.slots():
            comp = self.components.get(slot)
            if comp is None:
                raise DimensionMismatchError(f"缺少分量 {_slot_name(slot)}")
            if comp.source != self.source.groups[slot] or comp.target != self.target.groups[slot]:
                raise DimensionMismatchError(
                    f"分量 {_slot_name(slot)} 形状错误: {comp.source} -> {comp.target}"
                )

    @classmethod
    def identity(cls, module: LambdaModule) -> 'LambdaMorphism':
        return cls(module, module, {s: AbHom.identity(module.groups[s]) for s in module.slots()})

    @classmethod
    def zero(cls, source: LambdaModule, target: LambdaModule) -> 'LambdaMorphism':
        return cls(source, target, {
            s: AbHom.zero(source.groups[s], target.groups[s]) for s in source.slots()
        })

    def component(self, j: int, n: int = 0) -> AbHom:
        return self.components[(j, n)]

    def compose(self, inner: 'LambdaMorphism') -> 'LambdaMorphism':
        """self ∘ inner"""
        return LambdaMorphism(inner.source, self.target, {
            s: self.components[s].compose(inner.components[s]) for s in inner.source.slots()
        })

    def add(self, other: 'LambdaMorphism') -> 'LambdaMorphism':
        return LambdaMorphism(self.source, self.target, {
            s: self.components[s].add(other.components[s]) for s in self.source.slots()
        })

    def is_componentwise_isomorphism(self) -> bool:
        return all(c.is_isomorphism() for c in self.components.values())

    def is_componentwise_injective(self) -> bool:
        return all(c.is_injective() for c in self.components.values())

    def inverse(self) -> 'LambdaMorphism':
        return LambdaMorphism(self.target, self.source, {
            s: c.inverse() for s, c in self.components.items()
        })

    def to_dict(self) -> Dict:
        return {_slot_name(s): c.matrix.to_list() for s, c in sorted(self.components.items())}


def lambda_square_failures(phi: LambdaMorphism) -> List[str]:
    """列出不交换的 ρ/κ/β 方块"""
    failures = []
    for family, key, src, tgt in phi.source.map_endpoints():
        left = phi.components[tgt].compose(getattr(phi.source, family)[key])
        right = getattr(phi.target, family)[key].compose(phi.components[src])
        if left != right:
            failures.append(f"{family}{_key_name(key)}")
    return failures


def check_lambda_linear(phi: LambdaMorphism) -> bool:
    """是否与所有 ρ、κ、β 交换"""
    return not lambda_square_failures(phi)


def standard_lambda_morphism(f0: AbHom, f1: AbHom, source: LambdaModule,
                             target: LambdaModule) -> LambdaMorphism:
    """
    由 (f0, f1) 诱导的标准模之间的态射，在 ⊗-部分与 Tor-部分上分别作用

    Raises:
        MalformedStructureError: 两端不是标准模或群不匹配
    """
    if source.carrier is None or target.carrier is None:
        raise MalformedStructureError("只有标准Λ-模之间才能诱导标准态射")
    if f0.source != source.group(0) or f1.source != source.group(1) \
            or f0.target != target.group(0) or f1.target != target.group(1):
        raise MalformedStructureError("诱导态射的群同态与模的 K0/K1 不匹配")
    maps = {0: f0, 1: f1}
    components = {(0, 0): f0, (1, 0): f1}
    for j in (0, 1):
        own, other = maps[j], maps[1 - j]
        for n in source.coefficients:
            sc, tc = source.carrier[(j, n)], target.carrier[(j, n)]
            rows = [[0] * sc.raw_size for _ in range(tc.raw_size)]
            for k in range(len(tc.tensor_orders)):
                for i in range(len(sc.tensor_orders)):
                    rows[k][i] = own.matrix.entries[k][i]
            s_off, t_off = len(sc.tensor_orders), len(tc.tensor_orders)
            for a, (src, g) in enumerate(zip(sc.tor_sources, sc.tor_orders)):
                generator = [0] * other.source.ngens
                generator[src] = other.source.orders[src] // g
                image = other.apply(generator)
                for b, (tgt, h) in enumerate(zip(tc.tor_sources, tc.tor_orders)):
                    step = other.target.orders[tgt] // h
                    rows[t_off + b][s_off + a] = image[tgt] // step
            components[(j, n)] = _conjugated(rows, source.groups[(j, n)], target.groups[(j, n)], sc, tc)
    return LambdaMorphism(source, target, components)


# ---------------------------------------------------------------- 直和

def lambda_direct_sum(modules: Sequence[LambdaModule]) -> Tuple[LambdaModule, List[LambdaMorphism], List[LambdaMorphism]]:
    """
    Λ-模的直和

    Returns:
        (和模, 各分量的嵌入, 各分量的投影)

    Raises:
        InvalidSpecError: 系数集不一致
    """
    if not modules:
        raise InvalidSpecError("直和至少需要一个Λ-模")
    coefficients = modules[0].coefficients
    if any(m.coefficients != coefficients for m in modules):
        raise InvalidSpecError("直和的各分量系数集不一致")
    first = modules[0]
    groups, injections, projections = {}, {}, {}
    for slot in first.slots():
        total, injs, projs = direct_sum([m.groups[slot] for m in modules])
        groups[slot], injections[slot], projections[slot] = total, injs, projs

    families = {'rho': {}, 'beta': {}, 'kappa_up': {}, 'kappa_down': {}}
    for family, key, src, tgt in first.map_endpoints():
        total = AbHom.zero(groups[src], groups[tgt])
        for i, m in enumerate(modules):
            piece = injections[tgt][i].compose(getattr(m, family)[key]).compose(projections[src][i])
            total = total.add(piece)
        families[family][key] = total
    module = LambdaModule(coefficients, groups, **families)

    inj_morphisms = [
        LambdaMorphism(m, module, {s: injections[s][i] for s in first.slots()})
        for i, m in enumerate(modules)
    ]
    proj_morphisms = [
        LambdaMorphism(module, m, {s: projections[s][i] for s in first.slots()})
        for i, m in enumerate(modules)
    ]
    return module, inj_morphisms, proj_morphisms


# ---------------------------------------------------------------- 校验

def validate_lambda_module(module: LambdaModule) -> ValidationReport:
    """
    检查两族六项正合列

    第一族: G_j --×n--> G_j --ρ--> G_{j,n} --β--> G_{1-j} --×n--> G_{1-j}
    第二族: G_{j,m} --κ--> G_{j,mn} --κ--> G_{j,n} --β_{m,n}--> G_{1-j,m} --κ--> ...

    Returns:
        ValidationReport，每个正合位置一项

    Raises:
        MalformedStructureError: 结构不完整
    """
    module.check_structure()
    report = ValidationReport(subject='lambda-module')
    for j in (0, 1):
        own, other = module.group(j), module.group(1 - j)
        for n in module.coefficients:
            rho, beta = module.rho[(j, n)], module.beta[(j, n)]
            report.add(f"first[j={j},n={n}]@K{j}",
                       is_exact_at(AbHom.multiplication(own, n), rho))
            report.add(f"first[j={j},n={n}]@K{j};Z/{n}", is_exact_at(rho, beta))
            report.add(f"first[j={j},n={n}]@K{1 - j}",
                       is_exact_at(beta, AbHom.multiplication(other, n)))

    for m, n in module.coefficients.pairs():
        mn = m * n
        for j in (0, 1):
            up, down = module.kappa_up[(j, m, n)], module.kappa_down[(j, m, n)]
            bockstein = module.beta_mn(j, m, n)
            up_other = module.kappa_up[(1 - j, m, n)]
            tag = f"second[j={j},m={m},n={n}]"
            report.add(f"{tag}@K{j};Z/{mn}", is_exact_at(up, down))
            report.add(f"{tag}@K{j};Z/{n}", is_exact_at(down, bockstein))
            report.add(f"{tag}@K{1 - j};Z/{m}", is_exact_at(bockstein, up_other))

            # 系数变换与 Bockstein 的相容性只作提示，不计入正合判定
            if module.beta[(j, mn)].compose(up) != module.beta[(j, m)]:
                report.warn(f"β_{mn}∘κ 与 β_{m} 不相容 (j={j}, m={m}, n={n})")
    return report


# ---------------------------------------------------------------- 同构搜索

def _same_shape(first: LambdaModule, second: LambdaModule) -> bool:
    if first.coefficients != second.coefficients:
        return False
    return all(first.groups[s].is_isomorphic(second.groups[s]) for s in first.slots())


def graded_iso_search(first: LambdaModule, second: LambdaModule, bound: int = 1,
                      budget: Optional[SearchBudget] = None) -> Optional[LambdaMorphism]:
    """
    逐槽位的群同构（不要求与结构映射交换）

    Returns:
        找到时返回已验证的态射，否则 None

    Raises:
        BudgetExceededError: 超出搜索预算
    """
    first.check_structure()
    second.check_structure()
    if not _same_shape(first, second):
        return None
    budget = budget or SearchBudget(DEFAULT_LAMBDA_BUDGET, 'gradedIsoSearch')
    components = {}
    for slot in first.slots():
        iso = next(iter_isomorphisms(first.groups[slot], second.groups[slot], bound, budget), None)
        if iso is None:
            return None
        components[slot] = iso
    phi = LambdaMorphism(first, second, components)
    return phi if phi.is_componentwise_isomorphism() else None


def forced_images(first: LambdaModule, second: LambdaModule, slot: Slot,
                   base_map: AbHom) -> Dict[int, List[Tuple[int, ...]]]:
    """落在 ρ 像中的生成元，其像由 K_j 分量唯一确定"""
    j, _ = slot
    rho1, rho2 = first.rho[slot], second.rho[slot]
    group = first.groups[slot]
    fixed = {}
    for c, e in enumerate(group.generators()):
        coeffs = subgroup_contains(group, rho1.images(), e)
        if coeffs is not None:
            fixed[c] = [rho2.apply(base_map.apply(base_map.source.normalize(coeffs)))]
    return fixed


def squares_commute(first: LambdaModule, second: LambdaModule, slot: Slot,
                     assigned: Dict[Slot, AbHom]) -> bool:
    for family, key, src, tgt in first.map_endpoints():
        if slot not in (src, tgt) or src not in assigned or tgt not in assigned:
            continue
        left = assigned[tgt].compose(getattr(first, family)[key])
        right = getattr(second, family)[key].compose(assigned[src])
        if left != right:
            return False
    return True


def lambda_iso_search(first: LambdaModule, second: LambdaModule, bound: int = 1,
                      budget: Optional[SearchBudget] = None) -> Optional[LambdaMorphism]:
    """
    Λ-线性同构的穷举搜索（回溯，逐槽位检查已确定的方块）

    对全有限的模是完备的；返回的见证在返回前重新验证。

    Raises:
        BudgetExceededError: 超出搜索预算
    """
    first.check_structure()
    second.check_structure()
    if not _same_shape(first, second):
        return None
    budget = budget or SearchBudget(DEFAULT_LAMBDA_BUDGET, 'lambdaIsoSearch')
    order = first.slots()
    assigned: Dict[Slot, AbHom] = {}

    def candidates(slot: Slot):
        j, n = slot
        fixed = forced_images(first, second, slot, assigned[(j, 0)]) if n else None
        for iso in iter_isomorphisms(first.groups[slot], second.groups[slot], bound, budget, fixed):
            assigned[slot] = iso
            commutes = squares_commute(first, second, slot, assigned)
            del assigned[slot]
            if commutes:
                yield iso

    def search(k: int) -> bool:
        if k == len(order):
            return True
        slot = order[k]
        for iso in candidates(slot):
            assigned[slot] = iso
            if search(k + 1):
                return True
            del assigned[slot]
        return False

    if not search(0):
        return None
    phi = LambdaMorphism(first, second, dict(assigned))
    if check_lambda_linear(phi) and phi.is_componentwise_isomorphism():
        return phi
    return None


def _standard_first(standard: AbHom, homs) -> List[AbHom]:
    return [standard] + [hom for hom in homs if hom != standard]


def _slot_choices(base: LambdaModule, slot: Slot, budget: SearchBudget) -> List[Tuple[AbHom, AbHom]]:
    """
    单个槽位上满足第一族正合性的 (ρ, β)，在 Aut(G_{j,n}) 规范变换下取代表元

    α ∈ Aut(G_{j,n}) 把 (ρ, β, κ) 换成 (α∘ρ, β∘α⁻¹, α∘κ∘α⁻¹)，得到Λ-同构的模。
    因此 ρ 只需取 Aut 轨道代表，β 只需取 ρ 的稳定子轨道代表；κ 另行完整枚举。
    """
    j, n = slot
    own, other, group = base.group(j), base.group(1 - j), base.groups[slot]
    times_own, times_other = AbHom.multiplication(own, n), AbHom.multiplication(other, n)
    autos = list(iter_isomorphisms(group, group, 0, budget))
    betas = _standard_first(base.beta[slot], iter_homs(group, other, 0, budget))

    choices = []
    rho_seen = set()
    for rho in _standard_first(base.rho[slot], iter_homs(own, group, 0, budget)):
        budget.tick()
        if rho in rho_seen or not is_exact_at(times_own, rho):
            continue
        rho_seen.update(a.compose(rho) for a in autos)
        stabilizer = [a for a in autos if a.compose(rho) == rho]
        beta_seen = set()
        for beta in betas:
            budget.tick()
            if beta in beta_seen or not (is_exact_at(rho, beta) and is_exact_at(beta, times_other)):
                continue
            beta_seen.update(beta.compose(a) for a in stabilizer)
            choices.append((rho, beta))
    return choices


def _kappa_choices(module: LambdaModule, key: KappaKey, ups: List[AbHom], downs: List[AbHom],
                   budget: SearchBudget) -> List[Tuple[AbHom, AbHom]]:
    """在给定 ρ、β 下满足第二族三处局部正合性的 (κ_up, κ_down)"""
    j, m, n = key
    own_bockstein = module.beta_mn(j, m, n)
    incoming_bockstein = module.beta_mn(1 - j, m, n)
    choices = []
    for up in ups:
        budget.tick()
        if not is_exact_at(incoming_bockstein, up):
            continue
        for down in downs:
            budget.tick()
            if is_exact_at(up, down) and is_exact_at(down, own_bockstein):
                choices.append((up, down))
    return choices


def beta_variant_search(g0: FgAbGroup, g1: FgAbGroup, coefficients: CoefficientSet,
                        budget: Optional[SearchBudget] = None) -> List[LambdaModule]:
    """
    在标准载体上枚举满足正合性的 (ρ, κ, β) 赋值，按Λ-同构去重

    ρ、β 逐槽位按规范变换约化（见 _slot_choices），κ 在每个 (ρ, β) 下完整枚举，
    所以每个Λ-同构类至少被枚举到一次。标准模总是第一个代表元。

    Raises:
        InvalidSpecError: 涉及无限群
        BudgetExceededError: 超出搜索预算
    """
    if not (g0.is_finite and g1.is_finite):
        raise InvalidSpecError("β 变体搜索要求 K0、K1 有限")
    budget = budget or SearchBudget(DEFAULT_LAMBDA_BUDGET, 'betaVariantSearch')
    base = standard_lambda_module(g0, g1, coefficients)
    slots = [(j, n) for j in (0, 1) for n in coefficients]
    keys = [(j, m, n) for m, n in coefficients.pairs() for j in (0, 1)]

    slot_options = [_slot_choices(base, slot, budget) for slot in slots]
    kappa_homs = {}
    for key in keys:
        j, m, n = key
        ups = _standard_first(base.kappa_up[key],
                              iter_homs(base.groups[(j, m)], base.groups[(j, m * n)], 0, budget))
        downs = _standard_first(base.kappa_down[key],
                                iter_homs(base.groups[(j, m * n)], base.groups[(j, n)], 0, budget))
        kappa_homs[key] = (ups, downs)

    representatives: List[LambdaModule] = []
    for combo in product(*slot_options):
        budget.tick()
        partial = replace(base, rho={**base.rho, **{s: c[0] for s, c in zip(slots, combo)}},
                          beta={**base.beta, **{s: c[1] for s, c in zip(slots, combo)}})
        kappa_options = [_kappa_choices(partial, key, *kappa_homs[key], budget) for key in keys]
        for kappas in product(*kappa_options):
            budget.tick()
            module = replace(partial,
                             kappa_up={**partial.kappa_up, **{k: c[0] for k, c in zip(keys, kappas)}},
                             kappa_down={**partial.kappa_down, **{k: c[1] for k, c in zip(keys, kappas)}})
            if not validate_lambda_module(module).valid:
                continue
            if any(lambda_iso_search(rep, module, 0, budget) is not None for rep in representatives):
                continue
            representatives.append(module)
    return representatives


def twist_beta(module: LambdaModule, slot: Slot, automorphism: AbHom) -> LambdaModule:
    """把 β_slot 替换为 automorphism ∘ β_slot"""
    if automorphism.source != module.group(1 - slot[0]) or not automorphism.is_isomorphism():
        raise MalformedStructureError(f"扭转映射必须是 K{1 - slot[0]} 的自同构")
    return module.with_beta({slot: automorphism.compose(module.beta[slot])})


@dataclass
class BetaPairResult:
    """分次同构但非Λ-同构的模对的搜索结果"""
    g0: Optional[FgAbGroup] = None
    g1: Optional[FgAbGroup] = None
    first: Optional[LambdaModule] = None
    second: Optional[LambdaModule] = None
    attempts: List[Dict[str, str]] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.first is not None


# 从 (Z/2+Z/4, Z/2) 出发，按群的阶逐步升级，阶不超过 32
BETA_PAIR_LADDER: Tuple[Tuple[FgAbGroup, FgAbGroup], ...] = (
    (FgAbGroup(0, (2, 4)), FgAbGroup(0, (2,))),
    (FgAbGroup(0, (2, 4)), FgAbGroup()),
    (FgAbGroup(0, (4,)), FgAbGroup(0, (2,))),
    (FgAbGroup(0, (2, 8)), FgAbGroup()),
    (FgAbGroup(0, (4, 4)), FgAbGroup()),
    (FgAbGroup(0, (2, 4)), FgAbGroup(0, (4,))),
    (FgAbGroup(0, (2, 2, 8)), FgAbGroup()),
)


def find_beta_variant_pair(coefficients: CoefficientSet, budget: int = DEFAULT_LAMBDA_BUDGET,
                           ladder: Sequence[Tuple[FgAbGroup, FgAbGroup]] = BETA_PAIR_LADDER) -> BetaPairResult:
    """
    沿阶梯运行 beta_variant_search，直到出现两个Λ-不同构的代表元

    同一载体上的两个变体以恒等映射分次同构，所以代表元多于一个即得到所需的模对。
    每一级各自拥有预算，超出预算记录后继续下一级。
    """
    result = BetaPairResult()
    for g0, g1 in ladder:
        label = f"({g0}, {g1}, {{{coefficients}}})"
        try:
            variants = beta_variant_search(g0, g1, coefficients, SearchBudget(budget, 'betaVariantSearch'))
        except BudgetExceededError:
            result.attempts.append({'carrier': label, 'outcome': 'budget exceeded'})
            continue
        result.attempts.append({'carrier': label, 'outcome': f"{len(variants)} class(es)"})
        if len(variants) >= 2:
            result.g0, result.g1 = g0, g1
            result.first, result.second = variants[0], variants[1]
            return result
    return result
