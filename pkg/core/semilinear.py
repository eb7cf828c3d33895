"""
半线性集 - 有限生成阿贝尔群中 ∪ (offset + Σ N·period) 形式的子集

成员判定: 周期在自由坐标上是单坐标时走精确快速路径，其余情况交给 z3 整数求解。
"""

from dataclasses import dataclass
from functools import reduce
from itertools import product
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import z3

from .errors import DimensionMismatchError, InvalidSpecError, SolverUndecidedError
from .zmodule import AbHom, FgAbGroup, Vector, subgroup_contains


@dataclass(frozen=True)
class LinearComponent:
    """offset + Σ N·period"""
    offset: Vector
    periods: Tuple[Vector, ...] = ()


@dataclass(frozen=True)
class Membership:
    """成员见证: 分量下标与每个周期的非负系数"""
    component: int
    coefficients: Tuple[int, ...]


@dataclass(frozen=True)
class SemilinearSet:
    ambient: FgAbGroup
    components: Tuple[LinearComponent, ...] = ()

    def __post_init__(self):
        normalized = []
        for comp in self.components:
            offset = self.ambient.normalize(comp.offset)
            periods = []
            for p in comp.periods:
                p = self.ambient.normalize(p)
                if any(p) and p not in periods:
                    periods.append(p)
            component = LinearComponent(offset, tuple(sorted(periods)))
            if component not in normalized:
                normalized.append(component)
        object.__setattr__(self, 'components', tuple(normalized))

    # ------------------------------------------------------------ 构造

    @classmethod
    def empty(cls, ambient: FgAbGroup) -> 'SemilinearSet':
        return cls(ambient, ())

    @classmethod
    def singleton(cls, ambient: FgAbGroup, element: Sequence[int]) -> 'SemilinearSet':
        return cls(ambient, (LinearComponent(tuple(element)),))

    @classmethod
    def linear(cls, ambient: FgAbGroup, offset: Sequence[int],
               periods: Iterable[Sequence[int]] = ()) -> 'SemilinearSet':
        return cls(ambient, (LinearComponent(tuple(offset), tuple(tuple(p) for p in periods)),))

    @classmethod
    def whole(cls, ambient: FgAbGroup) -> 'SemilinearSet':
        """整个群: 自由坐标取 ±e_i，挠坐标取 e_i"""
        periods = []
        for i, d in enumerate(ambient.orders):
            e = ambient.generator(i)
            periods.append(e)
            if d == 0:
                periods.append(ambient.neg(e))
        return cls.linear(ambient, ambient.zero(), periods)

    # ------------------------------------------------------------ 运算

    def union(self, other: 'SemilinearSet') -> 'SemilinearSet':
        self._require_same_ambient(other)
        return SemilinearSet(self.ambient, self.components + other.components)

    def minkowski_sum(self, other: 'SemilinearSet') -> 'SemilinearSet':
        self._require_same_ambient(other)
        comps = [
            LinearComponent(self.ambient.add(a.offset, b.offset), a.periods + b.periods)
            for a in self.components for b in other.components
        ]
        return SemilinearSet(self.ambient, tuple(comps))

    def pushforward(self, hom: AbHom) -> 'SemilinearSet':
        """沿同态的像"""
        if hom.source != self.ambient:
            raise DimensionMismatchError(f"推前映射的源 {hom.source} 与环境群 {self.ambient} 不一致")
        comps = [
            LinearComponent(hom.apply(c.offset), tuple(hom.apply(p) for p in c.periods))
            for c in self.components
        ]
        return SemilinearSet(hom.target, tuple(comps))

    def product(self, other: 'SemilinearSet', total: FgAbGroup,
                injections: Sequence[AbHom]) -> 'SemilinearSet':
        """在直和 total 中的乘积集 A × B"""
        first, second = injections
        comps = []
        for a in self.components:
            for b in other.components:
                offset = total.add(first.apply(a.offset), second.apply(b.offset))
                periods = tuple(first.apply(p) for p in a.periods) + tuple(second.apply(p) for p in b.periods)
                comps.append(LinearComponent(offset, periods))
        return SemilinearSet(total, tuple(comps))

    def generators(self) -> List[Vector]:
        """所有 offset 与 period"""
        items: List[Vector] = []
        for c in self.components:
            for v in (c.offset,) + c.periods:
                if v not in items:
                    items.append(v)
        return items

    def offsets(self) -> List[Vector]:
        return [c.offset for c in self.components]

    # ------------------------------------------------------------ 判定

    def is_empty(self) -> bool:
        return not self.components

    def is_bounded(self) -> bool:
        """所有周期都有有限阶时集合有限"""
        return all(self.ambient.element_order(p) != 0 for c in self.components for p in c.periods)

    def contains(self, element: Sequence[int]) -> bool:
        return self.member(element) is not None

    def contains_zero(self) -> bool:
        return self.contains(self.ambient.zero())

    def member(self, element: Sequence[int]) -> Optional[Membership]:
        """
        成员判定

        Returns:
            见证（第一个命中的分量及非负系数），不属于时返回 None
        """
        target = self.ambient.normalize(element)
        for index, comp in enumerate(self.components):
            diff = self.ambient.sub(target, comp.offset)
            coeffs = self._solve_component(comp, diff)
            if coeffs is not None:
                return Membership(index, coeffs)
        return None

    def evaluate(self, membership: Membership) -> Vector:
        return self._combine(self.components[membership.component], membership.coefficients)

    def _solve_component(self, comp: LinearComponent, diff: Vector) -> Optional[Tuple[int, ...]]:
        if not comp.periods:
            return () if not any(diff) else None
        if self._fast_path_applies(comp):
            return self._solve_fast(comp, diff)
        return self._solve_z3(comp, diff)

    def _fast_path_applies(self, comp: LinearComponent) -> bool:
        rank = self.ambient.rank
        by_coordinate: Dict[int, List[int]] = {}
        for p in comp.periods:
            free = [i for i in range(rank) if p[i]]
            if not free:
                continue
            if len(free) != 1 or any(p[rank:]):
                return False
            by_coordinate.setdefault(free[0], []).append(p[free[0]])
        for values in by_coordinate.values():
            signs = {v > 0 for v in values}
            if len(signs) == 1 and 1 not in values and -1 not in values:
                return False
        return True

    def _solve_fast(self, comp: LinearComponent, diff: Vector) -> Optional[Tuple[int, ...]]:
        group = self.ambient
        rank = group.rank
        coeffs = [0] * len(comp.periods)
        torsion_idx = [k for k, p in enumerate(comp.periods) if not any(p[:rank])]

        for c in range(rank):
            idx = [k for k, p in enumerate(comp.periods) if p[c]]
            want = diff[c]
            if not idx:
                if want:
                    return None
                continue
            values = [comp.periods[k][c] for k in idx]
            positives = [k for k, v in zip(idx, values) if v > 0]
            negatives = [k for k, v in zip(idx, values) if v < 0]
            if positives and negatives:
                g = reduce(gcd, values)
                if want % g:
                    return None
                solution = _nonnegative_combination(values, want)
                for k, lam in zip(idx, solution):
                    coeffs[k] = lam
            else:
                unit = 1 if positives else -1
                if want * unit < 0:
                    return None
                k = next(k for k, v in zip(idx, values) if v == unit)
                coeffs[k] = want * unit

        rest = [0] * rank + list(diff[rank:])
        torsion_periods = [comp.periods[k] for k in torsion_idx]
        solution = subgroup_contains(group, torsion_periods, rest) if torsion_periods else (
            () if not any(rest) else None
        )
        if solution is None:
            return None
        for k, lam in zip(torsion_idx, solution):
            coeffs[k] = lam % group.element_order(comp.periods[k])
        return tuple(coeffs)

    def _solve_z3(self, comp: LinearComponent, diff: Vector) -> Optional[Tuple[int, ...]]:
        group = self.ambient
        solver = z3.Solver()
        lam = [z3.Int(f"lam_{k}") for k in range(len(comp.periods))]
        for k, p in enumerate(comp.periods):
            order = group.element_order(p)
            solver.add(lam[k] >= 0)
            if order:
                solver.add(lam[k] < order)
        for i, d in enumerate(group.orders):
            combo = z3.Sum([lam[k] * p[i] for k, p in enumerate(comp.periods)]) if comp.periods else z3.IntVal(0)
            if d == 0:
                solver.add(combo == diff[i])
            else:
                t = z3.Int(f"wrap_{i}")
                solver.add(combo - diff[i] == d * t)
        if solver.check() != z3.sat:
            return None
        model = solver.model()
        return tuple(model.eval(v, model_completion=True).as_long() for v in lam)

    def intersection_witness(self, other: 'SemilinearSet') -> Optional[Vector]:
        """两集合的一个公共元素，不相交时返回 None"""
        self._require_same_ambient(other)
        if self.is_bounded():
            return next((x for x in self.elements() if other.contains(x)), None)
        if other.is_bounded():
            return next((x for x in other.elements() if self.contains(x)), None)
        for a in self.components:
            for b in other.components:
                solver = z3.Solver()
                lam = self._z3_point(solver, a, 'a')
                mu = self._z3_point(solver, b, 'b')
                self._z3_equal(solver, lam, mu, 'eq')
                if solver.check() == z3.sat:
                    return self._z3_value(solver.model(), a, 'a')
        return None

    def subset_witness(self, other: 'SemilinearSet') -> Optional[Vector]:
        """
        self 中不属于 other 的一个元素

        有限分量逐元素检查；无限分量交给 z3 的量化线性整数算术（Presburger，可判定）。

        Returns:
            反例，self ⊆ other 时返回 None

        Raises:
            SolverUndecidedError: z3 返回 unknown
        """
        self._require_same_ambient(other)
        group = self.ambient
        for comp in self.components:
            part = SemilinearSet(group, (comp,))
            if part.is_bounded():
                missing = next((x for x in part.elements() if not other.contains(x)), None)
                if missing is not None:
                    return missing
                continue
            solver = z3.SolverFor('LIA')
            point = self._z3_point(solver, comp, 'a')
            for index, outer in enumerate(other.components):
                mu = [z3.Int(f"b{index}_mu_{k}") for k in range(len(outer.periods))]
                hit = z3.And([m >= 0 for m in mu] + [
                    (x == y) if d == 0 else ((x - y) % d == 0)
                    for x, y, d in zip(point, self._z3_coords(outer, mu), group.orders)
                ])
                solver.add(z3.Not(z3.Exists(mu, hit)) if mu else z3.Not(hit))
            verdict = solver.check()
            if verdict == z3.sat:
                return self._z3_value(solver.model(), comp, 'a')
            if verdict != z3.unsat:
                raise SolverUndecidedError(f"无法判定 {SemilinearSet(group, (comp,))} ⊆ {other}")
        return None

    def is_subset(self, other: 'SemilinearSet') -> bool:
        return self.subset_witness(other) is None

    def collision(self, hom: AbHom) -> Optional[Tuple[Vector, Vector]]:
        """
        集合内两个不同元素在 hom 下的像相同时返回这一对
        """
        if hom.source != self.ambient:
            raise DimensionMismatchError("碰撞检测要求同态的源为环境群")
        if self.is_bounded():
            seen: Dict[Vector, Vector] = {}
            for x in self.elements():
                image = hom.apply(x)
                if image in seen:
                    return seen[image], x
                seen[image] = x
            return None
        group, target = self.ambient, hom.target
        for a in self.components:
            for b in self.components:
                solver = z3.Solver()
                lam = self._z3_point(solver, a, 'a')
                mu = self._z3_point(solver, b, 'b')
                # 两点在源中不同
                solver.add(z3.Or([
                    (x != y) if d == 0 else ((x - y) % d != 0)
                    for x, y, d in zip(lam, mu, group.orders)
                ]))
                # 像相同
                images_a = [z3.Sum([row[i] * lam[i] for i in range(group.ngens)]) if group.ngens else z3.IntVal(0)
                            for row in hom.matrix.entries]
                images_b = [z3.Sum([row[i] * mu[i] for i in range(group.ngens)]) if group.ngens else z3.IntVal(0)
                            for row in hom.matrix.entries]
                self._z3_equal(solver, images_a, images_b, 'img', target)
                if solver.check() == z3.sat:
                    model = solver.model()
                    return self._z3_value(model, a, 'a'), self._z3_value(model, b, 'b')
        return None

    def _z3_point(self, solver: 'z3.Solver', comp: LinearComponent, tag: str) -> List:
        """offset + Σ λ·period 的坐标表达式，λ ≥ 0"""
        lam = [z3.Int(f"{tag}_lam_{k}") for k in range(len(comp.periods))]
        for v in lam:
            solver.add(v >= 0)
        return self._z3_coords(comp, lam)

    def _z3_coords(self, comp: LinearComponent, lam: Sequence) -> List:
        coords = []
        for i in range(self.ambient.ngens):
            terms = [comp.offset[i]] + [lam[k] * p[i] for k, p in enumerate(comp.periods)]
            coords.append(z3.Sum(terms) if len(terms) > 1 else z3.IntVal(terms[0]))
        return coords

    def _z3_equal(self, solver: 'z3.Solver', left: List, right: List, tag: str,
                  group: Optional[FgAbGroup] = None) -> None:
        group = group or self.ambient
        for i, (x, y, d) in enumerate(zip(left, right, group.orders)):
            if d == 0:
                solver.add(x == y)
            else:
                solver.add(x - y == d * z3.Int(f"{tag}_wrap_{i}"))

    def _z3_value(self, model: 'z3.ModelRef', comp: LinearComponent, tag: str) -> Vector:
        lam = [model.eval(z3.Int(f"{tag}_lam_{k}"), model_completion=True).as_long()
               for k in range(len(comp.periods))]
        return self._combine(comp, lam)

    # ------------------------------------------------------------ 枚举

    def elements(self, bound: int = 0) -> List[Vector]:
        """
        枚举元素: 有限阶周期取遍其阶，无限阶周期系数取 0..bound

        Raises:
            InvalidSpecError: bound 为负
        """
        if bound < 0:
            raise InvalidSpecError("枚举界不能为负")
        found = set()
        for comp in self.components:
            ranges = []
            for p in comp.periods:
                order = self.ambient.element_order(p)
                ranges.append(range(order) if order else range(bound + 1))
            for combo in product(*ranges):
                found.add(self._combine(comp, combo))
        return sorted(found)

    def _combine(self, comp: LinearComponent, combo: Sequence[int]) -> Vector:
        value = list(comp.offset)
        for k, p in zip(combo, comp.periods):
            value = [a + k * b for a, b in zip(value, p)]
        return self.ambient.normalize(value)

    def _require_same_ambient(self, other: 'SemilinearSet') -> None:
        if other.ambient != self.ambient:
            raise DimensionMismatchError(f"环境群不一致: {self.ambient} 与 {other.ambient}")

    def to_dict(self) -> Dict:
        return {
            'ambient': str(self.ambient),
            'components': [
                {'offset': list(c.offset), 'periods': [list(p) for p in c.periods]}
                for c in self.components
            ],
        }

    def __str__(self) -> str:
        if not self.components:
            return "∅"
        parts = []
        for c in self.components:
            if c.periods:
                parts.append(f"{c.offset}+N{list(c.periods)}")
            else:
                parts.append(str(c.offset))
        return " ∪ ".join(parts)


def _nonnegative_combination(values: Sequence[int], want: int) -> List[int]:
    """
    values 同时含正负数且 gcd 整除 want 时，求 Σ λ_i·values_i = want 的非负解
    """
    g, first = values[0], [1]
    for v in values[1:]:
        g, x, y = _extended_gcd(g, v)
        first = [c * x for c in first] + [y]
    coeffs = [c * (want // g) for c in first]
    # 与异号伙伴配对加上零贡献向量；伙伴系数只增不减，一遍即可
    pos = next(i for i, v in enumerate(values) if v > 0)
    neg = next(i for i, v in enumerate(values) if v < 0)
    for i, v in enumerate(values):
        if coeffs[i] >= 0:
            continue
        partner = neg if v > 0 else pos
        step_i, step_p = abs(values[partner]), abs(v)
        t = -(coeffs[i] // step_i)
        coeffs[i] += t * step_i
        coeffs[partner] += t * step_p
    return coeffs


def _extended_gcd(a: int, b: int) -> Tuple[int, int, int]:
    """返回 (g, x, y) 使 a·x + b·y = g，g ≥ 0"""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t
