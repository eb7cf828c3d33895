"""
有限预序交换幺半群 - 结构化 V 计算的暴力校验层

元素以下标 0..n-1 表示，labels 保存元素的外部名字。
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, FrozenSet, Hashable, List, Optional, Sequence, Set, Tuple

from .errors import InvalidSpecError, MalformedStructureError
from .zmodule import FgAbGroup, IntegerMatrix, Vector, cokernel

# 一般预序下按子集穷举理想的规模上限
SUBSET_SEARCH_LIMIT = 16


@dataclass(frozen=True)
class FiniteMonoid:
    """带完整加法表的有限交换幺半群，构造时穷举验证公理"""
    labels: Tuple[Hashable, ...]
    table: Tuple[Tuple[int, ...], ...]
    neutral: int = 0
    _index: Dict[Hashable, int] = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        n = len(self.labels)
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise MalformedStructureError("加法表形状与元素个数不一致")
        if not 0 <= self.neutral < n:
            raise MalformedStructureError("单位元下标越界")
        index = {label: i for i, label in enumerate(self.labels)}
        if len(index) != n:
            raise MalformedStructureError("元素标签重复")
        object.__setattr__(self, '_index', index)
        t = self.table
        for a in range(n):
            if t[a][self.neutral] != a:
                raise MalformedStructureError(f"单位元律不成立: {self.labels[a]}")
            for b in range(n):
                if not 0 <= t[a][b] < n:
                    raise MalformedStructureError("加法表的值越界")
                if t[a][b] != t[b][a]:
                    raise MalformedStructureError(f"不满足交换律: {self.labels[a]}, {self.labels[b]}")
        for a in range(n):
            for b in range(n):
                ab = t[a][b]
                for c in range(n):
                    if t[ab][c] != t[a][t[b][c]]:
                        raise MalformedStructureError(
                            f"不满足结合律: {self.labels[a]}, {self.labels[b]}, {self.labels[c]}"
                        )

    @classmethod
    def from_function(cls, labels: Sequence[Hashable], add: Callable[[Hashable, Hashable], Hashable],
                      neutral: Hashable) -> 'FiniteMonoid':
        """由标签上的加法函数构造"""
        labels = tuple(labels)
        index = {label: i for i, label in enumerate(labels)}
        try:
            table = tuple(tuple(index[add(a, b)] for b in labels) for a in labels)
        except KeyError as e:
            raise MalformedStructureError(f"加法不封闭: {e}") from e
        return cls(labels, table, index[neutral])

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: Hashable) -> int:
        return self._index[label]

    def add(self, a: int, b: int) -> int:
        return self.table[a][b]

    def multiple(self, k: int, a: int) -> int:
        result = self.neutral
        for _ in range(k):
            result = self.table[result][a]
        return result

    def generated_submonoid(self, generators: Sequence[int]) -> FrozenSet[int]:
        current = {self.neutral}
        frontier = list(current)
        while frontier:
            x = frontier.pop()
            for g in generators:
                y = self.table[x][g]
                if y not in current:
                    current.add(y)
                    frontier.append(y)
        return frozenset(current)

    def generating_set(self) -> List[int]:
        """贪心得到的生成元集合"""
        gens: List[int] = []
        span = frozenset({self.neutral})
        for x in range(self.size):
            if x not in span:
                gens.append(x)
                span = self.generated_submonoid(gens)
        return gens


@dataclass(frozen=True)
class PreorderRelation:
    """与加法相容的预序表；explicit 标记显式给出（非代数导出）的预序"""
    monoid: FiniteMonoid
    table: Tuple[Tuple[bool, ...], ...]
    explicit: bool = False

    def __post_init__(self):
        n = self.monoid.size
        t = self.table
        if len(t) != n or any(len(row) != n for row in t):
            raise MalformedStructureError("预序表形状与幺半群不一致")
        for a in range(n):
            if not t[a][a]:
                raise MalformedStructureError("预序不自反")
        for a in range(n):
            for b in range(n):
                if not t[a][b]:
                    continue
                for c in range(n):
                    if t[b][c] and not t[a][c]:
                        raise MalformedStructureError("预序不传递")
                    # a ≤ b ⇒ a + c ≤ b + c 与传递性合起来即两侧相容
                    if not t[self.monoid.add(a, c)][self.monoid.add(b, c)]:
                        raise MalformedStructureError("预序与加法不相容")

    def leq(self, a: int, b: int) -> bool:
        return self.table[a][b]

    def positives(self) -> List[int]:
        return [x for x in range(self.monoid.size) if self.table[self.monoid.neutral][x]]


def algebraic_preorder(monoid: FiniteMonoid) -> PreorderRelation:
    """x ≤ y 当且仅当存在 z 使 x + z = y"""
    n = monoid.size
    reachable = [set(row) for row in monoid.table]
    table = tuple(tuple(y in reachable[x] for y in range(n)) for x in range(n))
    return PreorderRelation(monoid, table)


def is_positively_directed(order: PreorderRelation) -> bool:
    m = order.monoid
    return all(
        any(order.leq(m.neutral, m.add(x, p)) for p in range(m.size))
        for x in range(m.size)
    )


def _hereditary_closure(monoid: FiniteMonoid, seed: Sequence[int]) -> FrozenSet[int]:
    """包含 seed 的最小代数遗传子幺半群"""
    current: Set[int] = set(seed) | {monoid.neutral}
    changed = True
    while changed:
        changed = False
        span = monoid.generated_submonoid(sorted(current))
        if not span <= current:
            current |= span
            changed = True
        for x in range(monoid.size):
            if x not in current and any(monoid.add(x, y) in current for y in range(monoid.size)):
                current.add(x)
                changed = True
    return frozenset(current)


def _is_ideal(order: PreorderRelation, subset: FrozenSet[int]) -> bool:
    m = order.monoid
    if m.neutral not in subset:
        return False
    if any(m.add(a, b) not in subset for a in subset for b in subset):
        return False
    # (i) 子幺半群在诱导预序下正向有向
    for x in subset:
        if not any(order.leq(m.neutral, m.add(x, p)) for p in subset):
            return False
    # (ii) (x + P_x) ∩ M 非空 ⇒ x ∈ M
    for x in range(m.size):
        if x in subset:
            continue
        positives_of_x = [y for y in range(m.size) if order.leq(m.neutral, m.add(x, y))]
        if any(m.add(x, y) in subset for y in positives_of_x):
            return False
    return True


def ideals_of(monoid: FiniteMonoid, order: Optional[PreorderRelation] = None,
              exhaustive: bool = False) -> List[FrozenSet[int]]:
    """
    幺半群的全部理想

    Args:
        monoid: 有限幺半群
        order: 预序，默认取代数预序
        exhaustive: 强制按定义穷举全部子集（交叉验证用）

    Returns:
        理想列表（按大小、再按元素下标排序）

    Raises:
        InvalidSpecError: 不是正向有向的，或显式预序下规模超出子集穷举上限
    """
    order = order or algebraic_preorder(monoid)
    if not is_positively_directed(order):
        raise InvalidSpecError("幺半群不是正向有向的，理想无定义")

    if order.explicit or exhaustive:
        if monoid.size > SUBSET_SEARCH_LIMIT:
            raise InvalidSpecError(f"子集穷举要求元素个数 ≤ {SUBSET_SEARCH_LIMIT}")
        others = [x for x in range(monoid.size) if x != monoid.neutral]
        found = []
        for r in range(len(others) + 1):
            for combo in combinations(others, r):
                subset = frozenset(combo) | {monoid.neutral}
                if _is_ideal(order, subset):
                    found.append(subset)
    else:
        # 代数预序下每个理想由其全部元素之和生成，故只需主理想
        found = list({_hereditary_closure(monoid, [x]) for x in range(monoid.size)})
    return sorted(set(found), key=lambda s: (len(s), sorted(s)))


def ideal_join(monoid: FiniteMonoid, first: FrozenSet[int], second: FrozenSet[int]) -> FrozenSet[int]:
    """和再饱和"""
    return _hereditary_closure(monoid, sorted(first | second))


def grothendieck_finite(monoid: FiniteMonoid) -> Tuple[FgAbGroup, Dict[Hashable, Vector]]:
    """
    有限幺半群的普遍群 Gr(M) 与典范映射 ρ

    以全部元素为生成元、以 e_a + e_g - e_{a+g}（g 取生成元集合）和 e_0 为关系，
    求余核得到规范形。

    Returns:
        (Gr(M), 标签 -> 规范坐标)
    """
    n = monoid.size
    columns: List[List[int]] = []
    zero = [0] * n
    zero[monoid.neutral] = 1
    columns.append(zero)
    for g in monoid.generating_set():
        for a in range(n):
            col = [0] * n
            col[a] += 1
            col[g] += 1
            col[monoid.add(a, g)] -= 1
            if any(col):
                columns.append(col)
    group = cokernel(IntegerMatrix.from_columns(columns, rows=n))
    to_canonical = group.witness.to_canonical
    rho = {
        monoid.labels[x]: group.normalize(to_canonical.column(x))
        for x in range(n)
    }
    return group, rho


def grothendieck_pair_classes(monoid: FiniteMonoid) -> int:
    """
    按定义在序对上计算 Gr(M) 的阶:
    (a, b) ~ (c, d) 当且仅当存在 k 使 a + d + k = c + b + k
    """
    n = monoid.size
    pairs = [(a, b) for a in range(n) for b in range(n)]
    parent = list(range(len(pairs)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, (a, b) in enumerate(pairs):
        for j in range(i + 1, len(pairs)):
            c, d = pairs[j]
            left, right = monoid.add(a, d), monoid.add(c, b)
            if any(monoid.add(left, k) == monoid.add(right, k) for k in range(n)):
                parent[find(i)] = find(j)
    return len({find(i) for i in range(len(pairs))})


def is_scale(monoid: FiniteMonoid, delta: Sequence[int], order: Optional[PreorderRelation] = None) -> bool:
    """
    Δ 是否为尺度: 上有向、遗传、满

    Raises:
        InvalidSpecError: Δ 不在正部分中
    """
    order = order or algebraic_preorder(monoid)
    positives = order.positives()
    delta = sorted(set(delta))
    if not set(delta) <= set(positives):
        raise InvalidSpecError("尺度必须是正部分的子集")
    for x1 in delta:
        for x2 in delta:
            if not any(order.leq(x1, x) and order.leq(x2, x) for x in delta):
                return False
    for x in positives:
        if x not in delta and any(order.leq(x, y) for y in delta):
            return False
    for x in positives:
        if not any(order.leq(x, monoid.multiple(k, y)) for y in delta for k in range(monoid.size + 1)):
            return False
    return True


def has_cancellation(monoid: FiniteMonoid) -> bool:
    n = monoid.size
    for c in range(n):
        column = [monoid.add(a, c) for a in range(n)]
        if len(set(column)) != n:
            return False
    return True


def has_infinite_element(monoid: FiniteMonoid) -> bool:
    """是否存在 x 与 z ≠ 0 使 x = x + z"""
    return infinite_witness(monoid) is not None


def infinite_witness(monoid: FiniteMonoid) -> Optional[Tuple[int, int]]:
    for x in range(monoid.size):
        for z in range(monoid.size):
            if z != monoid.neutral and monoid.add(x, z) == x:
                return x, z
    return None
