"""
有限格 - 理想格的载体，元素为理想的名字
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from .errors import InvalidSpecError, MalformedStructureError

BOTTOM = "0"


@dataclass(frozen=True)
class FiniteLattice:
    """以偏序给出的有限格，构造时计算并校验并/交表"""
    elements: Tuple[str, ...]
    order: FrozenSet[Tuple[str, str]]
    _join: Dict[Tuple[str, str], str] = field(default=None, compare=False, hash=False, repr=False)
    _meet: Dict[Tuple[str, str], str] = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        elements = tuple(self.elements)
        if len(set(elements)) != len(elements):
            raise MalformedStructureError(f"格元素重复: {elements}")
        if not elements:
            raise MalformedStructureError("格不能为空")
        order = set(self.order) | {(a, a) for a in elements}
        for a, b in order:
            if a not in elements or b not in elements:
                raise MalformedStructureError(f"序关系引用了未知元素: {a} ≤ {b}")
        # 传递闭包
        changed = True
        while changed:
            changed = False
            for a, b in list(order):
                for c, d in list(order):
                    if b == c and (a, d) not in order:
                        order.add((a, d))
                        changed = True
        for a, b in order:
            if a != b and (b, a) in order:
                raise MalformedStructureError(f"序关系不反对称: {a}, {b}")
        object.__setattr__(self, 'elements', elements)
        object.__setattr__(self, 'order', frozenset(order))

        join, meet = {}, {}
        for a in elements:
            for b in elements:
                join[(a, b)] = self._extremal([c for c in elements if (a, c) in order and (b, c) in order], least=True)
                meet[(a, b)] = self._extremal([c for c in elements if (c, a) in order and (c, b) in order], least=False)
        object.__setattr__(self, '_join', join)
        object.__setattr__(self, '_meet', meet)
        for a in elements:
            for b in elements:
                if join[(a, meet[(a, b)])] != a or meet[(a, join[(a, b)])] != a:
                    raise MalformedStructureError(f"吸收律不成立: {a}, {b}")

    def _extremal(self, candidates: List[str], least: bool) -> str:
        for c in candidates:
            if all(((c, d) if least else (d, c)) in self.order for d in candidates):
                return c
        kind = "最小上界" if least else "最大下界"
        raise MalformedStructureError(f"不是格: 缺少{kind} (候选 {candidates})")

    # ------------------------------------------------------------ 构造

    @classmethod
    def from_relations(cls, elements: Sequence[str], relations: Sequence[Tuple[str, str]]) -> 'FiniteLattice':
        return cls(tuple(elements), frozenset(relations))

    @classmethod
    def chain(cls, names: Sequence[str]) -> 'FiniteLattice':
        names = list(names)
        return cls.from_relations(names, [(names[i], names[i + 1]) for i in range(len(names) - 1)])

    @classmethod
    def point(cls) -> 'FiniteLattice':
        return cls.chain([BOTTOM])

    def with_top(self, name: str) -> 'FiniteLattice':
        """在所有元素之上加一个新顶"""
        if name in self.elements:
            raise InvalidSpecError(f"新顶的名字已被占用: {name}")
        return FiniteLattice(self.elements + (name,), self.order | {(a, name) for a in self.elements})

    def product(self, other: 'FiniteLattice') -> Tuple['FiniteLattice', Dict[Tuple[str, str], str]]:
        """
        乘积格

        Returns:
            (乘积格, (a, b) -> 乘积元素名)
        """
        names: Dict[Tuple[str, str], str] = {}
        for a in self.elements:
            for b in other.elements:
                parts = [x for x, bottom in ((a, self.bottom), (b, other.bottom)) if x != bottom]
                names[(a, b)] = "+".join(parts) if parts else BOTTOM
        if len(set(names.values())) != len(names):
            names = {(a, b): f"({a},{b})" for a, b in names}
        relations = [
            (names[(a, b)], names[(c, d)])
            for (a, b) in names for (c, d) in names
            if self.leq(a, c) and other.leq(b, d)
        ]
        return FiniteLattice.from_relations(list(names.values()), relations), names

    def relabel(self, mapping: Dict[str, str]) -> 'FiniteLattice':
        renamed = tuple(mapping.get(a, a) for a in self.elements)
        return FiniteLattice(renamed, frozenset((mapping.get(a, a), mapping.get(b, b)) for a, b in self.order))

    # ------------------------------------------------------------ 查询

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def bottom(self) -> str:
        return next(a for a in self.elements if all((a, b) in self.order for b in self.elements))

    @property
    def top(self) -> str:
        return next(a for a in self.elements if all((b, a) in self.order for b in self.elements))

    def leq(self, a: str, b: str) -> bool:
        return (a, b) in self.order

    def join(self, a: str, b: str) -> str:
        return self._join[(a, b)]

    def meet(self, a: str, b: str) -> str:
        return self._meet[(a, b)]

    def down_set(self, a: str) -> List[str]:
        return [b for b in self.elements if self.leq(b, a)]

    def up_set(self, a: str) -> List[str]:
        return [b for b in self.elements if self.leq(a, b)]

    def comparable_pairs(self) -> List[Tuple[str, str]]:
        """所有 a ≤ b，按拓扑序"""
        ordered = self.topological_order()
        return [(a, b) for a in ordered for b in ordered if self.leq(a, b)]

    def topological_order(self) -> List[str]:
        """线性延拓: 先按下集大小，再按名字"""
        return sorted(self.elements, key=lambda a: (len(self.down_set(a)), a))

    def restrict(self, top: str) -> 'FiniteLattice':
        """下集 ↓top 构成的子格"""
        keep = self.down_set(top)
        return FiniteLattice(tuple(keep), frozenset((a, b) for a, b in self.order if a in keep and b in keep))

    def is_monotone(self, mapping: Dict[str, str], other: 'FiniteLattice') -> bool:
        return all(other.leq(mapping[a], mapping[b]) for a, b in self.order)

    def iter_isomorphisms(self, other: 'FiniteLattice') -> Iterator[Dict[str, str]]:
        """
        枚举格同构，同名映射（若存在）最先给出

        候选按 (下集大小, 上集大小) 分组剪枝。
        """
        if self.size != other.size:
            return
        signature = lambda lat, a: (len(lat.down_set(a)), len(lat.up_set(a)))
        ordered = self.topological_order()
        options = {}
        for a in ordered:
            cands = [b for b in other.topological_order() if signature(other, b) == signature(self, a)]
            if a in cands:
                cands.remove(a)
                cands.insert(0, a)
            options[a] = cands

        mapping: Dict[str, str] = {}
        used = set()

        def extend(k: int) -> Iterator[Dict[str, str]]:
            if k == len(ordered):
                yield dict(mapping)
                return
            a = ordered[k]
            for b in options[a]:
                if b in used:
                    continue
                if all(self.leq(x, a) == other.leq(mapping[x], b) and self.leq(a, x) == other.leq(b, mapping[x])
                       for x in mapping):
                    mapping[a] = b
                    used.add(b)
                    yield from extend(k + 1)
                    del mapping[a]
                    used.discard(b)

        yield from extend(0)

    def find_isomorphism(self, other: 'FiniteLattice') -> Optional[Dict[str, str]]:
        return next(self.iter_isomorphisms(other), None)

    def to_dict(self) -> Dict:
        covers = [
            [a, b] for a, b in sorted(self.order)
            if a != b and not any(c not in (a, b) and self.leq(a, c) and self.leq(c, b) for c in self.elements)
        ]
        return {'elements': list(self.topological_order()), 'covers': covers}
