"""
穷举搜索基础设施 - 预算计数与同态/同构枚举

所有枚举按字典序进行，保证找到的见证是确定的（字典序最小）。
"""

import threading
from itertools import product
from typing import Dict, Iterator, List, Optional, Sequence

from .errors import BudgetExceededError
from .zmodule import AbHom, FgAbGroup, Vector


class SearchBudget:
    """搜索节点预算，超出时抛出 BudgetExceededError"""

    def __init__(self, limit: int, what: str = "search"):
        self.limit = int(limit)
        self.what = what
        self.used = 0
        self._lock = threading.Lock()

    def tick(self, count: int = 1) -> None:
        with self._lock:
            self.used += count
            if self.used > self.limit:
                raise BudgetExceededError(self.what, self.limit)

    def remaining(self) -> int:
        return max(self.limit - self.used, 0)


def _hom_candidates(source: FgAbGroup, target: FgAbGroup, bound: int,
                    exact_orders: bool) -> List[List[Vector]]:
    elements = list(target.elements(bound))
    candidates = []
    for d in source.orders:
        if exact_orders:
            options = [h for h in elements if target.element_order(h) == d]
        else:
            options = [h for h in elements if d == 0 or not any(target.scale(d, h))]
        candidates.append(options)
    return candidates


def iter_homs(source: FgAbGroup, target: FgAbGroup, bound: int = 1,
              budget: Optional[SearchBudget] = None,
              fixed: Optional[Dict[int, Sequence[Vector]]] = None) -> Iterator[AbHom]:
    """
    枚举 source -> target 的全部同态

    Args:
        source: 源群
        target: 目标群
        bound: 目标中自由坐标的取值范围 [-bound, bound]
        budget: 搜索预算
        fixed: 指定某些生成元的候选像（用于剪枝）

    Returns:
        同态迭代器（按生成元像的字典序）
    """
    candidates = _hom_candidates(source, target, bound, exact_orders=False)
    for index, options in (fixed or {}).items():
        allowed = {target.normalize(v) for v in options}
        candidates[index] = [h for h in candidates[index] if h in allowed]
    for images in product(*candidates):
        if budget is not None:
            budget.tick()
        yield AbHom.from_images(source, target, images)


def iter_isomorphisms(source: FgAbGroup, target: FgAbGroup, bound: int = 1,
                      budget: Optional[SearchBudget] = None,
                      fixed: Optional[Dict[int, Sequence[Vector]]] = None) -> Iterator[AbHom]:
    """
    枚举同构，源与目标相同时恒等映射最先给出

    同构把规范生成元映到同阶元素，候选像据此预先过滤。
    """
    if not source.is_isomorphic(target):
        return
    identity = None
    if source == target:
        identity = AbHom.identity(source)
        if _respects(identity, fixed):
            if budget is not None:
                budget.tick()
            yield identity
    candidates = _hom_candidates(source, target, bound, exact_orders=True)
    for index, options in (fixed or {}).items():
        allowed = {target.normalize(v) for v in options}
        candidates[index] = [h for h in candidates[index] if h in allowed]
    for images in product(*candidates):
        if budget is not None:
            budget.tick()
        hom = AbHom.from_images(source, target, images)
        if hom == identity:
            continue
        if hom.is_isomorphism():
            yield hom


def _respects(hom: AbHom, fixed: Optional[Dict[int, Sequence[Vector]]]) -> bool:
    if not fixed:
        return True
    images = hom.images()
    return all(images[i] in {hom.target.normalize(v) for v in options} for i, options in fixed.items())
