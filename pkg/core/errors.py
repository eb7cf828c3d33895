"""
异常定义 - 计算内核统一使用的异常层次
"""


class LatticedKError(ValueError):
    """内核异常基类"""


class DimensionMismatchError(LatticedKError):
    """矩阵/向量维度不一致"""


class MalformedStructureError(LatticedKError):
    """结构缺失或形状错误（缺少映射、源/目标不匹配等）"""


class BudgetExceededError(LatticedKError):
    """穷举搜索超出预算 - 必须显式报告，不能当作"未找到\""""

    def __init__(self, what: str, budget: int):
        super().__init__(f"搜索预算已耗尽: {what} (budget={budget})")
        self.what = what
        self.budget = budget


class InvalidSpecError(LatticedKError):
    """构造规格不满足前置条件"""


class LayerClosureError(LatticedKError):
    """层闭包被破坏 - 说明 LatticedKModule 已损坏"""


class ProvenanceMissingError(LatticedKError):
    """缺少扩张构造的来源信息"""


class NonComposableError(LatticedKError):
    """态射无法复合"""


class SolverUndecidedError(LatticedKError):
    """z3 对量化的包含判定返回 unknown"""
