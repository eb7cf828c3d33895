"""
整数线性代数与有限生成阿贝尔群 - 所有K群的载体

元素规范形: 自由坐标在前，挠坐标 i 约化到 [0, d_i)。
群与同态均为不可变值，可被多个工作线程并发读取。
"""

from dataclasses import dataclass, field
from itertools import product
from math import gcd
from typing import Iterator, List, Optional, Sequence, Tuple

from .errors import DimensionMismatchError, MalformedStructureError

Vector = Tuple[int, ...]


def lcm(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return abs(a * b) // gcd(a, b)


@dataclass(frozen=True)
class IntegerMatrix:
    """行优先存储的整数矩阵（Python整数，任意精度）"""
    rows: int
    cols: int
    entries: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise DimensionMismatchError(
                f"矩阵条目数与形状 {self.rows}x{self.cols} 不一致"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> 'IntegerMatrix':
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if cols is None:
            if not data:
                raise DimensionMismatchError("空矩阵必须显式给出列数")
            cols = len(data[0])
        return cls(len(data), cols, data)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> 'IntegerMatrix':
        for col in columns:
            if len(col) != rows:
                raise DimensionMismatchError(f"列长度 {len(col)} 与行数 {rows} 不一致")
        data = tuple(tuple(int(columns[j][i]) for j in range(len(columns))) for i in range(rows))
        return cls(rows, len(columns), data)

    @classmethod
    def identity(cls, n: int) -> 'IntegerMatrix':
        return cls(n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> 'IntegerMatrix':
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def diagonal(cls, values: Sequence[int]) -> 'IntegerMatrix':
        n = len(values)
        return cls(n, n, tuple(tuple(values[i] if i == j else 0 for j in range(n)) for i in range(n)))

    def column(self, j: int) -> Vector:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def columns(self) -> List[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def apply(self, vec: Sequence[int]) -> Vector:
        if len(vec) != self.cols:
            raise DimensionMismatchError(f"向量长度 {len(vec)} 与列数 {self.cols} 不一致")
        return tuple(sum(a * b for a, b in zip(row, vec)) for row in self.entries)

    def __matmul__(self, other: 'IntegerMatrix') -> 'IntegerMatrix':
        if self.cols != other.rows:
            raise DimensionMismatchError(
                f"无法相乘: {self.rows}x{self.cols} 与 {other.rows}x{other.cols}"
            )
        cols = other.columns()
        return IntegerMatrix(
            self.rows, other.cols,
            tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in self.entries)
        )

    def transpose(self) -> 'IntegerMatrix':
        return IntegerMatrix.from_columns([list(r) for r in self.entries], rows=self.cols)

    def hstack(self, other: 'IntegerMatrix') -> 'IntegerMatrix':
        if self.rows != other.rows:
            raise DimensionMismatchError("水平拼接要求行数相同")
        return IntegerMatrix(self.rows, self.cols + other.cols,
                             tuple(a + b for a, b in zip(self.entries, other.entries)))

    def select_rows(self, indices: Sequence[int]) -> 'IntegerMatrix':
        return IntegerMatrix.from_rows([self.entries[i] for i in indices], cols=self.cols)

    def select_columns(self, indices: Sequence[int]) -> 'IntegerMatrix':
        return IntegerMatrix.from_rows([[row[j] for j in indices] for row in self.entries],
                                       cols=len(indices))

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def determinant(self) -> int:
        """Bareiss无除法误差消元，仅用于方阵"""
        if self.rows != self.cols:
            raise DimensionMismatchError("只有方阵才有行列式")
        n = self.rows
        if n == 0:
            return 1
        a = [list(r) for r in self.entries]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def to_list(self) -> List[List[int]]:
        return [list(r) for r in self.entries]


@dataclass(frozen=True)
class _SmithData:
    u: IntegerMatrix
    u_inv: IntegerMatrix
    s: IntegerMatrix
    v: IntegerMatrix

    def diagonal(self) -> List[int]:
        return [self.s.entries[i][i] if i < self.s.cols else 0 for i in range(self.s.rows)]


def _smith(matrix: IntegerMatrix) -> _SmithData:
    m, n = matrix.rows, matrix.cols
    s = [list(r) for r in matrix.entries]
    u = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    u_inv = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    v = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def add_row(i, j, q):
        # row_i += q * row_j；U^{-1} 同步做逆列变换
        for c in range(n):
            s[i][c] += q * s[j][c]
        for c in range(m):
            u[i][c] += q * u[j][c]
        for r in range(m):
            u_inv[r][j] -= q * u_inv[r][i]

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]
        for r in range(m):
            u_inv[r][i], u_inv[r][j] = u_inv[r][j], u_inv[r][i]

    def negate_row(i):
        s[i] = [-x for x in s[i]]
        u[i] = [-x for x in u[i]]
        for r in range(m):
            u_inv[r][i] = -u_inv[r][i]

    def add_col(i, j, q):
        for r in range(m):
            s[r][i] += q * s[r][j]
        for r in range(n):
            v[r][i] += q * v[r][j]

    def swap_cols(i, j):
        for r in range(m):
            s[r][i], s[r][j] = s[r][j], s[r][i]
        for r in range(n):
            v[r][i], v[r][j] = v[r][j], v[r][i]

    t = 0
    while t < min(m, n):
        pivot = None
        for i in range(t, m):
            for j in range(t, n):
                if s[i][j] and (pivot is None or abs(s[i][j]) < abs(s[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])

        while True:
            leftover = False
            for i in range(t + 1, m):
                if s[i][t]:
                    add_row(i, t, -(s[i][t] // s[t][t]))
                    leftover = leftover or s[i][t] != 0
            for j in range(t + 1, n):
                if s[t][j]:
                    add_col(j, t, -(s[t][j] // s[t][t]))
                    leftover = leftover or s[t][j] != 0
            if leftover:
                # 余数严格小于主元，换入后继续消元
                best = (t, t)
                for i in range(t + 1, m):
                    if s[i][t] and abs(s[i][t]) < abs(s[best[0]][best[1]]):
                        best = (i, t)
                for j in range(t + 1, n):
                    if s[t][j] and abs(s[t][j]) < abs(s[best[0]][best[1]]):
                        best = (t, j)
                if best[0] != t:
                    swap_rows(t, best[0])
                elif best[1] != t:
                    swap_cols(t, best[1])
                continue

            offender = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if s[i][j] % s[t][t]),
                None
            )
            if offender is None:
                break
            add_row(t, offender, 1)

        if s[t][t] < 0:
            negate_row(t)
        t += 1

    return _SmithData(
        u=IntegerMatrix.from_rows(u, cols=m),
        u_inv=IntegerMatrix.from_rows(u_inv, cols=m),
        s=IntegerMatrix.from_rows(s, cols=n),
        v=IntegerMatrix.from_rows(v, cols=n),
    )


def smith_normal_form(matrix: IntegerMatrix) -> Tuple[IntegerMatrix, IntegerMatrix, IntegerMatrix]:
    """
    Smith标准形

    Args:
        matrix: 任意整数矩阵

    Returns:
        (U, S, V)，U、V幺模，U·M·V = S，S对角且 s1|s2|...，所有 si ≥ 0
    """
    data = _smith(matrix)
    return data.u, data.s, data.v


@dataclass(frozen=True)
class PresentationWitness:
    """表示坐标与规范坐标之间的幺模换基数据"""
    to_canonical: IntegerMatrix      # 原生成元坐标 -> 规范坐标
    from_canonical: IntegerMatrix    # 规范生成元 -> 原生成元坐标


@dataclass(frozen=True)
class FgAbGroup:
    """不变因子形式的有限生成阿贝尔群 Z^rank ⊕ Z/d1 ⊕ ... ⊕ Z/dk"""
    rank: int = 0
    torsion: Tuple[int, ...] = ()
    witness: Optional[PresentationWitness] = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, 'torsion', tuple(int(d) for d in self.torsion))
        if self.rank < 0:
            raise MalformedStructureError(f"秩不能为负: {self.rank}")
        for d in self.torsion:
            if d < 2:
                raise MalformedStructureError(f"不变因子必须 ≥ 2: {self.torsion}")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise MalformedStructureError(f"不变因子不满足整除链: {self.torsion}")

    @classmethod
    def free(cls, rank: int) -> 'FgAbGroup':
        return cls(rank, ())

    @classmethod
    def cyclic(cls, order: int) -> 'FgAbGroup':
        """order=0 表示 Z，order=1 表示平凡群"""
        if order == 0:
            return cls(1, ())
        if order == 1:
            return cls(0, ())
        return cls(0, (abs(order),))

    @property
    def ngens(self) -> int:
        return self.rank + len(self.torsion)

    @property
    def orders(self) -> Tuple[int, ...]:
        """每个规范生成元的阶，0 表示无限阶"""
        return (0,) * self.rank + self.torsion

    @property
    def is_finite(self) -> bool:
        return self.rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.ngens == 0

    def order(self) -> Optional[int]:
        if self.rank:
            return None
        total = 1
        for d in self.torsion:
            total *= d
        return total

    def exponent(self) -> int:
        value = 1
        for d in self.torsion:
            value = lcm(value, d)
        return value

    def zero(self) -> Vector:
        return (0,) * self.ngens

    def normalize(self, vec: Sequence[int]) -> Vector:
        if len(vec) != self.ngens:
            raise DimensionMismatchError(f"元素长度 {len(vec)} 与 {self} 的生成元个数 {self.ngens} 不一致")
        return tuple(int(x) % d if d else int(x) for x, d in zip(vec, self.orders))

    def generator(self, i: int) -> Vector:
        return tuple(1 if j == i else 0 for j in range(self.ngens))

    def generators(self) -> List[Vector]:
        return [self.generator(i) for i in range(self.ngens)]

    def add(self, x: Sequence[int], y: Sequence[int]) -> Vector:
        return self.normalize([a + b for a, b in zip(x, y)])

    def sub(self, x: Sequence[int], y: Sequence[int]) -> Vector:
        return self.normalize([a - b for a, b in zip(x, y)])

    def neg(self, x: Sequence[int]) -> Vector:
        return self.normalize([-a for a in x])

    def scale(self, k: int, x: Sequence[int]) -> Vector:
        return self.normalize([k * a for a in x])

    def element_order(self, x: Sequence[int]) -> int:
        """元素的阶，0 表示无限阶"""
        x = self.normalize(x)
        if any(x[:self.rank]):
            return 0
        value = 1
        for a, d in zip(x[self.rank:], self.torsion):
            value = lcm(value, d // gcd(d, a))
        return value

    def relation_matrix(self) -> IntegerMatrix:
        """以列给出的关系: 第 k 列为 d_k·e_{rank+k}"""
        cols = []
        for k, d in enumerate(self.torsion):
            col = [0] * self.ngens
            col[self.rank + k] = d
            cols.append(col)
        return IntegerMatrix.from_columns(cols, rows=self.ngens)

    def elements(self, bound: int = 0) -> Iterator[Vector]:
        """
        按字典序枚举元素

        Args:
            bound: 自由坐标的枚举范围 [-bound, bound]

        Returns:
            元素迭代器（规范形）
        """
        ranges = [range(-bound, bound + 1)] * self.rank + [range(d) for d in self.torsion]
        for combo in product(*ranges):
            yield tuple(combo)

    def is_isomorphic(self, other: 'FgAbGroup') -> bool:
        return self.rank == other.rank and self.torsion == other.torsion

    def to_dict(self) -> dict:
        return {'rank': self.rank, 'torsion': list(self.torsion)}

    def __str__(self) -> str:
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def cokernel(matrix: IntegerMatrix) -> FgAbGroup:
    """
    以矩阵的列为关系、行数为生成元个数的群，规范化为不变因子形式

    Args:
        matrix: 关系矩阵

    Returns:
        带换基见证的 FgAbGroup
    """
    data = _smith(matrix)
    diag = data.diagonal()
    free = [i for i, d in enumerate(diag) if d == 0]
    torsion = [i for i, d in enumerate(diag) if d > 1]
    order = free + torsion
    witness = PresentationWitness(
        to_canonical=data.u.select_rows(order),
        from_canonical=data.u_inv.select_columns(order),
    )
    return FgAbGroup(len(free), tuple(diag[i] for i in torsion), witness=witness)


def group_from_orders(orders: Sequence[int]) -> FgAbGroup:
    """由循环群直和 ⊕ Z/orders[i]（0 为 Z）得到规范群，见证映射原坐标"""
    return cokernel(IntegerMatrix.diagonal(list(orders)))


def solve_linear(matrix: IntegerMatrix, b: Sequence[int]) -> Optional[Vector]:
    """
    求整数解 M·x = b

    Args:
        matrix: 系数矩阵
        b: 右端向量

    Returns:
        一个整数解；无解时返回 None

    Raises:
        DimensionMismatchError: 维度不一致
    """
    if len(b) != matrix.rows:
        raise DimensionMismatchError(f"右端长度 {len(b)} 与行数 {matrix.rows} 不一致")
    data = _smith(matrix)
    c = data.u.apply(b)
    diag = data.diagonal()
    y = [0] * matrix.cols
    for i, d in enumerate(diag):
        if d == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % d:
                return None
            y[i] = c[i] // d
    return data.v.apply(y)


def integer_kernel(matrix: IntegerMatrix) -> List[Vector]:
    """整数零空间 {x : M·x = 0} 的一组格基"""
    data = _smith(matrix)
    rank = sum(1 for d in data.diagonal() if d != 0)
    return [data.v.column(j) for j in range(rank, matrix.cols)]


@dataclass(frozen=True)
class AbHom:
    """规范生成元上的群同态，矩阵按目标关系约化（语法相等即同态相等）"""
    source: FgAbGroup
    target: FgAbGroup
    matrix: IntegerMatrix

    def __post_init__(self):
        if self.matrix.rows != self.target.ngens or self.matrix.cols != self.source.ngens:
            raise DimensionMismatchError(
                f"同态矩阵形状 {self.matrix.rows}x{self.matrix.cols} 与 "
                f"{self.source} -> {self.target} 不一致"
            )
        orders = self.target.orders
        reduced = tuple(
            tuple(x % orders[i] if orders[i] else x for x in row)
            for i, row in enumerate(self.matrix.entries)
        )
        object.__setattr__(self, 'matrix', IntegerMatrix(self.matrix.rows, self.matrix.cols, reduced))

    @classmethod
    def from_images(cls, source: FgAbGroup, target: FgAbGroup, images: Sequence[Sequence[int]]) -> 'AbHom':
        """由每个规范生成元的像构造"""
        if len(images) != source.ngens:
            raise DimensionMismatchError(f"像的个数 {len(images)} 与生成元个数 {source.ngens} 不一致")
        return cls(source, target, IntegerMatrix.from_columns(images, rows=target.ngens))

    @classmethod
    def identity(cls, group: FgAbGroup) -> 'AbHom':
        return cls(group, group, IntegerMatrix.identity(group.ngens))

    @classmethod
    def zero(cls, source: FgAbGroup, target: FgAbGroup) -> 'AbHom':
        return cls(source, target, IntegerMatrix.zeros(target.ngens, source.ngens))

    @classmethod
    def multiplication(cls, group: FgAbGroup, n: int) -> 'AbHom':
        return cls(group, group, IntegerMatrix.diagonal([n] * group.ngens))

    def apply(self, x: Sequence[int]) -> Vector:
        return self.target.normalize(self.matrix.apply(self.source.normalize(x)))

    def images(self) -> List[Vector]:
        return self.matrix.columns()

    def compose(self, inner: 'AbHom') -> 'AbHom':
        """self ∘ inner"""
        if inner.target != self.source:
            raise MalformedStructureError(f"无法复合: {inner.target} 与 {self.source} 不一致")
        return AbHom(inner.source, self.target, self.matrix @ inner.matrix)

    def add(self, other: 'AbHom') -> 'AbHom':
        if (self.source, self.target) != (other.source, other.target):
            raise MalformedStructureError("同态相加要求源和目标一致")
        rows = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.matrix.entries, other.matrix.entries)]
        return AbHom(self.source, self.target, IntegerMatrix.from_rows(rows, cols=self.source.ngens))

    def scaled(self, k: int) -> 'AbHom':
        rows = [[k * a for a in r] for r in self.matrix.entries]
        return AbHom(self.source, self.target, IntegerMatrix.from_rows(rows, cols=self.source.ngens))

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def is_well_defined(self) -> bool:
        """源的关系是否映到目标的关系"""
        for k, d in enumerate(self.source.torsion):
            image = self.matrix.column(self.source.rank + k)
            if any(self.target.scale(d, image)):
                return False
        return True

    def kernel_generators(self) -> List[Vector]:
        """核的生成元（源中的规范元素，已去零去重）"""
        src, tgt = self.source, self.target
        block = self.matrix.hstack(tgt.relation_matrix())
        gens: List[Vector] = []
        for vec in integer_kernel(block):
            x = src.normalize(vec[:src.ngens])
            if any(x) and x not in gens:
                gens.append(x)
        return gens

    def kernel(self) -> Tuple[FgAbGroup, 'AbHom']:
        return subgroup(self.source, self.kernel_generators())

    def image(self) -> Tuple[FgAbGroup, 'AbHom']:
        return subgroup(self.target, self.images())

    def is_injective(self) -> bool:
        return not self.kernel_generators()

    def is_surjective(self) -> bool:
        gens = self.images()
        return all(subgroup_contains(self.target, gens, e) is not None for e in self.target.generators())

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def inverse(self) -> 'AbHom':
        """同构的逆

        Raises:
            MalformedStructureError: 不是同构
        """
        if not self.is_isomorphism():
            raise MalformedStructureError("只有同构才有逆")
        gens = self.images()
        columns = []
        for e in self.target.generators():
            coeffs = subgroup_contains(self.target, gens, e)
            columns.append(self.source.normalize(coeffs))
        return AbHom.from_images(self.target, self.source, columns)

    def to_dict(self) -> dict:
        return {
            'source': self.source.to_dict(),
            'target': self.target.to_dict(),
            'matrix': self.matrix.to_list(),
        }


def subgroup_contains(group: FgAbGroup, generators: Sequence[Sequence[int]],
                      element: Sequence[int]) -> Optional[Vector]:
    """
    子群成员判定

    Returns:
        若 element = Σ c_i·g_i（模关系），返回系数 c；否则 None
    """
    cols = [list(g) for g in generators] + group.relation_matrix().columns()
    mat = IntegerMatrix.from_columns(cols, rows=group.ngens)
    sol = solve_linear(mat, group.normalize(element))
    if sol is None:
        return None
    return tuple(sol[:len(generators)])


def subgroup(group: FgAbGroup, generators: Sequence[Sequence[int]]) -> Tuple[FgAbGroup, AbHom]:
    """由生成元张成的子群及其包含映射"""
    gens = [group.normalize(g) for g in generators]
    k = len(gens)
    if k == 0:
        trivial = FgAbGroup()
        return trivial, AbHom.zero(trivial, group)
    block = IntegerMatrix.from_columns(gens, rows=group.ngens).hstack(group.relation_matrix())
    relations = [vec[:k] for vec in integer_kernel(block)]
    relations = [r for r in relations if any(r)]
    sub = cokernel(IntegerMatrix.from_columns(relations, rows=k))
    gen_matrix = IntegerMatrix.from_columns(gens, rows=group.ngens)
    inclusion = AbHom(sub, group, gen_matrix @ sub.witness.from_canonical)
    return sub, inclusion


def quotient(group: FgAbGroup, generators: Sequence[Sequence[int]]) -> Tuple[FgAbGroup, AbHom]:
    """商群 G/<generators> 及其投影"""
    cols = group.relation_matrix().columns() + [list(group.normalize(g)) for g in generators]
    q = cokernel(IntegerMatrix.from_columns(cols, rows=group.ngens))
    return q, AbHom(group, q, q.witness.to_canonical)


def direct_sum(groups: Sequence[FgAbGroup]) -> Tuple[FgAbGroup, List[AbHom], List[AbHom]]:
    """
    直和及其嵌入与投影

    Returns:
        (S, injections, projections)
    """
    raw_orders: List[int] = []
    blocks: List[range] = []
    for g in groups:
        start = len(raw_orders)
        raw_orders.extend(g.orders)
        blocks.append(range(start, len(raw_orders)))
    total = group_from_orders(raw_orders)
    to_c = total.witness.to_canonical
    from_c = total.witness.from_canonical
    injections = [AbHom(g, total, to_c.select_columns(list(b))) for g, b in zip(groups, blocks)]
    projections = [AbHom(total, g, from_c.select_rows(list(b))) for g, b in zip(groups, blocks)]
    return total, injections, projections


def is_exact_at(f: AbHom, g: AbHom) -> bool:
    """
    判定 A --f--> B --g--> C 在 B 处正合

    Raises:
        MalformedStructureError: f 的目标与 g 的源不一致
    """
    if f.target != g.source:
        raise MalformedStructureError(f"中间群不一致: {f.target} 与 {g.source}")
    if not g.compose(f).is_zero():
        return False
    images = f.images()
    return all(subgroup_contains(f.target, images, k) is not None for k in g.kernel_generators())


def _check_modulus(n: int) -> None:
    if n < 2:
        raise MalformedStructureError(f"系数模数必须 ≥ 2: {n}")


def tensor_zn(group: FgAbGroup, n: int) -> Tuple[FgAbGroup, AbHom]:
    """G ⊗ Z_n 及典范投影 G -> G ⊗ Z_n"""
    _check_modulus(n)
    return quotient(group, [group.scale(n, e) for e in group.generators()])


def tor_zn(group: FgAbGroup, n: int) -> Tuple[FgAbGroup, AbHom]:
    """Tor(G, Z_n)，实现为 G 的挠部分的 n-挠子群及其包含映射"""
    _check_modulus(n)
    gens = []
    for k, d in enumerate(group.torsion):
        g = gcd(d, n)
        if g > 1:
            gens.append(group.scale(d // g, group.generator(group.rank + k)))
    return subgroup(group, gens)
