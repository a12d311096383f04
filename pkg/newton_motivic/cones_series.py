"""
有理级数环与锥的格点生成级数

功能：
1. SrSeries：p_{e,i}(T) = L^e T^i / (1 - L^e T^i) 的有限乘积的线性组合
2. decompose_open：锥 (相对开或部分开) -> 两两不交的相对开幺模单纯锥
   (先对闭包做拉三角剖分，保留相对内部落在锥内的单元，再做星形细分)
3. cone_series / series_limit / open_cone_limit：S_{Δ,l,l'}(T) 与 T -> 无穷 的极限
4. cone_rational / rational_limit：平行体闭式，与上面的分解独立，用于交叉校验
5. expand：级数展开到 T^K

系数环为 Q(L)，用 sympy 有理函数表示 (l 在生成元上为 0 时，
sum_{m>=1} L^{-l'(g) m} 收进系数)。
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

import sympy

from .exact_geometry import dot, rank, inverse_columns
from .lattice import minors_gcd
from .polyhedra import RationalCone
from .utils import Logger, DecompositionError, PositivityError, ConsistencyError, DECOMPOSITION_CAP

L = sympy.Symbol("L")


# === 系数环 Q(L) ===

def canonical_expr(expr):
    return sympy.cancel(sympy.sympify(expr))


def expr_is_zero(expr):
    return sympy.cancel(sympy.sympify(expr)) == 0


def coeff_is_zero(c):
    if isinstance(c, sympy.Basic) or isinstance(c, (int, Fraction)):
        return expr_is_zero(c)
    return c.is_zero()


def coeff_mul(c, expr):
    """系数 (MotClass 或 Q(L) 元素) 乘以 Q(L) 元素"""
    if isinstance(c, sympy.Basic) or isinstance(c, (int, Fraction)):
        return canonical_expr(sympy.sympify(c) * expr)
    return c.scale(expr)


def _poly_pairs(poly_expr):
    poly = sympy.Poly(poly_expr, L)
    return [(int(m[0]), sympy.Rational(c)) for m, c in poly.terms()]


def expr_to_json(expr):
    """规范序列化：{"num": [[e, c], ...], "den": [[e, c], ...]}，Laurent 情形 den = [[0, "1"]]"""
    num, den = sympy.fraction(sympy.cancel(sympy.sympify(expr)))
    num_pairs, den_pairs = _poly_pairs(num), _poly_pairs(den)
    lead = den_pairs[0][1]
    if len(den_pairs) == 1:
        shift = den_pairs[0][0]
        num_pairs = [(e - shift, c / lead) for e, c in num_pairs]
        den_pairs = [(0, sympy.Integer(1))]
    else:
        num_pairs = [(e, c / lead) for e, c in num_pairs]
        den_pairs = [(e, c / lead) for e, c in den_pairs]
    return {
        "num": [[e, str(c)] for e, c in sorted(num_pairs)],
        "den": [[e, str(c)] for e, c in sorted(den_pairs)],
    }


def realize_expr(expr, q):
    """L -> q"""
    value = sympy.sympify(expr).subs(L, q)
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


# === 线性型 ===

@dataclass(frozen=True)
class LinearForm:
    coeffs: tuple

    def __call__(self, v):
        return dot(self.coeffs, v)

    @classmethod
    def coordinate_sum(cls, n):
        return cls((1,) * n)

    def is_positive_on(self, cone):
        return all(self(g) > 0 for g in cone.generators)


# === SrSeries ===

class SrSeries:
    """
    terms: {因子多重集 (排序的 ((e, i), ...)): 系数}
    空因子集表示常数 1。
    """

    def __init__(self, terms=None):
        self.terms = {}
        for factors, coeff in (terms or {}).items():
            self._accumulate(tuple(sorted(factors)), coeff)

    def _accumulate(self, factors, coeff):
        if any(i <= 0 for _, i in factors):
            raise ValueError(f"factor exponents must be positive: {factors}")
        if factors in self.terms:
            coeff = self.terms[factors] + coeff
        if coeff_is_zero(coeff):
            self.terms.pop(factors, None)
        else:
            self.terms[factors] = canonical_expr(coeff) if isinstance(coeff, sympy.Basic) else coeff

    @classmethod
    def constant(cls, coeff):
        return cls({(): coeff})

    @classmethod
    def geometric(cls, e, i, coeff=sympy.Integer(1)):
        return cls({((e, i),): coeff})

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        result = SrSeries(dict(self.terms))
        for factors, coeff in other.terms.items():
            result._accumulate(factors, coeff)
        return result

    def __neg__(self):
        return SrSeries({f: coeff_mul(c, sympy.Integer(-1)) for f, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, SrSeries) and (self - other).is_zero()

    def sorted_items(self):
        return sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0]))

    def to_dict(self):
        out = []
        for factors, coeff in self.sorted_items():
            ser = expr_to_json(coeff) if isinstance(coeff, sympy.Basic) else coeff.to_dict()
            out.append({"factors": [list(f) for f in factors], "coefficient": ser})
        return out


def add(s, t):
    return s + t


def scale(c, s):
    """系数 c (MotClass) 乘以 Q(L) 系数的级数；或 Q(L) 元素乘以级数"""
    result = SrSeries()
    for factors, coeff in s.terms.items():
        if isinstance(c, sympy.Basic) or isinstance(c, (int, Fraction)):
            result._accumulate(factors, coeff_mul(coeff, sympy.sympify(c)))
        else:
            result._accumulate(factors, c.scale(coeff))
    return result


def mul_geometric(s, e, i):
    """每一项再乘 p_{e,i}(T)"""
    result = SrSeries()
    for factors, coeff in s.terms.items():
        result._accumulate(tuple(sorted(factors + ((e, i),))), coeff)
    return result


def series_limit(s, zero=sympy.Integer(0)):
    """lim_{T->∞}：m 个因子的乘积 -> (-1)^m，常数 1 -> 1"""
    total = zero
    for factors, coeff in s.sorted_items():
        term = coeff_mul(coeff, sympy.Integer((-1) ** len(factors)))
        total = term if total is zero else total + term
    return canonical_expr(total) if isinstance(total, sympy.Basic) else total


def expand(s, K):
    """T 展开到 T^K，返回系数列表 [c_0, ..., c_K]"""
    coeffs = [None] * (K + 1)
    for factors, coeff in s.sorted_items():
        poly = {0: sympy.Integer(1)}
        for e, i in factors:
            step = {}
            for d, c in poly.items():
                m = 1
                while d + i * m <= K:
                    step[d + i * m] = step.get(d + i * m, 0) + c * L ** (e * m)
                    m += 1
            poly = step
        for d, c in poly.items():
            term = coeff_mul(coeff, c)
            coeffs[d] = term if coeffs[d] is None else coeffs[d] + term
    return [sympy.Integer(0) if c is None else (canonical_expr(c) if isinstance(c, sympy.Basic) else c)
            for c in coeffs]


# === 三角剖分与幺模分解 ===

def triangulate(generators):
    """闭锥的拉三角剖分 (pulling)：返回单纯锥的生成元组列表"""
    gens = sorted(set(tuple(g) for g in generators))
    if not gens:
        return [()]
    d = rank(gens)
    if len(gens) == d:
        return [tuple(gens)]
    cone = RationalCone.from_generators(gens, len(gens[0]), relatively_open=False)
    apex = cone.generators[0]
    out = []
    for _, on in cone.facets():
        facet_gens = [cone.generators[i] for i in sorted(on)]
        if apex in facet_gens:
            continue
        for simplex in triangulate(facet_gens):
            out.append(tuple(sorted(simplex + (apex,))))
    return out


def open_simplicial_cells(cone):
    """三角剖分的全部单元中相对内部落在 cone 内的那些 (生成元组)"""
    cells = set()
    for simplex in triangulate(cone.generators):
        for k in range(len(simplex) + 1):
            for sub in combinations(simplex, k):
                cells.add(sub)
    kept = []
    for sub in sorted(cells, key=lambda s: (len(s), s)):
        point = tuple(sum(g[i] for g in sub) for i in range(cone.ambient_dim))
        if cone.contains(point):
            kept.append(sub)
    return kept


def parallelepiped_points(gens):
    """
    半开平行体 {sum c_j g_j : 0 <= c_j < 1} 中的格点，返回 [(点, 系数 c)]。
    在一组非零子式所在的行上枚举整数框，再检查系数范围与整性。
    """
    gens = [tuple(g) for g in gens]
    k = len(gens)
    if k == 0:
        return [((), ())]
    n = len(gens[0])
    rows = None
    for cand in combinations(range(n), k):
        if rank([[g[r] for g in gens] for r in cand]) == k:
            rows = cand
            break
    if rows is None:
        raise DecompositionError("generators are linearly dependent", cone=gens)
    inv_cols = inverse_columns([[g[r] for g in gens] for r in rows])
    # inv[j][r] = inv_cols[r][j]
    boxes = [range(sum(min(0, g[r]) for g in gens), sum(max(0, g[r]) for g in gens) + 1) for r in rows]
    out = []
    for y in product(*boxes):
        c = [sum(inv_cols[r][j] * y[r] for r in range(k)) for j in range(k)]
        if any(x < 0 or x >= 1 for x in c):
            continue
        point = [sum(cj * g[i] for cj, g in zip(c, gens)) for i in range(n)]
        if any(Fraction(x).denominator != 1 for x in point):
            continue
        out.append((tuple(int(x) for x in point), tuple(c)))
    return out


def unimodular_pieces(gens, cap=DECOMPOSITION_CAP):
    """相对开单纯锥 -> 相对开幺模锥 (星形细分，取系数和最小的平行体格点)"""
    out = []
    stack = [tuple(sorted(gens))]
    produced = 0
    while stack:
        g = stack.pop()
        produced += 1
        if produced > cap:
            raise DecompositionError(f"unimodular decomposition exceeded {cap} cells", cone=gens)
        if minors_gcd(g) == 1:
            out.append(g)
            continue
        candidates = [(sum(c), p, c) for p, c in parallelepiped_points(g) if any(p)]
        if not candidates:
            raise ConsistencyError(f"non-unimodular cone {g} has an empty parallelepiped")
        _, w, coeffs = min(candidates)
        support = [j for j, c in enumerate(coeffs) if c > 0]
        keep = [g[j] for j in range(len(g)) if j not in support]
        for k in range(len(support)):
            for T in combinations(support, k):
                stack.append(tuple(sorted(keep + [g[j] for j in T] + [w])))
    return sorted(out, key=lambda s: (len(s), s))


def _pieces(cone):
    pieces = []
    for cell in open_simplicial_cells(cone):
        pieces.extend(unimodular_pieces(cell))
    Logger.debug(f"decompose_open: {cone} -> {len(pieces)} 个幺模开锥")
    return pieces


def decompose_open(cone):
    """返回两两不交的相对开幺模单纯锥 (RationalCone)，并集等于 cone"""
    n = cone.ambient_dim
    return [RationalCone.from_generators(p, n, relatively_open=True) if p
            else RationalCone.from_generators([], n, relatively_open=True)
            for p in _pieces(cone)]


# === 级数与极限 ===

def _check_form(l, lp, g, allow_flat):
    lv, sv = l(g), lp(g)
    if sv <= 0:
        raise PositivityError(f"l' is not positive on generator {g}", generator=g)
    if lv < 0 or (lv == 0 and not allow_flat):
        raise PositivityError(f"l is not positive on generator {g}", generator=g)
    return lv, sv


def cone_series(cone, l, lp, allow_flat=False):
    """
    S_{Δ,l,l'}(T) = sum_{k ∈ Δ ∩ Z^n} L^{-l'(k)} T^{l(k)}。
    幺模开锥贡献 prod_j p_{-l'(g_j), l(g_j)}；allow_flat 时 l(g) = 0 的因子
    收进系数 L^{-l'(g)} / (1 - L^{-l'(g)})。
    """
    series = SrSeries()
    for piece in _pieces(cone):
        factors = []
        coeff = sympy.Integer(1)
        for g in piece:
            lv, sv = _check_form(l, lp, g, allow_flat)
            if lv == 0:
                coeff = coeff * L ** (-sv) / (1 - L ** (-sv))
            else:
                factors.append((-sv, lv))
        series._accumulate(tuple(sorted(factors)), canonical_expr(coeff))
    return series


def open_cone_limit(cone, l, lp):
    """相对开锥的极限必须是 (-1)^{dim}；不符说明分解有 bug"""
    value = series_limit(cone_series(cone, l, lp))
    expected = (-1) ** cone.dim
    if not expr_is_zero(value - expected):
        raise ConsistencyError(f"limit {value} of open cone {cone} differs from (-1)^dim = {expected}")
    return expected


@dataclass(frozen=True)
class RationalPiece:
    """sum_p L^{-s(p)} T^{l(p)} / prod_j (1 - L^{-s_j} T^{l_j})"""
    numerator: tuple    # ((s, l), ...)
    denominator: tuple  # ((s_j, l_j), ...)


def cone_rational(cone, l, lp, allow_flat=False):
    """平行体闭式：对三角剖分的每个开单纯单元，Π' = {sum c_j g_j : 0 < c_j <= 1}"""
    pieces = []
    for cell in open_simplicial_cells(cone):
        den = []
        for g in cell:
            lv, sv = _check_form(l, lp, g, allow_flat)
            den.append((sv, lv))
        total = tuple(sum(g[i] for g in cell) for i in range(cone.ambient_dim)) if cell else ()
        num = []
        for p, _ in parallelepiped_points(cell):
            shifted = tuple(t - x for t, x in zip(total, p)) if cell else ()
            num.append((lp(shifted) if cell else 0, l(shifted) if cell else 0))
        pieces.append(RationalPiece(tuple(sorted(num)), tuple(sorted(den))))
    return pieces


def rational_limit(pieces):
    """T -> ∞：取分子中 T^{deg 分母} 的系数除以分母首项"""
    total = sympy.Integer(0)
    for piece in pieces:
        degree = sum(lj for _, lj in piece.denominator if lj > 0)
        lead = sympy.Integer(1)
        for sj, lj in piece.denominator:
            lead *= -L ** (-sj) if lj > 0 else (1 - L ** (-sj))
        top = sum((L ** (-s) for s, lv in piece.numerator if lv == degree), sympy.Integer(0))
        total += top / lead
    return canonical_expr(total)


def expand_rational(pieces, K):
    coeffs = [sympy.Integer(0)] * (K + 1)
    for piece in pieces:
        poly = {}
        for s, lv in piece.numerator:
            if lv <= K:
                poly[lv] = poly.get(lv, 0) + L ** (-s)
        for sj, lj in piece.denominator:
            if lj == 0:
                poly = {d: c / (1 - L ** (-sj)) for d, c in poly.items()}
                continue
            step = {}
            for d, c in poly.items():
                m = 0
                while d + lj * m <= K:
                    step[d + lj * m] = step.get(d + lj * m, 0) + c * L ** (-sj * m)
                    m += 1
            poly = step
        for d, c in poly.items():
            coeffs[d] += c
    return [canonical_expr(c) for c in coeffs]
