"""
暴力枚举的对照 (oracle)

功能：
1. count_torus_fiber / count_torus_zero：(F_q^*)^n 上按 p(ξ) = t 分桶计数
2. jet_count：给定 ord_t x = a 的 m 阶喷射，ord_t g = m，按 ac(g) 分桶
3. jet_count_total：φ(0) ∈ A^{n1} x {0} 的全部 m 阶喷射 (ζ 函数 T^m 系数的对照)
4. series_coeff_brute：锥内格点直接求和
5. nondegeneracy_probe：有限域上寻找面多项式的奇点 (只能证伪)
6. realize：G_m 上的类 -> 每个 t 的点数 (L -> q)

所有枚举都先对照预算，超出即报错，不做静默截断。
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

import sympy

from . import motivic_ring
from .cones_series import L, expand, realize_expr
from .poly_core import reduced_terms, eval_terms_mod_q, face_poly, support, reduce_coeff
from .polyhedra import newton_polyhedron, l_gamma
from .utils import (
    Logger, BaseTagError, PartitionError, PositivityError, check_budget, resolve_budget, DEFAULT_PROBE_PRIMES,
)


@dataclass
class FiberCounts:
    q: int
    counts: dict  # t -> 整数 (虚类时可为负或有理数)

    @classmethod
    def zeros(cls, q):
        return cls(q, {t: 0 for t in range(1, q)})

    @classmethod
    def constant(cls, q, value):
        return cls(q, {t: value for t in range(1, q)})

    def __add__(self, other):
        return FiberCounts(self.q, {t: self.counts[t] + other.counts[t] for t in self.counts})

    def scaled(self, factor):
        return FiberCounts(self.q, {t: v * factor for t, v in self.counts.items()})

    def normalized(self):
        """整数值取 int，其余保留 Fraction"""
        return FiberCounts(self.q, {t: (int(v) if Fraction(v).denominator == 1 else Fraction(v))
                                    for t, v in self.counts.items()})

    def total(self):
        return sum(self.counts.values())

    def is_zero(self):
        return all(v == 0 for v in self.counts.values())

    def to_dict(self):
        return {str(t): str(self.counts[t]) for t in sorted(self.counts)}


def _is_prime(q):
    return q >= 2 and all(q % d for d in range(2, int(q ** 0.5) + 1))


def _check_prime(q):
    if not _is_prime(q):
        raise ValueError(f"q={q} must be a prime")


@lru_cache(maxsize=None)
def _torus_counts(terms, n, q, budget):
    """terms 已是 (exp, Fraction) 元组；返回 (各 t 的计数, 零点数)"""
    check_budget((q - 1) ** n, budget, f"torus count n={n} q={q}")
    reduced = []
    for exp, coef in terms:
        c = reduce_coeff(coef, q)
        if c:
            reduced.append((exp, c))
    counts = {t: 0 for t in range(1, q)}
    zero = 0
    for xi in product(range(1, q), repeat=n):
        value = eval_terms_mod_q(reduced, xi, q)
        if value:
            counts[value] += 1
        else:
            zero += 1
    return tuple(sorted(counts.items())), zero


def count_torus_fiber(p, q, budget=None):
    _check_prime(q)
    counts, _ = _torus_counts(p.terms, p.n_vars, q, resolve_budget(budget))
    return FiberCounts(q, dict(counts))


def count_torus_zero(p, q, budget=None):
    _check_prime(q)
    return _torus_counts(p.terms, p.n_vars, q, resolve_budget(budget))[1]


# === 喷射 ===

@dataclass(frozen=True)
class JetSpec:
    a: tuple
    m: int
    q: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("jet order m must be >= 1")
        if any(x < 0 for x in self.a):
            raise ValueError("order vector must be nonnegative")


def _trunc_mul(u, v, m, q):
    out = [0] * (m + 1)
    for i, x in enumerate(u):
        if x:
            for j in range(m + 1 - i):
                if v[j]:
                    out[i + j] = (out[i + j] + x * v[j]) % q
    return out


def _jet_tables(choices_per_var, max_exp, m, q):
    """每个变量的每个候选喷射，预先算好 0..max_exp 次幂 (截断到 t^m)"""
    tables = []
    for choices, top in zip(choices_per_var, max_exp):
        per_var = []
        for jet in choices:
            powers = [[1] + [0] * m]
            for _ in range(top):
                powers.append(_trunc_mul(powers[-1], jet, m, q))
            per_var.append(powers)
        tables.append(per_var)
    return tables


def _count_jets(g, choices_per_var, m, q):
    terms = reduced_terms(g, q)
    max_exp = [max((e[i] for e, _ in terms), default=0) for i in range(g.n_vars)]
    tables = _jet_tables(choices_per_var, max_exp, m, q)
    counts = {t: 0 for t in range(1, q)}
    for idx in product(*[range(len(c)) for c in choices_per_var]):
        value = [0] * (m + 1)
        for exp, c in terms:
            mono = [c] + [0] * m
            for i, e in enumerate(exp):
                if e:
                    mono = _trunc_mul(mono, tables[i][idx[i]][e], m, q)
            value = [(x + y) % q for x, y in zip(value, mono)]
        if any(value[:m]):
            continue
        if value[m]:
            counts[value[m]] += 1
    return FiberCounts(q, counts)


def _jets_with_order(order, m, q):
    """x(t) = sum_{j=order}^{m} c_j t^j，c_order != 0"""
    out = []
    for lead in range(1, q):
        for rest in product(range(q), repeat=m - order):
            jet = [0] * (m + 1)
            jet[order] = lead
            for k, c in enumerate(rest):
                jet[order + 1 + k] = c
            out.append(jet)
    return out


def jet_count(g, spec, budget=None):
    """
    #X_{a,m}(g)(F_q)，返回 (总数, 按 ac 分桶)。
    a_i > m 的坐标在 t^{m+1} 截断下为 0：先在 M = max(m, max a) 阶计数再除以 q^{n(M-m)}，
    等价于 m 阶计数 (x_i ≡ 0) 乘以 ∏_{a_i > m} (q-1)·q^{m-a_i}，结果可以是分数。
    """
    _check_prime(spec.q)
    a, m, q = tuple(spec.a), spec.m, spec.q
    if len(a) != g.n_vars:
        raise ValueError(f"order vector {a} has wrong length")
    size, factor = 1, Fraction(1)
    choices = []
    for x in a:
        if x > m:
            factor *= Fraction((q - 1) * q ** m, q ** x)
            choices.append([[0] * (m + 1)])
        else:
            size *= (q - 1) * q ** (m - x)
            choices.append(_jets_with_order(x, m, q))
    check_budget(size * max(1, len(g.terms)), resolve_budget(budget), f"jet count a={a} m={m}")
    counts = _count_jets(g, choices, m, q).scaled(factor).normalized()
    return counts.total(), counts


def jet_count_total(g, m, q, n1, budget=None):
    """φ(0) ∈ A^{n1} x {0} 的全部 m 阶喷射中 ord_t g = m 的个数，按 ac 分桶"""
    _check_prime(q)
    n = g.n_vars
    size = q ** (n1 * (m + 1) + (n - n1) * m)
    check_budget(size * max(1, len(g.terms)), resolve_budget(budget), f"jet total m={m}")
    choices = []
    for i in range(n):
        start = 0 if i < n1 else 1
        jets = []
        for coeffs in product(range(q), repeat=m + 1 - start):
            jets.append([0] * start + list(coeffs))
        choices.append(jets)
    return _count_jets(g, choices, m, q)


# === 级数系数 ===

def series_coeff_brute(cone, l, lp, K):
    """S_{Δ,l,l'} 的 T^1..T^K 系数：对 l(k) <= K 的格点直接求和"""
    if not all(l(g) > 0 for g in cone.generators):
        raise PositivityError("l is not positive on the closure; slices are not finite")
    n = cone.ambient_dim
    lo, hi = [0] * n, [0] * n
    for g in cone.generators:
        reach = Fraction(K, l(g))
        for i in range(n):
            if g[i] > 0:
                hi[i] += reach * g[i]
            else:
                lo[i] += reach * g[i]
    ranges = [range(math.floor(lo[i]), math.ceil(hi[i]) + 1) for i in range(n)]
    coeffs = [sympy.Integer(0)] * (K + 1)
    for k in product(*ranges):
        deg = l(k)
        if 1 <= deg <= K and cone.contains(k):
            coeffs[deg] += L ** (-lp(k))
    return [sympy.cancel(c) for c in coeffs[1:]]


# === 非退化探测 ===

@dataclass
class ProbeVerdict:
    falsified: bool
    face: str = ""
    witness: tuple = ()
    q: int = None
    primes: tuple = ()
    faces_checked: int = 0

    def describe(self):
        if self.falsified:
            return f"falsified over F_{self.q}: face {self.face}, singular point {self.witness}"
        return f"not falsified at q ∈ {{{','.join(map(str, self.primes))}}} ({self.faces_checked} faces)"


def _partials(terms, n, q):
    out = []
    for i in range(n):
        d = [(tuple(e[j] - (j == i) for j in range(n)), c * e[i] % q) for e, c in terms if e[i] and c * e[i] % q]
        out.append(d)
    return out


def nondegeneracy_probe(g, faces=None, q_list=DEFAULT_PROBE_PRIMES, budget=None):
    """
    对每个正维紧面 γ，在 (F_q^*)^n 中搜索 g_γ = 0 且全部偏导为 0 的点。
    单项式面 (顶点) 的梯度在环面上不为零，直接通过。
    """
    budget = resolve_budget(budget)
    if g.is_zero():
        return ProbeVerdict(False, primes=tuple(q_list))
    poly = newton_polyhedron(support(g), g.n_vars)
    if faces is None:
        faces = [f for f in poly.compact_faces() if f.dim > 0]
    n = g.n_vars
    for q in q_list:
        _check_prime(q)
        check_budget((q - 1) ** n * max(1, len(faces)), budget, f"nondegeneracy probe q={q}")
        for face in faces:
            gp = face_poly(g, face)
            if len(gp.terms) < 2:
                continue
            terms = reduced_terms(gp, q)
            partials = _partials(terms, n, q)
            for xi in product(range(1, q), repeat=n):
                if eval_terms_mod_q(terms, xi, q):
                    continue
                if all(eval_terms_mod_q(d, xi, q) == 0 for d in partials):
                    Logger.debug(f"非退化探测: 面 {face.label} 在 F_{q} 上奇点 {xi}")
                    return ProbeVerdict(True, face.label, xi, q, tuple(q_list), len(faces))
    return ProbeVerdict(False, primes=tuple(q_list), faces_checked=len(faces))


# === 实现 (L -> q) ===

def _atom_counts(atom, q, budget):
    if atom.kind == motivic_ring.UNIT:
        return FiberCounts.constant(q, 1)
    counts, zero = _torus_counts(atom.poly, atom.n_vars, q, budget)
    if atom.kind == motivic_ring.HYP:
        return FiberCounts(q, dict(counts))
    return FiberCounts.constant(q, zero)


def realize(M, q, budget=None):
    """G_m 上的类的点数实现：逐 t 计数，系数中的 L 代为 q"""
    if M.base != motivic_ring.BASE_GM:
        raise BaseTagError(f"realize expects a class over {motivic_ring.BASE_GM}, got {M.base}")
    _check_prime(q)
    budget = resolve_budget(budget)
    result = FiberCounts.zeros(q)
    for atom, coeff in M.sorted_items():
        result = result + _atom_counts(atom, q, budget).scaled(realize_expr(coeff, q))
    return result.normalized()


def zeta_coefficient_check(g, n1, m, q, budget=None):
    """
    ζ 函数 T^m 系数的点数实现 (乘 q^{nm}) 与 jet_count_total 对照。
    返回 (是否一致, 暴力计数, 公式值)。
    """
    zeta = motivic_ring.zeta_pullback(g, n1)
    coeff = expand(zeta.z0 + zeta.z1, m)[m]
    if isinstance(coeff, sympy.Basic):
        predicted = FiberCounts.zeros(q)
    else:
        predicted = realize(motivic_ring.pushforward(coeff), q, budget).scaled(q ** (g.n_vars * m))
    brute = jet_count_total(g, m, q, n1, budget)
    return brute == predicted, brute, predicted


def jet_identity_check(g, a, k, q, budget=None):
    """
    单个权向量 a 的喷射等式：m = l_Γ(a) + k，
    k = 0 时 #X_{a,m}(g)_t = realize(Φ)_t · q^{nm - s(a)}，
    k >= 1 时 #X_{a,m}(g)_t = realize(Ψ)_t · q^{nm - s(a) - k}。
    返回 (是否一致, 暴力计数, 公式值)。
    """
    n = g.n_vars
    poly = newton_polyhedron(support(g), n)
    value, eps = l_gamma(poly, a)
    gamma = poly.face(eps.vertex_ids, ())
    if gamma is None:
        raise PartitionError(f"vertex hull of {eps.label} is not a compact face", point=tuple(a))
    I = eps.recession
    m = value + k
    s = sum(a)
    if k == 0:
        cls = motivic_ring.phi_class(g, poly, gamma, I)
        exponent = n * m - s
    else:
        cls = motivic_ring.psi_class(g, poly, gamma, I)
        exponent = n * m - s - k
    pushed = motivic_ring.pushforward(motivic_ring.pullback(cls))
    predicted = realize(pushed, q, budget).scaled(q ** exponent)
    _, brute = jet_count(g, JetSpec(tuple(a), m, q), budget)
    return brute == predicted, brute, predicted
