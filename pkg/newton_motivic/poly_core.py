"""
稀疏多项式核心

功能：
1. SparsePoly：精确有理系数、附带变量分块 (d1, d2, d3) 的多项式
2. 问题文件解析 / 输出 (parse_poly / emit)
3. 支撑集、面多项式、平衡 (权 (1,-1,0)) 判定、h(z) = F(0,0,z) 提取
4. F_q 上求值 (允许 Laurent 指数，供环面计数使用)
"""

import json
from dataclasses import dataclass
from fractions import Fraction

from .report import ProblemFile, parse_model
from .utils import Logger, ProblemSyntaxError, FaceMismatchError, ReductionError


@dataclass(frozen=True)
class SparsePoly:
    n_vars: int
    partition: tuple
    terms: tuple  # ((exponent, Fraction), ...) 按指数排序，无零系数

    @classmethod
    def from_terms(cls, partition, mapping):
        """归一化构造：合并同类项并丢弃零系数"""
        partition = tuple(int(d) for d in partition) + (0,) * (3 - len(partition))
        n = sum(partition)
        collected = {}
        items = mapping.items() if isinstance(mapping, dict) else mapping
        for exp, coef in items:
            exp = tuple(int(e) for e in exp)
            if len(exp) != n:
                raise ValueError(f"exponent {exp} does not match partition {partition}")
            collected[exp] = collected.get(exp, Fraction(0)) + Fraction(coef)
        terms = tuple(sorted((e, c) for e, c in collected.items() if c != 0))
        return cls(n, partition, terms)

    @classmethod
    def zero(cls, partition):
        return cls.from_terms(partition, {})

    @property
    def coeffs(self):
        return dict(self.terms)

    @property
    def n1(self):
        return self.partition[0]

    @property
    def blocks(self):
        d1, d2, _ = self.partition
        return (range(0, d1), range(d1, d1 + d2), range(d1 + d2, self.n_vars))

    def is_zero(self):
        return not self.terms

    def has_constant_term(self):
        return any(not any(e) for e, _ in self.terms)

    def __neg__(self):
        return SparsePoly(self.n_vars, self.partition, tuple((e, -c) for e, c in self.terms))

    def __add__(self, other):
        self._check_compatible(other)
        return SparsePoly.from_terms(self.partition, list(self.terms) + list(other.terms))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return SparsePoly.from_terms(self.partition, [(e, c * other) for e, c in self.terms])
        self._check_compatible(other)
        product = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                product[e] = product.get(e, Fraction(0)) + c1 * c2
        return SparsePoly.from_terms(self.partition, product)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power")
        result = SparsePoly.from_terms(self.partition, {(0,) * self.n_vars: 1})
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def _check_compatible(self, other):
        if self.partition != other.partition:
            raise ValueError(f"partition mismatch {self.partition} vs {other.partition}")

    def with_partition(self, partition):
        return SparsePoly.from_terms(partition, self.terms)

    def variable_names(self):
        names = []
        for letter, block in zip("xyz", self.blocks):
            for k, _ in enumerate(block):
                names.append(letter if len(block) == 1 else f"{letter}{k + 1}")
        return names

    def __str__(self):
        if not self.terms:
            return "0"
        names = self.variable_names()
        parts = []
        for exp, coef in sorted(self.terms, key=lambda t: (-sum(t[0]), tuple(-e for e in t[0]))):
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, exp) if e)
            if not mono:
                parts.append(str(coef))
            elif coef == 1:
                parts.append(mono)
            elif coef == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{coef}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _terms_from_specs(specs):
    return [(tuple(t.exp), Fraction(t.coef)) for t in specs]


def load_problem(text):
    """解析问题文件，返回 (ProblemFile, SparsePoly)；给出 h_terms 时多项式为 g + h^N"""
    problem = parse_model(ProblemFile, text)
    poly = SparsePoly.from_terms(problem.partition, _terms_from_specs(problem.terms))
    if problem.h_terms is not None:
        h = SparsePoly.from_terms((0, problem.partition[2], 0), _terms_from_specs(problem.h_terms))
        poly = compose_power(poly, h, problem.options.N)
        Logger.debug(f"F = g + h^{problem.options.N} 共 {len(poly.terms)} 项")
    if poly.has_constant_term():
        raise ProblemSyntaxError("g(0) != 0: the polynomial has a constant term")
    return problem, poly


def parse_poly(text):
    return load_problem(text)[1]


def emit(p):
    """多项式 -> 问题文件 (JSON 文本)，与 parse_poly 互逆"""
    d1, d2, d3 = p.partition
    dims = [d1, d2, d3] if d3 else [d1, d2]
    doc = {"dims": dims, "terms": [{"exp": list(e), "coef": str(c)} for e, c in p.terms]}
    return json.dumps(doc, indent=2)


def support(p):
    return frozenset(e for e, _ in p.terms)


def face_poly(p, face):
    """g_γ：只保留落在面 γ 上的项"""
    if face.owner != support(p):
        raise FaceMismatchError(f"face {face.label} does not belong to the Newton polyhedron of {p}")
    kept = [(e, c) for e, c in p.terms if face.contains(e)]
    return SparsePoly.from_terms(p.partition, kept)


def block_weight(p, exp):
    d1, d2, _ = p.partition
    return sum(exp[:d1]) - sum(exp[d1:d1 + d2])


def check_balanced(p):
    """块 1 的指数和等于块 2 的指数和 (块 3 权为 0)；返回 (是否平衡, 第一个反例)"""
    for exp, _ in p.terms:
        if block_weight(p, exp) != 0:
            return False, exp
    return True, None


def meets_block2(p):
    """
    X_0(g) 是否包含 A^{n1} x {0}：每个单项式都含块 1 之外的变量。
    返回 (结论, 反例指数)。
    """
    d1 = p.partition[0]
    for exp, _ in p.terms:
        if not any(exp[d1:]):
            return False, exp
    return True, None


def extract_h(F):
    """h(z) = F(0, 0, z)：只由块 3 变量组成的项，作为 d3 元单块多项式"""
    d1, d2, d3 = F.partition
    kept = [(e[d1 + d2:], c) for e, c in F.terms if not any(e[:d1 + d2])]
    return SparsePoly.from_terms((0, d3, 0), kept)


def compose_power(g, h, N):
    """F = g + h^N，h 为 d3 元多项式，放到 g 的第三块变量上"""
    d1, d2, d3 = g.partition
    if h.n_vars != d3:
        raise ValueError(f"h has {h.n_vars} variables, third block has {d3}")
    lifted = SparsePoly.from_terms(g.partition, [((0,) * (d1 + d2) + e, c) for e, c in h.terms])
    return g + lifted ** N


def reduce_coeff(c, q):
    c = Fraction(c)
    if c.denominator % q == 0:
        raise ReductionError(f"coefficient {c} has denominator divisible by q={q}")
    return c.numerator * pow(c.denominator, -1, q) % q


def reduced_terms(p, q):
    """系数模 q 后的项表 (exp, c)，丢弃模 q 为零的项"""
    out = []
    for exp, coef in p.terms:
        c = reduce_coeff(coef, q)
        if c:
            out.append((exp, c))
    return out


def eval_terms_mod_q(terms, point, q):
    total = 0
    for exp, c in terms:
        term = c
        for x, e in zip(point, exp):
            if e:
                term = term * pow(x, e, q) % q
        total += term
    return total % q


def eval_mod_q(p, point, q):
    if len(point) != p.n_vars:
        raise ValueError(f"point {point} has wrong length for {p.n_vars} variables")
    return eval_terms_mod_q(reduced_terms(p, q), [x % q for x in point], q)
