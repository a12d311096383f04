"""
Grothendieck 环中的符号类与 Milnor 纤维公式

功能：
1. Atom / MotClass：环面超曲面类 HypTorus、环面零点类 ZeroTorus、Unit，系数在 Q(L)
   原子按支撑格饱和化约化 (分裂环面纤维化)，同一簇的不同写法得到同一原子
2. phi_class / psi_class：每个剖分单元 (γ, I) 的两类
3. zeta_pullback：i_1^* Z^0 与 i_1^* Z^1 (后者带 p_{-1,1}(T) 因子)
4. milnor_pullback / milnor_at_origin：-lim (Z^0 + Z^1)，
   与逐单元闭式 (正锥用 (-1)^{dim σ}，退化锥用平行体极限) 逐原子对照
5. pushforward：忘掉底映射 (A^{n1} x G_m -> G_m)
6. vanishing_check / conjecture_check：带假设检查的判定

G_m 等变结构不建模：两边原子不同时只能比较 F_q 纤维计数 (必要条件)。
"""

from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from . import oracles
from .cones_series import (
    L, SrSeries, LinearForm, canonical_expr, expr_is_zero, expr_to_json,
    cone_series, cone_rational, rational_limit, scale, mul_geometric, series_limit,
)
from .lattice import clear_denominators, primitive, saturation_basis, coordinates
from .poly_core import support, face_poly, check_balanced, meets_block2, extract_h
from .polyhedra import (
    newton_polyhedron, canonical_partition, leant_sets_in_block, maximal_leant_sets,
    vertex_positivity, partition_diagnostics,
)
from .utils import (
    Logger, HypothesisError, BaseTagError, ConsistencyError, PartitionError, DEFAULT_PROBE_PRIMES,
)

# === 原子类型与底空间标签 ===
HYP = "HypTorus"
ZERO = "ZeroTorus"
UNIT = "Unit"

BASE_ZERO_LOCUS = "X0(g)xGm"
BASE_AFFINE = "A^n1xGm"
BASE_GM = "Gm"


@dataclass(frozen=True, order=True)
class Atom:
    kind: str
    poly: tuple                 # ((exp, Fraction), ...) 约化后的 Laurent 多项式，Unit 为 ()
    tag: tuple = None           # 推出前保留的指标集 I

    @property
    def n_vars(self):
        return len(self.poly[0][0]) if self.poly else 0

    def forget_tag(self):
        return Atom(self.kind, self.poly, None)

    def describe(self):
        if self.kind == UNIT:
            return UNIT
        names = [f"u{i + 1}" for i in range(self.n_vars)]
        parts = []
        for exp, coef in self.poly:
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, exp) if e) or "1"
            parts.append(mono if coef == 1 else f"{coef}*{mono}")
        body = " + ".join(parts)
        return f"{self.kind}[{body}]" + ("" if self.tag is None else f"@I{{{','.join(str(i + 1) for i in self.tag)}}}")

    def to_dict(self):
        return {
            "kind": self.kind,
            "poly": [[list(e), str(c)] for e, c in self.poly],
            "I": None if self.tag is None else [i + 1 for i in self.tag],
        }


def _reduce_terms(terms, n):
    """把支撑格饱和化后改写成 r 元 Laurent 多项式，返回 (r, 新项)"""
    exps = [e for e, _ in terms]
    basis = saturation_basis(exps, n)
    reduced = []
    for e, c in terms:
        coords = coordinates(e, basis)
        if coords is None:
            raise ConsistencyError(f"exponent {e} not in its own saturated lattice")
        reduced.append((coords, Fraction(c)))
    return len(basis), tuple(sorted(reduced))


def hyp_torus(terms, n, tag=None):
    """{ξ ∈ G_m^n : p(ξ) = t} -> (系数, Atom)"""
    r, reduced = _reduce_terms(terms, n)
    coeff = (L - 1) ** (n - r)
    if r == 1 and len(reduced) == 1 and abs(reduced[0][0][0]) == 1:
        return coeff, Atom(UNIT, (), tag)
    return coeff, Atom(HYP, reduced, tag)


def zero_torus(terms, n, tag=None):
    """{ξ ∈ G_m^n : p(ξ) = 0}，与 t 无关；单项式时为空 -> (0, None)"""
    terms = sorted(terms)
    base = terms[0][0]
    # 系数取本原整数向量，首项为正
    ints = primitive(clear_denominators([c for _, c in terms]))
    if ints[0] < 0:
        ints = tuple(-c for c in ints)
    shifted = [(tuple(a - b for a, b in zip(e, base)), Fraction(c)) for (e, _), c in zip(terms, ints)]
    if len(shifted) == 1:
        return 0, None
    diffs = [e for e, _ in shifted if any(e)]
    basis = saturation_basis(diffs, n)
    reduced = []
    for e, c in shifted:
        coords = coordinates(e, basis)
        if coords is None:
            raise ConsistencyError(f"exponent difference {e} not in its saturated lattice")
        reduced.append((coords, c))
    return (L - 1) ** (n - len(basis)), Atom(ZERO, tuple(sorted(reduced)), tag)


class MotClass:
    """base 标签 + {Atom: Q(L) 系数}；audit 记录每个原子来自哪些面 (不参与相等判定)"""

    def __init__(self, base, terms=None, audit=None):
        self.base = base
        self.terms = {}
        self.audit = {}
        for atom, coeff in (terms or {}).items():
            self._accumulate(atom, coeff, (audit or {}).get(atom, frozenset()))

    def _accumulate(self, atom, coeff, labels=frozenset()):
        total = canonical_expr(self.terms.get(atom, 0) + coeff)
        if expr_is_zero(total):
            self.terms.pop(atom, None)
            self.audit.pop(atom, None)
        else:
            self.terms[atom] = total
            self.audit[atom] = self.audit.get(atom, frozenset()) | frozenset(labels)

    @classmethod
    def zero(cls, base):
        return cls(base)

    @classmethod
    def unit(cls, base, coeff=1):
        return cls(base, {Atom(UNIT, ()): sympy.sympify(coeff)})

    def is_zero(self):
        return not self.terms

    def _check_base(self, other):
        if self.base != other.base:
            raise BaseTagError(f"cannot combine classes over {self.base} and {other.base}")

    def __add__(self, other):
        self._check_base(other)
        result = MotClass(self.base, self.terms, self.audit)
        for atom, coeff in other.terms.items():
            result._accumulate(atom, coeff, other.audit.get(atom, frozenset()))
        return result

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, expr):
        return MotClass(self.base, {a: c * sympy.sympify(expr) for a, c in self.terms.items()},
                        self.audit)

    def __eq__(self, other):
        return isinstance(other, MotClass) and self.base == other.base and (self - other).is_zero()

    def __hash__(self):
        return hash((self.base, tuple(sorted(self.terms))))

    def sorted_items(self):
        return sorted(self.terms.items(), key=lambda t: t[0])

    def to_dict(self):
        return {
            "base": self.base,
            "terms": [{"atom": a.to_dict(), "coefficient": expr_to_json(c),
                       "faces": sorted(self.audit.get(a, ()))} for a, c in self.sorted_items()],
        }

    def __str__(self):
        if not self.terms:
            return f"0 over {self.base}"
        parts = [f"({sympy.factor(c)})*{a.describe()}" for a, c in self.sorted_items()]
        return " + ".join(parts) + f" over {self.base}"

    __repr__ = __str__


# === Φ, Ψ ===

def _cell_face(poly, gamma, I, n1):
    if tuple(sorted(I)) not in leant_sets_in_block(poly, gamma, n1):
        raise ValueError(f"I={tuple(i + 1 for i in I)} is not a leant set of {gamma.label} inside block 1")
    return poly.face(gamma.vertex_ids, tuple(sorted(I)))


def phi_class(g, poly, gamma, I):
    """Φ_{γ,I}：{ξ ∈ G_m^n : g_ε(ξ) = t}，ε = γ + R^I"""
    eps = _cell_face(poly, gamma, I, g.n1)
    coeff, atom = hyp_torus(face_poly(g, eps).terms, g.n_vars, tuple(sorted(I)))
    return MotClass(BASE_ZERO_LOCUS, {atom: coeff}, {atom: {gamma.label}})


def psi_class(g, poly, gamma, I):
    """Ψ_{γ,I}：{ξ ∈ G_m^n : g_ε(ξ) = 0}，每个 t 上纤维相同"""
    eps = _cell_face(poly, gamma, I, g.n1)
    coeff, atom = zero_torus(face_poly(g, eps).terms, g.n_vars, tuple(sorted(I)))
    if atom is None:
        return MotClass.zero(BASE_ZERO_LOCUS)
    return MotClass(BASE_ZERO_LOCUS, {atom: coeff}, {atom: {gamma.label}})


def pullback(M):
    """i_1^*：X_0(g) x G_m -> A^{n1} x G_m (原子与 I 标签不变)"""
    if M.base != BASE_ZERO_LOCUS:
        raise BaseTagError(f"pullback expects a class over {BASE_ZERO_LOCUS}, got {M.base}")
    return MotClass(BASE_AFFINE, M.terms, M.audit)


def pushforward(M):
    """∫_{A^{n1}}：忘掉到 A^{n1} 的映射，原子只按 (kind, 多项式) 区分"""
    if M.base != BASE_AFFINE:
        raise BaseTagError(f"pushforward expects a class over {BASE_AFFINE}, got {M.base}")
    result = MotClass.zero(BASE_GM)
    for atom, coeff in M.terms.items():
        result._accumulate(atom.forget_tag(), coeff, M.audit.get(atom, frozenset()))
    return result


# === ζ 函数与 Milnor 纤维 ===

@dataclass
class ZetaPullback:
    z0: SrSeries
    z1: SrSeries
    poly: object
    cells: list
    notes: list = field(default_factory=list)


def check_hypotheses(g, n1, probe_primes=DEFAULT_PROBE_PRIMES):
    """g(0)=0、X_0(g) ⊇ A^{n1} x {0}、非退化探测；不满足时抛 HypothesisError"""
    if g.has_constant_term():
        raise HypothesisError("g(0)=0", "polynomial has a constant term")
    ok, witness = meets_block2(g)
    if not ok:
        raise HypothesisError("X0⊇A^n1×0", "a monomial uses only block-1 variables", witness)
    if probe_primes:
        verdict = oracles.nondegeneracy_probe(g, q_list=probe_primes)
        if verdict.falsified:
            raise HypothesisError("nondegenerate", verdict.describe(), verdict.witness)


def _cell_form(cell):
    return LinearForm(cell.compact.vertices[0])


def zeta_pullback(g, n1=None, probe_primes=DEFAULT_PROBE_PRIMES):
    """
    Z0 = sum_cells Φ · S_{σ_{γ,I}, l_Γ, s}(T)
    Z1 = p_{-1,1}(T) · sum_cells Ψ · S_{σ_{γ,I}, l_Γ, s}(T)
    """
    n1 = g.n1 if n1 is None else n1
    n = g.n_vars
    if g.is_zero():
        Logger.warning("g = 0: zeta function is defined as 0")
        zero = SrSeries()
        return ZetaPullback(zero, zero, None, [], ["g = 0"])
    if g.n1 != n1:
        g = g.with_partition((n1, n - n1, 0))
    check_hypotheses(g, n1, probe_primes)
    poly = newton_polyhedron(support(g), n)
    cells = canonical_partition(poly, n1, n - n1)
    s = LinearForm.coordinate_sum(n)
    z0, z1 = SrSeries(), SrSeries()
    notes = []
    for cell in cells:
        l = _cell_form(cell)
        series = cone_series(cell.cone, l, s, allow_flat=True)
        if not l.is_positive_on(cell.cone):
            notes.append(f"cell {cell.label}: l_Γ vanishes on a boundary ray, summed into Q(L) coefficients")
        z0 = z0 + scale(pullback(phi_class(g, poly, cell.compact, cell.index_set)), series)
        psi = psi_class(g, poly, cell.compact, cell.index_set)
        if not psi.is_zero():
            z1 = z1 + scale(pullback(psi), series)
    z1 = mul_geometric(z1, -1, 1)
    Logger.debug(f"zeta_pullback: {len(cells)} 个单元, Z0 {len(z0.terms)} 项, Z1 {len(z1.terms)} 项")
    return ZetaPullback(z0, z1, poly, cells, notes)


@dataclass
class MilnorDetails:
    milnor: MotClass
    closed_form: MotClass
    zeta: ZetaPullback
    path: str
    printed_formula_agrees: bool
    diagnostics: list


def cell_limit(cell):
    """单元级数的极限：l_Γ 在闭包上为正时是 (-1)^{dim}，否则用平行体闭式计算"""
    l = _cell_form(cell)
    if l.is_positive_on(cell.cone):
        return sympy.Integer((-1) ** cell.dim)
    s = LinearForm.coordinate_sum(cell.cone.ambient_dim)
    return rational_limit(cone_rational(cell.cone, l, s, allow_flat=True))


def printed_formula(g, poly, cells, n1):
    """
    只保留 I ⊇ I_γ 的单元、符号 (-1)^{n+1-dim γ} (-1)^{|I|} 的闭式
    (坐标平面内有顶点时与极限不一定相同，仅作诊断)
    """
    n = g.n_vars
    total = MotClass.zero(BASE_AFFINE)
    for cell in cells:
        gamma = cell.compact
        if not set(gamma.coordinate_planes) <= set(cell.index_set):
            continue
        sign = (-1) ** (n + 1 - gamma.dim + len(cell.index_set))
        diff = phi_class(g, poly, gamma, cell.index_set) - psi_class(g, poly, gamma, cell.index_set)
        total = total + pullback(diff).scale(sign)
    return total


def milnor_details(g, n1=None, probe_primes=DEFAULT_PROBE_PRIMES):
    n1 = g.n1 if n1 is None else n1
    if g.n1 != n1:
        g = g.with_partition((n1, g.n_vars - n1, 0))
    zeta = zeta_pullback(g, n1, probe_primes)
    zero = MotClass.zero(BASE_AFFINE)
    if zeta.poly is None:
        return MilnorDetails(zero, zero, zeta, "zero", True, list(zeta.notes))
    milnor = -series_limit(zeta.z0 + zeta.z1, zero=zero)

    closed = MotClass.zero(BASE_AFFINE)
    for cell in zeta.cells:
        diff = phi_class(g, zeta.poly, cell.compact, cell.index_set) - \
            psi_class(g, zeta.poly, cell.compact, cell.index_set)
        closed = closed + pullback(diff).scale(-cell_limit(cell))
    if not (milnor - closed).is_zero():
        raise ConsistencyError(f"limit {milnor} differs from the cellwise closed form {closed}")

    positive = vertex_positivity(zeta.poly)
    path = "vertex-positive" if positive else "coordinate-plane"
    printed = printed_formula(g, zeta.poly, zeta.cells, n1)
    agrees = (printed - milnor).is_zero()
    diagnostics = list(zeta.notes) + partition_diagnostics(zeta.poly, zeta.cells, n1)
    if check_balanced(g)[0]:
        for gamma in zeta.poly.compact_faces():
            maximal = maximal_leant_sets(zeta.poly, gamma, n1)
            if len(maximal) != 1 or not maximal[0]:
                diagnostics.append(f"{gamma.label}: balanced input but maximal leant sets are {maximal}")
    if not agrees:
        diagnostics.append("printed I ⊇ I_γ formula differs from the limit: " + str(printed))
    Logger.debug(f"milnor_pullback: 路径 {path}, 与限制公式一致: {agrees}")
    return MilnorDetails(milnor, closed, zeta, path, agrees, diagnostics)


def milnor_pullback(g, n1=None, probe_primes=DEFAULT_PROBE_PRIMES):
    """i_1^* S_g，底为 A^{n1} x G_m"""
    return milnor_details(g, n1, probe_primes).milnor


def milnor_at_origin(g, probe_primes=DEFAULT_PROBE_PRIMES):
    """S_{g,0}：全部变量作为一块 (n1 = 0)，底为 G_m"""
    single = g.with_partition((0, g.n_vars, 0))
    return pushforward(milnor_pullback(single, 0, probe_primes))


def origin_printed_formula(g):
    """只对不在坐标平面内的紧面求和的闭式 (诊断用)"""
    single = g.with_partition((0, g.n_vars, 0))
    poly = newton_polyhedron(support(single), single.n_vars)
    n = single.n_vars
    total = MotClass.zero(BASE_AFFINE)
    for gamma in poly.compact_faces():
        if gamma.coordinate_planes:
            continue
        diff = phi_class(single, poly, gamma, ()) - psi_class(single, poly, gamma, ())
        total = total + pullback(diff).scale((-1) ** (n - 1 + gamma.dim))
    return pushforward(total)


# === 判定 ===

@dataclass
class VanishingVerdict:
    status: str                     # Vanishes / NonzeroWithValue / HypothesisFail
    reason: str = ""
    value: MotClass = None
    hypotheses: dict = field(default_factory=dict)
    realizations: dict = field(default_factory=dict)
    path: str = ""
    h_vanishes: bool = None
    diagnostics: list = field(default_factory=list)


def hypothesis_table(g, n1, probe_primes):
    table = {}
    balanced, witness = check_balanced(g)
    table["balance"] = "ok" if balanced else f"fails at exponent {witness}"
    table["g(0)=0"] = "ok" if not g.has_constant_term() else "fails"
    ok, w = meets_block2(g)
    table["X0⊇A^n1×0"] = "ok" if ok else f"fails at exponent {w}"
    probe = oracles.nondegeneracy_probe(g, q_list=probe_primes)
    table["nondegenerate"] = probe.describe()
    return table, balanced, witness, probe


def vanishing_check(g, partition=None, q_list=(3, 5, 7), probe_primes=DEFAULT_PROBE_PRIMES):
    if partition is not None:
        g = g.with_partition(partition)
    n1 = g.n1
    table, balanced, witness, probe = hypothesis_table(g, n1, probe_primes)
    if not balanced:
        return VanishingVerdict("HypothesisFail", f"balance: witness {witness}", hypotheses=table)
    if probe.falsified:
        return VanishingVerdict("HypothesisFail", f"nondegenerate: {probe.describe()}", hypotheses=table)
    try:
        details = milnor_details(g, n1, probe_primes=None)
    except (HypothesisError, PartitionError) as exc:
        return VanishingVerdict("HypothesisFail", str(exc), hypotheses=table)
    table["vertex positivity"] = "ok" if vertex_positivity(details.zeta.poly) else "fails (general path)"
    pushed = pushforward(details.milnor)
    realizations = {q: oracles.realize(pushed, q) for q in q_list}
    verdict = VanishingVerdict("Vanishes" if pushed.is_zero() else "NonzeroWithValue",
                               value=pushed, hypotheses=table, realizations=realizations,
                               path=details.path, diagnostics=details.diagnostics)
    if g.partition[2]:
        verdict.h_vanishes = extract_h(g).is_zero()
    return verdict


@dataclass
class ConjectureVerdict:
    status: str                     # symbolic-equal / realization-equal / mismatch / HypothesisFail
    reason: str = ""
    lhs: MotClass = None
    rhs: MotClass = None
    hypotheses: dict = field(default_factory=dict)
    realizations: dict = field(default_factory=dict)
    mismatches: dict = field(default_factory=dict)
    diagnostics: list = field(default_factory=list)


EQUIVARIANCE_NOTE = ("G_m-equivariant structure is not modelled; realization equality is "
                     "consistent-with, not a proof")


def conjecture_check(F, q_list=(3, 5, 7, 11), probe_primes=DEFAULT_PROBE_PRIMES):
    """∫_{A^{d1}} i_1^* S_F 与 L^{d1} S_{h,0}，h(z) = F(0,0,z)"""
    d1, d2, d3 = F.partition
    table, balanced, witness, probe = hypothesis_table(F, d1, probe_primes)
    if not balanced:
        return ConjectureVerdict("HypothesisFail", f"weight-(1,-1,0) degree: witness {witness}",
                                 hypotheses=table)
    if probe.falsified:
        return ConjectureVerdict("HypothesisFail", f"nondegenerate: {probe.describe()}", hypotheses=table)
    h = extract_h(F)
    if not h.is_zero():
        h_probe = oracles.nondegeneracy_probe(h, q_list=probe_primes)
        table["h nondegenerate"] = h_probe.describe()
        if h_probe.falsified:
            return ConjectureVerdict("HypothesisFail", f"h nondegenerate: {h_probe.describe()}",
                                     hypotheses=table)
    try:
        details = milnor_details(F, d1, probe_primes=None)
        lhs = pushforward(details.milnor)
        rhs = MotClass.zero(BASE_GM) if h.is_zero() else \
            milnor_at_origin(h, probe_primes=None).scale(L ** d1)
    except (HypothesisError, PartitionError) as exc:
        return ConjectureVerdict("HypothesisFail", str(exc), hypotheses=table)

    diagnostics = list(details.diagnostics) + [EQUIVARIANCE_NOTE]
    realizations, mismatches = {}, {}
    for q in q_list:
        left, right = oracles.realize(lhs, q), oracles.realize(rhs, q)
        realizations[q] = (left, right)
        if left != right:
            mismatches[q] = (left, right)
    if (lhs - rhs).is_zero():
        status = "symbolic-equal"
    elif not mismatches:
        status = "realization-equal"
    else:
        status = "mismatch"
    Logger.info(f"conjecture_check: {status}")
    return ConjectureVerdict(status, lhs=lhs, rhs=rhs, hypotheses=table, realizations=realizations,
                             mismatches=mismatches, diagnostics=diagnostics)
