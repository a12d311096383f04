"""
精确线性代数与多面体运算

功能：
1. rank / inverse_columns：基于 sympy 有理矩阵，结果转成 Fraction
2. ppl (Parma Polyhedra Library) 封装：
   - cone_from_generators / cone_from_constraints：构造闭锥或带严格不等式的 NNC 锥
   - cone_constraints / cone_rays：最小化的 H / V 表示 (本原整数向量)
   - polyhedron_hull：conv(points) + cone(rays) 的顶点与刻面
   - system_point：齐次系统 (等式 + 严格/非严格不等式) 的一个解

全部为精确算术，不使用浮点。
"""

from fractions import Fraction

import ppl
import sympy

from .lattice import primitive


def to_fraction(value):
    """sympy Rational / int / Fraction -> Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def _sympy_matrix(rows):
    return sympy.Matrix([[sympy.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in row]
                         for row in rows])


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def rank(rows):
    rows = [r for r in rows]
    if not rows or not rows[0]:
        return 0
    return int(_sympy_matrix(rows).rank())


def inverse_columns(rows):
    """方阵的逆矩阵，按列返回"""
    inv = _sympy_matrix(rows).inv()
    size = inv.shape[0]
    return [[to_fraction(inv[i, j]) for i in range(size)] for j in range(size)]


# === ppl 封装 ===

def _expr(vec, variables):
    return sum(int(c) * v for c, v in zip(vec, variables) if c)


def _coefficients(obj, dim):
    coeffs = [int(c) for c in obj.coefficients()]
    return tuple(coeffs + [0] * (dim - len(coeffs)))


def cone_from_generators(generators, dim):
    """cone(generators) 的闭包 (C_Polyhedron)"""
    variables = [ppl.Variable(i) for i in range(dim)]
    gs = ppl.Generator_System()
    gs.insert(ppl.point(0))
    for g in generators:
        if any(g):
            gs.insert(ppl.ray(_expr(g, variables)))
    cone = ppl.C_Polyhedron(dim, "empty")
    cone.add_generators(gs)
    return cone


def cone_from_constraints(dim, equalities=(), inequalities=()):
    """
    e . x = 0 与 u . x >= 0 / > 0 ((u, strict))。
    有严格不等式时返回 NNC_Polyhedron，否则 C_Polyhedron；
    出现 0 > 0 这样的平凡矛盾时返回 None。
    """
    variables = [ppl.Variable(i) for i in range(dim)]
    strict_any = any(s for _, s in inequalities)
    cs = ppl.Constraint_System()
    for e in equalities:
        if any(e):
            cs.insert(_expr(e, variables) == 0)
    for u, strict in inequalities:
        if not any(u):
            if strict:
                return None
            continue
        cs.insert(_expr(u, variables) > 0 if strict else _expr(u, variables) >= 0)
    cone = ppl.NNC_Polyhedron(dim, "universe") if strict_any else ppl.C_Polyhedron(dim, "universe")
    cone.add_constraints(cs)
    return cone


def cone_constraints(cone, dim):
    """最小化 H 表示：(等式法向量列表, 不等式内法向量列表)，均为本原整数向量"""
    equalities, inequalities = [], []
    for c in cone.minimized_constraints():
        vec = _coefficients(c, dim)
        if not any(vec):
            continue
        if c.is_equality():
            equalities.append(primitive(vec))
        else:
            inequalities.append(primitive(vec))
    return equalities, inequalities


def cone_rays(cone, dim):
    """尖锥的极射线 (本原整数向量，已排序)；含直线时报错"""
    rays = set()
    for g in cone.minimized_generators():
        if g.is_line():
            raise ValueError("cone contains a line (not pointed)")
        if g.is_ray():
            rays.add(primitive(_coefficients(g, dim)))
    return sorted(rays)


def polyhedron_hull(points, rays, dim):
    """
    conv(points) + cone(rays)：返回 (顶点列表, [(w, offset)])，刻面为 <w,b> >= offset。
    要求结果满维。
    """
    variables = [ppl.Variable(i) for i in range(dim)]
    gs = ppl.Generator_System()
    for p in points:
        gs.insert(ppl.point(_expr(p, variables)))
    for r in rays:
        gs.insert(ppl.ray(_expr(r, variables)))
    poly = ppl.C_Polyhedron(dim, "empty")
    poly.add_generators(gs)
    if poly.affine_dimension() != dim:
        raise ValueError("hull is not full-dimensional")
    vertices = []
    for g in poly.minimized_generators():
        if g.is_point():
            den = int(g.divisor())
            vertices.append(tuple(Fraction(c, den) for c in _coefficients(g, dim)))
    facets = []
    for c in poly.minimized_constraints():
        w = _coefficients(c, dim)
        if any(w):
            facets.append((w, Fraction(-int(c.inhomogeneous_term()))))
    return vertices, facets


def system_point(dim, equalities=(), inequalities=()):
    """
    齐次系统的一个有理解 (尽量取非零)；无解时返回 None。
    """
    cone = cone_from_constraints(dim, equalities, inequalities)
    if cone is None or cone.is_empty():
        return None
    point, direction = None, None
    for g in cone.minimized_generators():
        if g.is_point() and point is None:
            den = int(g.divisor())
            point = [Fraction(c, den) for c in _coefficients(g, dim)]
        elif (g.is_ray() or g.is_line()) and direction is None:
            direction = _coefficients(g, dim)
    if point is None:
        return None
    if not any(point) and direction is not None:
        point = [Fraction(x) for x in direction]
    return point
