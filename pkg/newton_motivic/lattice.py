"""
整数格工具：本原化、Hermite 标准形、饱和化、子式 gcd

Hermite 标准形由 sympy.matrices.normalforms.hermite_normal_form 给出 (列形式，去掉零列)，
行形式通过转置得到。
"""

from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import gcd

import sympy
from sympy.matrices.normalforms import hermite_normal_form


def primitive(vec):
    """整数向量除以分量 gcd；零向量原样返回"""
    vec = tuple(int(x) for x in vec)
    g = reduce(gcd, (abs(x) for x in vec), 0)
    if g <= 1:
        return vec
    return tuple(x // g for x in vec)


def clear_denominators(vec):
    """有理向量乘以分母 lcm 得到整数向量 (不改变方向)"""
    fracs = [Fraction(x) for x in vec]
    den = 1
    for f in fracs:
        den = den * f.denominator // gcd(den, f.denominator)
    return tuple(int(f * den) for f in fracs)


def _int_rows(mat):
    return [tuple(int(mat[i, j]) for j in range(mat.cols)) for i in range(mat.rows)]


def hermite_rows(rows):
    """行 Hermite 标准形：生成同一个格的非零行，每行首个非零分量取正"""
    rows = [tuple(int(x) for x in r) for r in rows if any(r)]
    if not rows:
        return []
    H = hermite_normal_form(sympy.Matrix(rows).T)
    out = []
    for r in _int_rows(H.T):
        if not any(r):
            continue
        lead = next(x for x in r if x)
        out.append(r if lead > 0 else tuple(-x for x in r))
    return out


def saturation_basis(rows, n):
    """
    Z^n 与 span(rows) 的交 (饱和格) 的 Hermite 基。
    M 为 r x n 行基，H 为 M 的列格的 Hermite 基 (r x r)：H^{-1} M 的列生成 Z^r，
    因而其行张成饱和格。
    """
    basis = hermite_rows(rows)
    if not basis:
        return []
    if len(basis) == n:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    M = sympy.Matrix(basis)
    H = hermite_normal_form(M)
    saturated = H.inv() * M
    if any(not x.is_integer for x in saturated):
        raise ArithmeticError("saturation produced a non-integral row")
    return hermite_rows(_int_rows(saturated))


def coordinates(vec, basis):
    """vec 在 basis (行) 下的整数坐标；不在格中时返回 None"""
    if not basis:
        return () if not any(vec) else None
    A = sympy.Matrix(basis).T
    try:
        solution, params = A.gauss_jordan_solve(sympy.Matrix([int(x) for x in vec]))
    except ValueError:
        return None
    if params.shape[0]:
        raise ValueError("basis rows are linearly dependent")
    if any(not x.is_integer for x in solution):
        return None
    return tuple(int(x) for x in solution)


def minors_gcd(gens):
    """
    k 个生成元 (n 维) 的全部 k 阶子式的 gcd。
    等于 cone(gens) 在 span 的饱和格中的指数；为 1 即幺模。
    """
    gens = [tuple(int(x) for x in g) for g in gens]
    if not gens:
        return 1
    n, k = len(gens[0]), len(gens)
    g = 0
    for rows in combinations(range(n), k):
        minor = sympy.Matrix([[gen[r] for gen in gens] for r in rows]).det()
        g = gcd(g, abs(int(minor)))
        if g == 1:
            break
    return g
