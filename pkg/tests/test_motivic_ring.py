from fractions import Fraction

import pytest
import sympy

from newton_motivic.cones_series import L, expr_is_zero
from newton_motivic.motivic_ring import (
    Atom, MotClass, HYP, UNIT, ZERO, BASE_GM, BASE_AFFINE, BASE_ZERO_LOCUS,
    hyp_torus, zero_torus, phi_class, psi_class, pullback, pushforward,
    zeta_pullback, milnor_details, milnor_pullback, milnor_at_origin, origin_printed_formula,
    vanishing_check, conjecture_check, EQUIVARIANCE_NOTE,
)
from newton_motivic.oracles import realize
from newton_motivic.poly_core import SparsePoly, support
from newton_motivic.polyhedra import newton_polyhedron
from newton_motivic.utils import BaseTagError, HypothesisError

from .conftest import load, poly

CONJECTURE_PRIMES = (3, 5, 7, 11)


# === 原子约化 ===

def test_monomial_level_set_is_a_unit():
    coeff, atom = hyp_torus((((1, 1), 1),), 2)
    assert atom.kind == UNIT
    assert expr_is_zero(coeff - (L - 1))


def test_same_variety_gives_same_atom():
    c2, a2 = hyp_torus((((2, 0), 1),), 2)
    c1, a1 = hyp_torus((((2,), 1),), 1)
    assert a1 == a2
    assert a1.kind == HYP and a1.poly == (((2,), 1),)
    assert expr_is_zero(c2 - c1 * (L - 1))


def test_zero_locus_of_monomial_is_empty():
    assert zero_torus((((1, 1), 1),), 2) == (0, None)


def test_zero_locus_of_binomial():
    coeff, atom = zero_torus((((1, 1, 0), 1), ((0, 0, 2), 1)), 3)
    assert atom.kind == ZERO
    assert expr_is_zero(coeff - (L - 1) ** 2)
    assert atom.n_vars == 1


def test_zero_locus_of_non_monic_face_keeps_integer_coefficients():
    coeff, atom = zero_torus((((1, 1, 0), 1), ((0, 0, 2), 3)), 3)
    assert expr_is_zero(coeff - (L - 1) ** 2)
    assert atom.poly == (((0,), 3), ((1,), 1))
    # 同一个零点集：整体乘常数不改变原子
    assert zero_torus((((1, 1, 0), -2), ((0, 0, 2), -6)), 3)[1] == atom
    assert zero_torus((((1, 1, 0), Fraction(1, 3)), ((0, 0, 2), 1)), 3)[1] == atom


def test_non_monic_zero_locus_realizes_at_every_prime():
    coeff, atom = zero_torus((((1, 1, 0), 1), ((0, 0, 2), 3)), 3)
    M = MotClass(BASE_GM, {atom: coeff})
    assert realize(M, 3).counts == {1: 0, 2: 0}
    assert realize(M, 5).counts == {t: 16 for t in range(1, 5)}


def test_milnor_at_origin_of_non_monic_input():
    S = milnor_at_origin(load("xy_3z2.json"))
    for q in (2, 3, 5, 7, 11):
        assert set(realize(S, q).counts) == set(range(1, q))


def test_phi_and_psi_of_xy(xy):
    P = newton_polyhedron(support(xy), 2)
    vertex = P.compact_faces()[0]
    phi = phi_class(xy, P, vertex, ())
    assert phi.base == BASE_ZERO_LOCUS
    ((atom, coeff),) = phi.sorted_items()
    assert atom == Atom(UNIT, (), ())
    assert expr_is_zero(coeff - (L - 1))
    assert psi_class(xy, P, vertex, ()).is_zero()


def test_phi_rejects_set_that_does_not_lean(three_vertex, three_vertex_polyhedron):
    edge = three_vertex_polyhedron.face((0, 1))
    with pytest.raises(ValueError, match="not a leant set"):
        phi_class(three_vertex, three_vertex_polyhedron, edge, (0,))


# === 底空间标签 ===

def test_classes_over_different_bases_do_not_mix():
    with pytest.raises(BaseTagError):
        MotClass.zero(BASE_GM) + MotClass.zero(BASE_AFFINE)


def test_pushforward_and_pullback_check_base():
    with pytest.raises(BaseTagError):
        pushforward(MotClass.unit(BASE_ZERO_LOCUS))
    with pytest.raises(BaseTagError):
        pullback(MotClass.unit(BASE_AFFINE))
    with pytest.raises(BaseTagError):
        realize(MotClass.unit(BASE_AFFINE), 5)


def test_pushforward_forgets_index_tags():
    tagged = MotClass(BASE_AFFINE, {Atom(UNIT, (), ()): sympy.Integer(1), Atom(UNIT, (), (0,)): sympy.Integer(-1)})
    assert not tagged.is_zero()
    assert pushforward(tagged).is_zero()


# === Milnor 纤维 ===

def test_milnor_at_origin_of_square():
    S = milnor_at_origin(poly((0, 1), {(2,): 1}))
    ((atom, coeff),) = S.sorted_items()
    assert atom.kind == HYP and atom.poly == (((2,), 1),)
    assert expr_is_zero(coeff - 1)
    assert realize(S, 7).counts == {1: 2, 2: 2, 3: 0, 4: 2, 5: 0, 6: 0}


def test_milnor_at_origin_of_xy(xy):
    S = milnor_at_origin(xy)
    assert realize(S, 5).counts == {t: -4 for t in range(1, 5)}
    assert S == origin_printed_formula(xy)


def test_milnor_pullback_of_xy_cancels_after_pushforward(xy):
    details = milnor_details(xy)
    assert details.path == "vertex-positive"
    assert details.printed_formula_agrees
    assert len(details.zeta.cells) == 2
    assert not details.milnor.is_zero()
    assert pushforward(details.milnor).is_zero()
    assert details.milnor == details.closed_form


def test_zero_polynomial_has_zero_zeta():
    details = milnor_details(SparsePoly.zero((1, 1)))
    assert details.path == "zero"
    assert details.milnor.is_zero()
    assert details.zeta.notes == ["g = 0"]


def test_zeta_needs_block2_variables():
    with pytest.raises(HypothesisError) as info:
        zeta_pullback(poly((1, 1), {(1, 0): 1, (0, 1): 1}))
    assert info.value.reason == "X0⊇A^n1×0"
    assert info.value.witness == (1, 0)


def test_zeta_pullback_psi_part_carries_extra_factor(xy_z2):
    zeta = zeta_pullback(xy_z2)
    assert not zeta.z1.is_zero()
    assert all((-1, 1) in factors for factors in zeta.z1.terms)


def test_coordinate_plane_path_is_reported(xy_z2):
    details = milnor_details(xy_z2)
    assert details.path == "coordinate-plane"
    assert details.milnor == details.closed_form


def test_three_vertex_closed_form(three_vertex):
    details = milnor_details(three_vertex)
    assert details.milnor == details.closed_form
    assert milnor_pullback(three_vertex) == details.milnor


# === 判定 ===

@pytest.mark.parametrize("g", [
    poly((1, 1), {(1, 1): 1}),
    poly((1, 1, 1), {(1, 1, 1): 1}),
    poly((2, 2), {(1, 1, 1, 1): 1}),
    poly((1, 1), {(2, 2): 1}),
])
def test_balanced_nondegenerate_inputs_vanish(g):
    verdict = vanishing_check(g)
    assert verdict.status == "Vanishes", verdict.reason
    assert verdict.value.is_zero()
    assert all(r.is_zero() for r in verdict.realizations.values())
    assert verdict.hypotheses["balance"] == "ok"


def test_vanishing_reports_h_when_third_block_present():
    verdict = vanishing_check(load("xyz.json"))
    assert verdict.status == "Vanishes"
    assert verdict.h_vanishes is True


def test_vanishing_rejects_unbalanced_input():
    verdict = vanishing_check(poly((1, 1), {(2, 1): 1}))
    assert verdict.status == "HypothesisFail"
    assert "(2, 1)" in verdict.reason


def test_vanishing_rejects_degenerate_input():
    degenerate = poly((2, 2), {(2, 0, 2, 0): 1, (1, 1, 1, 1): 2, (0, 2, 0, 2): 1})
    verdict = vanishing_check(degenerate, probe_primes=(3,))
    assert verdict.status == "HypothesisFail"
    assert "nondegenerate" in verdict.reason


def test_conjecture_with_zero_h():
    verdict = conjecture_check(load("xyz.json"))
    assert verdict.status == "symbolic-equal"
    assert verdict.lhs.is_zero() and verdict.rhs.is_zero()
    assert EQUIVARIANCE_NOTE in verdict.diagnostics


@pytest.mark.parametrize("name", ["xy_z2.json", "xy_z3.json", "xy_z4.json", "xy_plus_h_power.json"])
def test_conjecture_holds_on_point_counts(name):
    verdict = conjecture_check(load(name), q_list=CONJECTURE_PRIMES)
    assert sorted(verdict.realizations) == list(CONJECTURE_PRIMES)
    assert verdict.status in ("symbolic-equal", "realization-equal"), verdict.mismatches
    assert not verdict.mismatches
    for left, right in verdict.realizations.values():
        assert left == right
        assert not left.is_zero()


def test_conjecture_with_non_monic_face():
    verdict = conjecture_check(load("xy_3z2.json"), q_list=CONJECTURE_PRIMES)
    assert verdict.status == "symbolic-equal"
    assert not verdict.mismatches
    assert sorted(verdict.realizations) == list(CONJECTURE_PRIMES)


@pytest.mark.slow
def test_conjecture_with_two_variable_blocks():
    verdict = conjecture_check(load("x1x2y1y2_z2.json"), q_list=CONJECTURE_PRIMES)
    assert verdict.status in ("symbolic-equal", "realization-equal"), verdict.mismatches
    assert sorted(verdict.realizations) == list(CONJECTURE_PRIMES)
    for left, right in verdict.realizations.values():
        assert left == right


def test_conjecture_rejects_unbalanced_input():
    verdict = conjecture_check(load("unbalanced_x2y.json"))
    assert verdict.status == "HypothesisFail"
    assert verdict.lhs is None
