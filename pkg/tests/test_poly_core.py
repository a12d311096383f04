from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from newton_motivic.poly_core import (
    SparsePoly, parse_poly, emit, support, face_poly, check_balanced, meets_block2,
    extract_h, compose_power, eval_mod_q,
)
from newton_motivic.polyhedra import newton_polyhedron
from newton_motivic.utils import ProblemSyntaxError, FaceMismatchError, ReductionError

from .conftest import load, poly


def test_parse_single_monomial():
    p = parse_poly('{"dims": [1, 1], "terms": [[[1, 1], 1]]}')
    assert p.terms == (((1, 1), Fraction(1)),)
    assert p.partition == (1, 1, 0)
    assert str(p) == "x*y"


def test_parse_three_vertex(three_vertex):
    assert len(three_vertex.terms) == 3
    assert three_vertex.partition == (2, 0, 1)
    assert support(three_vertex) == {(2, 0, 2), (1, 1, 2), (0, 3, 3)}


def test_zero_coefficient_is_dropped():
    p = parse_poly('{"dims": [0, 1], "terms": [[[1], 0]]}')
    assert p.is_zero()
    assert support(p) == frozenset()


def test_rational_coefficients_are_collected():
    p = parse_poly('{"dims": [0, 1], "terms": [[[1], "1/2"], {"exp": [1], "coef": "1/3"}]}')
    assert p.coeffs == {(1,): Fraction(5, 6)}


@pytest.mark.parametrize("text, fragment", [
    ('{"dims": [1, 1], "terms": [[[1, 1], 1]', "line 1"),
    ('{"dims": [1, 1], "terms": [[[1, 1, 1], 1]]}', "length 3"),
    ('{"dims": [1, 1], "terms": [[[-1, 1], 1]]}', "negative exponent"),
    ('{"dims": [1, 1], "terms": [[[1, 1], "x"]]}', "not a rational"),
    ('{"dims": [1, 1], "terms": [[[0, 0], 1], [[1, 1], 1]]}', "constant term"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ProblemSyntaxError) as info:
        parse_poly(text)
    assert fragment in str(info.value)


def test_syntax_error_carries_position():
    with pytest.raises(ProblemSyntaxError) as info:
        parse_poly('{\n  "dims": [1, 1],\n  "terms": ]\n}')
    assert info.value.line == 3


def test_emit_round_trip(three_vertex):
    assert parse_poly(emit(three_vertex)) == three_vertex


def test_face_poly_restricts_to_face(three_vertex, three_vertex_polyhedron):
    edge = three_vertex_polyhedron.face((0, 1))
    assert edge.label == "P1P2"
    assert face_poly(three_vertex, edge).coeffs == {(2, 0, 2): 1, (1, 1, 2): 1}


def test_face_poly_on_vertex_and_edge(xy_z2):
    poly_ = newton_polyhedron(support(xy_z2), 3)
    vertex = next(f for f in poly_.compact_faces() if f.vertices == ((0, 0, 2),))
    assert face_poly(xy_z2, vertex).coeffs == {(0, 0, 2): 1}
    edge = next(f for f in poly_.compact_faces() if f.dim == 1)
    assert face_poly(xy_z2, edge) == xy_z2


def test_face_poly_rejects_foreign_face(xy, three_vertex_polyhedron):
    with pytest.raises(FaceMismatchError):
        face_poly(xy, three_vertex_polyhedron.compact_faces()[0])


@pytest.mark.parametrize("partition, terms, expected", [
    ((1, 1), {(1, 1): 1}, (True, None)),
    ((1, 1, 1), {(1, 1, 1): 1}, (True, None)),
    ((1, 1), {(2, 1): 1}, (False, (2, 1))),
    ((2, 2, 1), {(1, 1, 1, 1, 0): 1, (0, 0, 0, 0, 2): 1}, (True, None)),
])
def test_check_balanced(partition, terms, expected):
    assert check_balanced(poly(partition, terms)) == expected


def test_balance_passes_to_faces(xy_z2):
    poly_ = newton_polyhedron(support(xy_z2), 3)
    for face in poly_.proper_faces():
        assert check_balanced(face_poly(xy_z2, face))[0]


def test_meets_block2():
    assert meets_block2(poly((1, 1), {(1, 1): 1})) == (True, None)
    assert meets_block2(poly((1, 1), {(2, 0): 1, (1, 1): 1})) == (False, (2, 0))


@pytest.mark.parametrize("terms, expected", [
    ({(1, 1, 0): 1, (0, 0, 2): 1}, {(2,): 1}),
    ({(1, 1, 1): 1}, {}),
    ({(1, 1, 0): 1, (0, 1, 3): 1, (0, 0, 4): 1}, {(4,): 1}),
])
def test_extract_h(terms, expected):
    h = extract_h(poly((1, 1, 1), terms))
    assert h.n_vars == 1
    assert h.coeffs == expected


def test_compose_power_builds_g_plus_h_power():
    g = poly((1, 1, 1), {(1, 1, 0): 1})
    h = poly((0, 1, 0), {(1,): 1})
    assert compose_power(g, h, 3) == poly((1, 1, 1), {(1, 1, 0): 1, (0, 0, 3): 1})
    assert load("xy_plus_h_power.json") == compose_power(g, h, 3)


def test_compose_power_checks_block_size():
    with pytest.raises(ValueError):
        compose_power(poly((1, 1, 1), {(1, 1, 0): 1}), poly((0, 2, 0), {(1, 1): 1}), 2)


def test_power_and_product():
    x_plus_y = poly((0, 2), {(1, 0): 1, (0, 1): 1})
    assert (x_plus_y ** 2).coeffs == {(2, 0): 1, (1, 1): 2, (0, 2): 1}
    assert (x_plus_y - x_plus_y).is_zero()


@pytest.mark.parametrize("p, point, q, expected", [
    (poly((1, 1), {(1, 1): 1}), (2, 3), 5, 1),
    (load("three_vertex.json"), (1, 1, 1), 7, 3),
])
def test_eval_mod_q(p, point, q, expected):
    assert eval_mod_q(p, point, q) == expected


def test_eval_mod_q_rejects_bad_denominator():
    with pytest.raises(ReductionError):
        eval_mod_q(poly((0, 1), {(1,): Fraction(1, 2)}), (1,), 2)


# === 性质测试 ===

_exponent = st.tuples(st.integers(0, 3), st.integers(0, 3))
_coef = st.fractions(min_value=-5, max_value=5, max_denominator=4)
_polys = st.dictionaries(_exponent, _coef, max_size=4).map(lambda d: poly((1, 1), d))
_points = st.tuples(st.integers(0, 6), st.integers(0, 6))


@given(_polys, _polys, _points)
def test_eval_mod_q_is_a_ring_homomorphism(p, r, point):
    q = 7
    assert eval_mod_q(p + r, point, q) == (eval_mod_q(p, point, q) + eval_mod_q(r, point, q)) % q
    assert eval_mod_q(p * r, point, q) == (eval_mod_q(p, point, q) * eval_mod_q(r, point, q)) % q


@given(_polys)
def test_emit_parse_identity_on_random_polynomials(p):
    p = SparsePoly.from_terms(p.partition, [(e, c) for e, c in p.terms if any(e)])
    assert parse_poly(emit(p)) == p
