import pytest

from newton_motivic.lattice import (
    primitive, clear_denominators, hermite_rows, saturation_basis, coordinates, minors_gcd,
)


def test_primitive_and_denominators():
    assert primitive((4, -6, 0)) == (2, -3, 0)
    assert primitive((0, 0)) == (0, 0)
    assert clear_denominators(["1/2", "3", "-1/3"]) == (3, 18, -2)


def test_hermite_rows_drop_dependent_rows():
    rows = hermite_rows([(2, 0), (0, 2), (1, 1)])
    assert len(rows) == 2
    assert all(next(x for x in r if x) > 0 for r in rows)
    # 格 {(a, b) : a + b 为偶数}
    assert coordinates((2, 0), rows) is not None
    assert coordinates((1, 1), rows) is not None
    assert coordinates((1, 0), rows) is None


@pytest.mark.parametrize("rows, n, expected", [
    ([(2, 0)], 2, [(1, 0)]),
    ([(2, 2, -4)], 3, [(1, 1, -2)]),
    ([(1, 0), (0, 3)], 2, [(1, 0), (0, 1)]),
    ([], 3, []),
])
def test_saturation_basis(rows, n, expected):
    assert sorted(saturation_basis(rows, n)) == sorted(expected)


def test_saturation_of_a_plane():
    # (1, 0, 1) 不在 (2, 0, 2), (0, 2, 2) 生成的格中，但在饱和格中
    basis = saturation_basis([(2, 0, 2), (0, 2, 2)], 3)
    assert len(basis) == 2
    assert coordinates((1, 0, 1), basis) is not None
    assert coordinates((0, 1, 1), basis) is not None
    assert coordinates((1, 0, 0), basis) is None


def test_coordinates_are_integral_in_the_basis():
    basis = saturation_basis([(3, 3, -6)], 3)
    assert coordinates((3, 3, -6), basis) == (3,)
    assert coordinates((-1, -1, 2), basis) == (-1,)
    assert coordinates((0, 0, 0), basis) == (0,)


@pytest.mark.parametrize("gens, expected", [
    ([(1, 0), (0, 1)], 1),
    ([(1, 0), (1, 2)], 2),
    ([(1, 1, 0), (0, 1, 1)], 1),
    ([(2, 0, 0)], 2),
])
def test_minors_gcd(gens, expected):
    assert minors_gcd(gens) == expected
