from pathlib import Path

import pytest

from newton_motivic.poly_core import SparsePoly, load_problem, support
from newton_motivic.polyhedra import newton_polyhedron

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


def problem_path(name):
    return str(PROBLEMS / name)


def load(name):
    return load_problem((PROBLEMS / name).read_text(encoding="utf-8"))[1]


def poly(partition, terms):
    """poly((1, 1), {(1, 1): 1}) -> xy"""
    return SparsePoly.from_terms(partition, terms)


@pytest.fixture
def three_vertex():
    return load("three_vertex.json")


@pytest.fixture
def three_vertex_polyhedron(three_vertex):
    return newton_polyhedron(support(three_vertex), 3)


@pytest.fixture
def xy():
    return poly((1, 1), {(1, 1): 1})


@pytest.fixture
def xy_z2():
    return poly((1, 1, 1), {(1, 1, 0): 1, (0, 0, 2): 1})
