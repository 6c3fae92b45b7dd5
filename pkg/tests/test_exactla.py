from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from heisbl import exactla as la
from heisbl.exactla import RationalMatrix, Subspace

from conftest import matrices, rationals, subspaces


def test_as_fraction_parses_strings_and_refuses_floats():
    assert la.as_fraction("3/6") == Fraction(1, 2)
    assert la.as_fraction(-2) == Fraction(-2)
    with pytest.raises(TypeError):
        la.as_fraction(0.5)
    with pytest.raises(TypeError):
        la.as_fraction(True)


def test_primitive_normalizes_sign_and_content():
    assert la.primitive([Fraction(-2, 3), Fraction(4, 3)]) == (1, -2)
    assert la.primitive([0, 0]) == (0, 0)


def test_rank_and_kernel_small_cases():
    a = RationalMatrix([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    assert la.rank(a) == 2
    ker = la.kernel(a)
    assert len(ker) == 1
    assert not any(a @ ker[0])


def test_inverse_roundtrip():
    a = RationalMatrix([[2, 1], [1, 1]])
    assert la.inverse(a) @ a == RationalMatrix.identity(2)


def test_inverse_of_singular_raises():
    with pytest.raises(ZeroDivisionError):
        la.inverse(RationalMatrix([[1, 2], [2, 4]]))


def test_solve_inconsistent_is_none():
    assert la.solve(RationalMatrix([[1, 1], [1, 1]]), [1, 2]) is None


def test_subspace_equality_is_by_span():
    a = Subspace.span(2, [[1, 1], [2, 2]])
    b = Subspace.span(2, [[Fraction(1, 3), Fraction(1, 3)]])
    assert a == b and hash(a) == hash(b)
    assert a.dim == 1 and not a.is_coordinate


def test_labels():
    assert Subspace.coordinate(3, [0, 2]).label() == "<e1,e3>"
    assert Subspace.zero(2).label() == "{0}"
    assert Subspace.full(2).label() == "R^2"
    assert Subspace.span(2, [[1, 1]]).label() == "<(1,1)>"


def test_projection_onto_diagonal():
    p = la.orthogonal_projection(Subspace.span(2, [[1, 1]]))
    h = Fraction(1, 2)
    assert p == RationalMatrix([[h, h], [h, h]])


def test_dimension_mismatch():
    with pytest.raises(la.DimensionError):
        la.sum_(Subspace.zero(2), Subspace.zero(3))


@given(matrices())
def test_rank_of_transpose(rows):
    a = RationalMatrix(rows)
    assert la.rank(a) == la.rank(a.T)


@given(matrices())
def test_rank_nullity(rows):
    a = RationalMatrix(rows)
    ker = la.kernel(a)
    assert la.rank(a) + len(ker) == a.shape[1]
    for v in ker:
        assert not any(a @ v)


@given(matrices())
def test_rank_agrees_with_float_rank_on_small_integers(rows):
    a = RationalMatrix(rows)
    assert la.rank(a) == np.linalg.matrix_rank(a.to_float(), tol=1e-9)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(subspaces(n=n), subspaces(n=n))))
def test_grassmann_identity(pair):
    v, w = pair
    assert la.sum_(v, w).dim + la.intersect(v, w).dim == v.dim + w.dim
    assert la.intersect(v, w) <= v and la.intersect(v, w) <= w
    assert v <= la.sum_(v, w)


@given(subspaces())
def test_projection_is_idempotent_symmetric(v):
    p = la.orthogonal_projection(v)
    assert p @ p == p
    assert p.is_symmetric()
    assert la.rank(p) == v.dim
    assert la.image(p, Subspace.full(v.ambient_dim)) == v


@given(subspaces())
def test_complement(v):
    c = la.orthogonal_complement(v)
    assert c.dim + v.dim == v.ambient_dim
    assert la.intersect(v, c).dim == 0
    assert la.orthogonal_complement(c) == v


@given(subspaces())
def test_orthogonal_basis(v):
    basis = la.orthogonal_basis(v)
    assert len(basis) == v.dim
    assert Subspace.span(v.ambient_dim, basis) == v if basis else v.dim == 0
    for i, a in enumerate(basis):
        assert all(x.denominator == 1 for x in a)
        for b in basis[i + 1:]:
            assert la.dot(a, b) == 0


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(subspaces(n=n), subspaces(n=n))))
def test_complement_in(pair):
    v, w = pair
    amb = la.sum_(v, w)
    c = la.complement_in(v, amb)
    assert c <= amb
    assert c.dim == amb.dim - v.dim


@given(st.lists(rationals, min_size=3, max_size=3))
def test_contains_after_span(vec):
    v = Subspace.span(3, [vec, [1, 0, 0]])
    assert v.contains(vec)
