import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from heisbl import exactla as la
from heisbl.conditions import (
    ProjectionConfig,
    SubspaceFamily,
    build_system,
    constraint_A,
    constraint_B,
    constraint_C,
    constraint_C1_C2,
    critical_subspaces,
)
from heisbl.exactla import Subspace
from heisbl.polytope import HPolytope, enumerate_vertices

from conftest import coordinate_configs, qv

LW_VERTS = {qv("1/5", "2/5", "1/5", "2/5"), qv("2/5", "1/5", "2/5", "1/5")}


def test_scaling_rows_for_lw(lw):
    a1, a2 = constraint_A(lw)
    assert a1.coeffs == qv(2, 2, 3, 3) and a1.rhs == 3 and a1.relation == "=="
    assert a2.coeffs == qv(3, 3, 2, 2)


def test_b_rows_at_e1(lw):
    b1, b2 = constraint_B(lw, Subspace.coordinate(2, [0]))
    # L_1 = proj<e2> kills e1, L_2 = proj<e1> keeps it
    assert b1.coeffs == qv(1, 2, 2, 2) and b1.rhs == 2 and b1.relation == ">="
    assert b2.coeffs == qv(2, 2, 1, 2)
    assert str(b1.tag) == "B1(<e1>)"


def test_lw_vertices_satisfy_everything(lw):
    for mode in ("sufficient", "necessary"):
        system = build_system(lw, mode=mode)
        for q in LW_VERTS:
            assert system.violated(q) == []


def test_skewed_rejected_points_violate_c(skewed):
    system = build_system(skewed, mode="sufficient")
    for q in (qv("1/5", "2/5", "2/5", "1/5"), qv("2/5", "1/5", "1/5", "2/5")):
        tags = {c.tag.kind for c in system.violated(q)}
        assert tags == {"C"}


def test_critical_subspaces_lw(lw):
    crit = critical_subspaces(lw, qv("2/5", "1/5", "2/5", "1/5"))
    assert {v.label() for v in crit} == {"<e1>", "R^2"}
    crit = critical_subspaces(lw, qv("1/5", "2/5", "1/5", "2/5"))
    assert {v.label() for v in crit} == {"<e2>", "R^2"}


def test_critical_subspaces_require_scaling(lw):
    with pytest.raises(ValueError):
        critical_subspaces(lw, qv(0, 0, 0, 0))


def test_c_pair_must_be_orthogonal(lw):
    e1 = Subspace.coordinate(2, [0])
    with pytest.raises(ValueError):
        constraint_C1_C2(lw, e1, e1)


def test_repeated_coordinate_rejected():
    with pytest.raises(ValueError):
        ProjectionConfig.coordinate(2, [[1, 1]])


def test_heuristic_family_for_skewed(skewed):
    fam = SubspaceFamily.heuristic(skewed)
    labels = {v.label() for v in fam.subspaces}
    assert labels == {"{0}", "<(1,1)>", "<e1>", "<(1,-1)>", "<e2>", "R^2"}


def test_unknown_mode(lw):
    with pytest.raises(ValueError):
        build_system(lw, mode="both")


@given(coordinate_configs())
def test_constraints_are_integral(config):
    for mode in ("sufficient", "necessary"):
        for c in build_system(config, mode=mode).constraints:
            assert all(x.denominator == 1 for x in c.coeffs)
            assert c.rhs.denominator == 1


@given(coordinate_configs(), st.data())
def test_c1_and_c2_collapse_to_c_on_coordinate_data(config, data):
    n = config.n
    idx = data.draw(st.sets(st.integers(0, n - 1)))
    v = Subspace.coordinate(n, idx)
    c1, c2 = constraint_C1_C2(config, v, la.orthogonal_complement(v))
    c = constraint_C(config, v)
    assert c1.coeffs == c.coeffs and c1.rhs == c.rhs == 0
    assert c2.coeffs == c.coeffs and c2.rhs == 0


def _swap(q, m):
    return tuple(q[m:]) + tuple(q[:m])


@given(coordinate_configs(max_n=3, max_m=2))
def test_swap_symmetry(config):
    m = config.m
    verts = enumerate_vertices(HPolytope.from_system(build_system(config))).vertices
    assert {_swap(v, m) for v in verts} == set(verts)


@given(coordinate_configs(max_n=3, max_m=3), st.data())
def test_permutation_equivariance(config, data):
    m = config.m
    perm = data.draw(st.permutations(range(m)))
    base = enumerate_vertices(HPolytope.from_system(build_system(config))).vertices
    moved = enumerate_vertices(HPolytope.from_system(build_system(config.permuted(perm)))).vertices
    full = list(perm) + [p + m for p in perm]
    assert {tuple(v[i] for i in full) for v in base} == set(moved)


@given(coordinate_configs(max_n=3, max_m=2))
def test_larger_family_gives_smaller_polytope(config):
    small = build_system(config, SubspaceFamily.from_subspaces([Subspace.zero(config.n)]))
    big = build_system(config, SubspaceFamily.coordinate(config.n))
    for q in enumerate_vertices(HPolytope.from_system(big)).vertices:
        assert small.violated(q) == []
