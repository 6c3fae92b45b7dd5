from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

from heisbl.conditions import ProjectionConfig
from heisbl.exactla import Subspace

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def F(s):
    return Fraction(s)


def qv(*items):
    return tuple(Fraction(x) for x in items)


def lw_h2():
    return ProjectionConfig.coordinate(2, [[2], [1]])


def skewed_h2():
    return ProjectionConfig(2, (Subspace.span(2, [[0, 1]]), Subspace.span(2, [[1, 1]])))


def h1_zero():
    return ProjectionConfig(1, (Subspace.zero(1),))


def h1_identity():
    return ProjectionConfig(1, (Subspace.full(1),))


@pytest.fixture
def lw():
    return lw_h2()


@pytest.fixture
def skewed():
    return skewed_h2()


small_ints = st.integers(min_value=-4, max_value=4)
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@st.composite
def subspaces(draw, n=None, max_n=4):
    n = n if n is not None else draw(st.integers(1, max_n))
    k = draw(st.integers(0, n + 1))
    vecs = draw(st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=k, max_size=k))
    return Subspace.span(n, vecs)


@st.composite
def matrices(draw, rows=None, cols=None):
    r = rows if rows is not None else draw(st.integers(1, 4))
    c = cols if cols is not None else draw(st.integers(1, 4))
    return draw(st.lists(st.lists(rationals, min_size=c, max_size=c), min_size=r, max_size=r))


@st.composite
def coordinate_configs(draw, max_n=4, max_m=3):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    sets = [
        sorted(draw(st.sets(st.integers(1, n), max_size=n)))
        for _ in range(m)
    ]
    return ProjectionConfig.coordinate(n, sets)
