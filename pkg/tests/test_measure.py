from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from heisbl.conditions import SubspaceFamily
from heisbl.exactla import Subspace
from heisbl.heisenberg.group import VerticalProjection, projections_for
from heisbl.heisenberg.measure import (
    BudgetExceeded,
    GridSpec,
    UnsupportedGeometry,
    estimate_image_measure,
    fit_scaling_exponent,
    rwt_ratio_sweep,
    witness_table,
)
from heisbl.heisenberg.witness import Parallelepiped, ProductSet, make_witness

from conftest import h1_identity, h1_zero, lw_h2, qv, skewed_h2

UNIT = ProductSet.box([0], [1], [0], [1], 0, 1)


def test_fiber_integral_oracle():
    # image of [0,1]^3 under (y, t + xy/2): fiber length 1 + y/2, total 5/4
    b = estimate_image_measure(VerticalProjection("x", Subspace.zero(1)), UNIT)
    assert b.contains(1.25)
    assert b.width < 1e-2


def test_identity_projection_gives_volume():
    om = ProductSet.box([0, -1], [2, 1], [0, 0], [1, 3], -1, 1)
    b = estimate_image_measure(VerticalProjection("y", Subspace.full(2)), om)
    assert b.contains(om.volume)


def test_empty_set_has_zero_image():
    om = ProductSet.box([0], [1], [0], [1], 1, 0)
    b = estimate_image_measure(VerticalProjection("x", Subspace.zero(1)), om)
    assert (b.lower, b.upper) == (0.0, 0.0)


def test_y_side_mirror():
    # image of [0,1]^3 under (x, t - xy/2) has the same measure
    b = estimate_image_measure(VerticalProjection("y", Subspace.zero(1)), UNIT)
    assert b.contains(1.25)


def test_offset_shifts_fiber_width():
    # (y, t + x(y+1)/2) on [0,1]^3: fiber length 1 + (y+1)/2, total 7/4
    pi = VerticalProjection("x", Subspace.zero(1), offset_b=[1])
    assert estimate_image_measure(pi, UNIT).contains(1.75)


def _clipped_length(gens, center, point, direction):
    """Length of {point + s*direction} inside {center + gens u : |u|_inf <= 1}."""
    inv = np.linalg.inv(gens)
    a, b = inv @ (point - center), inv @ direction
    lo, hi = -np.inf, np.inf
    for ai, bi in zip(a, b):
        if abs(bi) < 1e-15:
            if abs(ai) > 1:
                return 0.0
            continue
        s1, s2 = sorted(((-1 - ai) / bi, (1 - ai) / bi))
        lo, hi = max(lo, s1), min(hi, s2)
    return max(hi - lo, 0.0) * np.linalg.norm(direction)


def test_segment_case_against_fiber_clipping():
    """Non-aligned x-box, V = <(1,1)>: compare with fiber lengths found by clipping lines."""
    pi = VerticalProjection("x", Subspace.span(2, [[1, 1]]))
    gens = np.array([[1.0, 0.3], [0.2, 0.7]])
    om = ProductSet(Parallelepiped(np.array([0.5, -0.2]), gens),
                    Parallelepiped.box([-1, 0], [2, 1]), -0.5, 0.5)
    b = estimate_image_measure(pi, om, GridSpec(Fraction(1, 256)))

    u, k = np.array([1.0, 1.0]) / np.sqrt(2), np.array([1.0, -1.0]) / np.sqrt(2)
    xis = np.linspace(-4, 4, 8001)
    lengths = np.array([_clipped_length(gens, om.x.center, xi * u, k) for xi in xis])
    area_x = lengths.sum() * (xis[1] - xis[0])
    ly = np.linspace(-1, 2, 601)[:, None]
    l2 = np.linspace(0, 1, 201)[None, :]
    mean_abs = np.abs((ly - l2) / np.sqrt(2)).mean()
    length_proj = (lengths > 0).sum() * (xis[1] - xis[0])
    expect = 1.0 * length_proj * 3.0 + 0.5 * area_x * mean_abs * 3.0
    assert abs(area_x - om.x.volume) < 1e-2
    assert b.lower - 2e-2 <= expect <= b.upper + 2e-2


def test_budget():
    with pytest.raises(BudgetExceeded):
        estimate_image_measure(
            VerticalProjection("x", Subspace.zero(2)),
            make_witness(lw_h2(), "A1").instantiate(2),
            GridSpec(Fraction(1, 128), budget=100),
        )


def test_unsupported_geometry():
    v = Subspace.span(3, [[1, 1, 1]])
    rot = np.linalg.qr(np.array([[1.0, 2, 0], [0, 1, 3], [1, 0, 1]]))[0]
    om = ProductSet(Parallelepiped(np.zeros(3), rot), Parallelepiped(np.zeros(3), np.eye(3)), -1, 1)
    with pytest.raises(UnsupportedGeometry):
        estimate_image_measure(VerticalProjection("x", v), om)


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        GridSpec(Fraction(3, 7))
    with pytest.raises(ValueError):
        GridSpec(Fraction(-1, 2))
    assert GridSpec(Fraction(1, 4)).refined().cells_per_axis == 16


WITNESSES = [
    (h1_zero(), "A1", None, None),
    (h1_identity(), "A2", None, None),
    (lw_h2(), "B1", Subspace.coordinate(2, [0]), None),
    (lw_h2(), "C2", Subspace.coordinate(2, [0]), Subspace.coordinate(2, [1])),
    (skewed_h2(), "B2", Subspace.span(2, [[1, -1]]), None),
    (skewed_h2(), "C1", Subspace.span(2, [[1, 1]]), Subspace.span(2, [[1, -1]])),
]


@pytest.mark.parametrize("config,kind,v,w", WITNESSES)
def test_bracket_refinement_is_monotone(config, kind, v, w):
    om = make_witness(config, kind, v, w).instantiate(4.0)
    grid = GridSpec(Fraction(1, 8))
    for pi in projections_for(config):
        coarse = estimate_image_measure(pi, om, grid)
        fine = estimate_image_measure(pi, om, grid.refined())
        assert coarse.lower <= coarse.upper
        assert fine.lower >= coarse.lower - 1e-9 * coarse.upper
        assert fine.upper <= coarse.upper + 1e-9 * coarse.upper
        assert fine.width <= coarse.width + 1e-9 * coarse.upper


@given(
    st.lists(st.floats(-2, 2), min_size=6, max_size=6),
    st.lists(st.floats(0.1, 2), min_size=3, max_size=3),
)
def test_bracket_soundness_against_sampling(center, half):
    """Random boxes in H^1: the bracket contains a fine Riemann sum of the fiber lengths."""
    om = ProductSet.box([center[0] - half[0]], [center[0] + half[0]],
                        [center[1] - half[1]], [center[1] + half[1]],
                        center[2] - half[2], center[2] + half[2])
    b = estimate_image_measure(VerticalProjection("x", Subspace.zero(1)), om, GridSpec(Fraction(1, 64)))
    ys = np.linspace(om.y.center[0] - half[1], om.y.center[0] + half[1], 20001)
    fiber = 2 * half[2] + 0.5 * (2 * half[0]) * np.abs(ys)
    riemann = np.trapezoid(fiber, ys) if hasattr(np, "trapezoid") else np.trapz(fiber, ys)
    assert b.lower - 1e-6 <= riemann <= b.upper + 1e-6


def test_fit_exact_power_law():
    rs = [2.0**k for k in range(1, 6)]
    assert fit_scaling_exponent(rs, [r**3 for r in rs]) == pytest.approx(3, abs=1e-12)
    assert fit_scaling_exponent(rs, [5.0] * 5) == pytest.approx(0, abs=1e-12)


def test_fit_errors():
    with pytest.raises(ValueError):
        fit_scaling_exponent([1, 2, 3], [1, 2, 3])
    with pytest.raises(ValueError):
        fit_scaling_exponent([1, 2, 3, 4], [1, 0, 3, 4])


def test_h1_identity_omega_slope():
    table = witness_table(make_witness(h1_identity(), "A1"))
    assert table.slopes["omega"] == pytest.approx(2, abs=0.15)
    assert table.passed


def test_non_complementary_c1_exceeds_printed_bound():
    """(V, W) = ({0}, {0}) for LW: the measured slope is above the one-sided bound."""
    z = Subspace.zero(2)
    table = witness_table(make_witness(lw_h2(), "C1", z, z))
    s, pred, ok = table.checks()[1]
    assert not ok and s > pred + 0.5


def test_ratio_sweep_at_lw_vertex_is_flat():
    q = qv("2/5", "1/5", "2/5", "1/5")
    sweep = rwt_ratio_sweep(lw_h2(), q, make_witness(lw_h2(), "B1", Subspace.coordinate(2, [0])))
    assert sweep.predicted_exponent == 0
    assert sweep.fitted_exponent == pytest.approx(0, abs=0.15)


def test_ratio_sweep_blows_up_off_b1():
    q = qv("3/5", "0", "0", "3/5")
    sweep = rwt_ratio_sweep(lw_h2(), q, make_witness(lw_h2(), "B1", Subspace.coordinate(2, [0])))
    assert sweep.predicted_exponent < 0
    # ratio grows like R^(1/5)
    assert sweep.fitted_exponent == pytest.approx(float(sweep.predicted_exponent), abs=0.15)
    assert all(a < b for a, b in zip(sweep.ratios, sweep.ratios[1:]))
