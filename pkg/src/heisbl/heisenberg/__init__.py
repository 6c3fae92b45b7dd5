"""Heisenberg group geometry, box witnesses, measures and Monte Carlo."""

from .group import HeisenbergPoint, VerticalProjection, group_op, projections_for
from .measure import (
    BudgetExceeded,
    GridSpec,
    MeasureBracket,
    UnsupportedGeometry,
    estimate_image_measure,
    fit_scaling_exponent,
    rwt_ratio_sweep,
    witness_table,
)
from .witness import BoxWitness, ProductSet, make_witness

__all__ = [
    "BoxWitness",
    "BudgetExceeded",
    "GridSpec",
    "HeisenbergPoint",
    "MeasureBracket",
    "ProductSet",
    "UnsupportedGeometry",
    "VerticalProjection",
    "estimate_image_measure",
    "fit_scaling_exponent",
    "group_op",
    "make_witness",
    "projections_for",
    "rwt_ratio_sweep",
    "witness_table",
]
