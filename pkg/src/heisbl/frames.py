"""Vector fields tangent to the fibers of the vertical projections, their
brackets, and the frame test for codimension-one data.

Every field has a constant spatial part and an affine dt coefficient, so
brackets are constant multiples of dt and the frame test does not depend
on the base point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import exactla as la
from .conditions import ProjectionConfig
from .exactla import RationalMatrix

HALF = Fraction(1, 2)


class FrameError(ValueError):
    """The configuration is outside the codimension-one frame setting."""


@dataclass(frozen=True)
class TangentField:
    """spatial . d/d(x,y) + (t_linear . (x,y) + t_const) d/dt, for 1-based ``index``."""

    index: int
    spatial: tuple[Fraction, ...]
    t_linear: tuple[Fraction, ...]
    t_const: Fraction = Fraction(0)

    @property
    def n(self) -> int:
        return len(self.spatial) // 2

    def t_coeff(self, x: Sequence, y: Sequence) -> Fraction:
        return la.dot(self.t_linear, [*x, *y]) + self.t_const

    def at(self, x: Sequence, y: Sequence) -> tuple[Fraction, ...]:
        """The field as a vector in R^{2n+1} at (x, y, t)."""
        return (*self.spatial, self.t_coeff(x, y))

    def scaled(self, c) -> TangentField:
        c = la.as_fraction(c)
        return TangentField(
            self.index,
            tuple(c * v for v in self.spatial),
            tuple(c * v for v in self.t_linear),
            c * self.t_const,
        )

    def label(self) -> str:
        n = self.n
        names = [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(n)]
        parts = []
        for c, name in zip(self.spatial, names):
            if c:
                parts.append(f"{_coef(c)}d/d{name}")
        lin = " + ".join(f"{_coef(c)}{name}" for c, name in zip(self.t_linear, names) if c)
        if self.t_const:
            lin = f"{lin} + {self.t_const}" if lin else str(self.t_const)
        if lin:
            parts.append(f"({lin})d/dt")
        return " + ".join(parts).replace("+ -", "- ") or "0"


def _coef(c: Fraction) -> str:
    if c == 1:
        return ""
    if c == -1:
        return "-"
    return f"{c}*"


def tangent_fields(config: ProjectionConfig, offsets_a=None, offsets_b=None) -> list[TangentField]:
    """One field per kernel direction of each projection, in index order.

    Kernel directions are primitive integer vectors with positive leading
    entry. x side: v d/dx - (v.(L^y + b)/2) d/dt. y side: w d/dy + ((L^x + a).w/2) d/dt.
    """
    n, m = config.n, config.m
    zero = (Fraction(0),) * n
    fields = []
    for k in range(2 * m):
        j = k % m
        a = zero if offsets_a is None else la.as_vector(offsets_a[k])
        b = zero if offsets_b is None else la.as_vector(offsets_b[k])
        for v in _kernel_directions(config, j):
            if k < m:
                fields.append(TangentField(
                    k + 1, v + zero, zero + tuple(-HALF * c for c in v), -HALF * la.dot(v, b)
                ))
            else:
                fields.append(TangentField(
                    k + 1, zero + v, tuple(HALF * c for c in v) + zero, HALF * la.dot(a, v)
                ))
    return fields


def _kernel_directions(config: ProjectionConfig, j: int) -> list[tuple[Fraction, ...]]:
    out = []
    for v in la.orthogonal_basis(config.kernels[j]):
        v = la.primitive(v)
        lead = next(c for c in v if c)
        out.append(tuple(-c for c in v) if lead < 0 else tuple(v))
    return out


def lie_bracket(a: TangentField, b: TangentField) -> Fraction:
    """c with [a, b] = c d/dt."""
    if len(a.spatial) != len(b.spatial):
        raise la.DimensionError("fields live on different groups")
    return la.dot(a.spatial, b.t_linear) - la.dot(b.spatial, a.t_linear)


def check_codimension_one(config: ProjectionConfig) -> None:
    n, m = config.n, config.m
    for j, v in enumerate(config.subspaces, 1):
        if n - v.dim != 1:
            raise FrameError(f"V_{j}^perp has dimension {n - v.dim}; frame analysis needs 1")
        if v.dim == 0:
            raise FrameError(f"V_{j} = {{0}}: the projection forgets its whole block, refused")
    if 2 * m != 2 * n:
        raise FrameError(f"{2 * m} fields in R^{2 * n + 1}; frame analysis needs 2m = 2n")


def frame_pairs(config: ProjectionConfig) -> list[tuple[int, int]]:
    """Pairs (j, k), j < k, for which the fields and [X_j, X_k] span R^{2n+1}."""
    check_codimension_one(config)
    fields = tangent_fields(config)
    spatial = RationalMatrix([f.spatial for f in fields], ncols=2 * config.n)
    if la.rank(spatial) < 2 * config.n:
        return []
    return [
        (a.index, b.index)
        for a, b in itertools.combinations(fields, 2)
        if lie_bracket(a, b) != 0
    ]


def is_frame(fields: Sequence[TangentField], pair: tuple[TangentField, TangentField], x, y) -> bool:
    """Whether the fields at (x, y) plus [pair] span R^{2n+1}."""
    n = fields[0].n
    rows = [f.at(x, y) for f in fields]
    rows.append((Fraction(0),) * (2 * n) + (lie_bracket(*pair),))
    return la.rank(RationalMatrix(rows, ncols=2 * n + 1)) == 2 * n + 1


def frame_extreme_points(config: ProjectionConfig) -> list[tuple[Fraction, ...]]:
    """q_i = (1 + [i in {j,k}]) / (2n+1) for each frame pair {j,k}."""
    n, size = config.n, 2 * config.m
    out = []
    for j, k in frame_pairs(config):
        out.append(tuple(Fraction(1 + (i in (j, k)), 2 * n + 1) for i in range(1, size + 1)))
    return sorted(set(out))


@dataclass(frozen=True)
class FrameReport:
    fields: tuple[TangentField, ...]
    brackets: dict
    pairs: tuple[tuple[int, int], ...]
    extreme_points: tuple[tuple[Fraction, ...], ...]
    conjectural: bool

    def to_json(self) -> dict:
        return {
            "fields": [
                {"index": f.index, "field": f.label(), "spatial": [str(c) for c in f.spatial]}
                for f in self.fields
            ],
            "brackets": [
                {"pair": list(p), "value": str(c)} for p, c in sorted(self.brackets.items())
            ],
            "frame_pairs": [list(p) for p in self.pairs],
            "extreme_points": [[str(c) for c in q] for q in self.extreme_points],
            "conjectural": self.conjectural,
        }


def analyze(config: ProjectionConfig) -> FrameReport:
    """Fields, all pairwise brackets, frame pairs and the extreme-point readout.

    The readout is marked conjectural outside n = 2.
    """
    pairs = frame_pairs(config)
    fields = tangent_fields(config)
    brackets = {(a.index, b.index): lie_bracket(a, b) for a, b in itertools.combinations(fields, 2)}
    return FrameReport(
        tuple(fields), brackets, tuple(pairs), tuple(frame_extreme_points(config)), config.n != 2
    )
