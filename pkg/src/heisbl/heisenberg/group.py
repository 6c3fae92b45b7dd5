"""Group law on H^n = R^n x R^n x R and the vertical projections.

Points may carry Fractions (exact path, used by the property tests) or
floats. Projections have a vectorized numpy form for sampling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import prod, sqrt
from typing import Sequence

import numpy as np

from .. import exactla as la
from ..exactla import RationalMatrix, Subspace


@dataclass(frozen=True)
class HeisenbergPoint:
    x: tuple
    y: tuple
    t: object

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))
        object.__setattr__(self, "y", tuple(self.y))
        if len(self.x) != len(self.y):
            raise la.DimensionError("x and y blocks differ in length")

    @property
    def n(self) -> int:
        return len(self.x)

    @classmethod
    def identity(cls, n: int) -> HeisenbergPoint:
        z = tuple(Fraction(0) for _ in range(n))
        return cls(z, z, Fraction(0))

    def inverse(self) -> HeisenbergPoint:
        return HeisenbergPoint(
            tuple(-a for a in self.x), tuple(-a for a in self.y), -self.t
        )

    def __matmul__(self, other: HeisenbergPoint) -> HeisenbergPoint:
        return group_op(self, other)


def _dot(u, v):
    return sum((a * b for a, b in zip(u, v)), 0 * (u[0] if u else 0))


def group_op(p: HeisenbergPoint, q: HeisenbergPoint) -> HeisenbergPoint:
    """(x,y,t)(x',y',t') = (x+x', y+y', t+t'+(x.y' - y.x')/2)."""
    if p.n != q.n:
        raise la.DimensionError(f"H^{p.n} point times H^{q.n} point")
    half = Fraction(1, 2) if isinstance(p.t, Fraction) and isinstance(q.t, Fraction) else 0.5
    twist = _dot(p.x, q.y) - _dot(p.y, q.x)
    return HeisenbergPoint(
        tuple(a + b for a, b in zip(p.x, q.x)),
        tuple(a + b for a, b in zip(p.y, q.y)),
        p.t + q.t + half * twist,
    )


@dataclass(frozen=True, eq=False)
class VerticalProjection:
    """pi_j^{a,b} for a subspace V of R^n, acting on the x- or y-block.

    x side: (L x, y, t + (L^x + a).(L^y + b)/2)
    y side: (x, L y, t - (L^x + a).(L^y + b)/2)

    The projected block is reported as coefficients in an orthogonal
    rational basis of V (primitive integer vectors), so ``coords`` are exact
    for rational input. ``jacobian`` converts Lebesgue measure in those
    coefficients to the intrinsic measure on V.
    """

    side: str
    subspace: Subspace
    offset_a: tuple[Fraction, ...] | None = None
    offset_b: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        if self.side not in ("x", "y"):
            raise ValueError(f"side must be 'x' or 'y', got {self.side!r}")
        n = self.subspace.ambient_dim
        for name in ("offset_a", "offset_b"):
            val = getattr(self, name)
            val = tuple(Fraction(0) for _ in range(n)) if val is None else la.as_vector(val)
            if len(val) != n:
                raise la.DimensionError(f"{name} has length {len(val)}, expected {n}")
            if any(self.projection @ val):
                raise ValueError(f"{name} must be orthogonal to {self.subspace.label()}")
            object.__setattr__(self, name, val)

    @property
    def n(self) -> int:
        return self.subspace.ambient_dim

    @cached_property
    def projection(self) -> RationalMatrix:
        return la.orthogonal_projection(self.subspace)

    @cached_property
    def co_projection(self) -> RationalMatrix:
        return RationalMatrix.identity(self.n) - self.projection

    @cached_property
    def codomain_basis(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(la.orthogonal_basis(self.subspace))

    @cached_property
    def jacobian(self) -> float:
        return sqrt(float(prod((la.dot(u, u) for u in self.codomain_basis), start=Fraction(1))))

    @property
    def codomain_dim(self) -> int:
        return self.subspace.dim + self.n + 1

    def coords(self, v: Sequence) -> tuple:
        """Coefficients of L v in ``codomain_basis``."""
        return tuple(_dot(u, v) / la.dot(u, u) for u in self.codomain_basis)

    def twist(self, x: Sequence, y: Sequence):
        lx = _matvec(self.co_projection, x)
        ly = _matvec(self.co_projection, y)
        return _dot(
            [a + b for a, b in zip(lx, self.offset_a)],
            [a + b for a, b in zip(ly, self.offset_b)],
        )

    def __call__(self, p: HeisenbergPoint) -> tuple:
        if p.n != self.n:
            raise la.DimensionError(f"projection on H^{self.n} applied to H^{p.n}")
        exact = isinstance(p.t, Fraction)
        half = Fraction(1, 2) if exact else 0.5
        s = self.twist(p.x, p.y)
        if self.side == "x":
            return (*self.coords(p.x), *p.y, p.t + half * s)
        return (*p.x, *self.coords(p.y), p.t - half * s)

    # numpy path -----------------------------------------------------------

    @cached_property
    def _float_mats(self):
        coords = np.array(
            [[float(c) / float(la.dot(u, u)) for c in u] for u in self.codomain_basis],
            dtype=float,
        ).reshape(len(self.codomain_basis), self.n)
        return (
            coords,
            self.co_projection.to_float(),
            np.array([float(v) for v in self.offset_a]),
            np.array([float(v) for v in self.offset_b]),
        )

    def apply_array(self, x: np.ndarray, y: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Vectorized projection of samples; x, y have shape (N, n), t (N,)."""
        coords, lhat, a, b = self._float_mats
        s = np.einsum("ij,ij->i", x @ lhat.T + a, y @ lhat.T + b)
        if self.side == "x":
            return np.column_stack([x @ coords.T, y, t + 0.5 * s])
        return np.column_stack([x, y @ coords.T, t - 0.5 * s])


def _matvec(m: RationalMatrix, v: Sequence):
    return [_dot(r, v) for r in m.rows]


def projections_for(config, offsets_a=None, offsets_b=None) -> list[VerticalProjection]:
    """The 2m projections of a config; offsets are lists of 2m vectors."""
    out = []
    for k in range(2 * config.m):
        v = config.subspaces[k % config.m]
        a = None if offsets_a is None else offsets_a[k]
        b = None if offsets_b is None else offsets_b[k]
        out.append(VerticalProjection(config.side(k), v, a, b))
    return out
