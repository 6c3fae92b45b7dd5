"""Exact rational linear algebra over :class:`fractions.Fraction`.

Everything here is exact. Matrices and subspaces are immutable; a
:class:`Subspace` is stored through the reduced row echelon form of its
basis vectors, so two subspaces compare equal exactly when they have the
same span.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Iterable, Sequence

Vector = tuple[Fraction, ...]


class DimensionError(ValueError):
    """Raised when operands live in different ambient dimensions."""


def as_fraction(value) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string exactly.

    Floats are refused: a float has already lost the exact value.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as an exact rational")


def as_vector(values: Iterable) -> Vector:
    return tuple(as_fraction(v) for v in values)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise DimensionError(f"length mismatch {len(u)} != {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def primitive(v: Sequence[Fraction]) -> Vector:
    """Scale ``v`` to a primitive integer vector with positive leading entry."""
    if not any(v):
        return tuple(Fraction(0) for _ in v)
    den = lcm(*(x.denominator for x in v))
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    lead = next(x for x in ints if x != 0)
    sign = 1 if lead > 0 else -1
    return tuple(Fraction(sign * x // g) for x in ints)


class RationalMatrix:
    """Immutable dense matrix of Fractions."""

    __slots__ = ("_rows", "_ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(as_vector(r) for r in rows)
        if data:
            widths = {len(r) for r in data}
            if len(widths) != 1:
                raise DimensionError("ragged rows")
            width = widths.pop()
            if ncols is not None and ncols != width:
                raise DimensionError(f"expected {ncols} columns, got {width}")
            ncols = width
        elif ncols is None:
            ncols = 0
        self._rows = data
        self._ncols = ncols

    @classmethod
    def identity(cls, n: int) -> RationalMatrix:
        return cls(
            [[Fraction(int(i == j)) for j in range(n)] for i in range(n)], ncols=n
        )

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> RationalMatrix:
        return cls([[Fraction(0)] * ncols for _ in range(nrows)], ncols=ncols)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int) -> RationalMatrix:
        cols = [as_vector(c) for c in columns]
        return cls(
            [[c[i] for c in cols] for i in range(nrows)], ncols=len(cols)
        )

    @property
    def rows(self) -> tuple[Vector, ...]:
        return self._rows

    @property
    def shape(self) -> tuple[int, int]:
        return len(self._rows), self._ncols

    @property
    def columns(self) -> tuple[Vector, ...]:
        return tuple(
            tuple(r[j] for r in self._rows) for j in range(self._ncols)
        )

    @property
    def T(self) -> RationalMatrix:
        return RationalMatrix(self.columns, ncols=len(self._rows))

    def __getitem__(self, idx: tuple[int, int]) -> Fraction:
        i, j = idx
        return self._rows[i][j]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.shape, self._rows))

    def __repr__(self) -> str:
        body = ", ".join(
            "[" + ", ".join(str(x) for x in r) + "]" for r in self._rows
        )
        return f"RationalMatrix([{body}])"

    def __add__(self, other: RationalMatrix) -> RationalMatrix:
        if self.shape != other.shape:
            raise DimensionError(f"{self.shape} + {other.shape}")
        return RationalMatrix(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)],
            ncols=self._ncols,
        )

    def __sub__(self, other: RationalMatrix) -> RationalMatrix:
        if self.shape != other.shape:
            raise DimensionError(f"{self.shape} - {other.shape}")
        return RationalMatrix(
            [[a - b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)],
            ncols=self._ncols,
        )

    def __matmul__(self, other):
        if isinstance(other, RationalMatrix):
            if self._ncols != other.shape[0]:
                raise DimensionError(f"{self.shape} @ {other.shape}")
            cols = other.columns
            return RationalMatrix(
                [[dot(r, c) for c in cols] for r in self._rows],
                ncols=other.shape[1],
            )
        vec = as_vector(other)
        if len(vec) != self._ncols:
            raise DimensionError(f"{self.shape} @ vector of length {len(vec)}")
        return tuple(dot(r, vec) for r in self._rows)

    def is_symmetric(self) -> bool:
        return self == self.T

    def to_float(self):
        import numpy as np

        return np.array([[float(x) for x in r] for r in self._rows], dtype=float).reshape(
            self.shape
        )


def rref(rows: Sequence[Sequence[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(a: RationalMatrix) -> int:
    """Exact rank by fraction-free (Bareiss) elimination."""
    nrows, ncols = a.shape
    if nrows == 0 or ncols == 0:
        return 0
    m = []
    for row in a.rows:
        den = lcm(*(x.denominator for x in row))
        m.append([int(x * den) for x in row])
    rk = 0
    prev = 1
    for c in range(ncols):
        piv = next((i for i in range(rk, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rk], m[piv] = m[piv], m[rk]
        p = m[rk][c]
        for i in range(rk + 1, nrows):
            f = m[i][c]
            m[i] = [(p * m[i][k] - f * m[rk][k]) // prev for k in range(ncols)]
        prev = p
        rk += 1
        if rk == nrows:
            break
    return rk


def kernel(a: RationalMatrix) -> list[Vector]:
    """Basis of the right null space, as primitive integer vectors."""
    _, ncols = a.shape
    red, pivots = rref(a.rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(primitive(v))
    return basis


def solve(a: RationalMatrix, b: Sequence) -> Vector | None:
    """One exact solution of ``a x = b`` (free variables set to 0), or None."""
    nrows, ncols = a.shape
    rhs = as_vector(b)
    if len(rhs) != nrows:
        raise DimensionError("right-hand side length mismatch")
    aug = [list(r) + [v] for r, v in zip(a.rows, rhs)]
    red, pivots = rref(aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(red, pivots):
        x[p] = row[ncols]
    return tuple(x)


def inverse(a: RationalMatrix) -> RationalMatrix:
    n, ncols = a.shape
    if n != ncols:
        raise DimensionError("inverse of a non-square matrix")
    eye = RationalMatrix.identity(n)
    aug = [list(r) + list(e) for r, e in zip(a.rows, eye.rows)]
    red, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ZeroDivisionError("matrix is singular")
    return RationalMatrix([row[n:] for row in red], ncols=n)


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace of Q^n, canonicalized by RREF of its basis."""

    ambient_dim: int
    _rows: tuple[Vector, ...]

    @classmethod
    def span(cls, ambient_dim: int, vectors: Iterable[Iterable]) -> Subspace:
        vecs = [as_vector(v) for v in vectors]
        for v in vecs:
            if len(v) != ambient_dim:
                raise DimensionError(
                    f"vector of length {len(v)} in ambient dimension {ambient_dim}"
                )
        red, _ = rref(vecs, ambient_dim)
        return cls(ambient_dim, tuple(tuple(r) for r in red))

    @classmethod
    def zero(cls, n: int) -> Subspace:
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> Subspace:
        return cls.span(n, RationalMatrix.identity(n).rows)

    @classmethod
    def coordinate(cls, n: int, indices: Iterable[int]) -> Subspace:
        """Span of ``e_i`` for the given 0-based indices."""
        idx = sorted(set(indices))
        if any(i < 0 or i >= n for i in idx):
            raise ValueError(f"coordinate index out of range for n={n}: {idx}")
        return cls.span(n, [[int(i == k) for k in range(n)] for i in idx])

    @property
    def dim(self) -> int:
        return len(self._rows)

    @cached_property
    def vectors(self) -> tuple[Vector, ...]:
        """Canonical basis as primitive integer vectors."""
        return tuple(primitive(r) for r in self._rows)

    @property
    def basis(self) -> RationalMatrix:
        """Basis vectors as the columns of an ``n x dim`` matrix."""
        return RationalMatrix.from_columns(self.vectors, self.ambient_dim)

    @cached_property
    def coordinate_indices(self) -> frozenset[int] | None:
        """0-based indices if this is a coordinate subspace, else None."""
        idx = []
        for r in self._rows:
            nz = [i for i, x in enumerate(r) if x != 0]
            if len(nz) != 1:
                return None
            idx.append(nz[0])
        return frozenset(idx)

    @property
    def is_coordinate(self) -> bool:
        return self.coordinate_indices is not None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self._rows))

    def __le__(self, other: Subspace) -> bool:
        _check_same(self, other)
        return sum_(self, other).dim == other.dim

    def __lt__(self, other: Subspace) -> bool:
        return self <= other and self.dim < other.dim

    def contains(self, v: Sequence) -> bool:
        return Subspace.span(self.ambient_dim, list(self._rows) + [as_vector(v)]).dim == self.dim

    def label(self) -> str:
        """Short human-readable name, e.g. ``<e1,e3>``, ``{0}``, ``R^2``."""
        n = self.ambient_dim
        if self.dim == 0:
            return "{0}"
        if self.dim == n:
            return f"R^{n}"
        idx = self.coordinate_indices
        if idx is not None:
            return "<" + ",".join(f"e{i + 1}" for i in sorted(idx)) + ">"
        vecs = ";".join(
            "(" + ",".join(str(x) for x in v) + ")" for v in self.vectors
        )
        return f"<{vecs}>"

    def __repr__(self) -> str:
        return f"Subspace({self.label()} in Q^{self.ambient_dim})"

    def to_json(self) -> dict:
        idx = self.coordinate_indices
        if idx is not None:
            return {"coords": [i + 1 for i in sorted(idx)]}
        return {"basis": [[str(x) for x in v] for v in self.vectors]}


@dataclass(frozen=True)
class CoordinateSubspace:
    """Coordinate subspace given by a set of 0-based indices."""

    ambient_dim: int
    indices: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.indices)) != len(self.indices):
            raise ValueError(f"repeated coordinate index in {self.indices}")
        if any(i < 0 or i >= self.ambient_dim for i in self.indices):
            raise ValueError(f"coordinate index out of range in {self.indices}")
        object.__setattr__(self, "indices", tuple(sorted(self.indices)))

    def subspace(self) -> Subspace:
        return Subspace.coordinate(self.ambient_dim, self.indices)


def _check_same(v: Subspace, w: Subspace) -> None:
    if v.ambient_dim != w.ambient_dim:
        raise DimensionError(
            f"ambient dimensions differ: {v.ambient_dim} vs {w.ambient_dim}"
        )


def orthogonal_complement(v: Subspace) -> Subspace:
    n = v.ambient_dim
    if v.dim == 0:
        return Subspace.full(n)
    return Subspace.span(n, kernel(RationalMatrix(v.vectors, ncols=n)))


def orthogonal_projection(v: Subspace) -> RationalMatrix:
    """P = B (B^T B)^{-1} B^T for a basis matrix B of ``v``."""
    n = v.ambient_dim
    if v.dim == 0:
        return RationalMatrix.zeros(n, n)
    b = v.basis
    return b @ inverse(b.T @ b) @ b.T


def image(lin: RationalMatrix, v: Subspace) -> Subspace:
    rows, cols = lin.shape
    if cols != v.ambient_dim:
        raise DimensionError(f"map with {cols} columns applied to Q^{v.ambient_dim}")
    return Subspace.span(rows, [lin @ b for b in v.vectors])


def dim_image(lin: RationalMatrix, v: Subspace) -> int:
    """dim L(V) = rank(L . basis(V))."""
    rows, cols = lin.shape
    if rows != cols or cols != v.ambient_dim:
        raise DimensionError(
            f"expected an {v.ambient_dim}x{v.ambient_dim} map, got {lin.shape}"
        )
    if v.dim == 0:
        return 0
    return rank(lin @ v.basis)


def sum_(v: Subspace, w: Subspace) -> Subspace:
    _check_same(v, w)
    return Subspace.span(v.ambient_dim, list(v._rows) + list(w._rows))


def intersect(v: Subspace, w: Subspace) -> Subspace:
    """V ∩ W from the kernel of [B_V | -B_W]."""
    _check_same(v, w)
    n = v.ambient_dim
    if v.dim == 0 or w.dim == 0:
        return Subspace.zero(n)
    bv, bw = v.vectors, w.vectors
    stacked = RationalMatrix.from_columns(
        list(bv) + [tuple(-x for x in u) for u in bw], n
    )
    out = []
    for coeffs in kernel(stacked):
        out.append(
            tuple(
                sum((c * b[i] for c, b in zip(coeffs[: len(bv)], bv)), Fraction(0))
                for i in range(n)
            )
        )
    return Subspace.span(n, out)


def complement_in(v: Subspace, ambient: Subspace) -> Subspace:
    """Orthogonal complement of ``v`` inside ``ambient``."""
    _check_same(v, ambient)
    if not v <= ambient:
        raise ValueError(f"{v.label()} is not contained in {ambient.label()}")
    return intersect(ambient, orthogonal_complement(v))


def orthogonal_basis(v: Subspace) -> list[Vector]:
    """Exact Gram-Schmidt without normalization; vectors made primitive."""
    out: list[Vector] = []
    for b in v.vectors:
        w = list(b)
        for u in out:
            c = dot(b, u) / dot(u, u)
            w = [a - c * x for a, x in zip(w, u)]
        out.append(primitive(w))
    return out
