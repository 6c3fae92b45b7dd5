"""Box witnesses: parameterized product sets whose measure scalings force the
linear conditions on q.

A witness is a product of boxes in orthonormal frames adapted to a split of
the x-block (V, V^perp), the y-block (W, W^perp) and an interval in t. Each
half-width is param**e for an integer e, so predicted exponents are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .. import exactla as la
from ..conditions import ProjectionConfig
from ..exactla import Subspace

WITNESS_KINDS = ("A1", "A2", "B1", "B2", "C1", "C2")


def orthonormal_frame(v: Subspace) -> np.ndarray:
    """Columns form an orthonormal basis of v (shape n x dim v)."""
    basis = la.orthogonal_basis(v)
    if not basis:
        return np.zeros((v.ambient_dim, 0))
    cols = np.array([[float(c) for c in u] for u in basis]).T
    return cols / np.linalg.norm(cols, axis=0)


@dataclass(frozen=True)
class Parallelepiped:
    """{center + gens @ u : u in [-1,1]^k}; the columns of gens are the half-edges."""

    center: np.ndarray
    gens: np.ndarray
    empty: bool = False

    @property
    def volume(self) -> float:
        n, k = self.gens.shape
        if self.empty or k < n:
            return 0.0
        return float(abs(np.linalg.det(self.gens))) * 2.0**n

    @classmethod
    def box(cls, lower, upper) -> Parallelepiped:
        lo, hi = np.atleast_1d(np.asarray(lower, float)), np.atleast_1d(np.asarray(upper, float))
        if lo.shape != hi.shape:
            raise ValueError("box bounds differ in length")
        empty = bool((hi < lo).any())
        return cls((lo + hi) / 2, np.diag(np.abs(hi - lo) / 2), empty)

    @property
    def is_empty(self) -> bool:
        return self.empty


@dataclass(frozen=True)
class ProductSet:
    """Omega = X x Y x [t_lo, t_hi]."""

    x: Parallelepiped
    y: Parallelepiped
    t_lo: float
    t_hi: float

    @classmethod
    def box(cls, x_lo, x_hi, y_lo, y_hi, t_lo, t_hi) -> ProductSet:
        return cls(
            Parallelepiped.box(x_lo, x_hi), Parallelepiped.box(y_lo, y_hi), float(t_lo), float(t_hi)
        )

    @property
    def is_empty(self) -> bool:
        return self.t_hi < self.t_lo or self.x.is_empty or self.y.is_empty

    @property
    def volume(self) -> float:
        if self.is_empty:
            return 0.0
        return self.x.volume * self.y.volume * (self.t_hi - self.t_lo)


@dataclass(frozen=True)
class Block:
    name: str
    subspace: Subspace
    exponent: int

    @property
    def dim(self) -> int:
        return self.subspace.dim


@dataclass(frozen=True, eq=False)
class BoxWitness:
    """A witness family; ``instantiate(param)`` gives the set Omega.

    ``predicted`` holds the exponent of the parameter for |Omega| (key
    "omega") and for each |pi_j(Omega)| (keys 1..2m). For C1/C2 the image
    exponents are upper bounds (``one_sided``).
    """

    kind: str
    config: ProjectionConfig
    x_blocks: tuple[Block, ...]
    y_blocks: tuple[Block, ...]
    t_exponent: int
    parameter: str
    omega_exponent: int
    image_exponents: tuple[int, ...]
    v: Subspace | None = None
    w: Subspace | None = None

    @property
    def one_sided(self) -> bool:
        return self.kind in ("C1", "C2")

    @property
    def tag(self) -> str:
        if self.kind in ("A1", "A2"):
            return self.kind
        if self.kind in ("B1", "B2"):
            return f"{self.kind}({self.v.label()})"
        return f"{self.kind}({self.v.label()};{self.w.label()})"

    @property
    def predicted(self) -> dict:
        out = {"omega": self.omega_exponent}
        out.update({j: e for j, e in enumerate(self.image_exponents, 1)})
        return out

    def ratio_exponent(self, q) -> Fraction:
        """sum_j q_j e_j - e_Omega; the ratio |Omega| / prod |pi_j|^q_j scales like param**(-this)."""
        q = la.as_vector(q)
        if len(q) != len(self.image_exponents):
            raise la.DimensionError(f"q has length {len(q)}, expected {len(self.image_exponents)}")
        return sum((qj * e for qj, e in zip(q, self.image_exponents)), Fraction(0)) - self.omega_exponent

    @cached_property
    def _frames(self):
        return (
            [(orthonormal_frame(b.subspace), b.exponent) for b in self.x_blocks],
            [(orthonormal_frame(b.subspace), b.exponent) for b in self.y_blocks],
        )

    def instantiate(self, param: float) -> ProductSet:
        if not param > 0:
            raise ValueError(f"witness parameter must be positive, got {param}")
        n = self.config.n
        xs, ys = self._frames

        def build(frames):
            cols = [frame * float(param) ** e for frame, e in frames if frame.shape[1]]
            g = np.hstack(cols) if cols else np.zeros((n, 0))
            return Parallelepiped(np.zeros(n), g)

        half_t = float(param) ** self.t_exponent
        return ProductSet(build(xs), build(ys), -half_t, half_t)

    def describe(self, param: float) -> dict:
        """Half-widths per block at ``param``."""
        out = {b.name: float(param) ** b.exponent for b in self.x_blocks + self.y_blocks if b.dim}
        out["t"] = float(param) ** self.t_exponent
        return out


def _split(name: str, v: Subspace, e_in: int, e_out: int) -> tuple[Block, ...]:
    perp = la.orthogonal_complement(v)
    return (Block(f"{name}_V", v, e_in), Block(f"{name}_Vperp", perp, e_out))


def make_witness(
    config: ProjectionConfig,
    kind: str,
    v: Subspace | None = None,
    w: Subspace | None = None,
) -> BoxWitness:
    """Witness for condition ``kind`` (A1, A2, B1, B2, C1, C2).

    A1: |x| <= r, |y| <= 1, |t| <= r. A2 swaps the roles of x and y.
    B1(V): |x_V| <= R, |x_Vperp| <= 1, |y| <= 1, |t| <= R. B2 swaps x and y.
    C2(V,W): |x_V| <= R, |x_Vperp| <= 1, |y_W| <= 1, |y_Wperp| <= 1/R, |t| <= 1.
    C1(V,W) is the same family with R -> 0, written in rho = 1/R -> infinity.
    """
    if kind not in WITNESS_KINDS:
        raise ValueError(f"unknown witness kind {kind!r}; expected one of {WITNESS_KINDS}")
    n, m = config.n, config.m
    full = Subspace.full(n)
    dims = config.dims

    if kind in ("A1", "A2"):
        v = full
        kind_b = "B1" if kind == "A1" else "B2"
        base = make_witness(config, kind_b, full)
        return BoxWitness(kind, config, base.x_blocks, base.y_blocks, 1, "r",
                          base.omega_exponent, base.image_exponents)

    if v is None:
        raise ValueError(f"witness {kind} needs a subspace V")
    if v.ambient_dim != n:
        raise la.DimensionError(f"V lives in Q^{v.ambient_dim}, expected Q^{n}")
    img_v = [la.dim_image(p, v) for p in config.projections]

    if kind in ("B1", "B2"):
        split = _split("x" if kind == "B1" else "y", v, 1, 0)
        other = (Block("y" if kind == "B1" else "x", full, 0),)
        d = v.dim
        own = tuple(k + 1 for k in img_v)
        rest = (d + 1,) * m
        if kind == "B1":
            return BoxWitness(kind, config, split, other, 1, "R", d + 1, own + rest, v=v)
        return BoxWitness(kind, config, other, split, 1, "R", d + 1, rest + own, v=v)

    if w is None:
        raise ValueError(f"witness {kind} needs subspaces V and W")
    if w.ambient_dim != n:
        raise la.DimensionError(f"W lives in Q^{w.ambient_dim}, expected Q^{n}")
    v_perp = la.orthogonal_complement(v)
    if not w <= v_perp:
        raise ValueError(f"W={w.label()} is not contained in V^perp for V={v.label()}")
    w_perp = la.orthogonal_complement(w)
    dv, dwp = v.dim, w_perp.dim
    img_vp = [la.dim_image(p, v_perp) for p in config.projections]
    img_w = [la.dim_image(p, w) for p in config.projections]
    img_wp = [la.dim_image(p, w_perp) for p in config.projections]

    if kind == "C2":
        xb = (Block("x_V", v, 1), Block("x_Vperp", v_perp, 0))
        yb = (Block("y_W", w, 0), Block("y_Wperp", w_perp, -1))
        ex = tuple(img_v[j] - dwp for j in range(m))
        ey = tuple(dv - (dims[j] - img_w[j]) for j in range(m))
        return BoxWitness(kind, config, xb, yb, 0, "R", dv - dwp, ex + ey, v=v, w=w)

    # C1, in rho = 1/R
    xb = (Block("x_V", v, -1), Block("x_Vperp", v_perp, 0))
    yb = (Block("y_W", w, 0), Block("y_Wperp", w_perp, 1))
    ex = tuple(dwp - (dims[j] - img_vp[j]) for j in range(m))
    ey = tuple(img_wp[j] - dv for j in range(m))
    return BoxWitness(kind, config, xb, yb, 0, "rho", dwp - dv, ex + ey, v=v, w=w)
