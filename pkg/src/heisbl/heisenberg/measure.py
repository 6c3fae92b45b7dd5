"""Lebesgue measure of pi(Omega) for product sets Omega = X x Y x T.

For a vertical projection the collapsed block (x for the x side, y for the
y side) is cut into fibers S(xi) = {z in Z : L z = xi}. Over a fixed
(xi, kept block value k) the image in the last coordinate is an interval of
length |T| + w/2, where w is the width of S(xi) along beta = L^k + offset.
Fubini then reduces |pi(Omega)| to

    |T| |L Z| |K| + integral over K of sum_i c_i |alpha_i . k + gamma_i| dk

in two geometries: every generator of Z lies in V or in V^perp (aligned),
or V^perp is a line (segment fibers). The remaining integral over the kept
block is bracketed on a uniform grid of its parameter cube using the exact
range of each affine function on each cell, so the bracket is sound and
shrinks monotonically when the cell size is halved.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

import numpy as np

from .. import exactla as la
from .group import VerticalProjection, projections_for
from .witness import BoxWitness, Parallelepiped, ProductSet, orthonormal_frame

DEFAULT_H = Fraction(1, 128)
DEFAULT_BUDGET = 10**8
DEFAULT_LADDER = tuple(2.0**k for k in range(3, 8))
_TOL = 1e-12
_PAD = 1e-12


class BudgetExceeded(RuntimeError):
    pass


class UnsupportedGeometry(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Cell size h relative to the parameter cube [-1,1]^n of the kept block.

    The grid covers that cube exactly, so it covers the image by
    construction. ``2/h`` must be an integer so that halving h nests cells.
    """

    h: Fraction = DEFAULT_H
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        h = la.as_fraction(self.h) if not isinstance(self.h, Fraction) else self.h
        if h <= 0:
            raise ValueError(f"cell size must be positive, got {h}")
        if (2 / h).denominator != 1:
            raise ValueError(f"2/h must be an integer, got h={h}")
        object.__setattr__(self, "h", h)
        if self.budget < 1:
            raise ValueError("budget must be positive")

    @property
    def cells_per_axis(self) -> int:
        return int(2 / self.h)

    def refined(self) -> GridSpec:
        return GridSpec(self.h / 2, self.budget)


@dataclass(frozen=True)
class MeasureBracket:
    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"bracket [{self.lower}, {self.upper}] is inverted")

    @property
    def mid(self) -> float:
        return (self.lower + self.upper) / 2

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def to_json(self) -> dict:
        return {"lower": self.lower, "upper": self.upper}


def _para_volume(gens: np.ndarray) -> float:
    """k-dimensional volume of {G u : u in [-1,1]^k} for independent columns."""
    k = gens.shape[1]
    if k == 0:
        return 1.0
    gram = gens.T @ gens
    return float(np.sqrt(max(np.linalg.det(gram), 0.0))) * 2.0**k


def _zonotope_volume(gens: np.ndarray) -> float:
    """Volume of the zonotope sum of segments [-g, g] in R^d, d = rows."""
    d, k = gens.shape
    if d == 0:
        return 1.0
    total = 0.0
    for cols in itertools.combinations(range(k), d):
        total += abs(np.linalg.det(gens[:, cols]))
    return total * 2.0**d


def _reduce(pi: VerticalProjection, omega: ProductSet):
    """Return (constant, terms, K) with |pi(Omega)| = constant + integral_K sum c|a.k + g|."""
    z, kept = (omega.x, omega.y) if pi.side == "x" else (omega.y, omega.x)
    beta_off = np.array([float(v) for v in (pi.offset_b if pi.side == "x" else pi.offset_a)])
    frame_v = orthonormal_frame(pi.subspace)
    frame_perp = orthonormal_frame(la.orthogonal_complement(pi.subspace))
    t_len = omega.t_hi - omega.t_lo
    vol_k = kept.volume
    gens = z.gens
    scale = max(np.abs(gens).max(initial=0.0), 1.0)
    in_v = np.linalg.norm(frame_perp.T @ gens, axis=0) <= _TOL * scale
    in_perp = np.linalg.norm(frame_v.T @ gens, axis=0) <= _TOL * scale
    lz = frame_v.T @ gens  # generators of L Z in V coordinates

    if bool((in_v | in_perp).all()):
        img = _para_volume(lz[:, in_v]) if in_v.sum() == pi.subspace.dim else 0.0
        terms = [(img, g, float(g @ beta_off)) for g in gens[:, in_perp & ~in_v].T]
        return t_len * img * vol_k, terms
    if frame_perp.shape[1] == 1:
        img = _zonotope_volume(lz)
        khat = frame_perp[:, 0]
        return t_len * img * vol_k, [(0.5 * z.volume, khat, float(khat @ beta_off))]
    raise UnsupportedGeometry(
        f"fibers of {pi.subspace.label()} through a non-aligned box have dimension "
        f"{frame_perp.shape[1]}; only aligned boxes or line kernels are supported"
    )


def _cube_integral(kept: Parallelepiped, terms, grid: GridSpec) -> tuple[float, float]:
    """Bracket integral over ``kept`` of sum c_i |a_i . k + g_i| dk."""
    if not terms:
        return 0.0, 0.0
    gens = kept.gens
    n = gens.shape[0]
    jac = abs(float(np.linalg.det(gens))) if gens.shape[1] == n else 0.0
    if jac == 0.0 or n == 0:
        return 0.0, 0.0
    # pull back to the parameter cube v in [-1,1]^n
    coef = np.array([c for c, _, _ in terms])
    alpha = np.array([gens.T @ a for _, a, _ in terms])  # (T, n)
    gamma = np.array([a @ kept.center + g for _, a, g in terms])

    big_n = grid.cells_per_axis
    if big_n**n > grid.budget:
        raise BudgetExceeded(f"{big_n}^{n} cells exceeds the cell budget {grid.budget}")
    delta = 1.0 / big_n
    centers = -1.0 + delta * (2 * np.arange(big_n) + 1)
    radius = delta * np.abs(alpha).sum(axis=1)  # (T,)
    cell_vol = (2.0 * delta) ** n
    lo = hi = 0.0
    # iterate over the first axis to bound memory
    rest = np.stack(np.meshgrid(*([centers] * (n - 1)), indexing="ij"), axis=-1).reshape(-1, n - 1) \
        if n > 1 else np.zeros((1, 0))
    partial = rest @ alpha[:, 1:].T + gamma  # (cells, T)
    for c0 in centers:
        mid = partial + c0 * alpha[:, 0]
        a = np.abs(mid)
        lo += float((np.maximum(a - radius, 0.0) @ coef).sum())
        hi += float(((a + radius) @ coef).sum())
    return lo * cell_vol * jac, hi * cell_vol * jac


def estimate_image_measure(
    pi: VerticalProjection, omega: ProductSet, grid: GridSpec | None = None
) -> MeasureBracket:
    """Sound bracket of the intrinsic Lebesgue measure of pi(Omega).

    The V-block of the codomain is measured in an orthonormal frame of V;
    divide by ``pi.jacobian`` for the measure in ``pi.coords`` coefficients.
    """
    grid = grid or GridSpec()
    if omega.is_empty:
        return MeasureBracket(0.0, 0.0)
    if pi.n != omega.x.gens.shape[0]:
        raise la.DimensionError(f"projection on H^{pi.n} applied to a set in H^{omega.x.gens.shape[0]}")
    const, terms = _reduce(pi, omega)
    kept = omega.y if pi.side == "x" else omega.x
    lo, hi = _cube_integral(kept, terms, grid)
    return MeasureBracket((const + lo) * (1 - _PAD), (const + hi) * (1 + _PAD))


def fit_scaling_exponent(params, values) -> float:
    """Least-squares slope of log(value) against log(param)."""
    params = np.asarray(params, dtype=float)
    values = np.asarray(values, dtype=float)
    if params.shape != values.shape:
        raise ValueError("params and values differ in length")
    if len(params) < 4:
        raise ValueError(f"need at least 4 samples, got {len(params)}")
    if (values <= 0).any() or (params <= 0).any():
        raise ValueError("all parameters and measure samples must be positive")
    slope, _ = np.polyfit(np.log(params), np.log(values), 1)
    return float(slope)


# witness tables ----------------------------------------------------------

@dataclass
class WitnessRow:
    param: float
    omega: float
    images: list[MeasureBracket]


@dataclass
class WitnessTable:
    witness: BoxWitness
    rows: list[WitnessRow]
    slopes: dict = field(default_factory=dict)

    def checks(self, tol: float = 0.15) -> dict:
        """Per key: (fitted slope, predicted exponent, passed)."""
        out = {}
        for key, pred in self.witness.predicted.items():
            s = self.slopes[key]
            if self.witness.one_sided and key != "omega":
                ok = s <= pred + tol
            else:
                ok = abs(s - pred) <= tol
            out[key] = (s, pred, ok)
        return out

    @property
    def passed(self) -> bool:
        return all(ok for _, _, ok in self.checks().values())


def witness_table(
    witness: BoxWitness,
    params=DEFAULT_LADDER,
    grid: GridSpec | None = None,
    projections: list[VerticalProjection] | None = None,
) -> WitnessTable:
    grid = grid or GridSpec()
    pis = projections or projections_for(witness.config)
    rows = []
    for r in params:
        omega = witness.instantiate(r)
        rows.append(WitnessRow(float(r), omega.volume, [estimate_image_measure(p, omega, grid) for p in pis]))
    params = [row.param for row in rows]
    slopes = {"omega": fit_scaling_exponent(params, [row.omega for row in rows])}
    for j in range(len(pis)):
        slopes[j + 1] = fit_scaling_exponent(params, [row.images[j].mid for row in rows])
    return WitnessTable(witness, rows, slopes)


@dataclass
class RatioSweep:
    q: tuple[Fraction, ...]
    params: list[float]
    ratios: list[float]
    predicted_exponent: Fraction

    @property
    def fitted_exponent(self) -> float:
        """Slope of log(1/ratio), comparable with ``predicted_exponent``."""
        return -fit_scaling_exponent(self.params, self.ratios)


def rwt_ratio_sweep(config, q, witness: BoxWitness, params=DEFAULT_LADDER,
                    grid: GridSpec | None = None) -> RatioSweep:
    """|Omega| / prod_j |pi_j(Omega)|^q_j along the ladder, from bracket midpoints."""
    q = la.as_vector(q)
    if len(q) != 2 * config.m:
        raise la.DimensionError(f"q has length {len(q)}, expected {2 * config.m}")
    table = witness_table(witness, params, grid)
    ratios = []
    for row in table.rows:
        denom = prod(b.mid ** float(qj) for b, qj in zip(row.images, q))
        ratios.append(row.omega / denom)
    return RatioSweep(q, [row.param for row in table.rows], ratios, witness.ratio_exponent(q))
