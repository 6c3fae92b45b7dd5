"""Monte Carlo evaluation of the multilinear form

    M^{a,b}(f_1..f_2m) = integral over H^n of prod_j f_j(pi_j^{a,b}(x,y,t))

for box indicators f_j. Samples are drawn uniformly from a box containing
the support of the integrand. Chunks get seeds spawned from one root seed
and only integer hit counts are reduced, so the estimate does not depend on
the number of worker threads.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import prod, sqrt
from typing import Sequence

import numpy as np

from .. import exactla as la
from ..conditions import ProjectionConfig
from .group import VerticalProjection, projections_for

DEFAULT_CHUNK = 1 << 16


class UnboundedSupport(ValueError):
    pass


@dataclass(frozen=True)
class BoxIndicator:
    """Indicator of prod [lower_i, upper_i] in the codomain coordinates of pi_j.

    ``lower is None`` encodes the zero function.
    """

    lower: tuple[float, ...] | None
    upper: tuple[float, ...] | None

    @classmethod
    def zero(cls) -> BoxIndicator:
        return cls(None, None)

    @property
    def is_zero(self) -> bool:
        return self.lower is None or any(h < l for l, h in zip(self.lower, self.upper))

    def __post_init__(self):
        if (self.lower is None) != (self.upper is None):
            raise ValueError("give both lower and upper, or neither for the zero function")
        if self.lower is not None:
            lo = tuple(float(v) for v in self.lower)
            hi = tuple(float(v) for v in self.upper)
            if len(lo) != len(hi):
                raise ValueError("box bounds differ in length")
            if any(np.isnan(lo + hi)):
                raise ValueError("box bounds must not be NaN")
            object.__setattr__(self, "lower", lo)
            object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int | None:
        return None if self.lower is None else len(self.lower)

    def volume(self) -> float:
        if self.is_zero:
            return 0.0
        return prod(h - l for l, h in zip(self.lower, self.upper))

    def dilated(self, s: float) -> BoxIndicator:
        if self.lower is None:
            return self
        return BoxIndicator(tuple(s * v for v in self.lower), tuple(s * v for v in self.upper))

    def shifted(self, shift: Sequence[float]) -> BoxIndicator:
        if self.lower is None:
            return self
        return BoxIndicator(
            tuple(l + float(s) for l, s in zip(self.lower, shift)),
            tuple(h + float(s) for h, s in zip(self.upper, shift)),
        )

    def contains(self, pts: np.ndarray) -> np.ndarray:
        lo, hi = np.array(self.lower), np.array(self.upper)
        return ((pts >= lo) & (pts <= hi)).all(axis=1)


@dataclass(frozen=True)
class MCResult:
    estimate: float
    stderr: float
    samples: int
    hits: int
    volume: float
    box: tuple | None

    def to_json(self) -> dict:
        return {
            "estimate": self.estimate,
            "stderr": self.stderr,
            "samples": self.samples,
            "hits": self.hits,
            "sampling_volume": self.volume,
        }


def _check_functions(pis, functions):
    if len(functions) != len(pis):
        raise ValueError(f"expected {len(pis)} functions, got {len(functions)}")
    for j, (pi, f) in enumerate(zip(pis, functions), 1):
        if f.lower is not None and f.dim != pi.codomain_dim:
            raise la.DimensionError(f"f_{j} has {f.dim} coordinates, expected {pi.codomain_dim}")


def _affine_range(mat: np.ndarray, off: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    """Exact range of mat @ v + off over the box [lo, hi], componentwise."""
    c, r = (lo + hi) / 2, (hi - lo) / 2
    mid = mat @ c + off
    rad = np.abs(mat) @ r
    return mid - rad, mid + rad


def sampling_box(pis: list[VerticalProjection], functions: list[BoxIndicator]):
    """(x_lo, x_hi, y_lo, y_hi, t_lo, t_hi) containing the integrand support, or None if empty."""
    n = pis[0].n
    inf = np.full(n, np.inf)
    x_lo, x_hi, y_lo, y_hi = -inf, inf, -inf, inf
    for pi, f in zip(pis, functions):
        lo, hi = np.array(f.lower), np.array(f.upper)
        # the block that is passed through unchanged bounds that variable
        if pi.side == "x":
            y_lo, y_hi = np.maximum(y_lo, lo[-n - 1:-1]), np.minimum(y_hi, hi[-n - 1:-1])
        else:
            x_lo, x_hi = np.maximum(x_lo, lo[:n]), np.minimum(x_hi, hi[:n])
    if not (np.isfinite(x_lo).all() and np.isfinite(x_hi).all()
            and np.isfinite(y_lo).all() and np.isfinite(y_hi).all()):
        raise UnboundedSupport("the function supports do not bound the x and y blocks")
    if (x_hi < x_lo).any() or (y_hi < y_lo).any():
        return None
    t_lo, t_hi = -np.inf, np.inf
    for pi, f in zip(pis, functions):
        lhat = pi.co_projection.to_float()
        a = np.array([float(v) for v in pi.offset_a])
        b = np.array([float(v) for v in pi.offset_b])
        ax = np.abs(np.stack(_affine_range(lhat, a, x_lo, x_hi))).max(axis=0)
        by = np.abs(np.stack(_affine_range(lhat, b, y_lo, y_hi))).max(axis=0)
        spread = 0.5 * float(np.linalg.norm(ax) * np.linalg.norm(by))
        t_lo = max(t_lo, f.lower[-1] - spread)
        t_hi = min(t_hi, f.upper[-1] + spread)
    if not (np.isfinite(t_lo) and np.isfinite(t_hi)):
        raise UnboundedSupport("the function supports do not bound t")
    if t_hi < t_lo:
        return None
    return x_lo, x_hi, y_lo, y_hi, t_lo, t_hi


def _count_chunk(pis, functions, box, size, seed_seq) -> int:
    x_lo, x_hi, y_lo, y_hi, t_lo, t_hi = box
    rng = np.random.default_rng(seed_seq)
    n = len(x_lo)
    x = rng.uniform(x_lo, x_hi, size=(size, n))
    y = rng.uniform(y_lo, y_hi, size=(size, n))
    t = rng.uniform(t_lo, t_hi, size=size)
    keep = np.ones(size, dtype=bool)
    for pi, f in zip(pis, functions):
        keep &= f.contains(pi.apply_array(x, y, t))
    return int(keep.sum())


def evaluate_form(
    pis: list[VerticalProjection],
    functions: Sequence[BoxIndicator],
    samples: int = 10**6,
    seed: int = 0,
    workers: int = 1,
    chunk: int = DEFAULT_CHUNK,
) -> MCResult:
    functions = list(functions)
    _check_functions(pis, functions)
    if samples < 1:
        raise ValueError("sample budget must be positive")
    if any(f.is_zero for f in functions):
        return MCResult(0.0, 0.0, samples, 0, 0.0, None)
    box = sampling_box(pis, functions)
    if box is None:
        return MCResult(0.0, 0.0, samples, 0, 0.0, None)
    x_lo, x_hi, y_lo, y_hi, t_lo, t_hi = box
    volume = float(np.prod(x_hi - x_lo) * np.prod(y_hi - y_lo) * (t_hi - t_lo))

    sizes = [chunk] * (samples // chunk) + ([samples % chunk] if samples % chunk else [])
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(sizes, seeds))
    if workers <= 1:
        counts = [_count_chunk(pis, functions, box, s, q) for s, q in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            counts = list(ex.map(lambda job: _count_chunk(pis, functions, box, *job), jobs))
    hits = sum(counts)
    p = hits / samples
    return MCResult(volume * p, volume * sqrt(p * (1 - p) / samples), samples, hits, volume, box)


def monte_carlo_form(
    config: ProjectionConfig,
    functions: Sequence[BoxIndicator],
    offsets_a=None,
    offsets_b=None,
    samples: int = 10**6,
    seed: int = 0,
    workers: int = 1,
) -> MCResult:
    """Estimate M^{a,b}(f) with its standard error."""
    pis = projections_for(config, offsets_a, offsets_b)
    return evaluate_form(pis, functions, samples, seed, workers)


def _solve_offsets(config: ProjectionConfig, offsets) -> tuple[Fraction, ...]:
    """A vector v with L^_j v = offsets[j] for every j (indices mod m)."""
    rows, rhs = [], []
    for k, off in enumerate(offsets):
        lhat = config.co_projections[k % config.m]
        rows.extend(lhat.rows)
        rhs.extend(la.as_vector(off))
    sol = la.solve(la.RationalMatrix(rows, ncols=config.n), rhs)
    if sol is None:
        raise ValueError("offsets are not simultaneously realized by one translation")
    return sol


def translate_offsets(config: ProjectionConfig, functions, offsets_a, offsets_b) -> list[BoxIndicator]:
    """Functions g with M^{0,0}(g) = M^{a,b}(f), by translating x and y.

    Needs x0, y0 with L^_j x0 = a_j and L^_j y0 = b_j for all j.
    """
    x0 = _solve_offsets(config, offsets_a)
    y0 = _solve_offsets(config, offsets_b)
    out = []
    for pi, f in zip(projections_for(config), functions):
        if pi.side == "x":
            shift = [*pi.coords(x0), *y0, 0]
        else:
            shift = [*x0, *pi.coords(y0), 0]
        out.append(f.shifted([float(s) for s in shift]))
    return out


@dataclass
class FormSweep:
    q: tuple[Fraction, ...]
    dilations: list[float]
    results: list[MCResult]
    norms: list[float]

    @property
    def ratios(self) -> list[float]:
        return [r.estimate / nm if nm > 0 else 0.0 for r, nm in zip(self.results, self.norms)]


def form_ratio_sweep(
    config: ProjectionConfig,
    functions: Sequence[BoxIndicator],
    q,
    dilations: Sequence[float],
    samples: int = 10**5,
    seed: int = 0,
    workers: int = 1,
) -> FormSweep:
    """M(f^s) / prod_j ||f_j^s||_{1/q_j} for boxes dilated by s.

    Norms use the intrinsic measure on the codomain, so the coefficient
    box volume is multiplied by the projection's Jacobian.
    """
    q = la.as_vector(q)
    pis = projections_for(config)
    if len(q) != len(pis):
        raise la.DimensionError(f"q has length {len(q)}, expected {len(pis)}")
    results, norms = [], []
    for s in dilations:
        fs = [f.dilated(float(s)) for f in functions]
        results.append(evaluate_form(pis, fs, samples, seed, workers))
        norms.append(prod((f.volume() * pi.jacobian) ** float(qj) for f, pi, qj in zip(fs, pis, q)))
    return FormSweep(q, [float(s) for s in dilations], results, norms)
