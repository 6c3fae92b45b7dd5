"""Exact vertex enumeration and membership for bounded rational polytopes.

The polytopes here live in [0,1]^d and are usually lower dimensional
(equalities from the scaling and balance conditions). ``enumerate_vertices``
eliminates the equalities by an exact affine parameterization and runs the
double description method on the homogenized cone, in integer arithmetic.
``brute_force_vertices`` is an independent check that solves every square
active subsystem.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd, lcm
from typing import Iterable, Sequence

import numpy as np

from . import exactla as la
from .conditions import ConstraintSystem, LinearConstraint, box_constraints

Point = tuple[Fraction, ...]


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class HPolytope:
    dim: int
    equalities: tuple[LinearConstraint, ...]
    inequalities: tuple[LinearConstraint, ...]

    @classmethod
    def from_constraints(cls, dim: int, constraints: Iterable[LinearConstraint]) -> HPolytope:
        """Collect constraints; box bounds 0 <= q_j <= 1 are always added."""
        eqs, ineqs, seen = [], [], set()
        for c in list(constraints) + box_constraints(dim):
            if len(c.coeffs) != dim:
                raise la.DimensionError(f"constraint of length {len(c.coeffs)} in dimension {dim}")
            key = c.normalized()
            if key in seen:
                continue
            seen.add(key)
            (eqs if c.relation == "==" else ineqs).append(c)
        return cls(dim, tuple(eqs), tuple(ineqs))

    @classmethod
    def from_system(cls, system: ConstraintSystem) -> HPolytope:
        return cls.from_constraints(system.dim, system.constraints)

    @property
    def constraints(self) -> tuple[LinearConstraint, ...]:
        return self.equalities + self.inequalities


@dataclass(frozen=True)
class VPolytope:
    vertices: tuple[Point, ...]

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def as_set(self) -> frozenset[Point]:
        return frozenset(self.vertices)


@dataclass(frozen=True)
class Membership:
    inside: bool
    violated: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.inside


def contains(h: HPolytope, q: Sequence) -> Membership:
    q = la.as_vector(q)
    if len(q) != h.dim:
        raise la.DimensionError(f"point of length {len(q)} in dimension {h.dim}")
    bad = tuple(str(c.tag) for c in h.constraints if not c.satisfied(q))
    return Membership(not bad, bad)


# double description ------------------------------------------------------

def _int_row(values: Sequence[Fraction]) -> tuple[int, ...]:
    den = lcm(*(v.denominator for v in values)) if values else 1
    ints = [int(v * den) for v in values]
    g = 0
    for x in ints:
        g = gcd(g, x)
    g = g or 1
    return tuple(x // g for x in ints)


def _reduce(vec: list[int]) -> tuple[int, ...]:
    g = 0
    for x in vec:
        g = gcd(g, x)
    g = g or 1
    return tuple(x // g for x in vec)


def _idot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def _affine_parameterization(h: HPolytope):
    """q = q0 + N z over the solution set of the equalities, or None if empty."""
    if h.equalities:
        a = la.RationalMatrix([c.coeffs for c in h.equalities], ncols=h.dim)
        q0 = la.solve(a, [c.rhs for c in h.equalities])
        if q0 is None:
            return None
        null = la.kernel(a)
    else:
        q0 = tuple(Fraction(0) for _ in range(h.dim))
        null = [tuple(Fraction(int(i == k)) for i in range(h.dim)) for k in range(h.dim)]
    return q0, null


def _initial_basis(rows: list[tuple[int, ...]], d: int) -> list[int] | None:
    chosen: list[int] = []
    for i, r in enumerate(rows):
        trial = [rows[k] for k in chosen] + [r]
        if la.rank(la.RationalMatrix(trial, ncols=d)) == len(trial):
            chosen.append(i)
            if len(chosen) == d:
                return chosen
    return None


def _cone_extreme_rays(rows: list[tuple[int, ...]], d: int) -> list[tuple[int, ...]]:
    """Extreme rays of the pointed cone {x : r.x <= 0 for r in rows}."""
    basis = _initial_basis(rows, d)
    if basis is None:
        raise ValueError("cone is not pointed; polytope is unbounded")
    inv = la.inverse(la.RationalMatrix([rows[i] for i in basis], ncols=d))
    rays: list[tuple[int, ...]] = []
    zeros: list[int] = []
    full = 0
    for i in basis:
        full |= 1 << i
    for k, i in enumerate(basis):
        col = [-inv[r, k] for r in range(d)]
        rays.append(_int_row(col))
        zeros.append(full & ~(1 << i))

    remaining = [i for i in range(len(rows)) if i not in basis]
    while remaining:
        # cheapest cut first: fewest new pairs to combine
        best, best_cost, best_vals = None, None, None
        for i in remaining:
            vals = [_idot(rows[i], r) for r in rays]
            npos = sum(1 for v in vals if v > 0)
            nneg = sum(1 for v in vals if v < 0)
            cost = npos * nneg if npos else -1
            if best_cost is None or cost < best_cost:
                best, best_cost, best_vals = i, cost, vals
                if cost < 0:
                    break
        remaining.remove(best)
        bit = 1 << best
        vals = best_vals
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        new_rays, new_zeros = [], []
        for k, v in enumerate(vals):
            if v < 0:
                new_rays.append(rays[k])
                new_zeros.append(zeros[k])
            elif v == 0:
                new_rays.append(rays[k])
                new_zeros.append(zeros[k] | bit)
        for p in pos:
            for q in neg:
                common = zeros[p] & zeros[q]
                if bin(common).count("1") < d - 2:
                    continue
                if any(
                    (zeros[r] & common) == common
                    for r in range(len(rays))
                    if r != p and r != q
                ):
                    continue
                sp, sn = vals[p], vals[q]
                ray = _reduce([sp * a - sn * b for a, b in zip(rays[q], rays[p])])
                new_rays.append(ray)
                new_zeros.append(common | bit)
        rays, zeros = new_rays, new_zeros
        if not rays:
            break
    return rays


def enumerate_vertices(h: HPolytope) -> VPolytope:
    """All vertices of ``h``, exactly, by double description."""
    param = _affine_parameterization(h)
    if param is None:
        return VPolytope(())
    q0, null = param
    k = len(null)
    if k == 0:
        ok = all(c.satisfied(q0) for c in h.inequalities)
        return VPolytope((q0,) if ok else ())

    rows: list[tuple[int, ...]] = [tuple([-1] + [0] * k)]
    for c in h.inequalities:
        a, b = c.as_le()
        az = [la.dot(a, col) for col in null]
        slack = b - la.dot(a, q0)
        if not any(az):
            if slack < 0:
                return VPolytope(())
            continue
        rows.append(_int_row([-slack] + az))
    rows = list(dict.fromkeys(rows))

    verts = set()
    for ray in _cone_extreme_rays(rows, k + 1):
        z0 = ray[0]
        if z0 <= 0:
            continue
        z = [Fraction(x, z0) for x in ray[1:]]
        verts.add(tuple(q0[i] + sum((zj * col[i] for zj, col in zip(z, null)), Fraction(0))
                        for i in range(h.dim)))
    return VPolytope(tuple(sorted(verts)))


# independent oracle ------------------------------------------------------

def brute_force_vertices(h: HPolytope, max_dim: int = 8, max_constraints: int = 40) -> VPolytope:
    """Solve every square active subsystem; keep feasible unique solutions.

    Candidates are screened in floating point (rows scaled to integers so a
    nonzero determinant has magnitude >= 1) and then re-solved and checked
    exactly.
    """
    if h.dim > max_dim or len(h.constraints) > max_constraints:
        raise InstanceTooLarge(
            f"brute force limited to dim <= {max_dim} and <= {max_constraints} constraints"
        )
    d = h.dim
    if h.equalities:
        red, _ = la.rref([list(c.coeffs) + [c.rhs] for c in h.equalities], d + 1)
        if any(not any(r[:d]) and r[d] != 0 for r in red):
            return VPolytope(())
        eq_rows = [_int_row(r) for r in red if any(r[:d])]
    else:
        eq_rows = []
    ineq_rows = [_int_row(list(a) + [b]) for a, b in (c.as_le() for c in h.inequalities)]
    need = d - len(eq_rows)
    if need < 0 or need > len(ineq_rows):
        return VPolytope(())
    if need == 0:
        x = la.solve(la.RationalMatrix([r[:d] for r in eq_rows], ncols=d), [r[d] for r in eq_rows])
        ok = x is not None and all(c.satisfied(x) for c in h.constraints)
        return VPolytope((x,) if ok else ())

    E = np.array(eq_rows, dtype=float).reshape(len(eq_rows), d + 1)
    I = np.array(ineq_rows, dtype=float).reshape(len(ineq_rows), d + 1)
    candidates = set()
    subsets = itertools.combinations(range(len(ineq_rows)), need)
    chunk = 50_000
    total = comb(len(ineq_rows), need)
    for start in range(0, max(total, 1), chunk):
        idx = np.array(list(itertools.islice(subsets, chunk)), dtype=int).reshape(-1, need)
        if idx.shape[0] == 0:
            break
        rows = np.concatenate(
            [np.broadcast_to(E, (idx.shape[0],) + E.shape), I[idx]], axis=1
        )
        mats, rhs = rows[:, :, :d], rows[:, :, d]
        det = np.linalg.det(mats)
        ok = np.abs(det) > 0.5
        if not ok.any():
            continue
        sol = np.linalg.solve(mats[ok], rhs[ok][..., None])[..., 0]
        viol = I[:, :d] @ sol.T - I[:, d][:, None]
        feas = (viol <= 1e-7).all(axis=0)
        for s in idx[ok][feas]:
            candidates.add(tuple(int(i) for i in s))

    verts = set()
    for s in candidates:
        a = la.RationalMatrix([r[:d] for r in eq_rows] + [ineq_rows[i][:d] for i in s], ncols=d)
        b = [r[d] for r in eq_rows] + [ineq_rows[i][d] for i in s]
        x = la.solve(a, b)
        if x is None:
            continue
        if all(c.satisfied(x) for c in h.constraints):
            verts.add(x)
    return VPolytope(tuple(sorted(verts)))


def affine_dimension(h: HPolytope) -> int:
    """Dimension of the feasible set; -1 when it is empty."""
    verts = enumerate_vertices(h).vertices
    if not verts:
        return -1
    base = verts[0]
    diffs = [tuple(a - b for a, b in zip(v, base)) for v in verts[1:]]
    if not diffs:
        return 0
    return la.rank(la.RationalMatrix(diffs, ncols=h.dim))
