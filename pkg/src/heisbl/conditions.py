"""Linear conditions on reciprocal exponents q = (1/p_1, ..., 1/p_2m).

A projection datum is a tuple of subspaces V_1..V_m of Q^n, used twice:
index j <= m acts on the x-block and index j + m on the y-block. Every
condition is linear in q with integer coefficients built from dimensions
of images and complements, so constraints are emitted exactly and tagged
with the subspace (or pair of subspaces) they came from.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Iterable, Sequence

from . import exactla as la
from .exactla import RationalMatrix, Subspace

RELATIONS = ("==", "<=", ">=")


@dataclass(frozen=True, eq=False)
class ProjectionConfig:
    """The data (n, V_1..V_m); V_{j+m} = V_j is implicit."""

    n: int
    subspaces: tuple[Subspace, ...]

    def __post_init__(self):
        object.__setattr__(self, "subspaces", tuple(self.subspaces))
        if self.n < 1:
            raise ValueError("ambient dimension must be at least 1")
        if not self.subspaces:
            raise ValueError("need at least one projection")
        for j, v in enumerate(self.subspaces, 1):
            if v.ambient_dim != self.n:
                raise la.DimensionError(
                    f"V_{j} lives in Q^{v.ambient_dim}, expected Q^{self.n}"
                )

    @classmethod
    def coordinate(cls, n: int, index_sets: Iterable[Iterable[int]]) -> ProjectionConfig:
        """Build from 1-based coordinate index sets, as written in configs."""
        subs = []
        for idx in index_sets:
            idx = list(idx)
            if len(set(idx)) != len(idx):
                raise ValueError(f"repeated coordinate index in {idx}")
            subs.append(la.CoordinateSubspace(n, tuple(i - 1 for i in idx)).subspace())
        return cls(n, tuple(subs))

    @property
    def m(self) -> int:
        return len(self.subspaces)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(v.dim for v in self.subspaces)

    @property
    def is_coordinate(self) -> bool:
        return all(v.is_coordinate for v in self.subspaces)

    @cached_property
    def projections(self) -> tuple[RationalMatrix, ...]:
        return tuple(la.orthogonal_projection(v) for v in self.subspaces)

    @cached_property
    def co_projections(self) -> tuple[RationalMatrix, ...]:
        eye = RationalMatrix.identity(self.n)
        return tuple(eye - p for p in self.projections)

    @cached_property
    def kernels(self) -> tuple[Subspace, ...]:
        return tuple(la.orthogonal_complement(v) for v in self.subspaces)

    def side(self, k: int) -> str:
        """'x' for indices 0..m-1, 'y' for m..2m-1 (0-based)."""
        return "x" if k < self.m else "y"

    def permuted(self, perm: Sequence[int]) -> ProjectionConfig:
        return ProjectionConfig(self.n, tuple(self.subspaces[p] for p in perm))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProjectionConfig):
            return NotImplemented
        return self.n == other.n and self.subspaces == other.subspaces

    def __hash__(self) -> int:
        return hash((self.n, self.subspaces))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "projections": [v.to_json() for v in self.subspaces],
        }


@dataclass(frozen=True)
class Tag:
    """Provenance of a constraint."""

    kind: str
    v: Subspace | None = None
    w: Subspace | None = None
    index: int | None = None
    bound: str | None = None

    def __str__(self) -> str:
        if self.kind == "box":
            return f"box(q{self.index + 1}{self.bound})"
        if self.v is None:
            return self.kind
        if self.w is None:
            return f"{self.kind}({self.v.label()})"
        return f"{self.kind}({self.v.label()};{self.w.label()})"


@dataclass(frozen=True)
class LinearConstraint:
    coeffs: tuple[Fraction, ...]
    rhs: Fraction
    relation: str
    tag: Tag

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        object.__setattr__(self, "rhs", Fraction(self.rhs))

    @property
    def is_trivial(self) -> bool:
        """All coefficients zero (then the constraint is a constant truth value)."""
        return not any(self.coeffs)

    def lhs(self, q: Sequence[Fraction]) -> Fraction:
        return la.dot(self.coeffs, q)

    def slack(self, q: Sequence[Fraction]) -> Fraction:
        """Signed slack; >= 0 iff satisfied for inequalities, == 0 for equalities."""
        v = self.lhs(q)
        if self.relation == ">=":
            return v - self.rhs
        return self.rhs - v

    def satisfied(self, q: Sequence[Fraction]) -> bool:
        s = self.slack(q)
        return s == 0 if self.relation == "==" else s >= 0

    def as_le(self) -> tuple[tuple[Fraction, ...], Fraction]:
        """(a, b) with the constraint reading a.q <= b (inequalities only)."""
        if self.relation == "<=":
            return self.coeffs, self.rhs
        if self.relation == ">=":
            return tuple(-c for c in self.coeffs), -self.rhs
        raise ValueError("equality has no single <= form")

    def normalized(self) -> tuple:
        """Canonical key: primitive integer row, '<=' or '==' relation."""
        if self.relation == "==":
            a, b, rel = self.coeffs, self.rhs, "=="
        else:
            (a, b), rel = self.as_le(), "<="
        vals = list(a) + [b]
        den = lcm(*(x.denominator for x in vals))
        ints = [int(x * den) for x in vals]
        g = 0
        for x in ints:
            g = gcd(g, x)
        g = g or 1
        ints = [x // g for x in ints]
        if rel == "==":
            lead = next((x for x in ints if x != 0), 0)
            if lead < 0:
                ints = [-x for x in ints]
        return rel, tuple(ints)

    def __str__(self) -> str:
        terms = [f"{c}*q{i + 1}" for i, c in enumerate(self.coeffs) if c != 0]
        lhs = " + ".join(terms) if terms else "0"
        return f"{lhs} {self.relation} {self.rhs}    [{self.tag}]"


@dataclass(frozen=True)
class SubspaceFamily:
    """Test subspaces V, and pairs (V, W) with W <= V^perp."""

    subspaces: tuple[Subspace, ...]
    pairs: tuple[tuple[Subspace, Subspace], ...]
    complete: bool = False

    @classmethod
    def coordinate(cls, n: int, pairs: str = "complementary") -> SubspaceFamily:
        """All 2^n coordinate subspaces, with coordinate pairs (V, W)."""
        subs = [
            Subspace.coordinate(n, idx)
            for k in range(n + 1)
            for idx in itertools.combinations(range(n), k)
        ]
        return cls(tuple(subs), _pairs(subs, pairs), complete=True)

    @classmethod
    def from_subspaces(cls, subspaces: Iterable[Subspace], pairs: str = "complementary") -> SubspaceFamily:
        """Family from explicit subspaces, closed under orthogonal complement."""
        subs = _dedupe(subspaces)
        if not subs:
            raise ValueError("subspace family is empty")
        n = subs[0].ambient_dim
        for v in subs:
            if v.ambient_dim != n:
                raise la.DimensionError("family members live in different dimensions")
        subs = _dedupe(subs + [la.orthogonal_complement(v) for v in subs] + [Subspace.zero(n)])
        return cls(tuple(subs), _pairs(subs, pairs))

    @classmethod
    def heuristic(
        cls,
        config: ProjectionConfig,
        depth: int = 2,
        extra: Iterable[Subspace] = (),
        pairs: str = "complementary",
    ) -> SubspaceFamily:
        """Images, kernels and their sums/intersections/complements, iterated."""
        n = config.n
        seed = [Subspace.zero(n), Subspace.full(n), *config.subspaces, *config.kernels, *extra]
        subs = _dedupe(seed)
        for _ in range(depth):
            new = list(subs)
            for v, w in itertools.combinations(subs, 2):
                new.append(la.sum_(v, w))
                new.append(la.intersect(v, w))
            new.extend(la.orthogonal_complement(v) for v in subs)
            subs = _dedupe(new)
        fam = cls.from_subspaces(subs, pairs)
        return cls(fam.subspaces, fam.pairs, complete=False)

    def with_subspaces(self, extra: Iterable[Subspace]) -> SubspaceFamily:
        fam = SubspaceFamily.from_subspaces(list(self.subspaces) + list(extra))
        return SubspaceFamily(fam.subspaces, _dedupe_pairs(list(self.pairs) + list(fam.pairs)))


PAIR_MODES = ("complementary", "all")


def _pairs(subs: Sequence[Subspace], mode: str) -> tuple[tuple[Subspace, Subspace], ...]:
    """Pairs (V, W) for the (C1)/(C2) conditions.

    ``complementary`` uses W = V^perp only. For W strictly inside V^perp the
    box family behind (C1) has its t-extent stretched by the twist term,
    so the resulting inequality is not implied by the inequality it is
    meant to test (it already fails at the Loomis-Whitney vertices).
    ``all`` keeps every W <= V^perp drawn from the family.
    """
    if mode == "complementary":
        return _dedupe_pairs((v, la.orthogonal_complement(v)) for v in subs)
    if mode == "all":
        return _dedupe_pairs(
            (v, w) for v in subs for w in subs if w <= la.orthogonal_complement(v)
        )
    raise ValueError(f"pair mode must be one of {PAIR_MODES}, got {mode!r}")


def _sort_key(v: Subspace):
    return (v.dim, tuple(tuple(-x for x in r) for r in v._rows))


def _dedupe(subs: Iterable[Subspace]) -> list[Subspace]:
    return sorted(set(subs), key=_sort_key)


def _dedupe_pairs(pairs):
    return tuple(sorted(set(pairs), key=lambda p: (_sort_key(p[0]), _sort_key(p[1]))))


def default_family(config: ProjectionConfig) -> SubspaceFamily:
    if config.is_coordinate:
        return SubspaceFamily.coordinate(config.n)
    return SubspaceFamily.heuristic(config)


# constraint generators ---------------------------------------------------

def constraint_A(config: ProjectionConfig) -> tuple[LinearConstraint, LinearConstraint]:
    n, dims = config.n, config.dims
    first = [Fraction(d + 1) for d in dims] + [Fraction(n + 1)] * config.m
    second = [Fraction(n + 1)] * config.m + [Fraction(d + 1) for d in dims]
    return (
        LinearConstraint(tuple(first), Fraction(n + 1), "==", Tag("A1")),
        LinearConstraint(tuple(second), Fraction(n + 1), "==", Tag("A2")),
    )


def _image_dims(config: ProjectionConfig, v: Subspace) -> list[int]:
    return [la.dim_image(p, v) for p in config.projections]


def constraint_B(config: ProjectionConfig, v: Subspace) -> tuple[LinearConstraint, LinearConstraint]:
    """(B1) and (B2) at ``v`` as '>=' constraints."""
    if v.ambient_dim != config.n:
        raise la.DimensionError(f"{v.label()} is not a subspace of Q^{config.n}")
    d = v.dim
    img = _image_dims(config, v)
    b1 = [Fraction(k + 1) for k in img] + [Fraction(d + 1)] * config.m
    b2 = [Fraction(d + 1)] * config.m + [Fraction(k + 1) for k in img]
    return (
        LinearConstraint(tuple(b1), Fraction(d + 1), ">=", Tag("B1", v)),
        LinearConstraint(tuple(b2), Fraction(d + 1), ">=", Tag("B2", v)),
    )


def constraint_C(config: ProjectionConfig, v: Subspace) -> LinearConstraint:
    if v.ambient_dim != config.n:
        raise la.DimensionError(f"{v.label()} is not a subspace of Q^{config.n}")
    defect = [Fraction(v.dim - k) for k in _image_dims(config, v)]
    return LinearConstraint(
        tuple(defect + [-c for c in defect]), Fraction(0), "==", Tag("C", v)
    )


def constraint_C1_C2(
    config: ProjectionConfig, v: Subspace, w: Subspace
) -> tuple[LinearConstraint, LinearConstraint]:
    """(C1) as '>=' and (C2) as '<='.

    Complements of images of L_j are taken inside V_j; complements of
    subspaces of Q^n inside Q^n.
    """
    v_perp = la.orthogonal_complement(v)
    if not w <= v_perp:
        raise ValueError(f"W={w.label()} is not contained in V^perp for V={v.label()}")
    w_perp = la.orthogonal_complement(w)
    dv, dwp = v.dim, w_perp.dim
    c1_x, c1_y, c2_x, c2_y = [], [], [], []
    for vj, p in zip(config.subspaces, config.projections):
        nj = vj.dim
        img_v_perp = la.dim_image(p, v_perp)
        img_v = la.dim_image(p, v)
        img_w_perp = la.dim_image(p, w_perp)
        img_w = la.dim_image(p, w)
        c1_x.append(Fraction(dwp - (nj - img_v_perp)))
        c1_y.append(Fraction(img_w_perp - dv))
        c2_x.append(Fraction(dwp - img_v))
        c2_y.append(Fraction((nj - img_w) - dv))
    rhs = Fraction(dwp - dv)
    return (
        LinearConstraint(tuple(c1_x + c1_y), rhs, ">=", Tag("C1", v, w)),
        LinearConstraint(tuple(c2_x + c2_y), rhs, "<=", Tag("C2", v, w)),
    )


def box_constraints(dim: int) -> list[LinearConstraint]:
    out = []
    for k in range(dim):
        e = tuple(Fraction(int(i == k)) for i in range(dim))
        out.append(LinearConstraint(e, Fraction(0), ">=", Tag("box", index=k, bound=">=0")))
        out.append(LinearConstraint(e, Fraction(1), "<=", Tag("box", index=k, bound="<=1")))
    return out


@dataclass(frozen=True)
class ConstraintSystem:
    config: ProjectionConfig
    constraints: tuple[LinearConstraint, ...]
    family: SubspaceFamily
    mode: str = "sufficient"

    @property
    def dim(self) -> int:
        return 2 * self.config.m

    @property
    def equalities(self) -> tuple[LinearConstraint, ...]:
        return tuple(c for c in self.constraints if c.relation == "==")

    @property
    def inequalities(self) -> tuple[LinearConstraint, ...]:
        return tuple(c for c in self.constraints if c.relation != "==")

    def violated(self, q: Sequence[Fraction]) -> list[LinearConstraint]:
        q = la.as_vector(q)
        if len(q) != self.dim:
            raise la.DimensionError(f"expected {self.dim} exponents, got {len(q)}")
        return [c for c in self.constraints if not c.satisfied(q)]

    def normalized(self) -> frozenset:
        return frozenset(c.normalized() for c in self.constraints)


def build_system(
    config: ProjectionConfig,
    family: SubspaceFamily | None = None,
    mode: str = "sufficient",
) -> ConstraintSystem:
    """Emit (A), (B1), (B2) plus (C) [sufficient] or (C1), (C2) [necessary]."""
    if mode not in ("necessary", "sufficient"):
        raise ValueError(f"mode must be 'necessary' or 'sufficient', got {mode!r}")
    if family is None:
        family = default_family(config)
    if not family.subspaces:
        raise ValueError("subspace family is empty")
    for v in family.subspaces:
        if v.ambient_dim != config.n:
            raise la.DimensionError(f"family member {v.label()} has wrong ambient dimension")

    raw: list[LinearConstraint] = list(constraint_A(config))
    for v in family.subspaces:
        raw.extend(constraint_B(config, v))
    if mode == "sufficient":
        raw.extend(constraint_C(config, v) for v in family.subspaces)
    else:
        for v, w in family.pairs:
            raw.extend(constraint_C1_C2(config, v, w))
    raw.extend(box_constraints(2 * config.m))

    zero = tuple(Fraction(0) for _ in range(2 * config.m))
    seen = set()
    kept = []
    for c in raw:
        if c.is_trivial and c.satisfied(zero):
            continue
        key = c.normalized()
        if key in seen:
            continue
        seen.add(key)
        kept.append(c)
    return ConstraintSystem(config, tuple(kept), family, mode)


def critical_subspaces(
    config: ProjectionConfig,
    q: Sequence,
    family: SubspaceFamily | None = None,
) -> list[Subspace]:
    """Members V of the family where (B) is an equality at ``q``."""
    q = la.as_vector(q)
    if len(q) != 2 * config.m:
        raise la.DimensionError(f"expected {2 * config.m} exponents, got {len(q)}")
    if not all(c.satisfied(q) for c in constraint_A(config)):
        raise ValueError("q does not satisfy (A)")
    if family is None:
        family = default_family(config)
    out = []
    for v in family.subspaces:
        b1, b2 = constraint_B(config, v)
        if b1.lhs(q) == b1.rhs and b2.lhs(q) == b2.rhs:
            out.append(v)
    return out
