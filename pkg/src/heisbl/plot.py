"""Two-coordinate slices of exponent polytopes as SVG and CSV.

A slice (i, j) keeps q_i and q_j. It is valid when the projection onto those
coordinates is injective on the affine hull of the vertices, i.e. the
remaining coordinates are fixed by the polytope's equalities. Then the
projected vertices are exactly the vertices of the slice polygon.
"""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from typing import Sequence

from . import exactla as la

Point2 = tuple[Fraction, Fraction]


class SliceError(ValueError):
    pass


def slice_is_valid(vertices: Sequence[Sequence[Fraction]], i: int, j: int) -> bool:
    if len(vertices) <= 1:
        return True
    base = vertices[0]
    diffs = [[a - b for a, b in zip(v, base)] for v in vertices[1:]]
    full = la.rank(la.RationalMatrix(diffs, ncols=len(base)))
    proj = la.rank(la.RationalMatrix([[d[i], d[j]] for d in diffs], ncols=2))
    return full == proj


def default_slice(vertex_sets: Sequence[Sequence[Sequence[Fraction]]], dim: int) -> tuple[int, int]:
    for i in range(dim):
        for j in range(i + 1, dim):
            if all(slice_is_valid(vs, i, j) for vs in vertex_sets):
                return i, j
    raise SliceError("no coordinate pair gives a faithful 2-D slice")


def hull_2d(points: Sequence[Point2]) -> list[Point2]:
    """Convex hull in counterclockwise order, exact (monotone chain)."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


STYLES = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def render_svg(layers: Sequence[tuple[str, list[Point2]]], axes: tuple[str, str], size: int = 420) -> str:
    """Each layer is (label, polygon); an empty polygon draws an 'infeasible' note."""
    pad = 50
    span = size - 2 * pad

    def sx(v):
        return pad + float(v) * span

    def sy(v):
        return size - pad - float(v) * span

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}" font-family="sans-serif" font-size="11">',
        f'<rect x="{pad}" y="{pad}" width="{span}" height="{span}" fill="none" stroke="#999"/>',
        f'<text x="{size / 2}" y="{size - 12}" text-anchor="middle">{axes[0]}</text>',
        f'<text x="14" y="{size / 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {size / 2})">{axes[1]}</text>',
        f'<text x="{pad}" y="{size - pad + 14}" text-anchor="middle">0</text>',
        f'<text x="{pad + span}" y="{size - pad + 14}" text-anchor="middle">1</text>',
        f'<text x="{pad - 8}" y="{pad + 4}" text-anchor="end">1</text>',
    ]
    for k, (label, poly) in enumerate(layers):
        color = STYLES[k % len(STYLES)]
        ly = pad - 30 + 12 * k
        if not poly:
            out.append(f'<text x="{pad}" y="{ly}" fill="{color}">{label}: infeasible</text>')
            continue
        out.append(f'<text x="{pad}" y="{ly}" fill="{color}">{label}</text>')
        coords = " ".join(f"{sx(p[0]):.3f},{sy(p[1]):.3f}" for p in poly)
        if len(poly) == 2:
            out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
        elif len(poly) > 2:
            out.append(
                f'<polygon points="{coords}" fill="{color}" fill-opacity="0.15" '
                f'stroke="{color}" stroke-width="2"/>'
            )
        for p in poly:
            out.append(f'<circle cx="{sx(p[0]):.3f}" cy="{sy(p[1]):.3f}" r="3" fill="{color}"/>')
            out.append(
                f'<text x="{sx(p[0]) + 5:.3f}" y="{sy(p[1]) - 5:.3f}" fill="{color}">'
                f"({p[0]}, {p[1]})</text>"
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def slice_layers(named_vertices: Sequence[tuple[str, list]], i: int, j: int):
    layers = []
    for label, verts in named_vertices:
        if not slice_is_valid(verts, i, j):
            raise SliceError(
                f"{label}: the (q{i + 1}, q{j + 1}) slice is not 2-D after eliminating equalities"
            )
        layers.append((label, hull_2d([(v[i], v[j]) for v in verts])))
    return layers


def slice_csv(named_vertices: Sequence[tuple[str, list]], i: int, j: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["layer", "vertex", f"q{i + 1}", f"q{j + 1}", "q"])
    for label, verts in named_vertices:
        for k, v in enumerate(verts):
            w.writerow([label, k, str(v[i]), str(v[j]), " ".join(str(c) for c in v)])
    return buf.getvalue()
