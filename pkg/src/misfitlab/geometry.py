"""Exact geometric predicates for lattice coordinates.

Two-dimensional lattice points are represented as pairs (a, b) of
Fractions standing for the cartesian point (a, b*sqrt(3)).  Every atom of
the hexagonal lattices built here has this form, and it is closed under
differences, so orientation and in-circle determinants reduce to signs of
rational determinants (a single common factor sqrt(3) drops out).

Three-dimensional FCC coordinates are plain rational triples.
"""

from __future__ import annotations

import math
from fractions import Fraction

SQRT3 = math.sqrt(3.0)

Pt2 = tuple[Fraction, Fraction]
Pt3 = tuple[Fraction, Fraction, Fraction]


def to_xy(p: Pt2) -> tuple[float, float]:
    """Cartesian float coordinates of a (a, b*sqrt(3)) lattice point."""
    return float(p[0]), float(p[1]) * SQRT3


def sub2(p: Pt2, q: Pt2) -> Pt2:
    return (p[0] - q[0], p[1] - q[1])


def norm2_sq(p: Pt2) -> Fraction:
    """Exact squared euclidean norm: a^2 + 3 b^2."""
    return p[0] * p[0] + 3 * p[1] * p[1]


def orient2(a: Pt2, b: Pt2, c: Pt2) -> int:
    """Sign of the (a,b,c) triangle orientation; +1 for counterclockwise."""
    ux, uy = b[0] - a[0], b[1] - a[1]
    vx, vy = c[0] - a[0], c[1] - a[1]
    d = ux * vy - uy * vx
    return (d > 0) - (d < 0)


def incircle2(a: Pt2, b: Pt2, c: Pt2, p: Pt2) -> int:
    """+1 if p lies strictly inside the circumcircle of (a,b,c), 0 if on it.

    The result is independent of the orientation of (a,b,c); degenerate
    (collinear) triangles are rejected.
    """
    s = orient2(a, b, c)
    if s == 0:
        raise ValueError("incircle2 called with collinear points")
    rows = []
    for z in (a, b, c):
        dx, dy = z[0] - p[0], z[1] - p[1]
        rows.append((dx, dy, dx * dx + 3 * dy * dy))
    (a1, a2, a3), (b1, b2, b3), (c1, c2, c3) = rows
    det = (
        a1 * (b2 * c3 - b3 * c2)
        - a2 * (b1 * c3 - b3 * c1)
        + a3 * (b1 * c2 - b2 * c1)
    )
    det *= s
    return (det > 0) - (det < 0)


def circumcircle_contains_float(ax, ay, bx, by, cx, cy, px, py) -> float:
    """Float in-circle determinant (CCW-positive), for fast filtering."""
    adx, ady = ax - px, ay - py
    bdx, bdy = bx - px, by - py
    cdx, cdy = cx - px, cy - py
    ad = adx * adx + ady * ady
    bd = bdx * bdx + bdy * bdy
    cd = cdx * cdx + cdy * cdy
    return (
        adx * (bdy * cd - bd * cdy)
        - ady * (bdx * cd - bd * cdx)
        + ad * (bdx * cdy - bdy * cdx)
    )


def orient3(a: Pt3, b: Pt3, c: Pt3, d: Pt3) -> int:
    """Sign of det[b-a, c-a, d-a] for rational 3D points."""
    u = (b[0] - a[0], b[1] - a[1], b[2] - a[2])
    v = (c[0] - a[0], c[1] - a[1], c[2] - a[2])
    w = (d[0] - a[0], d[1] - a[1], d[2] - a[2])
    det = (
        u[0] * (v[1] * w[2] - v[2] * w[1])
        - u[1] * (v[0] * w[2] - v[2] * w[0])
        + u[2] * (v[0] * w[1] - v[1] * w[0])
    )
    return (det > 0) - (det < 0)


def insphere3(a: Pt3, b: Pt3, c: Pt3, d: Pt3, p: Pt3) -> int:
    """+1 if p is strictly inside the circumsphere of (a,b,c,d), 0 if on it."""
    s = orient3(a, b, c, d)
    if s == 0:
        raise ValueError("insphere3 called with coplanar points")
    rows = []
    for z in (a, b, c, d):
        dx, dy, dz = z[0] - p[0], z[1] - p[1], z[2] - p[2]
        rows.append((dx, dy, dz, dx * dx + dy * dy + dz * dz))
    det = _det4(rows)
    det *= s
    return (det > 0) - (det < 0)


def _det4(rows) -> Fraction:
    (a1, a2, a3, a4), (b1, b2, b3, b4), (c1, c2, c3, c4), (d1, d2, d3, d4) = rows

    def det3(m):
        (x1, x2, x3), (y1, y2, y3), (z1, z2, z3) = m
        return (
            x1 * (y2 * z3 - y3 * z2)
            - x2 * (y1 * z3 - y3 * z1)
            + x3 * (y1 * z2 - y2 * z1)
        )

    return (
        a1 * det3(((b2, b3, b4), (c2, c3, c4), (d2, d3, d4)))
        - a2 * det3(((b1, b3, b4), (c1, c3, c4), (d1, d3, d4)))
        + a3 * det3(((b1, b2, b4), (c1, c2, c4), (d1, d2, d4)))
        - a4 * det3(((b1, b2, b3), (c1, c2, c3), (d1, d2, d3)))
    )


def circumsphere_rational(points: list[Pt3]) -> tuple[Pt3, Fraction] | None:
    """Center and squared radius of the sphere through 4 affinely
    independent rational points; None if degenerate."""
    a = points[0]
    rows = []
    rhs = []
    for z in points[1:4]:
        rows.append((2 * (z[0] - a[0]), 2 * (z[1] - a[1]), 2 * (z[2] - a[2])))
        rhs.append(
            z[0] * z[0] + z[1] * z[1] + z[2] * z[2]
            - (a[0] * a[0] + a[1] * a[1] + a[2] * a[2])
        )
    det = (
        rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
        - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
        + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0])
    )
    if det == 0:
        return None
    center = []
    for col in range(3):
        m = [list(r) for r in rows]
        for i in range(3):
            m[i][col] = rhs[i]
        dc = (
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        )
        center.append(dc / det)
    cx, cy, cz = center
    r2 = (cx - a[0]) ** 2 + (cy - a[1]) ** 2 + (cz - a[2]) ** 2
    return (cx, cy, cz), r2
