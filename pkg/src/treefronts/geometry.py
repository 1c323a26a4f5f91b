"""Exact rational plane geometry for front diagrams.

All coordinates are fractions.Fraction; every predicate here is exact, so
front conditions (which are open conditions) are decidable without
tolerances.
"""

from __future__ import annotations

from fractions import Fraction

Point = tuple[Fraction, Fraction]


def frac(value) -> Fraction:
    """Coerce ints/strings like "3/4" (or "3") to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot convert {value!r} to Fraction")


def frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def pt(x, z) -> Point:
    return (frac(x), frac(z))


def cross(o: Point, a: Point, b: Point) -> Fraction:
    """Signed area of the triangle o-a-b (positive = counterclockwise)."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def on_segment(p: Point, a: Point, b: Point) -> bool:
    """True if p lies on the closed segment [a, b]."""
    if cross(a, b, p) != 0:
        return False
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    """Closed-segment intersection test, including touching and overlap."""
    d1 = cross(c, d, a)
    d2 = cross(c, d, b)
    d3 = cross(a, b, c)
    d4 = cross(a, b, d)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    if d1 == 0 and on_segment(a, c, d):
        return True
    if d2 == 0 and on_segment(b, c, d):
        return True
    if d3 == 0 and on_segment(c, a, b):
        return True
    if d4 == 0 and on_segment(d, a, b):
        return True
    return False


def proper_intersection(a: Point, b: Point, c: Point, d: Point) -> Point | None:
    """Interior crossing point of two segments, or None.

    Only transversal interior-interior intersections count; touching at an
    endpoint or collinear overlap returns None.
    """
    d1 = cross(c, d, a)
    d2 = cross(c, d, b)
    d3 = cross(a, b, c)
    d4 = cross(a, b, d)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        t = d1 / (d1 - d2)
        return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
    return None


def slope(a: Point, b: Point) -> Fraction:
    if b[0] == a[0]:
        raise ZeroDivisionError("vertical segment has no slope")
    return (b[1] - a[1]) / (b[0] - a[0])


def polyline_is_x_monotone(points: list[Point]) -> bool:
    """Strictly monotone in x, in either direction."""
    if len(points) < 2:
        return False
    dx = points[1][0] - points[0][0]
    if dx == 0:
        return False
    inc = dx > 0
    for p, q in zip(points, points[1:]):
        step = q[0] - p[0]
        if step == 0 or (step > 0) != inc:
            return False
    return True


def point_at_x(points: list[Point], x: Fraction) -> Point:
    """Point of an x-monotone polyline at abscissa x (exact interpolation)."""
    pts = points if points[0][0] < points[-1][0] else list(reversed(points))
    if not (pts[0][0] <= x <= pts[-1][0]):
        raise ValueError("x outside polyline span")
    for p, q in zip(pts, pts[1:]):
        if p[0] <= x <= q[0]:
            if p[0] == x:
                return p
            t = (x - p[0]) / (q[0] - p[0])
            return (x, p[1] + t * (q[1] - p[1]))
    return pts[-1]


def split_polyline_at(points: list[Point], p: Point) -> tuple[list[Point], list[Point]]:
    """Split a polyline at a point lying on it; p becomes an endpoint of both halves."""
    for i in range(len(points) - 1):
        a, b = points[i], points[i + 1]
        if on_segment(p, a, b):
            left = points[: i + 1] + [p]
            right = [p] + points[i + 1 :]
            if left[-2] == p:
                left = left[:-2] + [p]
            if right[1] == p:
                right = [p] + right[2:]
            if len(left) >= 2 and len(right) >= 2:
                return left, right
    raise ValueError("point not on polyline")


def line_intersection(a: Point, b: Point, c: Point, d: Point) -> Point | None:
    """Intersection of the infinite lines through a-b and c-d (None if parallel)."""
    r = (b[0] - a[0], b[1] - a[1])
    s = (d[0] - c[0], d[1] - c[1])
    denom = r[0] * s[1] - r[1] * s[0]
    if denom == 0:
        return None
    t = ((c[0] - a[0]) * s[1] - (c[1] - a[1]) * s[0]) / denom
    return (a[0] + t * r[0], a[1] + t * r[1])


def foot_on_line(a: Point, b: Point, p: Point) -> Point:
    """Orthogonal projection of p onto the line through a and b."""
    ab = (b[0] - a[0], b[1] - a[1])
    denom = ab[0] * ab[0] + ab[1] * ab[1]
    t = ((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / denom
    return (a[0] + t * ab[0], a[1] + t * ab[1])


def dist2(a: Point, b: Point) -> Fraction:
    return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2


def seg_point_dist2(a: Point, b: Point, p: Point) -> Fraction:
    """Squared distance from p to the closed segment [a, b]."""
    ab = (b[0] - a[0], b[1] - a[1])
    ap = (p[0] - a[0], p[1] - a[1])
    denom = ab[0] * ab[0] + ab[1] * ab[1]
    if denom == 0:
        return dist2(a, p)
    t = (ap[0] * ab[0] + ap[1] * ab[1]) / denom
    if t <= 0:
        return dist2(a, p)
    if t >= 1:
        return dist2(b, p)
    proj = (a[0] + t * ab[0], a[1] + t * ab[1])
    return dist2(proj, p)
