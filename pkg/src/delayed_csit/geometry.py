"""Exact two-dimensional convex polytopes over the rationals.

Every DoF region handled by the package is a bounded polygon in the
non-negative quadrant described by a handful of linear inequalities, so the
machinery here is deliberately small: pairwise line intersection, an exact
counterclockwise sort, and containment tests on vertices. All arithmetic is
done with :class:`fractions.Fraction`; floats are rejected at the boundary.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from numbers import Rational
from typing import Iterable, Sequence


class GeometryError(ValueError):
    """Raised for empty, unbounded or otherwise malformed regions."""


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions and ``"num/den"`` strings to a Fraction.

    Floats are refused: an exact region must never silently pick up a
    binary rounding error.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def fraction_to_str(x: Fraction) -> str:
    x = as_fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class DofPoint:
    """A pair of per-user degrees of freedom."""

    d1: Fraction
    d2: Fraction

    def __post_init__(self):
        d1, d2 = as_fraction(self.d1), as_fraction(self.d2)
        if d1 < 0 or d2 < 0:
            raise GeometryError(f"DoF coordinates must be non-negative, got ({d1}, {d2})")
        object.__setattr__(self, "d1", d1)
        object.__setattr__(self, "d2", d2)

    def __iter__(self):
        yield self.d1
        yield self.d2

    def __getitem__(self, k):
        return (self.d1, self.d2)[k]

    @property
    def total(self) -> Fraction:
        return self.d1 + self.d2

    def to_json(self) -> list[str]:
        return [fraction_to_str(self.d1), fraction_to_str(self.d2)]

    def __str__(self) -> str:
        return f"({self.d1}, {self.d2})"


@dataclass(frozen=True)
class HalfPlane:
    """The constraint ``a*d1 + b*d2 <= c``, stored in canonical scale.

    The canonical form divides by the absolute value of the first non-zero
    coefficient, so two descriptions of the same half-plane compare equal.
    """

    a: Fraction
    b: Fraction
    c: Fraction

    def __post_init__(self):
        a, b, c = (as_fraction(v) for v in (self.a, self.b, self.c))
        if a == 0 and b == 0:
            raise GeometryError("half-plane needs a non-zero normal vector")
        scale = abs(a) if a != 0 else abs(b)
        object.__setattr__(self, "a", a / scale)
        object.__setattr__(self, "b", b / scale)
        object.__setattr__(self, "c", c / scale)

    @classmethod
    def from_intercepts(cls, x_cap, y_cap) -> HalfPlane:
        """``d1/x_cap + d2/y_cap <= 1`` written without division by zero."""
        x_cap, y_cap = as_fraction(x_cap), as_fraction(y_cap)
        if x_cap <= 0 or y_cap <= 0:
            raise GeometryError("intercepts must be positive")
        return cls(y_cap, x_cap, x_cap * y_cap)

    def value(self, pt) -> Fraction:
        d1, d2 = pt
        return self.a * d1 + self.b * d2

    def satisfied_by(self, pt) -> bool:
        return self.value(pt) <= self.c

    def tight_at(self, pt) -> bool:
        return self.value(pt) == self.c

    def to_json(self) -> list[str]:
        return [fraction_to_str(self.a), fraction_to_str(self.b), fraction_to_str(self.c)]

    def __str__(self) -> str:
        return f"{self.a}*d1 + {self.b}*d2 <= {self.c}"


NONNEG = (HalfPlane(-1, 0, 0), HalfPlane(0, -1, 0))


def _intersection(h: HalfPlane, g: HalfPlane) -> tuple[Fraction, Fraction] | None:
    det = h.a * g.b - h.b * g.a
    if det == 0:
        return None
    x = (h.c * g.b - h.b * g.c) / det
    y = (h.a * g.c - h.c * g.a) / det
    return x, y


def _is_unbounded(hs: Sequence[HalfPlane]) -> bool:
    # The recession cone is a 2-D cone inside the quadrant; if it is not
    # {0} one of its extreme rays is an axis or lies on some a.x = 0 line.
    rays = [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))]
    for h in hs:
        rays.append((h.b, -h.a))
        rays.append((-h.b, h.a))
    for r in rays:
        if r[0] < 0 or r[1] < 0 or r == (0, 0):
            continue
        if all(h.a * r[0] + h.b * r[1] <= 0 for h in hs):
            return True
    return False


def _ccw_sort(points: list[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    if len(points) <= 2:
        return sorted(points)
    cx = sum(p[0] for p in points) / len(points)
    cy = sum(p[1] for p in points) / len(points)

    def half(p):
        dx, dy = p[0] - cx, p[1] - cy
        return 0 if (dy > 0 or (dy == 0 and dx > 0)) else 1

    def cmp(p, q):
        hp, hq = half(p), half(q)
        if hp != hq:
            return hp - hq
        cross = (p[0] - cx) * (q[1] - cy) - (p[1] - cy) * (q[0] - cx)
        return -1 if cross > 0 else (1 if cross < 0 else 0)

    ordered = sorted(points, key=functools.cmp_to_key(cmp))
    # start from the vertex closest to the origin for a stable listing
    start = min(range(len(ordered)), key=lambda k: (ordered[k][0] + ordered[k][1], ordered[k][0]))
    return ordered[start:] + ordered[:start]


def _drop_collinear(points: list[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    if len(points) < 3:
        return points
    out = []
    n = len(points)
    for k in range(n):
        prev, cur, nxt = points[k - 1], points[k], points[(k + 1) % n]
        cross = (cur[0] - prev[0]) * (nxt[1] - prev[1]) - (cur[1] - prev[1]) * (nxt[0] - prev[0])
        if cross != 0:
            out.append(cur)
    return out


@dataclass(frozen=True)
class Polytope2D:
    """Bounded convex polygon in the non-negative quadrant.

    Build instances with :meth:`from_halfplanes`; the constructor assumes
    the vertex list is already consistent with the constraints.
    """

    constraints: tuple[HalfPlane, ...]
    vertices: tuple[DofPoint, ...]
    _raw: tuple[HalfPlane, ...] = field(default=(), repr=False, compare=False)

    @classmethod
    def from_halfplanes(cls, hs: Iterable[HalfPlane]) -> Polytope2D:
        given = list(dict.fromkeys(list(hs) + list(NONNEG)))
        for h in given:
            if h.c < 0:
                raise GeometryError(f"region excludes the origin: {h}")
        if _is_unbounded(given):
            raise GeometryError("region is unbounded")

        pts = set()
        for h, g in combinations(given, 2):
            p = _intersection(h, g)
            if p is not None and all(k.satisfied_by(p) for k in given):
                pts.add(p)
        if not pts:
            raise GeometryError("region is empty")
        ordered = _drop_collinear(_ccw_sort(list(pts)))

        if len(ordered) >= 3:
            active = [h for h in given if sum(h.tight_at(p) for p in ordered) >= 2]
        else:
            active = given
        vertices = tuple(DofPoint(*p) for p in ordered)
        return cls(tuple(active), vertices, tuple(given))

    @classmethod
    def from_vertices(cls, points: Iterable) -> Polytope2D:
        """Convex hull of points in the quadrant that includes the origin."""
        pts = {(as_fraction(p[0]), as_fraction(p[1])) for p in points}
        pts.add((Fraction(0), Fraction(0)))
        hull = _drop_collinear(_ccw_sort(_convex_hull(list(pts))))
        hs = []
        n = len(hull)
        if n < 3:
            raise GeometryError("need a full-dimensional hull")
        for k in range(n):
            (x0, y0), (x1, y1) = hull[k], hull[(k + 1) % n]
            # ccw order keeps the interior on the left of each edge
            a, b = y1 - y0, x0 - x1
            hs.append(HalfPlane(a, b, a * x0 + b * y0))
        return cls.from_halfplanes(hs)

    def contains(self, pt) -> bool:
        pt = tuple(as_fraction(v) for v in pt)
        return all(h.satisfied_by(pt) for h in self.constraints)

    def issubset(self, other: Polytope2D) -> bool:
        return all(other.contains(v) for v in self.vertices)

    def equals(self, other: Polytope2D) -> bool:
        return self.issubset(other) and other.issubset(self)

    def intersect(self, other: Polytope2D) -> Polytope2D:
        return Polytope2D.from_halfplanes(self.constraints + other.constraints)

    def max_linear(self, weights) -> Fraction:
        w1, w2 = (as_fraction(w) for w in weights)
        return max(w1 * v.d1 + w2 * v.d2 for v in self.vertices)

    def has_vertex(self, pt) -> bool:
        pt = DofPoint(*pt)
        return pt in self.vertices

    def to_json(self) -> dict:
        return {
            "constraints": [h.to_json() for h in self.constraints],
            "vertices": [v.to_json() for v in self.vertices],
        }

    @classmethod
    def from_json(cls, data: dict) -> Polytope2D:
        return cls.from_halfplanes(HalfPlane(*row) for row in data["constraints"])


def _convex_hull(points):
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
