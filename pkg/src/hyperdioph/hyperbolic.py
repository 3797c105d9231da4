"""Upper half-plane geometry: distances, Busemann cocycle, horoballs and
common perpendiculars between points, geodesics and horoballs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import NotDisjointError
from .exactmath.quadratic import INF, RealQuadratic, UnimodularMatrix, mobius_apply

__all__ = [
    "PointH2",
    "Geodesic",
    "Horoball",
    "ConvexBody",
    "dist_h2",
    "busemann",
    "perp_length",
    "ford_horoball",
    "meets_horoball",
    "meets_horoball_geometric",
    "act_on_body",
    "act_on_point",
    "geodesic_of_qi",
]


def _is_inf(x) -> bool:
    return x is INF or (isinstance(x, float) and math.isinf(x))


def _f(x) -> float:
    return math.inf if _is_inf(x) else float(x)


@dataclass(frozen=True)
class PointH2:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError("points of the upper half-plane need y > 0")

    @property
    def z(self) -> complex:
        return complex(float(self.x), float(self.y))


@dataclass(frozen=True)
class Geodesic:
    """Geodesic line between two distinct boundary points (order is irrelevant)."""

    a: object
    b: object

    def __post_init__(self):
        if (_is_inf(self.a) and _is_inf(self.b)) or (
            not _is_inf(self.a) and not _is_inf(self.b) and self.a == self.b
        ):
            raise ValueError("geodesic endpoints must be distinct")

    def _key(self):
        return tuple(sorted((_f(self.a), _f(self.b))))

    def __eq__(self, other):
        if not isinstance(other, Geodesic):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @property
    def endpoints(self) -> tuple:
        return (self.a, self.b)


@dataclass(frozen=True)
class Horoball:
    """Horoball at ``center``; ``size`` is the height of the boundary line for the
    center at infinity and the Euclidean diameter otherwise."""

    center: object
    size: float

    def __post_init__(self):
        if not self.size > 0:
            raise ValueError("horoball size must be positive")

    @property
    def at_infinity(self) -> bool:
        return _is_inf(self.center)

    def contains(self, p: PointH2) -> bool:
        if self.at_infinity:
            return p.y >= self.size
        c = float(self.center)
        r = float(self.size) / 2
        return (p.x - c) ** 2 + (p.y - r) ** 2 <= r * r


ConvexBody = Union[PointH2, Geodesic, Horoball]


def dist_h2(p: PointH2, q: PointH2) -> float:
    dx = float(p.x) - float(q.x)
    dy = float(p.y) - float(q.y)
    # 2 asinh(half chord / sqrt(y y')) avoids cancellation near 0
    return 2.0 * math.asinh(math.hypot(dx, dy) / (2.0 * math.sqrt(float(p.y) * float(q.y))))


def busemann(xi, x: PointH2, y: PointH2) -> float:
    """Busemann cocycle, normalised so that the horoball at ``xi`` through ``x``
    is the set of ``y`` with nonnegative value."""
    if _is_inf(xi):
        return math.log(float(y.y) / float(x.y))
    c = float(xi)

    def delta(p):
        return ((float(p.x) - c) ** 2 + float(p.y) ** 2) / float(p.y)

    return math.log(delta(x) / delta(y))


# real Moebius maps with positive determinant, as float 4-tuples ------------

def _apply(m, z):
    a, b, c, d = m
    if _is_inf(z):
        return INF if c == 0 else a / c
    den = c * z + d
    if den == 0:
        return INF
    return (a * z + b) / den


def _apply_point(m, p: PointH2) -> PointH2:
    a, b, c, d = m
    z = p.z
    w = (a * z + b) / (c * z + d)
    return PointH2(w.real, w.imag)


def _to_infinity(xi):
    """Map sending ``xi`` to infinity (``z -> -1/(z - xi)``)."""
    return (0.0, -1.0, 1.0, -float(xi))


def _geodesic_to_axis(a, b):
    """Map sending ``a -> 0`` and ``b -> infinity`` with positive determinant."""
    if _is_inf(b):
        return (1.0, -float(a), 0.0, 1.0)
    if _is_inf(a):
        return (0.0, -1.0, 1.0, -float(b))
    a, b = float(a), float(b)
    if a < b:
        return (1.0, -a, -1.0, b)
    return (1.0, -a, 1.0, -b)


def _horoball_image(m, hb: Horoball) -> Horoball:
    if hb.at_infinity:
        p = PointH2(0.0, float(hb.size))
    else:
        p = PointH2(float(hb.center), float(hb.size))
    c = _apply(m, INF if hb.at_infinity else float(hb.center))
    q = _apply_point(m, p)
    if _is_inf(c):
        return Horoball(INF, q.y)
    c = float(c)
    return Horoball(c, ((q.x - c) ** 2 + q.y ** 2) / q.y)


def _image(m, body):
    if isinstance(body, PointH2):
        return _apply_point(m, body)
    if isinstance(body, Geodesic):
        return Geodesic(_apply(m, body.a), _apply(m, body.b))
    return _horoball_image(m, body)


# common perpendiculars ----------------------------------------------------

_RANK = {PointH2: 0, Geodesic: 1, Horoball: 2}


def _sort_key(body):
    if isinstance(body, PointH2):
        return (0, float(body.x), float(body.y))
    if isinstance(body, Geodesic):
        return (1,) + body._key()
    return (2, _f(body.center), float(body.size))


def perp_length(A: ConvexBody, B: ConvexBody, eps: float = 1e-12) -> float:
    """Length of the common perpendicular between two disjoint convex bodies."""
    if _sort_key(B) < _sort_key(A):
        A, B = B, A
    return _perp_ordered(A, B, eps)


def _require_positive(d: float, eps: float, what: str) -> float:
    if not d > eps:
        raise NotDisjointError(f"{what} are not disjoint")
    return d


def _perp_ordered(A, B, eps):
    if isinstance(A, PointH2) and isinstance(B, PointH2):
        return _require_positive(dist_h2(A, B), 0.0, "points")
    if isinstance(B, Horoball):
        m = (1.0, 0.0, 0.0, 1.0) if B.at_infinity else _to_infinity(B.center)
        h = float(_horoball_image(m, B).size)
        img = _image(m, A)
        if isinstance(img, PointH2):
            return _require_positive(math.log(h / img.y), eps, "point and horoball")
        if isinstance(img, Geodesic):
            if _is_inf(img.a) or _is_inf(img.b):
                raise NotDisjointError("geodesic ends at the horoball center")
            width = abs(float(img.a) - float(img.b))
            return _require_positive(math.log(2.0 * h / width), eps, "geodesic and horoball")
        if img.at_infinity:
            raise NotDisjointError("horoballs share their center")
        return _require_positive(math.log(h / float(img.size)), eps, "horoballs")
    # B is a geodesic, A a point or a geodesic
    m = _geodesic_to_axis(B.a, B.b)
    img = _image(m, A)
    if isinstance(img, PointH2):
        return _require_positive(math.asinh(abs(img.x) / img.y), 0.0, "point and geodesic")
    u, v = img.a, img.b
    if _is_inf(u) or _is_inf(v) or u == 0 or v == 0:
        raise NotDisjointError("geodesics share an endpoint")
    u, v = float(u), float(v)
    if u * v <= 0:
        raise NotDisjointError("geodesics intersect")
    return _require_positive(math.acosh(abs(u + v) / abs(u - v)), eps, "geodesics")


# Ford horoballs -------------------------------------------------------------

def ford_horoball(r, psi_value: float = 1.0) -> Horoball:
    """Horoball at ``p/q`` with Euclidean diameter ``1/(psi q^2)``."""
    r = Fraction(r)
    if psi_value < 1:
        raise ValueError("psi value must be >= 1")
    return Horoball(r, 1.0 / (psi_value * r.denominator ** 2))


def meets_horoball(xi, r, psi_value: float = 1.0) -> bool:
    """Exact test ``|xi - p/q| <= 1/(2 psi q^2)`` (``xi`` may be a quadratic irrational)."""
    r = Fraction(r)
    q = r.denominator
    psi = Fraction(psi_value)
    diff = xi - r
    bound = 1 / (2 * psi * q * q)
    if isinstance(diff, float):
        return abs(diff) <= float(bound)
    return abs(diff) <= bound


def meets_horoball_geometric(xi: float, r, psi_value: float = 1.0) -> bool:
    """Does the vertical geodesic ending at ``xi`` enter the Ford horoball?"""
    hb = ford_horoball(r, psi_value)
    radius = hb.size / 2
    # lowest point of the disc boundary at abscissa xi, if any
    dx = float(xi) - float(hb.center)
    return dx * dx <= radius * radius


# actions ---------------------------------------------------------------------

def act_on_point(m: UnimodularMatrix, p: PointH2) -> PointH2:
    return _apply_point(tuple(float(e) for e in m.entries()), p)


def act_on_body(m: UnimodularMatrix, body: ConvexBody) -> ConvexBody:
    """Isometric action; exact boundary values stay exact."""
    if isinstance(body, Geodesic):
        return Geodesic(mobius_apply(m, body.a), mobius_apply(m, body.b))
    fm = tuple(float(e) for e in m.entries())
    if isinstance(body, PointH2):
        return _apply_point(fm, body)
    img = _horoball_image(fm, body)
    center = body.center
    if isinstance(center, (int, Fraction, RealQuadratic)) or center is INF:
        center = mobius_apply(m, center)
    return Horoball(center, img.size)


def geodesic_of_qi(alpha: RealQuadratic) -> Geodesic:
    return Geodesic(alpha, alpha.conjugate())
