"""Imaginary quadratic fields of discriminant -3, -4, -8 and their integer rings.

Elements are ``x + y*omega`` where ``omega`` generates the ring of integers:
``omega = i`` (D=-4), ``sqrt(-2)`` (D=-8), ``(1 + sqrt(-3)) / 2`` (D=-3).
``omega`` satisfies ``omega^2 = t*omega - n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..errors import UnsupportedInputError

__all__ = [
    "SUPPORTED_DISCS",
    "FIELD_NAMES",
    "ring_data",
    "parse_field",
    "ImagQuad",
    "ImagQuadInteger",
    "unit_count",
    "units",
    "kronecker_char",
    "egcd",
    "gcd_ideal",
    "is_unit",
]

SUPPORTED_DISCS = (-3, -4, -8)
FIELD_NAMES = {-4: "Q(i)", -3: "Q(sqrt-3)", -8: "Q(sqrt-2)"}

# D -> (t, n, Im omega); omega^2 = t omega - n
_RING = {
    -4: (0, 1, 1.0),
    -8: (0, 2, math.sqrt(2.0)),
    -3: (1, 1, math.sqrt(3.0) / 2),
}


def ring_data(D: int) -> tuple[int, int, float]:
    try:
        return _RING[D]
    except KeyError:
        raise UnsupportedInputError(f"unsupported imaginary quadratic discriminant {D}") from None


_ALIASES = {
    "-4": -4, "q(i)": -4, "gaussian": -4, "qi": -4, "i": -4,
    "-3": -3, "q(sqrt-3)": -3, "q(sqrt(-3))": -3, "eisenstein": -3, "q(omega)": -3,
    "-8": -8, "q(sqrt-2)": -8, "q(sqrt(-2))": -8, "q(i*sqrt2)": -8, "q(isqrt2)": -8,
}


def parse_field(tag) -> int:
    """Accept a discriminant or a common name of one of the supported fields."""
    if isinstance(tag, int):
        ring_data(tag)
        return tag
    key = str(tag).strip().lower().replace(" ", "").replace("√", "sqrt")
    if key in _ALIASES:
        return _ALIASES[key]
    raise UnsupportedInputError(f"unsupported field {tag!r}")


@dataclass(frozen=True)
class ImagQuad:
    """Element ``x + y*omega`` of the field, with rational coordinates."""

    x: Fraction
    y: Fraction
    D: int

    def __post_init__(self):
        ring_data(self.D)
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))

    # construction -----------------------------------------------------------
    @classmethod
    def of(cls, value, D: int) -> "ImagQuad":
        if isinstance(value, ImagQuad):
            if value.D != D:
                raise ValueError("elements of different fields")
            return value
        return cls(Fraction(value), Fraction(0), D)

    def _wrap(self, x, y):
        return type(self)._make(x, y, self.D)

    @classmethod
    def _make(cls, x, y, D):
        if Fraction(x).denominator == 1 and Fraction(y).denominator == 1:
            return ImagQuadInteger(int(x), int(y), D)
        return ImagQuad(x, y, D)

    # arithmetic -------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, ImagQuad):
            if other.D != self.D:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return ImagQuad(Fraction(other), Fraction(0), self.D)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._wrap(self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(-self.x, -self.y)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._wrap(self.x - o.x, self.y - o.y)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        t, n, _ = _RING[self.D]
        x = self.x * o.x - n * self.y * o.y
        y = self.x * o.y + self.y * o.x + t * self.y * o.y
        return self._wrap(x, y)

    __rmul__ = __mul__

    def conjugate(self):
        t, _, _ = _RING[self.D]
        return self._wrap(self.x + t * self.y, -self.y)

    def norm(self) -> Fraction:
        t, n, _ = _RING[self.D]
        return self.x * self.x + t * self.x * self.y + n * self.y * self.y

    def inverse(self):
        N = self.norm()
        if N == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conjugate()
        return ImagQuad(c.x / N, c.y / N, self.D)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        q = self * o.inverse()
        return self._make(q.x, q.y, self.D)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = ImagQuadInteger(1, 0, self.D)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.x == o.x and self.y == o.y and self.D == o.D

    def __hash__(self):
        if self.y == 0:
            return hash(self.x)
        return hash((self.x, self.y, self.D))

    def __bool__(self):
        return bool(self.x) or bool(self.y)

    # views ------------------------------------------------------------------
    @property
    def re(self) -> Fraction:
        t, _, _ = _RING[self.D]
        return self.x + Fraction(t, 2) * self.y

    def __complex__(self):
        t, _, im = _RING[self.D]
        return complex(float(self.x) + t * float(self.y) / 2, float(self.y) * im)

    def abs2(self) -> Fraction:
        return self.norm()

    def is_integral(self) -> bool:
        return self.x.denominator == 1 and self.y.denominator == 1

    def __repr__(self):
        return f"{type(self).__name__}({self.x}, {self.y}, D={self.D})"


class ImagQuadInteger(ImagQuad):
    """Element of the ring of integers with integer coordinates."""

    def __init__(self, x: int, y: int = 0, D: int = -4):
        if Fraction(x).denominator != 1 or Fraction(y).denominator != 1:
            raise ValueError("coordinates of a ring integer must be integers")
        super().__init__(Fraction(x), Fraction(y), D)

    def divmod(self, other: "ImagQuadInteger"):
        """Euclidean division with ``N(remainder) < N(other)``."""
        q = self * other.inverse()
        qx, qy = _round_to_ring(q)
        quo = ImagQuadInteger(qx, qy, self.D)
        return quo, self - quo * other

    def divides(self, other) -> bool:
        if not self:
            return not other
        q = other * self.inverse()
        return q.is_integral()


def _round_to_ring(z: ImagQuad) -> tuple[int, int]:
    """Nearest ring element (all three rings are norm-Euclidean)."""
    best = None
    base_x = math.floor(z.x)
    base_y = math.floor(z.y)
    for dx in (0, 1):
        for dy in (0, 1):
            cand = ImagQuad(base_x + dx, base_y + dy, z.D)
            r = (z - cand).norm()
            if best is None or r < best[0]:
                best = (r, base_x + dx, base_y + dy)
    return best[1], best[2]


def egcd(a: ImagQuadInteger, b: ImagQuadInteger):
    """Return ``(g, u, v)`` with ``g = u a + v b`` a generator of ``(a, b)``."""
    D = a.D
    x0, y0 = ImagQuadInteger(1, 0, D), ImagQuadInteger(0, 0, D)
    x1, y1 = ImagQuadInteger(0, 0, D), ImagQuadInteger(1, 0, D)
    while b:
        q, r = a.divmod(b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def gcd_ideal(*elements: ImagQuadInteger) -> ImagQuadInteger:
    g = None
    for e in elements:
        g = e if g is None else egcd(g, e)[0]
    return g


def is_unit(z: ImagQuad) -> bool:
    return z.is_integral() and z.norm() == 1


def unit_count(D: int) -> int:
    ring_data(D)
    return {-3: 6, -4: 4, -8: 2}[D]


def units(D: int) -> list[ImagQuadInteger]:
    if D == -4:
        return [ImagQuadInteger(*c, D) for c in ((1, 0), (0, 1), (-1, 0), (0, -1))]
    if D == -8:
        return [ImagQuadInteger(1, 0, D), ImagQuadInteger(-1, 0, D)]
    ring_data(D)
    # powers of omega = exp(i pi/3)
    w = ImagQuadInteger(0, 1, D)
    return [w ** k for k in range(6)]


def kronecker_char(D: int, m: int) -> int:
    """The quadratic character ``chi_D(m)`` for the supported discriminants."""
    ring_data(D)
    if D == -4:
        return (0, 1, 0, -1)[m % 4]
    if D == -3:
        return (0, 1, -1)[m % 3]
    return (0, 1, 0, 1, 0, -1, 0, -1)[m % 8]
