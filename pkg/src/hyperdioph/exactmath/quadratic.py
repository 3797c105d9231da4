"""Exact arithmetic in real quadratic fields and the modular action on them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from numbers import Rational
from typing import Union

import mpmath

from ..errors import DegenerateInputError, UndefinedHeightError

__all__ = [
    "INF",
    "RealQuadratic",
    "QuadraticIrrational",
    "UnimodularMatrix",
    "mobius_apply",
    "galois_conjugate",
    "trace_qi",
    "height_qi",
    "cross_ratio",
    "relative_height",
    "relative_height_exact",
    "relative_height_numeric",
    "reduce_mod1",
    "squarefree_decomposition",
]


def squarefree_decomposition(n: int) -> tuple[int, int]:
    """Return ``(f, d)`` with ``n == f*f*d`` and ``d`` squarefree."""
    if n <= 0:
        raise ValueError("n must be positive")
    f, d = 1, 1
    m = n
    p = 2
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        f *= p ** (e // 2)
        if e % 2:
            d *= p
        p += 1 if p == 2 else 2
    return f, d * m


class _Infinity:
    """The point at infinity of the real projective line."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __float__(self):
        return math.inf

    def __hash__(self):
        return hash("projective-infinity")

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


@total_ordering
@dataclass(frozen=True, eq=False)
class RealQuadratic:
    """The number ``a + b*sqrt(d)`` with rational ``a, b`` and squarefree ``d > 1``."""

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        d = int(self.d)
        if d < 2 or squarefree_decomposition(d)[0] != 1:
            raise ValueError(f"d={d} must be a squarefree integer > 1")
        object.__setattr__(self, "d", d)

    @classmethod
    def sqrt(cls, n: int) -> RealQuadratic:
        """Exact square root of a positive non-square integer."""
        f, d = squarefree_decomposition(n)
        if d == 1:
            raise ValueError(f"{n} is a perfect square")
        return cls(0, f, d)

    def _coerce(self, other) -> RealQuadratic | None:
        if isinstance(other, RealQuadratic):
            if other.d == self.d or other.b == 0:
                return RealQuadratic(other.a, other.b, self.d)
            if self.b == 0:
                return None
            raise ValueError(f"cannot mix Q(sqrt {self.d}) and Q(sqrt {other.d})")
        if isinstance(other, (int, Rational)):
            return RealQuadratic(Fraction(other), 0, self.d)
        return None

    def _field(self, other: RealQuadratic) -> int:
        return other.d if self.b == 0 else self.d

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, RealQuadratic):
                return RealQuadratic(self.a + other.a, other.b, other.d)
            return NotImplemented if not isinstance(other, float) else float(self) + other
        return RealQuadratic(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return RealQuadratic(-self.a, -self.b, self.d)

    def __sub__(self, other):
        if isinstance(other, float):
            return float(self) - other
        return self + (-other)

    def __rsub__(self, other):
        if isinstance(other, float):
            return other - float(self)
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, float):
            return float(self) * other
        o = self._coerce(other)
        if o is None:
            if isinstance(other, RealQuadratic):
                return RealQuadratic(self.a * other.a, self.a * other.b, other.d)
            return NotImplemented
        return RealQuadratic(
            self.a * o.a + self.b * o.b * self.d, self.a * o.b + self.b * o.a, self.d
        )

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def conjugate(self) -> RealQuadratic:
        return RealQuadratic(self.a, -self.b, self.d)

    def inverse(self) -> RealQuadratic:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in real quadratic field")
        return RealQuadratic(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        if isinstance(other, float):
            return float(self) / other
        o = self._coerce(other)
        if o is None:
            if isinstance(other, RealQuadratic):
                return self.a * other.inverse()
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        if isinstance(other, float):
            return other / float(self)
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = RealQuadratic(1, 0, self.d)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # order ---------------------------------------------------------------
    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        return sa if self.a * self.a > self.b * self.b * self.d else sb

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __eq__(self, other):
        if isinstance(other, RealQuadratic):
            if self.b == 0 and other.b == 0:
                return self.a == other.a
            return self.a == other.a and self.b == other.b and self.d == other.d
        if isinstance(other, (int, Rational)):
            return self.b == 0 and self.a == other
        if isinstance(other, float):
            return float(self) == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __lt__(self, other):
        if isinstance(other, float):
            return float(self) < other
        if isinstance(other, _Infinity):
            return True
        return (self - other).sign() < 0

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    # conversions -------------------------------------------------------
    def __float__(self):
        a, b = self.a, self.b
        if b == 0:
            return float(a)
        root = math.sqrt(self.d)
        if a == 0 or (a > 0) == (b > 0):
            return float(a) + float(b) * root
        # avoid cancellation: a + b r = (a^2 - b^2 d) / (a - b r)
        return float(self.norm()) / (float(a) - float(b) * root)

    def to_mpf(self, dps: int = 30):
        with mpmath.workdps(dps):
            return mpmath.mpf(self.a.numerator) / self.a.denominator + (
                mpmath.mpf(self.b.numerator) / self.b.denominator
            ) * mpmath.sqrt(self.d)

    def floor(self) -> int:
        f = math.floor(float(self))
        while (self - f).sign() < 0:
            f -= 1
        while (self - (f + 1)).sign() >= 0:
            f += 1
        return f

    def is_integral(self) -> bool:
        """True when the number is an algebraic integer."""
        t = 2 * self.a
        n = self.norm()
        return t.denominator == 1 and n.denominator == 1

    def __repr__(self):
        return f"RealQuadratic({self.a}, {self.b}, {self.d})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        sgn = "+" if self.b > 0 else "-"
        return f"{self.a} {sgn} {abs(self.b)}*sqrt({self.d})"


class QuadraticIrrational(RealQuadratic):
    """A real quadratic number that is not rational."""

    def __post_init__(self):
        super().__post_init__()
        if self.b == 0:
            raise ValueError("a quadratic irrational needs a nonzero sqrt coefficient")

    @classmethod
    def of(cls, x: RealQuadratic) -> QuadraticIrrational:
        return x if isinstance(x, cls) else cls(x.a, x.b, x.d)

    def conjugate(self) -> QuadraticIrrational:
        return QuadraticIrrational(self.a, -self.b, self.d)


Extended = Union[int, Fraction, RealQuadratic, float, _Infinity]


def _as_exact(x):
    if isinstance(x, int):
        return Fraction(x)
    return x


@dataclass(frozen=True)
class UnimodularMatrix:
    """Element of PSL2(Z), stored as the representative of {M, -M} whose first
    nonzero entry is positive."""

    m11: int
    m12: int
    m21: int
    m22: int

    def __post_init__(self):
        entries = [int(x) for x in (self.m11, self.m12, self.m21, self.m22)]
        if entries[0] * entries[3] - entries[1] * entries[2] != 1:
            raise ValueError(f"determinant of {entries} is not 1")
        first = next(x for x in entries if x != 0)
        if first < 0:
            entries = [-x for x in entries]
        for name, val in zip(("m11", "m12", "m21", "m22"), entries):
            object.__setattr__(self, name, val)

    @classmethod
    def identity(cls) -> UnimodularMatrix:
        return cls(1, 0, 0, 1)

    def __matmul__(self, other: UnimodularMatrix) -> UnimodularMatrix:
        return UnimodularMatrix(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    def inverse(self) -> UnimodularMatrix:
        return UnimodularMatrix(self.m22, -self.m12, -self.m21, self.m11)

    def trace(self) -> int:
        return self.m11 + self.m22

    def __call__(self, x: Extended) -> Extended:
        return mobius_apply(self, x)

    def entries(self) -> tuple[int, int, int, int]:
        return (self.m11, self.m12, self.m21, self.m22)


def mobius_apply(m: UnimodularMatrix, x: Extended) -> Extended:
    """Homography ``x -> (m11 x + m12) / (m21 x + m22)`` on the projective line."""
    if isinstance(x, _Infinity):
        if m.m21 == 0:
            return INF
        return Fraction(m.m11, m.m21)
    if isinstance(x, float):
        if math.isinf(x):
            return mobius_apply(m, INF)
        den = m.m21 * x + m.m22
        return INF if den == 0 else (m.m11 * x + m.m12) / den
    x = _as_exact(x)
    den = m.m21 * x + m.m22
    if den == 0:
        return INF
    return (m.m11 * x + m.m12) / den


def galois_conjugate(alpha: RealQuadratic) -> RealQuadratic:
    return alpha.conjugate()


def trace_qi(alpha: RealQuadratic) -> Fraction:
    return 2 * alpha.a


def height_qi(alpha: RealQuadratic) -> float:
    """``2 / |alpha - alpha^sigma|``, that is ``1 / (|b| sqrt d)``."""
    if alpha.b == 0:
        raise UndefinedHeightError("height is only defined for quadratic irrationals")
    return 1.0 / (float(abs(alpha.b)) * math.sqrt(alpha.d))


def reduce_mod1(alpha: RealQuadratic) -> RealQuadratic:
    """Representative of ``alpha`` modulo integer translation, in ``[0, 1)``."""
    return alpha - alpha.floor()


def _is_inf(x) -> bool:
    return isinstance(x, _Infinity) or (isinstance(x, float) and math.isinf(x))


def cross_ratio(a: Extended, b: Extended, c: Extended, d: Extended):
    """``((c-a)(d-b)) / ((c-b)(d-a))`` with the limit convention at infinity.

    Exact when all finite arguments are exact; any float argument switches the
    computation to floating point.
    """
    pts = [a, b, c, d]
    n_inf = sum(_is_inf(p) for p in pts)
    if n_inf > 1:
        raise DegenerateInputError("points of a cross-ratio must be pairwise distinct")
    if any(isinstance(p, float) for p in pts if not _is_inf(p)):
        pts = [INF if _is_inf(p) else float(p) for p in pts]
    else:
        pts = [INF if _is_inf(p) else _as_exact(p) for p in pts]
    finite = [p for p in pts if not isinstance(p, _Infinity)]
    for i in range(len(finite)):
        for j in range(i + 1, len(finite)):
            if finite[i] == finite[j]:
                raise DegenerateInputError("points of a cross-ratio must be pairwise distinct")
    a, b, c, d = pts
    # each factor containing the infinite point cancels against its partner
    if isinstance(a, _Infinity):
        return (d - b) / (c - b)
    if isinstance(b, _Infinity):
        return (c - a) / (d - a)
    if isinstance(c, _Infinity):
        return (d - b) / (d - a)
    if isinstance(d, _Infinity):
        return (c - a) / (c - b)
    return ((c - a) * (d - b)) / ((c - b) * (d - a))


def _check_relative(alpha0: RealQuadratic, beta: RealQuadratic) -> None:
    if alpha0.b == 0 or beta.b == 0:
        raise UndefinedHeightError("relative height needs two quadratic irrationals")
    a0s = alpha0.conjugate()
    if beta == alpha0 or beta == a0s:
        raise UndefinedHeightError("relative height undefined at alpha0 and its conjugate")


def relative_height_exact(alpha0: RealQuadratic, beta: RealQuadratic) -> RealQuadratic:
    """Exact relative height, for ``alpha0`` and ``beta`` in the same quadratic field."""
    _check_relative(alpha0, beta)
    if alpha0.d != beta.d:
        raise ValueError("exact relative height needs a common quadratic field")
    a0s, bs = alpha0.conjugate(), beta.conjugate()
    r1 = abs(cross_ratio(alpha0, beta, a0s, bs))
    r2 = abs(cross_ratio(alpha0, bs, a0s, beta))
    return (r1 if r1 >= r2 else r2).inverse()


def relative_height_numeric(alpha0: RealQuadratic, beta: RealQuadratic, dps: int = 30):
    """Relative height evaluated with ``dps`` decimal digits (mpmath)."""
    _check_relative(alpha0, beta)
    with mpmath.workdps(dps):
        a, a_s = alpha0.to_mpf(dps), alpha0.conjugate().to_mpf(dps)
        b, b_s = beta.to_mpf(dps), beta.conjugate().to_mpf(dps)

        def cr(p, q, r, s):
            return ((r - p) * (s - q)) / ((r - q) * (s - p))

        return 1 / max(abs(cr(a, b, a_s, b_s)), abs(cr(a, b_s, a_s, b)))


def relative_height(alpha0: RealQuadratic, beta: RealQuadratic) -> float:
    """Height of ``beta`` relative to ``alpha0`` (cross-ratio based)."""
    if alpha0.d == beta.d:
        return float(relative_height_exact(alpha0, beta))
    return float(relative_height_numeric(alpha0, beta))
