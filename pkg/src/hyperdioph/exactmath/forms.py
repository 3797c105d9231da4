"""Indefinite binary quadratic forms, continued fractions and regulators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

import mpmath

from ..errors import BudgetExhaustedError, UnsupportedInputError
from .quadratic import QuadraticIrrational, RealQuadratic, squarefree_decomposition

__all__ = [
    "BinaryQuadraticForm",
    "ContinuedFractionExpansion",
    "cf_expand",
    "convergents",
    "form_of_qi",
    "root_of_form",
    "gauss_reduce_cycle",
    "reduce_form",
    "rho",
    "is_reduced",
    "properly_equivalent",
    "CycleClass",
    "fundamental_unit",
    "pell_unit",
    "regulator_of_lattice",
    "norm_one_unit",
    "stabilizer_regulator",
    "order_discriminant",
]


@dataclass(frozen=True)
class BinaryQuadraticForm:
    """``A x^2 + B x y + C y^2``, primitive and indefinite with ``A != 0``."""

    A: int
    B: int
    C: int

    def __post_init__(self):
        D = self.disc
        if D <= 0 or isqrt(D) ** 2 == D:
            raise ValueError(f"discriminant {D} must be positive and non-square")
        if gcd(gcd(self.A, self.B), self.C) != 1:
            raise ValueError(f"form {self.coefficients()} is not primitive")
        if self.A == 0:
            raise ValueError("leading coefficient must be nonzero")

    @property
    def disc(self) -> int:
        return self.B * self.B - 4 * self.A * self.C

    def coefficients(self) -> tuple[int, int, int]:
        return (self.A, self.B, self.C)

    def __call__(self, x, y):
        return self.A * x * x + self.B * x * y + self.C * y * y

    def __neg__(self):
        return BinaryQuadraticForm(-self.A, -self.B, -self.C)

    def act(self, m11: int, m12: int, m21: int, m22: int) -> BinaryQuadraticForm:
        """The form ``(x, y) -> f(m11 x + m12 y, m21 x + m22 y)``."""
        A, B, C = self.A, self.B, self.C
        return BinaryQuadraticForm(
            A * m11 * m11 + B * m11 * m21 + C * m21 * m21,
            2 * A * m11 * m12 + B * (m11 * m22 + m12 * m21) + 2 * C * m21 * m22,
            A * m12 * m12 + B * m12 * m22 + C * m22 * m22,
        )


@dataclass(frozen=True)
class ContinuedFractionExpansion:
    preperiod: tuple[int, ...]
    period: tuple[int, ...] = field(default=())

    def terms(self, n: int) -> list[int]:
        """First ``n`` partial quotients (fewer for a finite expansion)."""
        out = list(self.preperiod[:n])
        if self.period:
            i = 0
            while len(out) < n:
                out.append(self.period[i % len(self.period)])
                i += 1
        return out


def _floor_quadratic(P: int, Q: int, D: int) -> int:
    """floor((P + sqrt(D)) / Q) for non-square D."""
    r = isqrt(D)
    if Q > 0:
        return (P + r) // Q
    return (-P - r - 1) // (-Q)


def _standard_triple(x: RealQuadratic) -> tuple[int, int, int]:
    """Write x = (P + sqrt(D)) / Q with Q | D - P^2."""
    den = x.a.denominator * x.b.denominator // gcd(x.a.denominator, x.b.denominator)
    u = int(x.a * den)
    v = int(x.b * den)
    w = den
    D = v * v * x.d
    P, Q = (u, w) if v > 0 else (-u, -w)
    if (D - P * P) % Q:
        P, Q, D = P * abs(Q), Q * abs(Q), D * Q * Q
    return P, Q, D


def cf_expand(x, max_terms: int = 10_000) -> ContinuedFractionExpansion:
    """Continued fraction of a rational or of a quadratic irrational.

    The first partial quotient is always reported in the preperiod; the period
    is found by repetition of the ``(P, Q)`` state from index 1 on.
    """
    if max_terms < 1:
        raise ValueError("max_terms must be >= 1")
    if isinstance(x, RealQuadratic) and x.b == 0:
        x = x.a
    if not isinstance(x, RealQuadratic):
        x = Fraction(x)
        p, q = x.numerator, x.denominator
        out = []
        while q:
            a = p // q
            out.append(a)
            p, q = q, p - a * q
            if len(out) > max_terms:
                raise BudgetExhaustedError("rational expansion longer than max_terms")
        return ContinuedFractionExpansion(tuple(out), ())
    P, Q, D = _standard_triple(x)
    seen: dict[tuple[int, int], int] = {}
    terms: list[int] = []
    for k in range(max_terms + 1):
        if k >= 1:
            if (P, Q) in seen:
                start = seen[(P, Q)]
                return ContinuedFractionExpansion(tuple(terms[:start]), tuple(terms[start:]))
            seen[(P, Q)] = k
        a = _floor_quadratic(P, Q, D)
        terms.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
    raise BudgetExhaustedError(f"no period found within {max_terms} terms")


def convergents(partial_quotients):
    """Yield the convergents ``(p_n, q_n)`` of a list of partial quotients."""
    p_prev, p = 1, partial_quotients[0]
    q_prev, q = 0, 1
    yield p, q
    for a in partial_quotients[1:]:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        yield p, q


def form_of_qi(alpha: RealQuadratic) -> BinaryQuadraticForm:
    """Primitive integral form whose distinguished root is ``alpha``."""
    if alpha.b == 0:
        raise ValueError("alpha must be irrational")
    # minimal polynomial x^2 - 2a x + (a^2 - b^2 d), cleared of denominators
    c1 = -2 * alpha.a
    c0 = alpha.norm()
    L = c1.denominator * c0.denominator // gcd(c1.denominator, c0.denominator)
    A, B, C = L, int(c1 * L), int(c0 * L)
    g = gcd(gcd(A, B), C)
    A, B, C = A // g, B // g, C // g
    if alpha.b < 0:
        A, B, C = -A, -B, -C
    return BinaryQuadraticForm(A, B, C)


def root_of_form(f: BinaryQuadraticForm) -> QuadraticIrrational:
    """The distinguished root ``(-B + sqrt(disc)) / (2A)``."""
    r, d = squarefree_decomposition(f.disc)
    return QuadraticIrrational(Fraction(-f.B, 2 * f.A), Fraction(r, 2 * f.A), d)


# Gauss reduction of indefinite forms ------------------------------------------

def _lt_sqrt(x: int, D: int) -> bool:
    return x < 0 or x * x < D


def is_reduced(A: int, B: int, C: int) -> bool:
    """Gauss reduced: ``0 < B < sqrt(D)`` and ``sqrt(D) - B < 2|A| < sqrt(D) + B``."""
    D = B * B - 4 * A * C
    if not (B > 0 and _lt_sqrt(B, D)):
        return False
    a2 = 2 * abs(A)
    # sqrt(D) < a2 + B and a2 - B < sqrt(D)
    return (not _lt_sqrt(a2 + B, D)) and _lt_sqrt(a2 - B, D)


def rho(A: int, B: int, C: int) -> tuple[int, int, int]:
    """One reduction step ``(A, B, C) -> (C, B', C')`` by a proper substitution."""
    D = B * B - 4 * A * C
    m = 2 * abs(C)
    r = isqrt(D)
    if _lt_sqrt(abs(C), D):
        Bn = r - ((r + B) % m)
    else:
        Bn = (-B) % m
        if Bn > abs(C):
            Bn -= m
    Cn = (Bn * Bn - D) // (4 * C)
    return C, Bn, Cn


def reduce_form(f: BinaryQuadraticForm) -> BinaryQuadraticForm:
    A, B, C = f.coefficients()
    for _ in range(10_000 + 4 * abs(A).bit_length() + 4 * abs(C).bit_length()):
        if is_reduced(A, B, C):
            return BinaryQuadraticForm(A, B, C)
        A, B, C = rho(A, B, C)
    raise RuntimeError("reduction did not terminate")  # pragma: no cover


def gauss_reduce_cycle(f: BinaryQuadraticForm) -> list[BinaryQuadraticForm]:
    """Cycle of reduced forms properly equivalent to ``f``."""
    start = reduce_form(f)
    cycle = [start]
    cur = rho(*start.coefficients())
    while cur != start.coefficients():
        cycle.append(BinaryQuadraticForm(*cur))
        cur = rho(*cur)
    return cycle


def properly_equivalent(f: BinaryQuadraticForm, g: BinaryQuadraticForm) -> bool:
    if f.disc != g.disc:
        return False
    return reduce_form(g) in set(gauss_reduce_cycle(f))


class CycleClass:
    """Membership test for one proper equivalence class, with a cached cycle."""

    def __init__(self, f: BinaryQuadraticForm):
        self.form = f
        self.disc = f.disc
        self._cycle = frozenset(g.coefficients() for g in gauss_reduce_cycle(f))

    def __contains__(self, g) -> bool:
        if isinstance(g, BinaryQuadraticForm):
            g = g.coefficients()
        A, B, C = g
        if B * B - 4 * A * C != self.disc:
            return False
        while not is_reduced(A, B, C):
            A, B, C = rho(A, B, C)
        return (A, B, C) in self._cycle

    @property
    def cycle(self) -> frozenset:
        return self._cycle


# units and regulators ---------------------------------------------------------

def order_discriminant(alpha: RealQuadratic) -> int:
    """Discriminant of the order ``Z + Z alpha`` for an integral ``alpha``."""
    if alpha.b == 0 or not alpha.is_integral():
        raise UnsupportedInputError("only integral quadratic irrationals are supported")
    t = 2 * alpha.a
    n = alpha.norm()
    return int(t * t - 4 * n)


@lru_cache(maxsize=256)
def fundamental_unit(D: int) -> RealQuadratic:
    """Fundamental unit ``> 1`` of the quadratic order of discriminant ``D``.

    Computed as the product of the complete quotients over one period of the
    reduced number ``(b + sqrt D) / 2``.
    """
    if D <= 0 or D % 4 not in (0, 1) or isqrt(D) ** 2 == D:
        raise ValueError(f"{D} is not a non-square positive discriminant")
    r = isqrt(D)
    b = r if (r - D) % 2 == 0 else r - 1
    f, d = squarefree_decomposition(D)
    w = RealQuadratic(Fraction(b, 2), Fraction(f, 2), d)
    P, Q, DD = _standard_triple(w)
    start = (P, Q)
    eps = RealQuadratic(1, 0, d)
    while True:
        # complete quotient (P + sqrt DD) / Q
        fq, dq = squarefree_decomposition(DD)
        eps = eps * RealQuadratic(Fraction(P, Q), Fraction(fq, Q), dq)
        a = _floor_quadratic(P, Q, DD)
        P = a * Q - P
        Q = (DD - P * P) // Q
        if (P, Q) == start:
            return eps


def pell_unit(D: int, limit: int = 10**6) -> tuple[int, int]:
    """Smallest ``(x, y)``, ``y > 0``, with ``x^2 - D y^2 = +-4`` by direct search."""
    for y in range(1, limit):
        for s in (-4, 4):
            t = D * y * y + s
            if t > 0:
                x = isqrt(t)
                if x * x == t:
                    return x, y
    raise BudgetExhaustedError("no Pell solution below the search limit")


def regulator_of_lattice(alpha0: RealQuadratic) -> float:
    """Log of the fundamental unit of the order ``Z + Z alpha0`` (integral ``alpha0``)."""
    eps = fundamental_unit(order_discriminant(alpha0))
    with mpmath.workdps(30):
        return float(mpmath.log(eps.to_mpf(30)))


def norm_one_unit(D: int) -> RealQuadratic:
    """Smallest unit ``> 1`` of norm ``+1``, i.e. the Pell solution of ``x^2 - D y^2 = 4``."""
    eps = fundamental_unit(D)
    return eps if eps.norm() == 1 else eps * eps


def stabilizer_regulator(alpha0: RealQuadratic) -> float:
    """Log of the norm-one fundamental unit of ``Z + Z alpha0``.

    This is the translation length of a generator of the stabiliser of
    ``alpha0`` in the modular group; it equals :func:`regulator_of_lattice`
    unless the fundamental unit has norm ``-1``, in which case it is twice it.
    """
    eps = norm_one_unit(order_discriminant(alpha0))
    with mpmath.workdps(30):
        return float(mpmath.log(eps.to_mpf(30)))
