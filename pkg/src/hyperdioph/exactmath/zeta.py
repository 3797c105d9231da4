"""Riemann, Dirichlet L and Dedekind zeta values at s = 2, 3."""

from __future__ import annotations

import mpmath

from ..errors import UnsupportedInputError
from .imagquad import kronecker_char, parse_field

__all__ = ["hurwitz_zeta", "riemann_zeta", "dirichlet_l", "zeta_constants"]


def hurwitz_zeta(s: int, a, n_terms: int = 30, dps: int = 30):
    """``sum_{k>=0} (k + a)^-s`` by Euler-Maclaurin summation.

    ``n_terms`` direct terms are summed, then the tail is closed with the
    integral, the half-endpoint and eight Bernoulli corrections.
    """
    if s < 2:
        raise ValueError("only s >= 2 is supported")
    with mpmath.workdps(dps + 10):
        a = mpmath.mpf(a)
        N = n_terms
        head = mpmath.fsum((k + a) ** (-s) for k in range(N))
        x = N + a
        tail = x ** (1 - s) / (s - 1) + x ** (-s) / 2
        # B_{2j}/(2j)! * s(s+1)...(s+2j-2) * x^{-s-2j+1}
        rising = mpmath.mpf(s)
        for j in range(1, 9):
            tail += mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j) * rising * x ** (-s - 2 * j + 1)
            rising *= (s + 2 * j - 1) * (s + 2 * j)
        return +(head + tail)


def riemann_zeta(s: int, n_terms: int = 30, dps: int = 30):
    return hurwitz_zeta(s, 1, n_terms, dps)


def dirichlet_l(s: int, D: int, n_terms: int = 30, dps: int = 30):
    """``L(s, chi_D)`` as a combination of Hurwitz zeta values mod ``|D|``."""
    m = abs(D)
    with mpmath.workdps(dps + 10):
        total = mpmath.mpf(0)
        for r in range(1, m):
            c = kronecker_char(D, r)
            if c:
                total += c * hurwitz_zeta(s, mpmath.mpf(r) / m, n_terms, dps)
        return +(total / mpmath.mpf(m) ** s)


def zeta_constants(field, s: int, n_terms: int = 30, dps: int = 30) -> float:
    """``zeta(s)`` for ``field="rational"``, else the Dedekind zeta ``zeta(s) L(s, chi_D)``."""
    if s not in (2, 3):
        raise UnsupportedInputError("only s = 2 or 3 is supported")
    z = riemann_zeta(s, n_terms, dps)
    if isinstance(field, str) and field.strip().lower() in ("rational", "q"):
        return float(z)
    D = parse_field(field)
    return float(z * dirichlet_l(s, D, n_terms, dps))
