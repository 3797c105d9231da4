"""Vectorised arithmetic in the rings of integers of Q(i), Q(sqrt-2), Q(sqrt-3).

Elements are coordinate pairs ``(x, y)`` for ``x + y*omega`` as int64 arrays.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .exactmath.imagquad import ImagQuadInteger, kronecker_char, ring_data

# angle sector [0, 2pi/|units|) used to pick one associate
_SECTOR = {-4: 4, -3: 6, -8: 2}


def mul(x1, y1, x2, y2, D):
    t, n, _ = ring_data(D)
    return x1 * x2 - n * y1 * y2, x1 * y2 + y1 * x2 + t * y1 * y2


def conj(x, y, D):
    t, _, _ = ring_data(D)
    return x + t * y, -y


def norm(x, y, D):
    t, n, _ = ring_data(D)
    return x * x + t * x * y + n * y * y


def to_complex(x, y, D):
    t, _, im = ring_data(D)
    return (np.asarray(x, dtype=float) + 0.5 * t * np.asarray(y, dtype=float)) + 1j * (np.asarray(y, dtype=float) * im)


def divisible(px, py, qx, qy, D):
    """Elementwise test ``q | p`` for a single element ``q``."""
    N = norm(qx, qy, D)
    cx, cy = conj(qx, qy, D)
    ux, uy = mul(px, py, cx, cy, D)
    return (ux % N == 0) & (uy % N == 0)


def _factor_int(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def _element_of_norm(ell: int, D: int) -> tuple[int, int]:
    t, n, _ = ring_data(D)
    b = 2 * math.isqrt(ell) + 2
    for y in range(0, b + 1):
        for x in range(-b, b + 1):
            if x * x + t * x * y + n * y * y == ell:
                return (x, y)
    raise ValueError(f"no element of norm {ell}")  # pragma: no cover


@lru_cache(maxsize=None)
def primes_above(ell: int, D: int) -> tuple[tuple[int, int], ...]:
    """Prime elements over the rational prime ``ell``, one per associate class."""
    if D % ell == 0 or (D == -8 and ell == 2):
        return (_element_of_norm(ell, D),)
    if kronecker_char(D, ell) == -1:
        return ((ell, 0),)
    x, y = _element_of_norm(ell, D)
    return ((x, y), conj(x, y, D))


def prime_divisors(qx: int, qy: int, D: int) -> list[tuple[int, int]]:
    """Prime elements dividing ``q`` (one per associate class)."""
    out = []
    for ell in _factor_int(int(norm(qx, qy, D))):
        for pi in primes_above(ell, D):
            if divisible(np.int64(qx), np.int64(qy), pi[0], pi[1], D):
                out.append(pi)
    return out


def coprime_to(px, py, qx: int, qy: int, D: int, primes=None):
    """Elementwise test that ``p`` shares no prime factor with ``q``."""
    ok = np.ones(np.shape(px), dtype=bool)
    for pi in prime_divisors(qx, qy, D) if primes is None else primes:
        ok &= ~divisible(px, py, pi[0], pi[1], D)
    return ok


def in_sector(x, y, D):
    """Canonical associate test: argument in ``[0, 2pi/|units|)``."""
    t, _, im = ring_data(D)
    re2 = 2 * x + t * y  # twice the real part
    if D == -4:
        return (x > 0) & (y >= 0)
    if D == -8:
        return (x > 0) | ((x == 0) & (y > 0))
    # D = -3: 0 <= arg < pi/3  <=>  im >= 0 and im < sqrt(3) re, i.e. y >= 0 and y < re2/... exactly
    # im = y sqrt(3)/2, re = re2/2: im < sqrt(3) re  <=>  y < re2
    return (y >= 0) & (y < re2)


def canonical_associate(z: ImagQuadInteger) -> ImagQuadInteger:
    from .exactmath.imagquad import units

    for u in units(z.D):
        w = z * u
        if bool(in_sector(int(w.x), int(w.y), z.D)):
            return w
    raise ValueError("zero has no canonical associate")


def ring_elements_in_disc(radius: float, D: int, canonical_only: bool = False):
    """All nonzero ``(x, y)`` with ``|x + y omega| <= radius`` (float bound, inclusive)."""
    t, n, im = ring_data(D)
    ymax = int(math.floor(radius / im + 1e-9)) + 1
    ys = np.arange(-ymax, ymax + 1, dtype=np.int64)
    xs = np.arange(-int(radius) - ymax - 2, int(radius) + ymax + 3, dtype=np.int64)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    X, Y = X.ravel(), Y.ravel()
    N = norm(X, Y, D)
    r2 = radius * radius
    keep = (N > 0) & (N <= r2 * (1 + 1e-12))
    if canonical_only:
        keep &= in_sector(X, Y, D)
    return X[keep], Y[keep]
