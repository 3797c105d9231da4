"""Farey fractions and imaginary quadratic rationals of bounded height."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .. import _lattice as L
from ..exactmath.imagquad import ImagQuad, ImagQuadInteger, egcd, parse_field, units
from .common import EnumerationResult, run_chunks

__all__ = [
    "enumerate_farey",
    "farey_oracle",
    "totient_sum_count",
    "enumerate_imagquad_rationals",
    "imagquad_rationals_oracle",
]


def enumerate_farey(s: float, window=(0, 1), workers: int = 1) -> EnumerationResult:
    """Reduced fractions ``p/q`` in the closed window with ``1 <= q <= s``."""
    lo, hi = Fraction(window[0]), Fraction(window[1])
    if lo > hi:
        raise ValueError("empty window")
    qmax = int(math.floor(s + 1e-12))

    def chunk(qs):
        ps, qq = [], []
        for q in qs:
            p0 = -((-lo.numerator * q) // lo.denominator)  # ceil(lo q)
            p1 = (hi.numerator * q) // hi.denominator
            if p1 < p0:
                continue
            p = np.arange(p0, p1 + 1, dtype=np.int64)
            p = p[np.gcd(p, q) == 1]
            ps.append(p)
            qq.append(np.full(p.size, q, dtype=np.int64))
        if not ps:
            return np.zeros(0, np.int64), np.zeros(0, np.int64)
        return np.concatenate(ps), np.concatenate(qq)

    qs = np.arange(1, qmax + 1)
    parts = run_chunks(chunk, np.array_split(qs, max(1, workers)) if qmax else [], workers)
    if parts:
        p = np.concatenate([a for a, _ in parts])
        q = np.concatenate([b for _, b in parts])
    else:
        p = q = np.zeros(0, np.int64)
    return EnumerationResult.build(p / np.maximum(q, 1), q, [p], data={"p": p, "q": q})


def farey_oracle(s: float, window=(0, 1)) -> set[Fraction]:
    lo, hi = Fraction(window[0]), Fraction(window[1])
    out = set()
    for q in range(1, int(math.floor(s + 1e-12)) + 1):
        for p in range(math.floor(lo * q) - 1, math.ceil(hi * q) + 2):
            x = Fraction(p, q)
            if lo <= x <= hi:
                out.add(x)
    return out


def totient_sum_count(s: int) -> int:
    """``1 + sum_{q <= s} phi(q)`` via a totient sieve."""
    s = int(s)
    phi = np.arange(s + 1, dtype=np.int64)
    for p in range(2, s + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return int(1 + phi[1:].sum())


# imaginary quadratic rationals -----------------------------------------------

def enumerate_imagquad_rationals(field, s: float, box=(0, 1, 0, 1), workers: int = 1) -> EnumerationResult:
    """``p/q`` in the closed box ``[x0, x1] x [y0, y1]`` with ``p, q`` coprime ring
    integers, ``0 < |q| <= s``, and ``q`` the canonical associate."""
    D = parse_field(field)
    x0, x1, y0, y1 = (float(v) for v in box)
    if x0 > x1 or y0 > y1:
        raise ValueError("empty box")
    if s < 1:
        return EnumerationResult.build(np.zeros(0, complex), np.zeros(0), [])
    t, n, im = L.ring_data(D)
    QX, QY = L.ring_elements_in_disc(s, D, canonical_only=True)
    tol = 1e-12 * max(1.0, abs(x0), abs(x1), abs(y0), abs(y1))
    corners = np.array([complex(a, b) for a in (x0, x1) for b in (y0, y1)])

    def one(qx: int, qy: int):
        qc = complex(L.to_complex(qx, qy, D))
        img = corners * qc
        # p = a + b omega with complex value (a + t b / 2) + i b im
        bmin = math.floor(img.imag.min() / im) - 1
        bmax = math.ceil(img.imag.max() / im) + 1
        bs = np.arange(bmin, bmax + 1, dtype=np.int64)
        amin = math.floor(img.real.min() - 0.5 * t * bmax) - 2
        amax = math.ceil(img.real.max() - 0.5 * t * bmin) + 2
        as_ = np.arange(min(amin, amax), max(amin, amax) + 1, dtype=np.int64)
        A, B = np.meshgrid(as_, bs, indexing="ij")
        A, B = A.ravel(), B.ravel()
        z = L.to_complex(A, B, D) / qc
        keep = (z.real >= x0 - tol) & (z.real <= x1 + tol) & (z.imag >= y0 - tol) & (z.imag <= y1 + tol)
        A, B, z = A[keep], B[keep], z[keep]
        ok = L.coprime_to(A, B, int(qx), int(qy), D)
        A, B, z = A[ok], B[ok], z[ok]
        return A, B, np.full(A.size, qx), np.full(A.size, qy), z

    def chunk(idx):
        return [one(QX[i], QY[i]) for i in idx]

    idx = np.arange(QX.size)
    parts = [p for ch in run_chunks(chunk, np.array_split(idx, max(1, workers)), workers) for p in ch]
    if parts:
        PA, PB, QA, QB, Z = (np.concatenate([p[k] for p in parts]) for k in range(5))
    else:
        PA = PB = QA = QB = np.zeros(0, np.int64)
        Z = np.zeros(0, complex)
    H = np.sqrt(L.norm(QA, QB, D).astype(float))
    return EnumerationResult.build(
        Z, H, [QA, QB, PA, PB], data={"p_x": PA, "p_y": PB, "q_x": QA, "q_y": QB}
    )


def _canonical_fraction(p: ImagQuadInteger, q: ImagQuadInteger):
    g = egcd(p, q)[0] if p else q
    p, q = p / g, q / g
    for u in units(q.D):
        qu = q * u
        if bool(L.in_sector(int(qu.x), int(qu.y), q.D)):
            return (p * u, qu)
    raise AssertionError("no canonical associate")  # pragma: no cover


def imagquad_rationals_oracle(field, s: float, box=(0, 1, 0, 1), p_bound: float | None = None) -> set:
    """Brute force over all ``p, q`` with ``|q| <= s``; returns canonical ``(p, q)`` pairs."""
    D = parse_field(field)
    x0, x1, y0, y1 = box
    t, n, im = L.ring_data(D)
    if p_bound is None:
        p_bound = s * math.hypot(max(abs(x0), abs(x1)), max(abs(y0), abs(y1))) + 1
    out = set()
    eps = 1e-12
    qs = L.ring_elements_in_disc(s, D)
    ps = L.ring_elements_in_disc(p_bound, D)
    plist = [(0, 0)] + list(zip(ps[0].tolist(), ps[1].tolist()))
    for qx, qy in zip(qs[0].tolist(), qs[1].tolist()):
        q = ImagQuadInteger(qx, qy, D)
        qc = complex(q)
        for px, py in plist:
            z = complex(ImagQuadInteger(px, py, D)) / qc
            if x0 - eps <= z.real <= x1 + eps and y0 - eps <= z.imag <= y1 + eps:
                pp, qq = _canonical_fraction(ImagQuadInteger(px, py, D), q)
                out.add(((int(pp.x), int(pp.y)), (int(qq.x), int(qq.y))))
    return out
