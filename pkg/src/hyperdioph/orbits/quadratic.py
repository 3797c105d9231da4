"""Orbits of quadratic irrationals under the modular group, enumerated through
binary quadratic forms."""

from __future__ import annotations

import math
from fractions import Fraction
from math import gcd, isqrt

import numpy as np

from ..errors import UnsupportedInputError
from ..exactmath.forms import (
    BinaryQuadraticForm,
    CycleClass,
    form_of_qi,
    norm_one_unit,
    order_discriminant,
    root_of_form,
)
from ..exactmath.quadratic import (
    RealQuadratic,
    UnimodularMatrix,
    mobius_apply,
    relative_height,
    squarefree_decomposition,
)
from .common import EnumerationResult, run_chunks, sqrt_residues

__all__ = [
    "ORBIT_MODES",
    "enumerate_quad_orbit_by_forms",
    "quad_orbit_oracle",
    "automorph",
    "totally_positive_unit",
    "enumerate_relative_orbit",
    "relative_orbit_oracle",
    "canonical_form_mod_automorph",
]

ORBIT_MODES = ("orbit", "with_conjugates", "positive")


def _class_tests(f0: BinaryQuadraticForm, mode: str):
    if mode not in ORBIT_MODES:
        raise ValueError(f"mode must be one of {ORBIT_MODES}")
    classes = [CycleClass(f0)]
    if mode == "with_conjugates":
        classes.append(CycleClass(-f0))
    return classes


def enumerate_quad_orbit_by_forms(
    alpha0: RealQuadratic,
    s: float,
    trace_window: float | tuple = math.inf,
    mode: str = "orbit",
    workers: int = 1,
) -> EnumerationResult:
    """Elements ``alpha`` of the orbit of ``alpha0`` with ``H(alpha) <= s`` and trace in the window.

    ``mode="orbit"`` gives the homography orbit itself, ``"with_conjugates"``
    adds the Galois conjugates of its elements, and ``"positive"`` keeps only
    orbit elements larger than their conjugate (leading coefficient ``A > 0``).
    """
    f0 = form_of_qi(alpha0)
    D = f0.disc
    classes = _class_tests(f0, mode)
    if isinstance(trace_window, (int, float, Fraction)):
        lo, hi = -float(trace_window), float(trace_window)
    else:
        lo, hi = (float(v) for v in trace_window)
    if math.isinf(lo) or math.isinf(hi):
        raise ValueError("trace window must be bounded")
    sqrtD = math.sqrt(D)
    amax = int(math.floor(s * sqrtD / 2 + 1e-9))
    # H = 2|A|/sqrt(D) <= s, checked exactly as 4 A^2 <= s^2 D when s is rational
    s_frac = Fraction(s)

    def height_ok(a: int) -> bool:
        return 4 * a * a <= s_frac * s_frac * D

    flo, fhi = Fraction(lo), Fraction(hi)

    def chunk(a_values):
        rows = []
        for a in a_values:
            if not height_ok(int(a)):
                continue
            res = sqrt_residues(D, int(a))
            if not res:
                continue
            m = 2 * int(a)
            for sign in (1, -1):
                if mode == "positive" and sign < 0:
                    continue
                A = sign * int(a)
                # trace = -B/A in [lo, hi]
                bl, bh = sorted((-hi * A, -lo * A))
                for r in res:
                    k0 = math.ceil((bl - r) / m) - 1
                    k1 = math.floor((bh - r) / m) + 1
                    for k in range(k0, k1 + 1):
                        B = r + m * k
                        if not flo <= Fraction(-B, A) <= fhi:
                            continue
                        C = (B * B - D) // (4 * A)
                        if gcd(gcd(A, B), C) != 1:
                            continue
                        if any((A, B, C) in cl for cl in classes):
                            rows.append((A, B, C))
        return rows

    a_all = np.arange(1, amax + 1)
    parts = run_chunks(chunk, np.array_split(a_all, max(1, workers)) if amax else [], workers)
    rows = [r for p in parts for r in p]
    arr = np.array(rows, dtype=np.int64).reshape(-1, 3)
    A, B, C = arr[:, 0], arr[:, 1], arr[:, 2]
    vals = (-B + sqrtD) / (2.0 * A)
    H = 2.0 * np.abs(A) / sqrtD
    res = EnumerationResult.build(vals, H, [A, B], data={"A": A, "B": B, "C": C})
    res.data["trace"] = -res.data["B"] / res.data["A"]
    return res


def quad_orbit_oracle(alpha0: RealQuadratic, s: float, trace_window: float, depth: int = 12) -> set[tuple[int, int, int]]:
    """Breadth-first search over words in ``T, T^-1, S`` applied to ``alpha0``.

    Returns the forms ``(A, B, C)`` of the elements found with ``H <= s`` and
    ``|tr| <= trace_window``. Only complete when ``depth`` is large enough.
    """
    gens = [UnimodularMatrix(1, 1, 0, 1), UnimodularMatrix(1, -1, 0, 1), UnimodularMatrix(0, -1, 1, 0)]
    seen = {alpha0}
    frontier = [alpha0]
    for _ in range(depth):
        nxt = []
        for x in frontier:
            for g in gens:
                y = mobius_apply(g, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    out = set()
    for x in seen:
        f = form_of_qi(x)
        if 2 * abs(f.A) <= s * math.sqrt(f.disc) + 1e-12 and abs(Fraction(-f.B, f.A)) <= trace_window:
            out.add(f.coefficients())
    return out


# relative counting ------------------------------------------------------------

def totally_positive_unit(D: int) -> RealQuadratic:
    """Smallest unit ``> 1`` of norm ``+1`` in the order of discriminant ``D``."""
    return norm_one_unit(D)


def automorph(f: BinaryQuadraticForm) -> UnimodularMatrix:
    """Generator of the proper automorphs of ``f`` fixing its distinguished root."""
    D = f.disc
    mu = totally_positive_unit(D)
    # mu = (u + v sqrt(D)) / 2 with integers u, v
    r, _ = squarefree_decomposition(D)
    u, v = int(2 * mu.a), int(2 * mu.b / r)
    A, B, C = f.coefficients()
    return UnimodularMatrix((u - B * v) // 2, -C * v, A * v, (u + B * v) // 2)


def _form_act(g, M):
    """The form ``(x, y) -> g(M (x, y))`` on coefficient triples."""
    A, B, C = g
    a, b, c, d = M
    return (
        A * a * a + B * a * c + C * c * c,
        2 * A * a * b + B * (a * d + b * c) + 2 * C * c * d,
        A * b * b + B * b * d + C * d * d,
    )


def canonical_form_mod_automorph(g: tuple[int, int, int], gamma: UnimodularMatrix) -> tuple[int, int, int]:
    """Smallest ``(|A|, A, B)`` over the orbit of ``g`` under powers of ``gamma``.

    Coefficients grow geometrically along the orbit, so the walk stops once
    they have grown past the best value seen in both directions.
    """
    M = gamma.entries()
    Mi = gamma.inverse().entries()
    best = g
    key = lambda f: (abs(f[0]), f[0], f[1])  # noqa: E731
    for step in (M, Mi):
        cur = g
        worse = 0
        while worse < 4:
            cur = _form_act(cur, step)
            if key(cur) < key(best):
                best = cur
                worse = 0
            else:
                worse += 1
    return best


def enumerate_relative_orbit(
    alpha0: RealQuadratic,
    beta0: RealQuadratic,
    s: float,
    workers: int = 1,
) -> EnumerationResult:
    """Representatives of the orbit of ``beta0`` modulo the stabiliser of ``alpha0``,
    with relative height at most ``s``.

    Each ``beta`` is encoded by its form ``g`` and by ``X = g(alpha0, 1)`` in
    ``Z[alpha0]``. The stabiliser multiplies ``X / X^sigma`` by ``mu^4`` where
    ``mu`` is the norm-one fundamental unit, so one representative satisfies
    ``mu^-2 <= |X / X^sigma| < mu^2``.
    """
    f0 = form_of_qi(alpha0)
    if abs(f0.A) != 1:
        raise UnsupportedInputError("alpha0 must be an integral quadratic irrational")
    order_discriminant(beta0)
    g0 = form_of_qi(beta0)
    D1, D2 = f0.disc, g0.disc
    cls = CycleClass(g0)
    a, b, c = f0.coefficients()
    # alpha0 is the root of x^2 - t x + n (up to the sign of the form)
    if a == 1:
        t, n = -b, c
    else:
        t, n = b, -c
    mu = totally_positive_unit(D1)
    muf = float(mu)
    sq = math.sqrt(D1)
    al, als = float(alpha0), float(alpha0.conjugate())
    n_max = D1 * D2 * s * (s + 1)
    xbound = muf * math.sqrt(n_max) * (1 + 1e-9) + 1
    ybound = 2 * xbound / sq + 1
    delta_max = math.sqrt(D1 * D2) * (2 * s + 1)
    amax = int((2 * xbound + delta_max) / D1) + 2
    sqrtD2 = math.sqrt(D2)
    delta2_max = (2 * Fraction(s) + 1) ** 2 * D1 * D2
    lo_log, hi_log = -2 * math.log(muf), 2 * math.log(muf)

    def chunk(a_values):
        out = []
        for aa in a_values.tolist():
            res = sqrt_residues(D2, aa)
            if not res:
                continue
            m = 2 * aa
            for A in (aa, -aa):
                for r in res:
                    # y = B + A t within [-ybound, ybound]
                    k0 = math.ceil((-ybound - A * t - r) / m)
                    k1 = math.floor((ybound - A * t - r) / m)
                    if k1 < k0:
                        continue
                    Bv = r + m * np.arange(k0, k1 + 1, dtype=np.int64)
                    Cv = (Bv * Bv - D2) // (4 * A)
                    y = Bv + A * t
                    x = Cv - A * n
                    X = x + y * al
                    Xs = x + y * als
                    delta = b * Bv - 2 * a * Cv - 2 * c * A
                    N4 = delta * delta - D1 * D2
                    keep = (N4 != 0) & (delta.astype(float) ** 2 <= float(delta2_max) * (1 + 1e-9) + 1)
                    lr = np.full(X.shape, np.inf)
                    lr[keep] = np.log(np.abs(X[keep])) - np.log(np.abs(Xs[keep]))
                    keep &= (lr >= lo_log - 1e-6) & (lr < hi_log + 1e-6)
                    for B, C, dl, l in zip(Bv[keep].tolist(), Cv[keep].tolist(), delta[keep].tolist(), lr[keep].tolist()):
                        g = (A, B, C)
                        if dl * dl > D1 * D2:
                            if dl * dl > delta2_max:
                                continue
                            h = (abs(dl) / math.sqrt(D1 * D2) - 1.0) / 2.0
                        else:
                            h = relative_height(alpha0, root_of_form(BinaryQuadraticForm(*g)))
                            if h > s:
                                continue
                        if abs(l - lo_log) < 1e-6 or abs(l - hi_log) < 1e-6:
                            if not _exact_canonical(A, B, C, t, n, mu, alpha0):
                                continue
                        if gcd(gcd(A, B), C) != 1 or g not in cls:
                            continue
                        out.append((h, A, B, C))
        return out

    a_all = np.arange(1, amax + 1)
    parts = run_chunks(chunk, np.array_split(a_all, max(1, workers)), workers)
    rows = [r for p in parts for r in p]
    arr = np.array(rows, dtype=float).reshape(-1, 4)
    ints = np.array([r[1:] for r in rows], dtype=np.int64).reshape(-1, 3)
    A, B, C = ints[:, 0], ints[:, 1], ints[:, 2]
    vals = (-B + sqrtD2) / (2.0 * A)
    return EnumerationResult.build(vals, arr[:, 0], [A, B], data={"A": A, "B": B, "C": C})


def _exact_canonical(A, B, C, t, n, mu: RealQuadratic, alpha0: RealQuadratic) -> bool:
    """Exact test of ``mu^-2 <= |X / X^sigma| < mu^2``."""
    X = (C - A * n) + (B + A * t) * alpha0
    Xs = X.conjugate()
    ratio = abs(X / Xs)
    m2 = mu * mu
    return m2.inverse() <= ratio < m2


def relative_orbit_oracle(alpha0: RealQuadratic, beta0: RealQuadratic, s: float, entry_bound: int = 50) -> set:
    """Independent twin: sweep matrices with entries bounded by ``entry_bound``,
    apply them to ``beta0``, filter by the relative height, and identify
    elements differing by a power of the automorph of ``alpha0``."""
    gamma = automorph(form_of_qi(alpha0))
    conj0 = alpha0.conjugate()
    found = set()
    E = entry_bound
    for p in range(-E, E + 1):
        for r in range(0, E + 1):
            if gcd(p, r) != 1:
                continue
            if r == 0 and p != 1:
                continue
            # complete (p, r) to a matrix [[p, q], [r, u]] of determinant 1
            # all completions differ by right translations, which move beta0 within its orbit
            _, x, y = _ext_gcd(p, r)  # p x + r y = 1 -> u = x, q = -y
            for k in range(-E, E + 1):
                q, u = -y + k * p, x + k * r
                if abs(q) > E or abs(u) > E:
                    continue
                beta = mobius_apply(UnimodularMatrix(p, q, r, u), beta0)
                if not isinstance(beta, RealQuadratic) or beta.b == 0:
                    continue
                if beta == alpha0 or beta == conj0:
                    continue
                if relative_height(alpha0, beta) <= s:
                    found.add(form_of_qi(beta).coefficients())
    return {canonical_form_mod_automorph(g, gamma) for g in found}


def _ext_gcd(a: int, b: int):
    if b == 0:
        return (a, 1 if a >= 0 else -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y
