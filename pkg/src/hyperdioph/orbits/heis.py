"""Rational and integral points of the Heisenberg group over Q(i), Q(sqrt-2), Q(sqrt-3)."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .. import _lattice as L
from ..exactmath.imagquad import ImagQuad, ImagQuadInteger, parse_field, ring_data
from ..heisenberg import HeisPoint, HeisRationalPoint, heis_mul
from .common import EnumerationResult, run_chunks

__all__ = [
    "LATTICE_GENERATOR",
    "CENTER_GENERATOR",
    "heis_box",
    "reduce_to_box",
    "reduce_to_box_exact",
    "enumerate_heis_rationals",
    "heis_rationals_oracle",
    "count_integral_heis_ball",
    "integral_heis_ball_oracle",
    "integral_heis_ball_counts",
    "integral_heis_points",
]

# w-projection of the integral points is LATTICE_GENERATOR * O
LATTICE_GENERATOR = {-4: (1, 1), -8: (0, 1), -3: (1, 0)}
# the integral points (w0, 0) are the multiples of CENTER_GENERATOR (purely imaginary)
CENTER_GENERATOR = {-4: (0, 1), -8: (0, 1), -3: (-1, 2)}


def _basis(D):
    """Integer basis vectors (x, y) of the w-lattice: lambda and lambda*omega."""
    lx, ly = LATTICE_GENERATOR[D]
    ox, oy = L.mul(lx, ly, 0, 1, D)
    return (lx, ly), (int(ox), int(oy))


# w-part of the fundamental box is [0, rho) x [0, Im v2) for the lattice basis (rho, v2), rho real
_RECT_BASIS = {-4: ((2, 0), (1, 1)), -8: ((2, 0), (0, 1)), -3: ((1, 0), (0, 1))}


def heis_box(field) -> dict:
    """Fundamental box of the integral points in ``(x, y, t)`` coordinates,
    ``[0, x_period) x [0, y_period) x [0, t_period)``; ``haar`` is its Haar mass."""
    D = parse_field(field)
    (rho, _), (v2x, v2y) = _RECT_BASIS[D]
    h = complex(L.to_complex(v2x, v2y, D)).imag
    gx, gy = CENTER_GENERATOR[D]
    t_period = 2 * complex(L.to_complex(gx, gy, D)).imag
    return {
        "D": D,
        "x_period": float(rho),
        "y_period": h,
        "t_period": t_period,
        "bounds": ((0.0, float(rho)), (0.0, h), (0.0, t_period)),
        "haar": 0.5 * rho * h * t_period,
    }


def _e0(Nb, D):
    """Coordinates of an element of O with real part ``Nb / 2`` (arrays)."""
    Nb = np.asarray(Nb, dtype=np.int64)
    if D == -3:
        odd = Nb % 2
        return (Nb - odd) // 2, odd
    return Nb // 2, np.zeros_like(Nb)


def reduce_to_box(xyt: np.ndarray, field) -> np.ndarray:
    """Map points ``(x, y, t)`` into the fundamental box by integral left translations."""
    D = parse_field(field)
    box = heis_box(D)
    (rho, _), (v2x, v2y) = _RECT_BASIS[D]
    P = np.asarray(xyt, dtype=float).reshape(-1, 3)
    x, y, t = P[:, 0], P[:, 1], P[:, 2]
    k2 = np.floor(y / box["y_period"] + 1e-12).astype(np.int64)
    v2 = complex(L.to_complex(v2x, v2y, D))
    k1 = np.floor((x - k2 * v2.real) / rho + 1e-12).astype(np.int64)
    sx, sy = -(k1 * rho + k2 * v2x), -k2 * v2y  # shift w' in omega-coordinates
    shift = L.to_complex(sx, sy, D)
    w = x + 1j * y
    e0x, e0y = _e0(L.norm(sx, sy, D), D)
    # (w0', w')(w0, w) has central part w0' + w0 + w conj(w')
    t_new = t + 2 * (w * np.conj(shift)).imag + 2 * L.to_complex(e0x, e0y, D).imag
    w_new = w + shift
    tp = box["t_period"]
    t_new = t_new - tp * np.floor(t_new / tp + 1e-12)
    return np.stack([w_new.real, w_new.imag, np.maximum(t_new, 0.0)], axis=1)


def reduce_to_box_exact(p: HeisPoint, D: int) -> HeisPoint:
    """Exact version of :func:`reduce_to_box` for points with coordinates in K."""
    (rho, _), (v2x, v2y) = _RECT_BASIS[D]
    t, _, _ = ring_data(D)
    w = ImagQuad.of(p.w, D)
    k2 = math.floor(w.y / v2y)
    re = w.x + Fraction(t, 2) * w.y - k2 * (v2x + Fraction(t, 2) * v2y)
    k1 = math.floor(re / rho)
    shift = ImagQuadInteger(-(k1 * rho + k2 * v2x), -k2 * v2y, D)
    ex, ey = _e0(np.array([int(shift.norm())]), D)
    q = heis_mul(HeisPoint(ImagQuadInteger(int(ex[0]), int(ey[0]), D), shift), p)
    gx, gy = CENTER_GENERATOR[D]
    k = math.floor(q.w0.y / gy)
    return HeisPoint(q.w0 - ImagQuadInteger(k * gx, k * gy, D), q.w)


def _transversal(cx: int, cy: int, D: int):
    """Representatives of O / (c * lambda * O) in a fundamental parallelogram."""
    (l1x, l1y), (l2x, l2y) = _basis(D)
    v1 = L.mul(cx, cy, l1x, l1y, D)
    v2 = L.mul(cx, cy, l2x, l2y, D)
    v1 = (int(v1[0]), int(v1[1]))
    v2 = (int(v2[0]), int(v2[1]))
    det = v1[0] * v2[1] - v1[1] * v2[0]
    sgn = 1 if det > 0 else -1
    det = abs(det)
    xs = [0, v1[0], v2[0], v1[0] + v2[0]]
    ys = [0, v1[1], v2[1], v1[1] + v2[1]]
    X, Y = np.meshgrid(np.arange(min(xs), max(xs) + 1), np.arange(min(ys), max(ys) + 1), indexing="ij")
    X, Y = X.ravel().astype(np.int64), Y.ravel().astype(np.int64)
    # coordinates times det: u = (x v2y - y v2x), v = (v1x y - v1y x)
    u = sgn * (X * v2[1] - Y * v2[0])
    v = sgn * (v1[0] * Y - v1[1] * X)
    keep = (u >= 0) & (u < det) & (v >= 0) & (v < det)
    return X[keep], Y[keep]


def _rationals_for_c(cx: int, cy: int, D: int):
    N = int(L.norm(cx, cy, D))
    bx, by = _transversal(cx, cy, D)
    Nb = L.norm(bx, by, D)
    if D != -3:
        ok = Nb % 2 == 0
        bx, by, Nb = bx[ok], by[ok], Nb[ok]
    ex, ey = _e0(Nb, D)
    gx, gy = CENTER_GENERATOR[D]
    # c * e0 and c * g
    u0, v0 = L.mul(cx, cy, ex, ey, D)
    u1, v1 = L.mul(cx, cy, gx, gy, D)
    j = np.arange(N, dtype=np.int64)
    U = (u0[:, None] + j[None, :] * u1) % N
    V = (v0[:, None] + j[None, :] * v1) % N
    ib, jj = np.nonzero((U == 0) & (V == 0))
    bx, by = bx[ib], by[ib]
    ex, ey = ex[ib] + jj * gx, ey[ib] + jj * gy
    cex, cey = L.mul(cx, cy, ex, ey, D)
    ax, ay = cex // N, cey // N
    primes = L.prime_divisors(cx, cy, D)
    ok = np.ones(ax.shape, dtype=bool)
    for px, py in primes:
        ok &= ~(L.divisible(ax, ay, px, py, D) & L.divisible(bx, by, px, py, D))
    return ax[ok], ay[ok], bx[ok], by[ok]


def enumerate_heis_rationals(field, s: float, workers: int = 1, exact: bool = False) -> EnumerationResult:
    """One rational point per orbit of the integral points, with height ``|c| <= s``.

    The triples ``(a, b, c)`` are those with ``b`` in a parallelogram transversal
    of ``O / (c lambda O)``; ``values`` holds their ``(x, y, t)`` moved into the
    fundamental box of :func:`heis_box`.
    """
    D = parse_field(field)
    if s < 1:
        return EnumerationResult.build(np.zeros((0, 3)), np.zeros(0), [])
    CX, CY = L.ring_elements_in_disc(s, D, canonical_only=True)

    def chunk(idx):
        out = []
        for i in idx.tolist():
            cx, cy = int(CX[i]), int(CY[i])
            ax, ay, bx, by = _rationals_for_c(cx, cy, D)
            out.append((ax, ay, bx, by, np.full(ax.size, cx), np.full(ax.size, cy)))
        return out

    parts = [x for ch in run_chunks(chunk, np.array_split(np.arange(CX.size), max(1, workers)), workers) for x in ch]
    AX, AY, BX, BY, QX, QY = (np.concatenate([p[k] for p in parts]).astype(np.int64) for k in range(6))
    c = L.to_complex(QX, QY, D)
    w0 = L.to_complex(AX, AY, D) / c
    w = L.to_complex(BX, BY, D) / c
    vals = reduce_to_box(np.stack([w.real, w.imag, 2 * w0.imag], axis=1), D)
    H = np.sqrt(L.norm(QX, QY, D).astype(float))
    ex = None
    if exact:
        ex = [
            HeisRationalPoint(ImagQuadInteger(int(a), int(b), D), ImagQuadInteger(int(x), int(y), D), ImagQuadInteger(int(u), int(v), D))
            for a, b, x, y, u, v in zip(AX, AY, BX, BY, QX, QY)
        ]
    return EnumerationResult.build(
        vals, H, [QX, QY, BX, BY, AX, AY], exact=ex,
        data={"a_x": AX, "a_y": AY, "b_x": BX, "b_y": BY, "c_x": QX, "c_y": QY},
    )


def heis_rationals_oracle(field, s: float, a_bound: float = 40, b_bound: float | None = None) -> set:
    """Brute force: all ``(a, b, c)`` with ``|c| <= s`` and bounded ``|a|, |b|``
    on the Heisenberg group with unit ideal, reduced to the fundamental box."""
    D = parse_field(field)
    t, n, _ = ring_data(D)
    if b_bound is None:
        b_bound = 3 * s + 3
    out = set()
    CX, CY = L.ring_elements_in_disc(s, D)
    BX, BY = L.ring_elements_in_disc(b_bound, D)
    BX, BY = np.append(BX, 0), np.append(BY, 0)
    AX, AY = L.ring_elements_in_disc(a_bound, D)
    AX, AY = np.append(AX, 0), np.append(AY, 0)
    for cx, cy in zip(CX.tolist(), CY.tolist()):
        ccx, ccy = L.conj(cx, cy, D)
        px, py = L.mul(AX, AY, ccx, ccy, D)
        twice_re = 2 * px + t * py  # 2 Re(a conj c)
        Nb = L.norm(BX, BY, D)
        order = np.argsort(twice_re, kind="stable")
        sorted_re = twice_re[order]
        lo = np.searchsorted(sorted_re, Nb, side="left")
        cnt = np.searchsorted(sorted_re, Nb, side="right") - lo
        ib = np.repeat(np.arange(Nb.size), cnt)
        start = np.repeat(np.cumsum(cnt) - cnt, cnt)
        ia = order[np.repeat(lo, cnt) + np.arange(ib.size) - start]
        ax, ay, bx, by = AX[ia], AY[ia], BX[ib], BY[ib]
        ok = np.ones(ax.shape, dtype=bool)
        for px_, py_ in L.prime_divisors(cx, cy, D):
            ok &= ~(L.divisible(ax, ay, px_, py_, D) & L.divisible(bx, by, px_, py_, D))
        ax, ay, bx, by = ax[ok], ay[ok], bx[ok], by[ok]
        cz = complex(L.to_complex(cx, cy, D))
        w0 = L.to_complex(ax, ay, D) / cz
        w = L.to_complex(bx, by, D) / cz
        red = reduce_to_box(np.stack([w.real, w.imag, 2 * w0.imag], axis=1), D)
        # float keys only thin out duplicates; the set below is keyed exactly
        _, first = np.unique(np.round(red, 6), axis=0, return_index=True)
        c = ImagQuadInteger(cx, cy, D)
        for i in first.tolist():
            a = ImagQuadInteger(int(ax[i]), int(ay[i]), D)
            b = ImagQuadInteger(int(bx[i]), int(by[i]), D)
            out.add(reduce_to_box_exact(HeisPoint(a / c, b / c), D))
    return out


# integral points in Cygan balls ------------------------------------------------

def _r4(R: float) -> int:
    """``floor(R^4)``, snapping to an integer within rounding error."""
    v = float(R) ** 4
    k = round(v)
    if abs(v - k) <= 1e-9 * max(1.0, v):
        return int(k)
    return int(math.floor(v))


def _center_weight(D: int) -> int:
    """``4 |x + y omega|^2 - 4 Re^2`` per unit ``y^2`` of the central coordinate."""
    _, _, im = ring_data(D)
    return round(4 * im * im)


def count_integral_heis_ball(R: float, field=-4) -> int:
    """Number of integral points ``(w0, w)`` with Cygan norm at most ``R``.

    For each admissible ``w`` the central coordinate is counted in closed form:
    ``4 |w0|^2 = |w|^4 + k y0^2`` with ``y0`` the omega-coordinate of ``w0``.
    """
    D = parse_field(field)
    R4 = _r4(R)
    if R4 < 0:
        return 0
    k = _center_weight(D)
    (ax, ay), (bx, by) = _basis(D)
    # w = u*lambda + v*lambda*omega; |w|^2 <= R^2
    lam2 = int(L.norm(ax, ay, D))
    rad = math.isqrt(R4) ** 0.5 + 1
    m = int(math.ceil(rad * 2 / math.sqrt(lam2))) + 2
    U, V = np.meshgrid(np.arange(-m, m + 1), np.arange(-m, m + 1), indexing="ij")
    U, V = U.ravel().astype(np.int64), V.ravel().astype(np.int64)
    wx, wy = U * ax + V * bx, U * ay + V * by
    Nw = L.norm(wx, wy, D)
    rem = R4 - Nw * Nw
    rem = rem[rem >= 0]
    Nw_kept = L.norm(wx, wy, D)[R4 - L.norm(wx, wy, D) ** 2 >= 0]
    mx = np.array([math.isqrt(int(r) // k) for r in rem.tolist()], dtype=np.int64)
    if D == -3:
        par = Nw_kept % 2
        cnt = np.where(par == 0, 2 * (mx // 2) + 1, 2 * ((mx + 1) // 2))
    else:
        cnt = 2 * mx + 1
    return int(cnt.sum())


def integral_heis_ball_counts(radii, field=-4) -> list[int]:
    return [count_integral_heis_ball(R, field) for R in radii]


def integral_heis_ball_oracle(R: float, field=-4) -> int:
    """Direct sweep over ``w0, w`` in O with ``|w0| <= R^2/2`` and ``2 Re w0 = |w|^2``."""
    D = parse_field(field)
    R4 = _r4(R)
    t, n, _ = ring_data(D)
    rw0 = math.sqrt(R4) / 2 + 1e-9
    W0x, W0y = L.ring_elements_in_disc(rw0, D)
    W0x, W0y = np.append(W0x, 0), np.append(W0y, 0)
    Wx, Wy = L.ring_elements_in_disc(math.sqrt(2 * rw0), D)
    Wx, Wy = np.append(Wx, 0), np.append(Wy, 0)
    count = 0
    for x0, y0 in zip(W0x.tolist(), W0y.tolist()):
        twice_re = 2 * x0 + t * y0
        N0 = x0 * x0 + t * x0 * y0 + n * y0 * y0
        if 4 * N0 > R4:
            continue
        count += int(np.count_nonzero(L.norm(Wx, Wy, D) == twice_re))
    return count


def integral_heis_points(R: float, field=-4):
    """Coordinates ``(w0x, w0y, wx, wy)`` of all integral points with Cygan norm at most ``R``."""
    D = parse_field(field)
    R4 = _r4(R)
    rw0 = math.sqrt(R4) / 2 + 1e-9
    W0x, W0y = L.ring_elements_in_disc(rw0, D)
    W0x, W0y = np.append(W0x, 0), np.append(W0y, 0)
    Wx, Wy = L.ring_elements_in_disc(math.sqrt(2 * rw0), D)
    Wx, Wy = np.append(Wx, 0), np.append(Wy, 0)
    t, _, _ = ring_data(D)
    twice_re = 2 * W0x + t * W0y
    ok0 = 4 * L.norm(W0x, W0y, D) <= R4
    Nw = L.norm(Wx, Wy, D)
    i, j = np.nonzero(ok0[:, None] & (twice_re[:, None] == Nw[None, :]))
    return W0x[i], W0y[i], Wx[j], Wy[j]
