"""Best-effort enumeration of the orbit of a chain under the integral unitary group.

Chains are handled through primitive integral line vectors ``l`` (the chain
is ``{z : l . z = 0}``); ``g`` sends ``l`` to ``l g^-1``. Orbits are taken
modulo the stabiliser of infinity (integral translations and unit rotations).

For a primitive ``l`` the integer ``m = |l1|^2 - 2 Re(l0 conj(l2))`` is an
orbit invariant and a finite chain has radius ``sqrt(m / N(l0))``, so its
Cygan diameter is ``2 r`` and its modified Cygan diameter ``sqrt(2) r``.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from .. import _lattice as L
from ..errors import NotAChainError
from ..exactmath.imagquad import ImagQuad, parse_field, ring_data, units
from ..heisenberg import Chain
from .common import EnumerationResult
from .heis import CENTER_GENERATOR, _basis, _e0, integral_heis_points

__all__ = ["integral_line", "line_invariant", "chain_radius", "canonical_line", "enumerate_chains", "lines_to_chains"]


def _elem(v, D):
    """Coordinates of one entry given as int, complex, ``(x, y)`` or ImagQuad."""
    if isinstance(v, ImagQuad):
        if not v.is_integral():
            raise ValueError("line entries must be integral")
        return int(v.x), int(v.y)
    if isinstance(v, tuple):
        return int(v[0]), int(v[1])
    z = complex(v)
    t, _, im = ring_data(D)
    y = z.imag / im
    x = z.real - t * y / 2
    rx, ry = round(x), round(y)
    if abs(rx - x) > 1e-9 or abs(ry - y) > 1e-9:
        raise ValueError(f"{v!r} is not an integer of the field")
    return int(rx), int(ry)


def integral_line(chain, field=-4, max_scale: int = 1000) -> tuple[int, ...]:
    """Primitive integral line vector as 6 ints ``(l0x, l0y, l1x, l1y, l2x, l2y)``."""
    D = parse_field(field)
    if isinstance(chain, Chain):
        ell = chain.line
        for k in range(1, max_scale + 1):
            try:
                v = [_elem(k * e, D) for e in ell]
                break
            except ValueError:
                continue
        else:
            raise ValueError("chain has no integral line vector of moderate size")
    else:
        v = [_elem(e, D) for e in chain]
    from ..exactmath.imagquad import ImagQuadInteger, gcd_ideal

    elems = [ImagQuadInteger(x, y, D) for x, y in v]
    g = gcd_ideal(*[e for e in elems if e]) if any(elems) else None
    if g is None:
        raise ValueError("zero line vector")
    elems = [e / g for e in elems]
    out = tuple(int(c) for e in elems for c in (e.x, e.y))
    Chain(_to_complex_line(np.array([out]), D)[0])  # raises when not a chain
    return _normalize_units(np.array([out], dtype=np.int64), D)[0].tolist()


def _to_complex_line(V, D):
    return np.stack([L.to_complex(V[:, 2 * k], V[:, 2 * k + 1], D) for k in range(3)], axis=1)


def line_invariant(V, D) -> np.ndarray:
    """``|l1|^2 - 2 Re(l0 conj(l2))`` for rows of ``V``."""
    t, _, _ = ring_data(D)
    V = np.atleast_2d(V)
    cx, cy = L.conj(V[:, 4], V[:, 5], D)
    ex, ey = L.mul(V[:, 0], V[:, 1], cx, cy, D)
    return L.norm(V[:, 2], V[:, 3], D) - (2 * ex + t * ey)


def chain_radius(V, D) -> np.ndarray:
    V = np.atleast_2d(V)
    n0 = L.norm(V[:, 0], V[:, 1], D).astype(float)
    with np.errstate(divide="ignore"):
        return np.sqrt(line_invariant(V, D) / n0)


# stabiliser of infinity acting on line vectors --------------------------------

def _translate(V, a0x, a0y, ax, ay, D):
    """Line of the chain translated by the integral point ``(a0, a)``."""
    l0x, l0y, l1x, l1y, l2x, l2y = (V[:, k] for k in range(6))
    cax, cay = L.conj(ax, ay, D)
    c0x, c0y = L.conj(a0x, a0y, D)
    px, py = L.mul(l0x, l0y, cax, cay, D)
    n1x, n1y = l1x - px, l1y - py
    qx, qy = L.mul(l0x, l0y, c0x, c0y, D)
    rx, ry = L.mul(l1x, l1y, ax, ay, D)
    n2x, n2y = qx - rx + l2x, qy - ry + l2y
    return np.stack([l0x, l0y, n1x, n1y, n2x, n2y], axis=1)


def _rotate(V, ux, uy, D):
    cx, cy = L.conj(ux, uy, D)
    x, y = L.mul(V[:, 2], V[:, 3], cx, cy, D)
    W = V.copy()
    W[:, 2], W[:, 3] = x, y
    return W


def _inversion(V):
    return np.stack([V[:, 4], V[:, 5], -V[:, 2], -V[:, 3], V[:, 0], V[:, 1]], axis=1)


def _normalize_units(V, D):
    """Scale each row by the unit making its first nonzero entry canonical."""
    V = V.copy()
    first = np.where((V[:, 0] != 0) | (V[:, 1] != 0), 0, np.where((V[:, 2] != 0) | (V[:, 3] != 0), 1, 2))
    fx = V[np.arange(len(V)), 2 * first]
    fy = V[np.arange(len(V)), 2 * first + 1]
    done = np.zeros(len(V), dtype=bool)
    out = V.copy()
    for u in units(D):
        ux, uy = int(u.x), int(u.y)
        gx, gy = L.mul(fx, fy, ux, uy, D)
        hit = ~done & L.in_sector(gx, gy, D)
        for k in range(3):
            x, y = L.mul(V[hit, 2 * k], V[hit, 2 * k + 1], ux, uy, D)
            out[hit, 2 * k], out[hit, 2 * k + 1] = x, y
        done |= hit
    return out


def _reduce_translation(V, D):
    """Translate so that the center (finite chains) or the vertical axis lies in the
    fundamental box of the integral points."""
    V = _normalize_units(V, D)
    (v1x, v1y), (v2x, v2y) = _basis(D)
    det = v1x * v2y - v1y * v2x
    finite = (V[:, 0] != 0) | (V[:, 1] != 0)
    # w (center or axis) = num / den with num in O and den > 0
    lead_x = np.where(finite, V[:, 0], V[:, 2])
    lead_y = np.where(finite, V[:, 1], V[:, 3])
    den = L.norm(lead_x, lead_y, D)
    tail_x = np.where(finite, V[:, 2], V[:, 4])
    tail_y = np.where(finite, V[:, 3], V[:, 5])
    # finite: w = -conj(l1)/conj(l0) = -conj(l1) l0 / N(l0); infinite: w = -l2/l1 = -l2 conj(l1) / N(l1)
    c1x, c1y = L.conj(tail_x, tail_y, D)
    fx, fy = L.mul(c1x, c1y, lead_x, lead_y, D)
    clx, cly = L.conj(lead_x, lead_y, D)
    ix, iy = L.mul(tail_x, tail_y, clx, cly, D)
    nx, ny = -np.where(finite, fx, ix), -np.where(finite, fy, iy)
    ku = np.floor_divide(nx * v2y - ny * v2x, det * den) if det > 0 else np.floor_divide(-(nx * v2y - ny * v2x), -det * den)
    kv = np.floor_divide(v1x * ny - v1y * nx, det * den) if det > 0 else np.floor_divide(-(v1x * ny - v1y * nx), -det * den)
    sx, sy = -(ku * v1x + kv * v2x), -(ku * v1y + kv * v2y)
    e0x, e0y = _e0(L.norm(sx, sy, D), D)
    V = _translate(V, e0x, e0y, sx, sy, D)
    # center height: Im-coordinate of w0 is E_y / N(l0) with E = l0 conj(l2)
    gx, gy = CENTER_GENERATOR[D]
    c2x, c2y = L.conj(V[:, 4], V[:, 5], D)
    _, Ey = L.mul(V[:, 0], V[:, 1], c2x, c2y, D)
    n0 = np.where(finite, L.norm(V[:, 0], V[:, 1], D), 1)
    k = np.where(finite, np.floor_divide(Ey, gy * n0), 0)
    zero = np.zeros_like(k)
    return _translate(V, -k * gx, -k * gy, zero, zero, D)


def canonical_line(V, D) -> np.ndarray:
    """Representative of each row modulo the stabiliser of infinity: the
    lexicographically least reduced line over all unit rotations."""
    V = np.atleast_2d(np.asarray(V, dtype=np.int64))
    cands = []
    for u in units(D):
        W = _rotate(V, int(u.x), int(u.y), D)
        cands.append(_reduce_translation(W, D))
    C = np.stack(cands, axis=1)  # rows x units x 6
    out = np.empty_like(V)
    for i in range(len(V)):
        rows = C[i]
        order = np.lexsort(rows.T[::-1])
        out[i] = rows[order[0]]
    return out


def _measure(V, D):
    finite = (V[:, 0] != 0) | (V[:, 1] != 0)
    return np.where(finite, L.norm(V[:, 0], V[:, 1], D), L.norm(V[:, 2], V[:, 3], D))


def enumerate_chains(C0, eps: float, budget: int | None = None, field=-4, reach: float | None = None) -> EnumerationResult:
    """Chains in the orbit of ``C0`` with modified Cygan diameter ``>= eps``, one
    per class modulo the stabiliser of infinity.

    The search walks the orbit by inversions composed with integral translations
    of Cygan norm at most ``reach``, visiting only lines with ``N(l0) <= budget``
    (``N(l1)`` for chains through infinity). Completeness is not certified, so
    the result is always flagged as truncated. ``heights`` are ``1/diameter``.
    """
    D = parse_field(field)
    start = np.array([integral_line(C0, D)], dtype=np.int64)
    m = int(line_invariant(start, D)[0])
    if m <= 0:
        raise NotAChainError("line does not define a chain")
    # modified Cygan diameter sqrt(2 m / N(l0)) >= eps  <=>  N(l0) <= 2 m / eps^2
    need = int(math.floor(2 * m / (eps * eps) * (1 + 1e-12)))
    if budget is None:
        budget = need
    if reach is None:
        reach = 2.0 + budget ** 0.25
    P = integral_heis_points(reach, D)
    U = [(int(u.x), int(u.y)) for u in units(D)]

    seen = {tuple(canonical_line(start, D)[0].tolist())}
    queue = deque(seen)
    while queue:
        cur = np.array([queue.popleft()], dtype=np.int64)
        nb = []
        for ux, uy in U:
            R = _rotate(cur, ux, uy, D)
            R = np.repeat(R, P[0].size, axis=0)
            nb.append(_inversion(_translate(R, *P, D)))
        nb = np.concatenate(nb)
        nb = nb[_measure(nb, D) <= budget]
        if not len(nb):
            continue
        nb = np.unique(canonical_line(np.unique(nb, axis=0), D), axis=0)
        for row in map(tuple, nb.tolist()):
            if row not in seen:
                seen.add(row)
                queue.append(row)

    V = np.array(sorted(seen), dtype=np.int64)
    finite = (V[:, 0] != 0) | (V[:, 1] != 0)
    V = V[finite]
    n0 = L.norm(V[:, 0], V[:, 1], D)
    V = V[n0 <= need]
    diam = math.sqrt(2.0) * chain_radius(V, D) if len(V) else np.zeros(0)
    centers = _centers(V, D)
    return EnumerationResult.build(
        centers, 1.0 / diam if len(V) else np.zeros(0), [V[:, k] for k in range(6)],
        data={"l0_x": V[:, 0], "l0_y": V[:, 1], "l1_x": V[:, 2], "l1_y": V[:, 3], "l2_x": V[:, 4], "l2_y": V[:, 5], "diameter": diam},
        truncated=True,
    )


def _centers(V, D):
    """``(x, y, t)`` of the centers of finite chains."""
    if not len(V):
        return np.zeros((0, 3))
    l0 = L.to_complex(V[:, 0], V[:, 1], D)
    l1 = L.to_complex(V[:, 2], V[:, 3], D)
    l2 = L.to_complex(V[:, 4], V[:, 5], D)
    w = -np.conj(l1) / np.conj(l0)
    t = 2 * (l0 * np.conj(l2)).imag / np.abs(l0) ** 2
    return np.stack([w.real, w.imag, t], axis=1)


def lines_to_chains(result: EnumerationResult, field=-4) -> list[Chain]:
    D = parse_field(field)
    cols = ["l0_x", "l0_y", "l1_x", "l1_y", "l2_x", "l2_y"]
    V = np.stack([result.data[c] for c in cols], axis=1) if result.count else np.zeros((0, 6), dtype=np.int64)
    return [Chain(row) for row in _to_complex_line(V, D)]
