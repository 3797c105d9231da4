"""The 3-dimensional Heisenberg group, its Cygan gauges, and chains on the
boundary of the complex hyperbolic plane.

A point is a pair ``(w0, w)`` with ``2 Re w0 = |w|^2``. Coordinates may be
Python complex numbers or exact elements of an imaginary quadratic field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate, optimize

from .errors import (
    InfiniteDiameterError,
    InvalidPointError,
    NoCenterError,
    NotAChainError,
    NotOnHypersphereError,
)
from .exactmath.imagquad import ImagQuad, ImagQuadInteger, ring_data
from .exactmath.quadratic import INF

__all__ = [
    "HeisPoint",
    "HEIS_IDENTITY",
    "heis_mul",
    "heis_inv",
    "to_xyt",
    "from_xyt",
    "cygan_norm",
    "cygan_norm4",
    "cygan_dist",
    "mod_cygan_norm",
    "mod_cygan_dist",
    "haar_ball_volume",
    "HERMITIAN_J",
    "hermitian_h",
    "ProjectivePoint",
    "embed_heis",
    "unembed",
    "UnitaryH",
    "heis_translation",
    "heis_rotation",
    "HEIS_INVERSION",
    "Chain",
    "vertical_chain",
    "chain_from_line",
    "chain_through",
    "reflexion_in_line",
    "chain_center",
    "chain_points",
    "chain_diameter",
    "HeisRationalPoint",
]


def _conj(z):
    return z.conjugate()


def _abs2(z):
    if isinstance(z, ImagQuad):
        return z.norm()
    return z.real * z.real + z.imag * z.imag


def _re(z):
    return z.re if isinstance(z, ImagQuad) else z.real


def _im(z) -> float:
    return complex(z).imag


def _is_exact(*zs) -> bool:
    return all(isinstance(z, (ImagQuad, int, Fraction)) for z in zs)


def _promote(*zs):
    """Bring coordinates to a common exact field or to Python complex."""
    exact = [z for z in zs if isinstance(z, ImagQuad)]
    if exact and _is_exact(*zs):
        D = exact[0].D
        return tuple(ImagQuad.of(z, D) for z in zs)
    if not exact and _is_exact(*zs):
        return tuple(ImagQuad.of(z, -4) for z in zs)
    return tuple(complex(z) for z in zs)


@dataclass(frozen=True)
class HeisPoint:
    w0: object
    w: object

    def __post_init__(self):
        w0, w = _promote(self.w0, self.w)
        object.__setattr__(self, "w0", w0)
        object.__setattr__(self, "w", w)
        lhs = 2 * _re(w0)
        rhs = _abs2(w)
        if isinstance(w0, ImagQuad):
            if lhs != rhs:
                raise InvalidPointError(f"2 Re w0 = {lhs} differs from |w|^2 = {rhs}")
        elif not math.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-12):
            raise InvalidPointError(f"2 Re w0 = {lhs} differs from |w|^2 = {rhs}")

    @property
    def exact(self) -> bool:
        return isinstance(self.w0, ImagQuad)

    def numeric(self) -> "HeisPoint":
        return HeisPoint(complex(self.w0), complex(self.w))

    def __mul__(self, other):
        return heis_mul(self, other)


HEIS_IDENTITY = HeisPoint(0j, 0j)


def heis_mul(p: HeisPoint, q: HeisPoint) -> HeisPoint:
    """``(w0, w)(w0', w') = (w0 + w0' + w' conj(w), w + w')``."""
    w0, w, v0, v = _promote(p.w0, p.w, q.w0, q.w)
    return HeisPoint(w0 + v0 + v * _conj(w), w + v)


def heis_inv(p: HeisPoint) -> HeisPoint:
    return HeisPoint(_conj(p.w0), -p.w)


def to_xyt(p: HeisPoint) -> tuple[float, float, float]:
    w0, w = complex(p.w0), complex(p.w)
    return (w.real, w.imag, 2.0 * w0.imag)


def from_xyt(x: float, y: float, t: float) -> HeisPoint:
    return HeisPoint(complex((x * x + y * y) / 2.0, t / 2.0), complex(x, y))


def cygan_norm4(p: HeisPoint):
    """Fourth power of the Cygan norm, ``4 |w0|^2`` (exact on exact points)."""
    return 4 * _abs2(p.w0)


def cygan_norm(p: HeisPoint) -> float:
    return math.sqrt(2.0 * abs(complex(p.w0)))


def cygan_dist(p: HeisPoint, q: HeisPoint) -> float:
    return cygan_norm(heis_mul(heis_inv(q), p))


def mod_cygan_norm(p: HeisPoint) -> float:
    a0 = 2.0 * abs(complex(p.w0))
    if a0 == 0:
        return 0.0
    return a0 / math.sqrt(abs(complex(p.w)) ** 2 + a0)


def mod_cygan_dist(p: HeisPoint, q: HeisPoint) -> float:
    return mod_cygan_norm(heis_mul(heis_inv(q), p))


def haar_ball_volume(R: float) -> float:
    """Haar measure ``(1/2) dx dy dt`` of the Cygan ball of radius ``R``."""
    if R < 0:
        raise ValueError("radius must be nonnegative")
    if R == 0:
        return 0.0
    R4 = R ** 4
    # shells in r = |w|: t ranges over |t| <= sqrt(R^4 - r^4)
    val, _ = integrate.quad(
        lambda r: 0.5 * 2.0 * math.pi * r * 2.0 * math.sqrt(max(R4 - r ** 4, 0.0)),
        0.0, R, epsabs=0.0, epsrel=1e-12, limit=200,
    )
    return val


# projective model -----------------------------------------------------------

HERMITIAN_J = np.array([[0, 0, -1], [0, 1, 0], [-1, 0, 0]], dtype=complex)


def _herm(z, w=None) -> complex:
    """``<z, w> = w^* J z``."""
    if w is None:
        w = z
    return complex(np.conj(w) @ HERMITIAN_J @ z)


def hermitian_h(z) -> float:
    z = np.asarray(z, dtype=complex)
    return float((-z[0] * np.conj(z[2]) - z[2] * np.conj(z[0]) + z[1] * np.conj(z[1])).real)


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    coords: tuple

    def __post_init__(self):
        z = np.asarray(self.coords, dtype=complex)
        nz = np.flatnonzero(np.abs(z) > 1e-300)
        if nz.size == 0:
            raise ValueError("projective point needs a nonzero coordinate")
        z = z / z[nz[-1]]
        object.__setattr__(self, "coords", tuple(complex(c) for c in z))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.coords, dtype=complex)

    def isclose(self, other: "ProjectivePoint", tol: float = 1e-9) -> bool:
        return bool(np.allclose(self.vector, other.vector, atol=tol, rtol=tol))

    def __eq__(self, other):
        return isinstance(other, ProjectivePoint) and self.isclose(other)

    def __hash__(self):
        return hash(tuple(round(c.real, 9) + 1j * round(c.imag, 9) for c in self.coords))


def embed_heis(p) -> ProjectivePoint:
    if p is INF:
        return ProjectivePoint((1, 0, 0))
    return ProjectivePoint((complex(p.w0), complex(p.w), 1))


def unembed(z, tol: float = 1e-9):
    """Inverse of :func:`embed_heis`; returns ``INF`` for ``[1:0:0]``."""
    v = z.vector if isinstance(z, ProjectivePoint) else np.asarray(z, dtype=complex)
    scale = max(np.abs(v).max(), 1.0)
    if abs(hermitian_h(v)) > tol * scale * scale:
        raise NotOnHypersphereError("point is not on the hypersphere")
    if abs(v[2]) <= tol * scale:
        return INF
    w0, w = v[0] / v[2], v[1] / v[2]
    # re-impose the constraint to absorb rounding
    return HeisPoint(complex(abs(w) ** 2 / 2, w0.imag), w)


class UnitaryH:
    """Element of the projective unitary group of the form ``h``."""

    def __init__(self, matrix, tol: float = 1e-10):
        g = np.array(matrix, dtype=complex)
        if g.shape != (3, 3):
            raise ValueError("expected a 3x3 matrix")
        lhs = g.conj().T @ HERMITIAN_J @ g
        c = lhs[0, 2] / HERMITIAN_J[0, 2]
        if not (abs(c.imag) <= tol * abs(c) and c.real > 0 and np.allclose(lhs, c * HERMITIAN_J, atol=tol * abs(c))):
            raise ValueError("matrix does not preserve the Hermitian form")
        self.matrix = g

    def __matmul__(self, other: "UnitaryH") -> "UnitaryH":
        return UnitaryH(self.matrix @ other.matrix)

    def inverse(self) -> "UnitaryH":
        return UnitaryH(np.linalg.inv(self.matrix))

    def fixes_infinity(self, tol: float = 1e-12) -> bool:
        return abs(self.matrix[1, 0]) <= tol and abs(self.matrix[2, 0]) <= tol

    def apply(self, x):
        """Act on a projective point, a Heisenberg point or ``INF``, or a chain."""
        if isinstance(x, ProjectivePoint):
            return ProjectivePoint(tuple(self.matrix @ x.vector))
        if isinstance(x, Chain):
            return Chain(x.line @ np.linalg.inv(self.matrix))
        if x is INF or isinstance(x, HeisPoint):
            return unembed(self.matrix @ embed_heis(x).vector)
        raise TypeError(f"cannot act on {type(x).__name__}")

    __call__ = apply


def heis_translation(p: HeisPoint) -> UnitaryH:
    """Left translation by ``p = (a0, a)`` on the Heisenberg group."""
    a0, a = complex(p.w0), complex(p.w)
    return UnitaryH([[1, a.conjugate(), a0], [0, 1, a], [0, 0, 1]])


def heis_rotation(u: complex) -> UnitaryH:
    """``(w0, w) -> (w0, u w)`` for a unit ``u``."""
    return UnitaryH(np.diag([1, complex(u), 1]))


HEIS_INVERSION = UnitaryH([[0, 0, 1], [0, -1, 0], [1, 0, 0]])


# chains -----------------------------------------------------------------------

class Chain:
    """Chain given by the projective line ``{z : line . z = 0}``."""

    def __init__(self, line):
        ell = np.asarray(line, dtype=complex)
        if ell.shape != (3,) or not np.any(np.abs(ell) > 0):
            raise ValueError("line needs a nonzero dual vector")
        ell = ell / ell[np.flatnonzero(np.abs(ell) > 1e-300)[0]]
        basis = _line_basis(ell)
        G = np.array([[_herm(b, a) for b in basis] for a in basis])
        det = (G[0, 0] * G[1, 1] - G[0, 1] * G[1, 0]).real
        scale = max(np.abs(G).max(), 1e-300) ** 2
        if det >= -1e-12 * scale:
            raise NotAChainError("line meets the hypersphere in at most one point")
        self.line = ell
        self.is_finite = abs(ell[0]) > 1e-12 * np.abs(ell).max()

    def __repr__(self):
        return f"Chain(line={np.round(self.line, 12).tolist()})"

    def contains(self, p, tol: float = 1e-9) -> bool:
        v = embed_heis(p).vector
        return abs(self.line @ v) <= tol * max(1.0, np.abs(v).max())

    def same_as(self, other: "Chain", tol: float = 1e-9) -> bool:
        return bool(np.allclose(self.line, other.line, atol=tol, rtol=tol))


def _line_basis(ell: np.ndarray) -> list[np.ndarray]:
    """Two independent vectors spanning the kernel of ``z -> ell . z``."""
    _, _, vh = np.linalg.svd(ell.reshape(1, 3))
    return [vh[1].conj(), vh[2].conj()]


def chain_from_line(p: ProjectivePoint, q: ProjectivePoint) -> Chain:
    """Chain on the projective line through two distinct points."""
    ell = np.cross(p.vector, q.vector)
    if not np.any(np.abs(ell) > 1e-14):
        raise ValueError("points do not span a line")
    return Chain(ell)


def chain_through(p: HeisPoint, q: HeisPoint) -> Chain:
    return chain_from_line(embed_heis(p), embed_heis(q))


def vertical_chain(w: complex) -> Chain:
    """Fiber over ``w`` together with the point at infinity."""
    return Chain((0, 1, -complex(w)))


def _polar(ell: np.ndarray) -> np.ndarray:
    return HERMITIAN_J @ ell.conj()


def reflexion_in_line(chain: Chain) -> UnitaryH:
    """Order-two unitary map fixing the line of ``chain`` pointwise."""
    n = _polar(chain.line)
    nn = _herm(n)
    R = np.eye(3, dtype=complex) - 2.0 * np.outer(n, n.conj() @ HERMITIAN_J) / nn
    return UnitaryH(R)


def chain_center(chain: Chain) -> HeisPoint:
    if not chain.is_finite:
        raise NoCenterError("chain through infinity has no center")
    return reflexion_in_line(chain).apply(INF)


def _orthonormal_pair(chain: Chain):
    """``f+`` and ``f-`` on the line with ``h = +1, -1`` and orthogonal."""
    a, b = _line_basis(chain.line)
    basis = (a, b)
    G = np.array([[_herm(bj, bi) for bj in basis] for bi in basis])
    lam, vec = np.linalg.eigh(G)  # lam[0] < 0 < lam[1] on a chain
    fm = (vec[0, 0] * a + vec[1, 0] * b) / math.sqrt(-lam[0])
    fp = (vec[0, 1] * a + vec[1, 1] * b) / math.sqrt(lam[1])
    return fp, fm


def chain_points(chain: Chain, thetas) -> list[HeisPoint]:
    """Points of a finite chain parametrised by angles."""
    if not chain.is_finite:
        raise InfiniteDiameterError("chain through infinity is unbounded")
    fp, fm = _orthonormal_pair(chain)
    out = []
    for th in np.atleast_1d(thetas):
        v = fm + np.exp(1j * th) * fp
        out.append(unembed(v / v[2]))
    return out


def _pair_gauge(chain: Chain, gauge: str):
    """Vectorised gauge distance between the chain points at angles ``th1, th2``."""
    fp, fm = _orthonormal_pair(chain)

    def point(th):
        v = fm[:, None] + np.exp(1j * np.asarray(th, dtype=float))[None, :] * fp[:, None]
        v = v / v[2]
        return v[0], v[1]

    def f(th1, th2):
        a0, a = point(np.atleast_1d(th1))
        b0, b = point(np.atleast_1d(th2))
        # (b^-1 a) has central part conj(b0) + a0 - a conj(b)
        d0 = np.conj(b0)[None, :] + a0[:, None] - a[:, None] * np.conj(b)[None, :]
        d2 = np.abs(a[:, None] - b[None, :]) ** 2
        mod0 = np.hypot(d2 / 2, d0.imag)
        if gauge == "cygan":
            return np.sqrt(2 * mod0)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(mod0 > 0, 2 * mod0 / np.sqrt(d2 + 2 * mod0), 0.0)

    return f


def chain_diameter(chain: Chain, gauge: str = "cygan", samples: int = 256) -> float:
    """Largest gauge distance between two points of a finite chain: grid search
    followed by a Nelder-Mead polish."""
    if gauge not in ("cygan", "modCygan", "mod_cygan"):
        raise ValueError(f"unknown gauge {gauge!r}")
    if not chain.is_finite:
        raise InfiniteDiameterError("chain through infinity is unbounded")
    gauge = "cygan" if gauge == "cygan" else "modCygan"
    f = _pair_gauge(chain, gauge)
    th = np.linspace(0.0, 2 * math.pi, samples, endpoint=False)
    vals = f(th, th)
    i, j = np.unravel_index(np.argmax(vals), vals.shape)
    res = optimize.minimize(
        lambda v: -float(f(v[0], v[1])[0, 0]),
        x0=[th[i], th[j]],
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000},
    )
    return max(float(-res.fun), float(vals[i, j]))


# rational points ---------------------------------------------------------------

@dataclass(frozen=True)
class HeisRationalPoint:
    """The point ``(a/c, b/c)`` with ``a, b, c`` ring integers generating the unit ideal."""

    a: ImagQuadInteger
    b: ImagQuadInteger
    c: ImagQuadInteger

    def __post_init__(self):
        if not self.c:
            raise InvalidPointError("c must be nonzero")
        # 2 Re(a conj c) = |b|^2
        if 2 * (self.a * self.c.conjugate()).re != self.b.norm():
            raise InvalidPointError("(a/c, b/c) is not on the Heisenberg group")

    @property
    def D(self) -> int:
        return self.c.D

    @property
    def height(self) -> Fraction:
        """``|c|^2``."""
        return self.c.norm()

    def point(self) -> HeisPoint:
        return HeisPoint(self.a / self.c, self.b / self.c)
