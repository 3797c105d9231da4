"""Approximation constants and exponents of real targets by countable families.

A family is a dense countable set ``Z`` of reals with a height ``H``. For a
target ``y`` the finite-height records are

* constant: ``min {H(z) |y - z| : H(z) <= s}`` (nonincreasing in ``s``),
* exponent: ``max {-log|y - z| / log H(z) : 1 < H(z) <= s}`` (nondecreasing).

Both only estimate the liminf / limsup: the record at ``sMax`` bounds the
heights processed so far and nothing more. Small heights dominate the plain
records, so both functions accept ``h_min`` to restrict to a tail of heights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np

from .errors import DegenerateInputError, EmptyInputError
from .exactmath.forms import CycleClass, form_of_qi, is_reduced
from .exactmath.quadratic import RealQuadratic
from .orbits.common import sqrt_residues

__all__ = [
    "ApproximationRecord",
    "RationalFamily",
    "QuadOrbitFamily",
    "approx_constant_record",
    "approx_exponent_record",
    "well_approximable_count",
    "well_approximable_oracle",
    "hurwitz_check",
    "HurwitzReport",
    "cf_constant_oracle",
    "HURWITZ_CONSTANT_ORBIT",
]

# largest approximation constant for the orbit of the golden ratio with height 2/|a - a'|
HURWITZ_CONSTANT_ORBIT = 3 / math.sqrt(5) - 1


@dataclass
class ApproximationRecord:
    target: float
    kind: str  # "constant" or "exponent"
    entries: list = field(default_factory=list)  # (s, record value)

    @property
    def final_estimate(self) -> float:
        if not self.entries:
            return math.inf if self.kind == "constant" else -math.inf
        return self.entries[-1][1]


# high-precision targets ----------------------------------------------------------

def _mp(y):
    with mpmath.workdps(50):
        if isinstance(y, RealQuadratic):
            return y.to_mpf(50)
        if isinstance(y, Fraction):
            return mpmath.mpf(y.numerator) / y.denominator
        return mpmath.mpf(y)


def _split(y) -> tuple[float, float, float]:
    """``y = y1 + y2 + y3`` with ``y1, y2`` carrying 26 bits each, so that
    ``q * y1`` and ``q * y2`` are exact for ``q < 2**27``."""
    with mpmath.workdps(50):
        v = _mp(y)
        parts = []
        for _ in range(2):
            if v == 0:
                parts.append(0.0)
                continue
            e = int(mpmath.floor(mpmath.log(abs(v), 2)))
            scale = mpmath.mpf(2) ** (e - 25)
            head = mpmath.floor(v / scale) * scale
            parts.append(float(head))
            v = v - head
        parts.append(float(v))
    return parts[0], parts[1], parts[2]


def _rational_target(y) -> bool:
    return isinstance(y, (int, Fraction)) or (isinstance(y, RealQuadratic) and y.b == 0)


# families -----------------------------------------------------------------------

@dataclass(frozen=True)
class RationalFamily:
    """Rationals ``p/q`` in lowest terms with height ``q ** power``; ``window``
    restricts the family for counting (records ignore it when ``None``)."""

    power: int = 2
    window: tuple | None = None

    def height_bound(self, s: float) -> int:
        return int(math.floor(s ** (1.0 / self.power) * (1 + 1e-12)))

    def candidates(self, y, s: float):
        """Best approximant for each denominator: arrays ``(H, H*d, d)``."""
        if _rational_target(y):
            raise DegenerateInputError("target is rational, hence in the family")
        Q = self.height_bound(s)
        q = np.arange(1, Q + 1, dtype=np.float64)
        y1, y2, y3 = _split(y)
        a = q * y1
        b = q * y2
        p = np.round(a + b)
        # |q y - p| without cancellation: q*y1 - p is exact
        r = np.abs((a - p) + b + q * y3)
        if self.window is not None:
            lo, hi = self.window
            inside = (p / q >= lo) & (p / q <= hi)
            q, r = q[inside], r[inside]
        if np.any(r == 0):
            raise DegenerateInputError("target coincides with a rational of the family")
        H = q ** self.power
        d = r / q
        return H, H * d, d

    def all_in_window(self, s: float):
        """``(value, height)`` of every family member in the window (for counting)."""
        if self.window is None:
            raise ValueError("counting needs a bounded window")
        lo, hi = self.window
        Q = self.height_bound(s)
        vals, hs = [], []
        for q in range(1, Q + 1):
            p = np.arange(math.ceil(lo * q), math.floor(hi * q) + 1)
            p = p[np.gcd(p, q) == 1]
            vals.append(p / q)
            hs.append(np.full(p.size, float(q) ** self.power))
        return np.concatenate(vals), np.concatenate(hs)


class QuadOrbitFamily:
    """The orbit of a quadratic irrational under integral homographies, with
    height ``2 / |alpha - alpha'|``. Members are the roots ``(-B + sqrt D)/(2A)``
    of the forms in the proper class of the base point."""

    def __init__(self, alpha0: RealQuadratic, window: tuple | None = None):
        self.alpha0 = alpha0
        self.form0 = form_of_qi(alpha0)
        self.disc = self.form0.disc
        self.window = window
        self._class = CycleClass(self.form0)
        self._whole = _class_is_everything(self._class, self.disc)
        self._sqrtD = math.sqrt(self.disc)
        self._tables = {}

    def _progressions(self, s: float):
        """Arrays ``(A, r)``: forms with leading coefficient ``A`` have ``B = r mod 2|A|``."""
        amax = int(math.floor(s * self._sqrtD / 2 + 1e-9))
        if amax in self._tables:
            return self._tables[amax]
        A, R = [], []
        for a in range(1, amax + 1):
            for r in sqrt_residues(self.disc, a):
                for sign in (1, -1):
                    A.append(sign * a)
                    R.append(r)
        out = (np.array(A, dtype=np.int64), np.array(R, dtype=np.int64))
        self._tables[amax] = out
        return out

    def _keep(self, A, B):
        C = (B * B - self.disc) // (4 * A)
        g = np.gcd(np.gcd(A, B), C)
        ok = g == 1
        if not self._whole:
            ok &= np.array([(int(a), int(b), int(c)) in self._class for a, b, c in zip(A, B, C)], dtype=bool)
        return ok

    def candidates(self, y, s: float):
        if isinstance(y, RealQuadratic) and y.b != 0:
            try:
                if form_of_qi(y).coefficients() in self._class:
                    raise DegenerateInputError("target lies in the orbit")
            except ValueError:
                pass
        A, R = self._progressions(s)
        m = 2 * np.abs(A)
        yf = float(_mp(y))
        # root = (sqrtD - B)/(2A) near y  <=>  B near sqrtD - 2 A y
        target = self._sqrtD - 2 * A * yf
        k = np.floor((target - R) / m)
        Hs, HD, Ds = [], [], []
        for dk in (0, 1):
            B = R + m * (k + dk).astype(np.int64)
            ok = self._keep(A, B)
            Ak, Bk = A[ok], B[ok]
            alpha = (self._sqrtD - Bk) / (2.0 * Ak)
            if self.window is not None:
                inside = (alpha >= self.window[0]) & (alpha <= self.window[1])
                Ak, Bk, alpha = Ak[inside], Bk[inside], alpha[inside]
            H = 2.0 * np.abs(Ak) / self._sqrtD
            # H |y - alpha| = |2 A y + B - sqrtD| / sqrtD
            hd = np.abs(2.0 * Ak * yf + Bk - self._sqrtD) / self._sqrtD
            if np.any(hd == 0):
                raise DegenerateInputError("target lies in the orbit")
            Hs.append(H)
            HD.append(hd)
            Ds.append(hd / H)
        return np.concatenate(Hs), np.concatenate(HD), np.concatenate(Ds)

    def all_in_window(self, s: float):
        if self.window is None:
            raise ValueError("counting needs a bounded window")
        lo, hi = self.window
        A, R = self._progressions(s)
        vals, hs = [], []
        for a, r in zip(A.tolist(), R.tolist()):
            m = 2 * abs(a)
            # alpha in [lo, hi]  <=>  B in [sqrtD - 2 a hi, sqrtD - 2 a lo] (ordered by the sign of a)
            b_lo, b_hi = sorted((self._sqrtD - 2 * a * hi, self._sqrtD - 2 * a * lo))
            B = np.arange(math.ceil((b_lo - r) / m), math.floor((b_hi - r) / m) + 1, dtype=np.int64) * m + r
            Av = np.full(B.size, a, dtype=np.int64)
            ok = self._keep(Av, B) if B.size else np.zeros(0, dtype=bool)
            vals.append((self._sqrtD - B[ok]) / (2.0 * a))
            hs.append(np.full(int(ok.sum()), 2.0 * abs(a) / self._sqrtD))
        return np.concatenate(vals), np.concatenate(hs)


def _class_is_everything(cls: CycleClass, D: int) -> bool:
    """Is every primitive form of discriminant ``D`` in the class?"""
    r = math.isqrt(D)
    for B in range(1, r + 1):
        if B * B >= D or (B - D) % 2:
            continue
        for a2 in range(max(2, r - B), r + B + 2, 2):
            A = a2 // 2
            for sgn in (1, -1):
                Af = sgn * A
                if (B * B - D) % (4 * Af):
                    continue
                C = (B * B - D) // (4 * Af)
                if math.gcd(math.gcd(A, B), C) != 1 or not is_reduced(Af, B, C):
                    continue
                if (Af, B, C) not in cls:
                    return False
    return True


# records --------------------------------------------------------------------------

def _checkpoints(s_max: float, per_decade: int = 4) -> list[float]:
    pts = []
    k = 0
    while True:
        v = 10 ** (k / per_decade)
        if v >= s_max:
            break
        pts.append(v)
        k += 1
    pts.append(float(s_max))
    return pts


def approx_constant_record(
    y, family, s_max: float, checkpoints: Sequence[float] | None = None, h_min: float = 0.0
) -> ApproximationRecord:
    """Running minimum of ``H(z) |y - z|`` over ``h_min < H(z) <= s`` at each checkpoint ``s``."""
    H, HD, _ = family.candidates(y, s_max)
    keep = H > h_min
    H, HD = H[keep], HD[keep]
    order = np.argsort(H, kind="stable")
    H, run = H[order], np.minimum.accumulate(HD[order])
    rec = ApproximationRecord(float(_mp(y)), "constant")
    for s in checkpoints or _checkpoints(s_max):
        i = np.searchsorted(H, s * (1 + 1e-12), side="right")
        if i:
            rec.entries.append((float(s), float(run[i - 1])))
    return rec


def approx_exponent_record(
    y, family, s_max: float, checkpoints: Sequence[float] | None = None, h_min: float = 1.0
) -> ApproximationRecord:
    """Running maximum of ``-log|y - z| / log H(z)`` over ``max(1, h_min) < H(z) <= s``."""
    H, _, d = family.candidates(y, s_max)
    keep = H > max(1.0, h_min)
    H, d = H[keep], d[keep]
    order = np.argsort(H, kind="stable")
    H = H[order]
    run = np.maximum.accumulate(-np.log(d[order]) / np.log(H))
    rec = ApproximationRecord(float(_mp(y)), "exponent")
    for s in checkpoints or _checkpoints(s_max):
        i = np.searchsorted(H, s * (1 + 1e-12), side="right")
        if i:
            rec.entries.append((float(s), float(run[i - 1])))
    return rec


def _psi_values(psi, H):
    if callable(psi):
        return np.array([float(psi(h)) for h in H]) if H.size else np.zeros(0)
    if np.isscalar(psi):
        return np.full(H.shape, float(psi))
    tab = np.asarray(psi, dtype=float)
    # step function: value of the last tabulated height <= H
    idx = np.searchsorted(tab[:, 0], H, side="right") - 1
    return np.where(idx >= 0, tab[np.clip(idx, 0, None), 1], tab[0, 1])


def well_approximable_count(y, psi, family, s_max: float) -> int:
    """``Card {z in family : H(z) <= s_max, |y - z| <= psi(H(z))}``.

    ``psi`` is a callable, a constant, or a table of ``(height, value)`` rows
    read as a step function."""
    if _rational_target(y) and isinstance(family, RationalFamily):
        raise DegenerateInputError("target is rational, hence in the family")
    vals, H = family.all_in_window(s_max)
    keep = H <= s_max * (1 + 1e-12)
    vals, H = vals[keep], H[keep]
    d = np.abs(vals - float(_mp(y)))
    if np.any(d == 0):
        raise DegenerateInputError("target belongs to the family")
    return int(np.count_nonzero(d <= _psi_values(psi, H)))


def well_approximable_oracle(y, psi: Callable[[float], float], power: int, window: tuple, s_max: float) -> int:
    """Exhaustive sweep over rationals for :func:`well_approximable_count`."""
    y = _mp(y)
    q_max = int(math.floor(s_max ** (1.0 / power) * (1 + 1e-12)))
    n = 0
    for q in range(1, q_max + 1):
        for p in range(math.ceil(window[0] * q) - 1, math.floor(window[1] * q) + 2):
            r = Fraction(p, q)
            if r.denominator != q or not window[0] <= r <= window[1]:
                continue
            if abs(y - mpmath.mpf(p) / q) <= psi(q ** power):
                n += 1
    return n


def cf_constant_oracle(y, s_max: float, power: int = 2, h_min: float = 0.0) -> float:
    """``min q^power |y - p/q|`` over continued-fraction convergents with
    ``h_min < q^power <= s_max``."""
    from .exactmath.forms import cf_expand, convergents

    with mpmath.workdps(50):
        yv = _mp(y)
        terms = cf_expand(y, max_terms=200).terms(200) if isinstance(y, RealQuadratic) else _float_cf(yv)
        best = mpmath.inf
        for p, q in convergents(terms):
            if q ** power > s_max:
                break
            if q ** power <= h_min:
                continue
            v = mpmath.mpf(q) ** power * abs(yv - mpmath.mpf(p) / q)
            if v > 0:
                best = min(best, v)
        return float(best)


def _float_cf(v, n: int = 60) -> list[int]:
    out = []
    for _ in range(n):
        a = int(mpmath.floor(v))
        out.append(a)
        frac = v - a
        if frac < mpmath.mpf(10) ** -40:
            break
        v = 1 / frac
    return out


# Hurwitz-type check -------------------------------------------------------------------

@dataclass
class HurwitzReport:
    estimates: list
    maximum: float
    bound: float = HURWITZ_CONSTANT_ORBIT

    @property
    def argmax(self) -> int:
        return int(np.argmax(self.estimates))


def hurwitz_check(samples, s_max: float, alpha0: RealQuadratic | None = None) -> HurwitzReport:
    """Largest finite-height approximation constant of the targets by the orbit
    of ``alpha0`` (default: the golden ratio)."""
    samples = list(samples)
    if not samples:
        raise EmptyInputError("no targets given")
    if alpha0 is None:
        alpha0 = RealQuadratic(Fraction(1, 2), Fraction(1, 2), 5)
    fam = QuadOrbitFamily(alpha0)
    est = [approx_constant_record(y, fam, s_max, checkpoints=[s_max]).final_estimate for y in samples]
    return HurwitzReport(est, max(est))
