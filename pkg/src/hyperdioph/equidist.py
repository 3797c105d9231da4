"""Empirical measures, binned discrepancy against target densities, power-law
fits, and the closed-form asymptotic constants of the counting theorems."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DegenerateInputError, EmptyInputError, UnsupportedInputError
from .exactmath.forms import regulator_of_lattice, stabilizer_regulator
from .exactmath.imagquad import parse_field, unit_count
from .exactmath.quadratic import RealQuadratic
from .exactmath.zeta import zeta_constants

__all__ = [
    "EmpiricalMeasure",
    "TargetDensity",
    "FitResult",
    "grid_bins",
    "histogram",
    "discrepancy",
    "binned_total_variation",
    "ks_statistic",
    "fit_power_law",
    "theoretical_constant",
    "CONSTANT_NAMES",
]


# measures ---------------------------------------------------------------------

@dataclass
class EmpiricalMeasure:
    """Weighted point masses in R, C (as complex or 2 columns) or R^3."""

    points: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points)
        if np.iscomplexobj(pts):
            pts = np.stack([pts.real, pts.imag], axis=-1)
        pts = pts.astype(float)
        if pts.ndim == 1:
            pts = pts[:, None]
        self.points = pts
        if self.weights is None:
            self.weights = np.ones(len(pts))
        else:
            self.weights = np.asarray(self.weights, dtype=float)
            if self.weights.shape != (len(pts),) or np.any(self.weights <= 0):
                raise ValueError("weights must be positive, one per point")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def total_mass(self) -> float:
        return math.fsum(self.weights.tolist())

    def __len__(self):
        return len(self.points)

    def normalized(self) -> "EmpiricalMeasure":
        if not len(self):
            raise EmptyInputError("empty measure")
        return EmpiricalMeasure(self.points, self.weights / self.total_mass)


def _intersect(a0, a1, b0, b1) -> tuple[float, float] | None:
    lo, hi = max(a0, b0), min(a1, b1)
    return (lo, hi) if hi > lo else None


class TargetDensity:
    """Probability density on a window.

    ``kind`` is one of ``"uniform-interval"``, ``"reciprocal-form"``,
    ``"planar-box"`` or ``"heisenberg-haar-box"``. One-dimensional windows are
    finite unions of intervals; the others are coordinate boxes.
    """

    def __init__(self, kind: str, window, form: tuple | None = None):
        self.kind = kind
        if kind in ("uniform-interval", "reciprocal-form"):
            pieces = [tuple(map(float, w)) for w in window]
            if not pieces or any(b <= a for a, b in pieces):
                raise ValueError("window intervals must be nonempty")
            self.window = sorted(pieces)
            self.dim = 1
        elif kind in ("planar-box", "heisenberg-haar-box"):
            self.window = [tuple(map(float, w)) for w in window]
            self.dim = 2 if kind == "planar-box" else 3
            if len(self.window) != self.dim or any(b <= a for a, b in self.window):
                raise ValueError(f"{kind} needs {self.dim} nonempty coordinate ranges")
        else:
            raise UnsupportedInputError(f"unknown density kind {kind!r}")
        self.form = form
        if kind == "reciprocal-form":
            A, B, C = form
            self._disc = B * B - 4 * A * C
            if self._disc <= 0:
                raise ValueError("the form must be indefinite")
            self._roots = sorted(((-B - math.sqrt(self._disc)) / (2 * A), (-B + math.sqrt(self._disc)) / (2 * A)))
            for a, b in self.window:
                if any(a <= r <= b for r in self._roots):
                    raise ValueError("window must avoid the roots of the form")
        self._total = self._raw_mass_1d(-math.inf, math.inf) if self.dim == 1 else self._box_volume(self.window)

    # constructors
    @classmethod
    def uniform_interval(cls, a: float, b: float) -> "TargetDensity":
        return cls("uniform-interval", [(a, b)])

    @classmethod
    def reciprocal_form(cls, form: tuple, window) -> "TargetDensity":
        return cls("reciprocal-form", window, form=tuple(form))

    @classmethod
    def planar_box(cls, x0, x1, y0, y1) -> "TargetDensity":
        return cls("planar-box", [(x0, x1), (y0, y1)])

    @classmethod
    def heisenberg_box(cls, bounds) -> "TargetDensity":
        """Haar measure is Lebesgue measure in ``(x, y, t)``, so it is uniform on boxes."""
        return cls("heisenberg-haar-box", bounds)

    # masses
    def _antiderivative(self, t: float) -> float:
        A, B, _ = self.form
        r = math.sqrt(self._disc)
        u = 2 * A * t + B
        return math.log(abs((u - r) / (u + r))) / r

    def _raw_mass_1d(self, lo: float, hi: float) -> float:
        out = []
        for a, b in self.window:
            seg = _intersect(a, b, lo, hi)
            if seg is None:
                continue
            if self.kind == "uniform-interval":
                out.append(seg[1] - seg[0])
            else:
                A, B, C = self.form
                mid = 0.5 * (seg[0] + seg[1])
                sign = 1.0 if A * mid * mid + B * mid + C > 0 else -1.0
                out.append(sign * (self._antiderivative(seg[1]) - self._antiderivative(seg[0])))
        return math.fsum(out)

    def _box_volume(self, box) -> float:
        v = 1.0
        for (a, b), (c, d) in zip(box, self.window):
            seg = _intersect(a, b, c, d)
            if seg is None:
                return 0.0
            v *= seg[1] - seg[0]
        return v

    def mass(self, *ranges) -> float:
        """Probability of a coordinate box given as one ``(lo, hi)`` per axis."""
        if self.dim == 1:
            return self._raw_mass_1d(*ranges[0]) / self._total
        return self._box_volume(ranges) / self._total

    def cdf(self, x) -> np.ndarray:
        if self.dim != 1:
            raise ValueError("cdf is only defined in dimension one")
        return np.array([self._raw_mass_1d(-math.inf, float(v)) / self._total for v in np.atleast_1d(x)])

    def bounds(self) -> list[tuple[float, float]]:
        if self.dim == 1:
            return [(self.window[0][0], self.window[-1][1])]
        return list(self.window)


# binning -------------------------------------------------------------------------

def grid_bins(target: TargetDensity, counts) -> list[np.ndarray]:
    """Equal-width edges per axis over the bounding box of the window."""
    counts = [counts] * target.dim if np.isscalar(counts) else list(counts)
    return [np.linspace(a, b, n + 1) for (a, b), n in zip(target.bounds(), counts)]


def _as_edges(bins, target):
    if isinstance(bins, (int, np.integer)) or (isinstance(bins, (tuple, list)) and all(isinstance(b, (int, np.integer)) for b in bins)):
        return grid_bins(target, bins)
    edges = [np.asarray(bins, dtype=float)] if target.dim == 1 and np.ndim(bins[0]) == 0 else [np.asarray(e, dtype=float) for e in bins]
    return edges


def histogram(mu: EmpiricalMeasure, target: TargetDensity, bins) -> list[tuple]:
    """Rows ``(bin bounds per axis..., empirical mass, target mass)`` of the
    normalised measure against the target, over a grid of bins."""
    if not len(mu):
        raise EmptyInputError("empty measure")
    mu = mu.normalized()
    edges = _as_edges(bins, target)
    if len(edges) != mu.dim or mu.dim != target.dim:
        raise ValueError("dimension mismatch between measure, bins and target")
    idx = []
    inside = np.ones(len(mu), dtype=bool)
    for k, e in enumerate(edges):
        x = mu.points[:, k]
        i = np.searchsorted(e, x, side="right") - 1
        # the last edge is closed
        i = np.where(x == e[-1], len(e) - 2, i)
        inside &= (i >= 0) & (i < len(e) - 1)
        idx.append(i)
    shape = tuple(len(e) - 1 for e in edges)
    flat = np.ravel_multi_index([np.clip(i, 0, n - 1) for i, n in zip(idx, shape)], shape)
    emp = np.bincount(flat[inside], weights=mu.weights[inside], minlength=int(np.prod(shape)))
    rows = []
    for cell in np.ndindex(*shape):
        ranges = [(float(e[c]), float(e[c + 1])) for e, c in zip(edges, cell)]
        rows.append((*ranges, float(emp[np.ravel_multi_index(cell, shape)]), target.mass(*ranges)))
    return rows


def discrepancy(mu: EmpiricalMeasure, target: TargetDensity, bins) -> float:
    """Largest deviation ``max_B |mu(B) - target(B)|`` over the bins."""
    return max(abs(r[-2] - r[-1]) for r in histogram(mu, target, bins))


def binned_total_variation(mu: EmpiricalMeasure, target: TargetDensity, bins) -> float:
    """``sum_B |mu(B) - target(B)|``; nondecreasing when the bins are refined."""
    return math.fsum(abs(r[-2] - r[-1]) for r in histogram(mu, target, bins))


def ks_statistic(mu: EmpiricalMeasure, target: TargetDensity) -> float:
    """Kolmogorov-Smirnov distance between a one-dimensional measure and the target."""
    if mu.dim != 1 or target.dim != 1:
        raise ValueError("KS statistic needs one-dimensional data")
    mu = mu.normalized()
    order = np.argsort(mu.points[:, 0], kind="stable")
    x = mu.points[order, 0]
    w = mu.weights[order]
    cum = np.cumsum(w)
    F = target.cdf(x)
    before = np.concatenate([[0.0], cum[:-1]])
    return float(max(np.max(np.abs(cum - F)), np.max(np.abs(before - F))))


# power laws -----------------------------------------------------------------------

@dataclass(frozen=True)
class FitResult:
    exponent: float
    constant: float
    r_squared: float
    residual: float = 0.0
    samples: tuple = field(default=(), compare=False)


def fit_power_law(samples: Sequence[tuple[float, float]]) -> FitResult:
    """Least squares for ``log N = exponent * log s + log constant``."""
    samples = list(samples)
    if len(samples) < 3:
        raise DegenerateInputError("need at least three samples")
    s = np.array([float(a) for a, _ in samples])
    N = np.array([float(b) for _, b in samples])
    if np.any(N <= 0) or np.any(s <= 0):
        raise DegenerateInputError("heights and counts must be positive")
    if np.any(np.diff(s) <= 0):
        raise DegenerateInputError("heights must be increasing")
    X, Y = np.log(s), np.log(N)
    slope, intercept = np.polyfit(X, Y, 1)
    pred = slope * X + intercept
    ss_res = float(np.sum((Y - pred) ** 2))
    ss_tot = float(np.sum((Y - Y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - ss_res / ss_tot)
    return FitResult(float(slope), float(math.exp(intercept)), r2, math.sqrt(ss_res / len(s)), tuple(zip(s.tolist(), N.tolist())))


# constants ------------------------------------------------------------------------

CONSTANT_NAMES = (
    "farey_mertens",
    "gaussian_mertens",
    "quad_trace_density",
    "relative_count_slope",
    "form_mertens_density",
    "heis_mertens",
    "heis_equid_norm",
    "heis_gauss_ball",
    "closed_geodesic_pair",
)

def _golden():
    return RealQuadratic(Fraction(1, 2), Fraction(1, 2), 5)


def _regulator(alpha, convention: str) -> float:
    if alpha is None:
        alpha = _golden()
    if convention == "fundamental":
        return regulator_of_lattice(alpha)
    if convention == "norm_one":
        return stabilizer_regulator(alpha)
    raise ValueError("regulator convention must be 'fundamental' or 'norm_one'")


def theoretical_constant(name: str, **params) -> float:
    """Closed-form constant of one of the counting statements.

    Parameters by name: ``field`` for the imaginary quadratic ones (default
    Q(i)); ``alpha0``, ``beta0`` and ``regulator`` ("fundamental" uses the log
    of the fundamental unit, "norm_one" the log of the smallest unit of norm
    one) for the real quadratic ones; ``n``, ``ell_minus``, ``ell_plus`` and
    ``volume`` for ``closed_geodesic_pair``.
    """
    from .heisenberg import haar_ball_volume

    if name == "farey_mertens":
        return 3 / math.pi ** 2
    if name == "form_mertens_density":
        return 6 / math.pi ** 2
    if name in ("gaussian_mertens", "heis_mertens", "heis_equid_norm", "heis_gauss_ball"):
        D = parse_field(params.get("field", -4))
        w = unit_count(D)
        if name == "gaussian_mertens":
            return 2 * math.pi / (w * abs(D) * zeta_constants(D, 2))
        if name == "heis_gauss_ball":
            return 2 * haar_ball_volume(1.0) / abs(D)
        z3 = zeta_constants("rational", 3)
        zK3 = zeta_constants(D, 3)
        if name == "heis_mertens":
            return z3 / (2 * math.pi * w * math.sqrt(abs(D)) * zK3)
        return math.pi * w * abs(D) ** 1.5 * zK3 / z3
    if name == "quad_trace_density":
        R = _regulator(params.get("alpha0"), params.get("regulator", "fundamental"))
        return 3 * R / math.pi ** 2
    if name == "relative_count_slope":
        conv = params.get("regulator", "fundamental")
        Ra = _regulator(params.get("alpha0"), conv)
        Rb = _regulator(params.get("beta0", params.get("alpha0")), conv)
        return 48 * Ra * Rb / math.pi ** 2
    if name == "closed_geodesic_pair":
        n = int(params.get("n", 2))
        if n < 2:
            raise ValueError("dimension must be at least 2")
        lm, lp, vol = (float(params[k]) for k in ("ell_minus", "ell_plus", "volume"))
        if lm <= 0 or lp <= 0 or vol <= 0:
            raise ValueError("lengths and volume must be positive")
        c = math.pi ** (n / 2 - 1) * math.gamma((n - 1) / 2) ** 2 / (2 ** (n - 2) * (n - 1) * math.gamma(n / 2))
        return c * lm * lp / vol
    raise UnsupportedInputError(f"unknown constant {name!r}")
