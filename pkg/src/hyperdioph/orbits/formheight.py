"""Rationals of bounded height ``|Q(p, q)|`` for an indefinite binary form ``Q``."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ..errors import UnboundedEnumerationError
from ..exactmath.forms import BinaryQuadraticForm
from .common import EnumerationResult, run_chunks

__all__ = ["window_intervals", "form_min_on_window", "enumerate_form_height_rationals", "form_height_oracle"]


def window_intervals(window) -> list[tuple[float, float]]:
    """Accept ``(a, b)``, ``(a, b, c, d, ...)`` or a list of pairs."""
    w = list(window)
    if w and isinstance(w[0], (tuple, list)):
        pairs = [tuple(p) for p in w]
    else:
        if len(w) % 2:
            raise ValueError("window needs an even number of endpoints")
        pairs = [(w[i], w[i + 1]) for i in range(0, len(w), 2)]
    for a, b in pairs:
        if not a <= b or math.isinf(a) or math.isinf(b):
            raise ValueError(f"bad interval {(a, b)}")
    return pairs


def form_min_on_window(Q: BinaryQuadraticForm, intervals) -> float:
    """``min |Q(t, 1)|`` over the union of closed intervals."""
    A, B, C = Q.coefficients()
    f = lambda t: A * t * t + B * t + C  # noqa: E731
    r = math.sqrt(Q.disc)
    roots = ((-B - r) / (2 * A), (-B + r) / (2 * A))
    best = math.inf
    for a, b in intervals:
        if any(a <= x <= b for x in roots):
            raise UnboundedEnumerationError(f"interval {(a, b)} contains a root of the form")
        cands = [a, b]
        v = -B / (2 * A)
        if a < v < b:
            cands.append(v)
        best = min(best, min(abs(f(t)) for t in cands))
    return best


def enumerate_form_height_rationals(Q: BinaryQuadraticForm, s: float, window, workers: int = 1) -> EnumerationResult:
    """Reduced ``p/q`` (``q >= 1``) in the window with ``|Q(p, q)| <= s``."""
    intervals = window_intervals(window)
    c = form_min_on_window(Q, intervals)
    qmax = int(math.floor(math.sqrt(s / c))) + 1
    A, B, C = Q.coefficients()
    s_int = math.floor(s)

    def chunk(qs):
        out = []
        for q in qs.tolist():
            for a, b in intervals:
                p = np.arange(math.ceil(a * q - 1e-9), math.floor(b * q + 1e-9) + 1, dtype=np.int64)
                t = p / q
                p = p[(t >= a) & (t <= b) & (np.gcd(p, q) == 1)]
                h = np.abs(A * p * p + B * p * q + C * q * q)
                keep = h <= s_int
                out.append((p[keep], np.full(int(keep.sum()), q, dtype=np.int64), h[keep]))
        return out

    parts = [x for ch in run_chunks(chunk, np.array_split(np.arange(1, qmax + 1), max(1, workers)), workers) for x in ch]
    p = np.concatenate([x[0] for x in parts]) if parts else np.zeros(0, np.int64)
    q = np.concatenate([x[1] for x in parts]) if parts else np.zeros(0, np.int64)
    h = np.concatenate([x[2] for x in parts]) if parts else np.zeros(0, np.int64)
    # a rational on two touching intervals would appear twice
    key = np.unique(np.stack([p, q], axis=1), axis=0, return_index=True)[1] if p.size else np.arange(0)
    p, q, h = p[key], q[key], h[key]
    return EnumerationResult.build(p / np.maximum(q, 1), h, [q, p], data={"p": p, "q": q})


def form_height_oracle(Q: BinaryQuadraticForm, s: float, window, q_limit: int) -> set[Fraction]:
    intervals = window_intervals(window)
    out = set()
    for q in range(1, q_limit + 1):
        for a, b in intervals:
            for p in range(math.floor(a * q) - 1, math.ceil(b * q) + 2):
                x = Fraction(p, q)
                if a <= x <= b and abs(Q(x.numerator, x.denominator)) <= s:
                    out.add(x)
    return out
