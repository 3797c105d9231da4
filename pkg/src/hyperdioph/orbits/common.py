"""Result containers and small shared helpers for the enumerators."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = ["HeightWindow", "EnumerationResult", "sqrt_residues", "run_chunks"]


@dataclass(frozen=True)
class HeightWindow:
    s_max: float
    window: tuple | None = None

    def __post_init__(self):
        if not self.s_max > 0:
            raise ValueError("s_max must be positive")
        if self.window is not None:
            w = tuple(self.window)
            if len(w) % 2 or any(w[2 * i] > w[2 * i + 1] for i in range(len(w) // 2)):
                raise ValueError(f"empty window {w}")


@dataclass
class EnumerationResult:
    """Canonically sorted enumeration output.

    ``values`` is a 1-d float or complex array, or an ``(n, 3)`` array for
    Heisenberg points; ``exact`` optionally carries exact representatives in
    the same order; ``data`` holds extra per-item integer columns.
    """

    values: np.ndarray
    heights: np.ndarray
    exact: list | None = None
    data: dict = field(default_factory=dict)
    truncated: bool = False

    @property
    def count(self) -> int:
        return int(len(self.heights))

    def __len__(self):
        return self.count

    @property
    def items(self) -> list[tuple]:
        vals = self.exact if self.exact is not None else [
            tuple(v) if np.ndim(v) else v.item() for v in self.values
        ]
        cols = [np.asarray(c).tolist() for c in self.data.values()]
        tags = [dict(zip(self.data, row)) for row in zip(*cols)] if self.data else [{}] * self.count
        return [(v, float(h), t) for v, h, t in zip(vals, self.heights, tags)]

    def upto(self, s: float) -> "EnumerationResult":
        """Sub-result with heights ``<= s`` (heights are sorted ascending)."""
        k = int(np.searchsorted(self.heights, s, side="right"))
        return EnumerationResult(
            self.values[:k],
            self.heights[:k],
            None if self.exact is None else self.exact[:k],
            {key: col[:k] for key, col in self.data.items()},
            self.truncated,
        )

    @classmethod
    def build(cls, values, heights, keys, exact=None, data=None, truncated=False):
        """Sort by height, then by the integer key columns, for a total order."""
        values = np.asarray(values)
        heights = np.asarray(heights, dtype=float)
        keys = [np.asarray(k) for k in keys]
        order = np.lexsort(tuple(reversed([heights] + keys))) if len(heights) else np.arange(0)
        data = {k: np.asarray(v)[order] for k, v in (data or {}).items()}
        ex = None if exact is None else [exact[i] for i in order]
        return cls(values[order], heights[order], ex, data, truncated)


@lru_cache(maxsize=None)
def sqrt_residues(D: int, A: int) -> tuple[int, ...]:
    """Residues ``r`` mod ``2|A|`` with ``r^2 = D (mod 4|A|)``."""
    a = abs(A)
    r = np.arange(2 * a, dtype=np.int64)
    return tuple(int(x) for x in r[(r * r - D) % (4 * a) == 0])


def run_chunks(fn, chunks, workers: int = 1):
    """Map ``fn`` over ``chunks``, preserving order, optionally on threads."""
    chunks = list(chunks)
    if workers <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, chunks))
