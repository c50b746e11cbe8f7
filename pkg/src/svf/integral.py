"""Summed-area tables and O(1) windowed statistics.

A summed-area table over a plane lets any axis-aligned rectangle's sum be
read with four lookups, independent of the rectangle size. Keeping a second
table of squared values alongside turns that into constant-time window mean
and variance, which is what makes large-radius filtering cheap.

Tables are float64 with a zero row and column prepended, shape (h+1, w+1),
so the four-corner lookup needs no boundary branches:

    sum(x0:x1, y0:y1) = T[y1,x1] - T[y0,x1] - T[y1,x0] + T[y0,x0]

Rectangles are half-open pixel ranges [x0, x1) x [y0, y1).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWindowError, InvalidInputError


@dataclass(frozen=True)
class Rect:
    """Half-open pixel rectangle [x0, x1) x [y0, y1)."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if self.x0 >= self.x1 or self.y0 >= self.y1:
            raise InvalidInputError(f"degenerate rect {self!r}")

    @property
    def area(self) -> int:
        return (self.x1 - self.x0) * (self.y1 - self.y0)


@dataclass(frozen=True)
class SatPair:
    """Summed-area tables of a plane's values and squared values."""

    sum: np.ndarray     # (h+1, w+1) float64
    sum_sq: np.ndarray  # (h+1, w+1) float64

    @property
    def height(self) -> int:
        return self.sum.shape[0] - 1

    @property
    def width(self) -> int:
        return self.sum.shape[1] - 1


def validate_plane(plane: np.ndarray) -> np.ndarray:
    """Check a 2-D finite float plane; returns it as float64 without copy if possible."""
    arr = np.asarray(plane)
    if arr.ndim != 2:
        raise InvalidInputError(f"plane must be 2-D, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"plane must be non-empty, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.floating) and not np.issubdtype(arr.dtype, np.integer):
        raise InvalidInputError(f"plane must be numeric, got dtype {arr.dtype}")
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    if not np.isfinite(arr).all():
        raise InvalidInputError("plane contains NaN or Inf")
    return arr


def _table(values: np.ndarray) -> np.ndarray:
    h, w = values.shape
    out = np.zeros((h + 1, w + 1), dtype=np.float64)
    np.cumsum(values, axis=0, out=out[1:, 1:], dtype=np.float64)
    np.cumsum(out[1:, 1:], axis=1, out=out[1:, 1:])
    return out


def build_sat(plane: np.ndarray) -> SatPair:
    """Build value and squared-value summed-area tables for a plane."""
    arr = validate_plane(plane)
    return SatPair(sum=_table(arr), sum_sq=_table(arr * arr))


def clip_rect(r: Rect, width: int, height: int) -> Rect:
    """Clip r to [0, width) x [0, height); raises if nothing remains."""
    x0 = max(r.x0, 0)
    y0 = max(r.y0, 0)
    x1 = min(r.x1, width)
    y1 = min(r.y1, height)
    if x0 >= x1 or y0 >= y1:
        raise DegenerateWindowError(
            f"rect {r!r} clipped to zero area on {width}x{height} plane"
        )
    return Rect(x0, y0, x1, y1)


def _check_bounds(sat: SatPair, r: Rect) -> None:
    if r.x0 < 0 or r.y0 < 0 or r.x1 > sat.width or r.y1 > sat.height:
        raise InvalidInputError(
            f"rect {r!r} out of bounds for {sat.width}x{sat.height} plane"
        )


def window_sum(sat: SatPair, r: Rect) -> float:
    """Sum of plane values over r. r must already lie within bounds."""
    _check_bounds(sat, r)
    t = sat.sum
    return float(t[r.y1, r.x1] - t[r.y0, r.x1] - t[r.y1, r.x0] + t[r.y0, r.x0])


def _sq_sum(sat: SatPair, r: Rect) -> float:
    t = sat.sum_sq
    return float(t[r.y1, r.x1] - t[r.y0, r.x1] - t[r.y1, r.x0] + t[r.y0, r.x0])


def window_mean(sat: SatPair, r: Rect) -> float:
    """Mean of plane values over r."""
    return window_sum(sat, r) / r.area


def window_variance(sat: SatPair, r: Rect) -> float:
    """Population variance of plane values over r, floored at zero.

    Uses E[X^2] - E[X]^2 from the two tables. The subtraction can land a
    hair below zero for near-constant windows; the floor keeps downstream
    ratios well defined.
    """
    _check_bounds(sat, r)
    mean = window_sum(sat, r) / r.area
    mean_sq = _sq_sum(sat, r) / r.area
    return max(0.0, mean_sq - mean * mean)
