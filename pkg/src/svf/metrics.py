"""Similarity metrics over float images.

SSIM follows the usual windowed form with population statistics gathered
through summed-area tables, evaluated at every position where the square
window fits, then averaged. PSNR and max absolute difference are the
plain global definitions. All three treat (h, w, 3) inputs per channel;
SSIM averages the channel scores.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError


@dataclass(frozen=True)
class SsimParams:
    """Window size, stabiliser factors and the value range of the inputs."""

    window: int = 8
    k1: float = 0.01
    k2: float = 0.03
    data_range: float = 1.0

    def __post_init__(self):
        if not isinstance(self.window, (int, np.integer)) or self.window < 2:
            raise InvalidInputError(f"window must be an integer >= 2, got {self.window!r}")
        if self.k1 <= 0 or self.k2 <= 0:
            raise InvalidInputError("k1 and k2 must be > 0")
        if not np.isfinite(self.data_range) or self.data_range <= 0:
            raise InvalidInputError(f"data_range must be finite and > 0, got {self.data_range}")


def _check_pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidInputError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.ndim not in (2, 3) or (a.ndim == 3 and a.shape[2] != 3):
        raise InvalidInputError(f"images must be (h, w) or (h, w, 3), got {a.shape}")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise InvalidInputError("images contain NaN or Inf")
    return a, b


def _table(values):
    h, w = values.shape
    out = np.zeros((h + 1, w + 1), dtype=np.float64)
    np.cumsum(values, axis=0, out=out[1:, 1:], dtype=np.float64)
    np.cumsum(out[1:, 1:], axis=1, out=out[1:, 1:])
    return out


def _window_sums(table, win):
    return (
        table[win:, win:]
        - table[:-win, win:]
        - table[win:, :-win]
        + table[:-win, :-win]
    )


def _ssim_plane(a, b, params):
    h, w = a.shape
    win = min(params.window, h, w)
    n = float(win * win)
    mu_a = _window_sums(_table(a), win) / n
    mu_b = _window_sums(_table(b), win) / n
    # variances stay unclamped so identical inputs score exactly 1 even
    # when table rounding drives a near-zero variance slightly negative
    var_a = _window_sums(_table(a * a), win) / n - mu_a * mu_a
    var_b = _window_sums(_table(b * b), win) / n - mu_b * mu_b
    cov = _window_sums(_table(a * b), win) / n - mu_a * mu_b
    c1 = (params.k1 * params.data_range) ** 2
    c2 = (params.k2 * params.data_range) ** 2
    num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return float(np.mean(num / den))


def ssim(a: np.ndarray, b: np.ndarray, params: SsimParams = SsimParams()) -> float:
    """Mean structural similarity; 1.0 exactly when a and b are identical."""
    a, b = _check_pair(a, b)
    if a.ndim == 2:
        return _ssim_plane(a, b, params)
    return float(np.mean([
        _ssim_plane(a[:, :, c], b[:, :, c], params) for c in range(3)
    ]))


def psnr(a: np.ndarray, b: np.ndarray, data_range: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; inf for identical inputs."""
    if not np.isfinite(data_range) or data_range <= 0:
        raise InvalidInputError(f"data_range must be finite and > 0, got {data_range}")
    a, b = _check_pair(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10((data_range * data_range) / mse)


def max_abs_diff(a: np.ndarray, b: np.ndarray) -> float:
    """Largest absolute per-pixel difference."""
    a, b = _check_pair(a, b)
    return float(np.max(np.abs(a - b)))
