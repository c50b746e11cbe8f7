"""Pure-numpy implementation of the filter's two hot passes.

Same contract as _kernels_numba, selected via SVF_BACKEND=numpy. Window
bounds are precomputed per row and per column, then every rectangle sum
comes from outer-indexed four-corner lookups on the tables, so the whole
pass is a handful of dense array ops.
"""

import numpy as np


def _table(values):
    h, w = values.shape
    out = np.zeros((h + 1, w + 1), dtype=np.float64)
    np.cumsum(values, axis=0, out=out[1:, 1:], dtype=np.float64)
    np.cumsum(out[1:, 1:], axis=1, out=out[1:, 1:])
    return out


def _rect_sums(table, ys0, ys1, xs0, xs1):
    return (
        table[np.ix_(ys1, xs1)]
        - table[np.ix_(ys0, xs1)]
        - table[np.ix_(ys1, xs0)]
        + table[np.ix_(ys0, xs0)]
    )


def _window_stats(tsum, tsq, ys0, ys1, xs0, xs1):
    area = (ys1 - ys0)[:, None] * (xs1 - xs0)[None, :]
    area = area.astype(np.float64)
    mean = _rect_sums(tsum, ys0, ys1, xs0, xs1) / area
    mean_sq = _rect_sums(tsq, ys0, ys1, xs0, xs1) / area
    var = np.maximum(0.0, mean_sq - mean * mean)
    return mean, var


def patch_pass(q, radius, epsilon):
    """Per-patch preservation factor, shifted offset and window mean.

    Returns (a_map, b_shift, mean) where b_shift = (1 - a) * mean and mean
    is the clipped whole-window mean of q around each pixel.
    """
    h, w = q.shape
    tsum = _table(q)
    tsq = _table(q * q)
    ys = np.arange(h)
    xs = np.arange(w)
    r = radius

    y_lo = np.maximum(ys - r, 0)
    y_hi = np.minimum(ys + r + 1, h)
    y_mid_hi = ys + 1   # bottom edge of the upper sub-windows (centre row included)
    y_mid_lo = ys       # top edge of the lower sub-windows
    x_lo = np.maximum(xs - r, 0)
    x_hi = np.minimum(xs + r + 1, w)
    x_mid_hi = xs + 1
    x_mid_lo = xs

    mean_w, var_w = _window_stats(tsum, tsq, y_lo, y_hi, x_lo, x_hi)
    _, var_tl = _window_stats(tsum, tsq, y_lo, y_mid_hi, x_lo, x_mid_hi)
    _, var_tr = _window_stats(tsum, tsq, y_lo, y_mid_hi, x_mid_lo, x_hi)
    _, var_bl = _window_stats(tsum, tsq, y_mid_lo, y_hi, x_lo, x_mid_hi)
    _, var_br = _window_stats(tsum, tsq, y_mid_lo, y_hi, x_mid_lo, x_hi)

    v_hi = np.maximum(
        var_w,
        np.maximum(np.maximum(var_tl, var_tr), np.maximum(var_bl, var_br)),
    )
    v_lo = np.minimum(np.minimum(var_tl, var_tr), np.minimum(var_bl, var_br))
    a = np.minimum(1.0, v_hi / (v_lo + epsilon))
    b_shift = (1.0 - a) * mean_w
    return a, b_shift, mean_w


def blend_pass(q, p0, a_map, b_map, radius):
    """Box-average the patch maps and blend: out = abar * q + bbar + p0."""
    h, w = q.shape
    ta = _table(a_map)
    tb = _table(b_map)
    ys = np.arange(h)
    xs = np.arange(w)
    y_lo = np.maximum(ys - radius, 0)
    y_hi = np.minimum(ys + radius + 1, h)
    x_lo = np.maximum(xs - radius, 0)
    x_hi = np.minimum(xs + radius + 1, w)
    count = ((y_hi - y_lo)[:, None] * (x_hi - x_lo)[None, :]).astype(np.float64)
    abar = _rect_sums(ta, y_lo, y_hi, x_lo, x_hi) / count
    # table rounding can push the average a hair outside [0,1]; the blend
    # must stay convex, so clamp
    np.clip(abar, 0.0, 1.0, out=abar)
    bbar = _rect_sums(tb, y_lo, y_hi, x_lo, x_hi) / count
    out = abar * q + bbar + p0
    return out, abar, bbar
