"""Numba implementation of the filter's two hot passes.

Each output pixel is written exactly once by one iteration, so results are
independent of the thread count. No fastmath here: the convex-blend clamp
and the exact constant-plane guarantee rely on strict IEEE ordering.
"""

import numpy as np
from numba import njit, prange


@njit(cache=True)
def _build_tables(plane):
    h, w = plane.shape
    tsum = np.zeros((h + 1, w + 1), dtype=np.float64)
    tsq = np.zeros((h + 1, w + 1), dtype=np.float64)
    for y in range(h):
        run_s = 0.0
        run_q = 0.0
        for x in range(w):
            v = plane[y, x]
            run_s += v
            run_q += v * v
            tsum[y + 1, x + 1] = tsum[y, x + 1] + run_s
            tsq[y + 1, x + 1] = tsq[y, x + 1] + run_q
    return tsum, tsq


@njit(cache=True)
def _build_table(plane):
    h, w = plane.shape
    t = np.zeros((h + 1, w + 1), dtype=np.float64)
    for y in range(h):
        run = 0.0
        for x in range(w):
            run += plane[y, x]
            t[y + 1, x + 1] = t[y, x + 1] + run
    return t


@njit(inline="always")
def _rect(t, y0, y1, x0, x1):
    return t[y1, x1] - t[y0, x1] - t[y1, x0] + t[y0, x0]


@njit(inline="always")
def _var(tsum, tsq, y0, y1, x0, x1):
    area = float((y1 - y0) * (x1 - x0))
    mean = _rect(tsum, y0, y1, x0, x1) / area
    v = _rect(tsq, y0, y1, x0, x1) / area - mean * mean
    if v < 0.0:
        v = 0.0
    return mean, v


@njit(parallel=True, cache=True)
def _patch_kernel(tsum, tsq, h, w, radius, epsilon, a_out, b_out, mean_out):
    r = radius
    for y in prange(h):
        y_lo = y - r
        if y_lo < 0:
            y_lo = 0
        y_hi = y + r + 1
        if y_hi > h:
            y_hi = h
        for x in range(w):
            x_lo = x - r
            if x_lo < 0:
                x_lo = 0
            x_hi = x + r + 1
            if x_hi > w:
                x_hi = w
            mean_w, var_w = _var(tsum, tsq, y_lo, y_hi, x_lo, x_hi)
            # four corner sub-windows sharing the centre row and column
            _, v_tl = _var(tsum, tsq, y_lo, y + 1, x_lo, x + 1)
            _, v_tr = _var(tsum, tsq, y_lo, y + 1, x, x_hi)
            _, v_bl = _var(tsum, tsq, y, y_hi, x_lo, x + 1)
            _, v_br = _var(tsum, tsq, y, y_hi, x, x_hi)
            v_hi = var_w
            if v_tl > v_hi:
                v_hi = v_tl
            if v_tr > v_hi:
                v_hi = v_tr
            if v_bl > v_hi:
                v_hi = v_bl
            if v_br > v_hi:
                v_hi = v_br
            v_lo = v_tl
            if v_tr < v_lo:
                v_lo = v_tr
            if v_bl < v_lo:
                v_lo = v_bl
            if v_br < v_lo:
                v_lo = v_br
            a = v_hi / (v_lo + epsilon)
            if a > 1.0:
                a = 1.0
            a_out[y, x] = a
            b_out[y, x] = (1.0 - a) * mean_w
            mean_out[y, x] = mean_w


@njit(parallel=True, cache=True)
def _blend_kernel(q, p0, ta, tb, radius, out, abar_out, bbar_out):
    h, w = q.shape
    for y in prange(h):
        y_lo = y - radius
        if y_lo < 0:
            y_lo = 0
        y_hi = y + radius + 1
        if y_hi > h:
            y_hi = h
        for x in range(w):
            x_lo = x - radius
            if x_lo < 0:
                x_lo = 0
            x_hi = x + radius + 1
            if x_hi > w:
                x_hi = w
            count = float((y_hi - y_lo) * (x_hi - x_lo))
            abar = _rect(ta, y_lo, y_hi, x_lo, x_hi) / count
            if abar < 0.0:
                abar = 0.0
            elif abar > 1.0:
                abar = 1.0
            bbar = _rect(tb, y_lo, y_hi, x_lo, x_hi) / count
            out[y, x] = abar * q[y, x] + bbar + p0
            abar_out[y, x] = abar
            bbar_out[y, x] = bbar


def patch_pass(q, radius, epsilon):
    """Per-patch preservation factor, shifted offset and window mean."""
    h, w = q.shape
    tsum, tsq = _build_tables(q)
    a_map = np.empty((h, w), dtype=np.float64)
    b_map = np.empty((h, w), dtype=np.float64)
    mean = np.empty((h, w), dtype=np.float64)
    _patch_kernel(tsum, tsq, h, w, radius, float(epsilon), a_map, b_map, mean)
    return a_map, b_map, mean


def blend_pass(q, p0, a_map, b_map, radius):
    """Box-average the patch maps and blend: out = abar * q + bbar + p0."""
    h, w = q.shape
    ta = _build_table(a_map)
    tb = _build_table(b_map)
    out = np.empty((h, w), dtype=np.float64)
    abar = np.empty((h, w), dtype=np.float64)
    bbar = np.empty((h, w), dtype=np.float64)
    _blend_kernel(q, float(p0), ta, tb, radius, out, abar, bbar)
    return out, abar, bbar
