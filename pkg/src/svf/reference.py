"""Direct per-pixel evaluation of the filter, no summed-area tables.

Every window statistic is recomputed from the raw pixels with numpy's
two-pass mean and variance, so this path shares no arithmetic with the
table-based kernels. Tests and benchmarks use it as the ground truth; it
is O(radius^2) per pixel and only sensible on small planes.
"""

import numpy as np

from .core import FilterParams
from .errors import InvalidInputError
from .integral import validate_plane


def filter_plane_reference(plane: np.ndarray, params: FilterParams, *, return_maps: bool = False):
    """Filter one plane by brute force; mirrors filter_plane's contract."""
    arr = validate_plane(plane)
    h, w = arr.shape
    if params.window > min(h, w):
        raise InvalidInputError(f"window {params.window} exceeds {w}x{h} plane")
    r = params.radius
    a_map = np.empty((h, w), dtype=np.float64)
    b_map = np.empty((h, w), dtype=np.float64)
    for y in range(h):
        y_lo, y_hi = max(0, y - r), min(h, y + r + 1)
        for x in range(w):
            x_lo, x_hi = max(0, x - r), min(w, x + r + 1)
            whole = arr[y_lo:y_hi, x_lo:x_hi]
            quads = (
                arr[y_lo:y + 1, x_lo:x + 1],
                arr[y_lo:y + 1, x:x_hi],
                arr[y:y_hi, x_lo:x + 1],
                arr[y:y_hi, x:x_hi],
            )
            quad_vars = [float(np.var(qd)) for qd in quads]
            v_hi = max(float(np.var(whole)), max(quad_vars))
            v_lo = min(quad_vars)
            a = min(1.0, v_hi / (v_lo + params.epsilon))
            a_map[y, x] = a
            b_map[y, x] = (1.0 - a) * float(np.mean(whole))
    out = np.empty((h, w), dtype=np.float64)
    for y in range(h):
        y_lo, y_hi = max(0, y - r), min(h, y + r + 1)
        for x in range(w):
            x_lo, x_hi = max(0, x - r), min(w, x + r + 1)
            abar = float(np.mean(a_map[y_lo:y_hi, x_lo:x_hi]))
            bbar = float(np.mean(b_map[y_lo:y_hi, x_lo:x_hi]))
            out[y, x] = abar * arr[y, x] + bbar
    if return_maps:
        return out, a_map, b_map
    return out
