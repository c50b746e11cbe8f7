"""Edge-preserving smoothing driven by sub-window variance.

Around every pixel sits a (2*radius+1)^2 window and its four overlapping
corner sub-windows, each (radius+1)^2 and sharing the centre row and
column. Flat regions have all five variances near zero; an edge crossing
the window leaves at least one sub-window on the quiet side. The ratio of
the largest variance to the smallest sub-window variance (plus a floor
epsilon) becomes a preservation factor A in [0, 1]:

    A = min(1, var_max / (var_min + epsilon))
    B = (1 - A) * window_mean

A near 1 keeps the pixel, A near 0 replaces it with the local mean. Both
maps are box-averaged over the same window before the final per-pixel
blend, which smears the decision smoothly across patch boundaries:

    out = Abar * p + Bbar

Windows are clipped at the plane borders; statistics are normalised by the
clipped area, so no padding or reflection is involved.

Internally the plane is shifted by its [0, 0] sample before any table is
built and the shift is added back in the blend. For a constant plane the
shifted values are exactly zero, so every variance is exactly zero, A is 0
everywhere and the output equals the input bit for bit. For all other
inputs the shift cancels algebraically (the blend weights sum to one).
"""

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import DegenerateWindowError, InvalidInputError
from .integral import Rect, SatPair, clip_rect, validate_plane, window_mean, window_variance


@dataclass(frozen=True)
class FilterParams:
    """Window radius and the variance floor of the preservation ratio."""

    radius: int
    epsilon: float

    def __post_init__(self):
        if not isinstance(self.radius, (int, np.integer)) or isinstance(self.radius, bool):
            raise InvalidInputError(f"radius must be an integer, got {self.radius!r}")
        if self.radius < 1:
            raise InvalidInputError(f"radius must be >= 1, got {self.radius}")
        if not np.isfinite(self.epsilon) or self.epsilon <= 0:
            raise InvalidInputError(f"epsilon must be finite and > 0, got {self.epsilon}")

    @property
    def window(self) -> int:
        return 2 * self.radius + 1


@dataclass(frozen=True)
class VarianceSet:
    """Whole-window variance plus the four corner sub-window variances."""

    whole: float
    top_left: float
    top_right: float
    bottom_left: float
    bottom_right: float

    def __post_init__(self):
        for name in ("whole", "top_left", "top_right", "bottom_left", "bottom_right"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise InvalidInputError(f"variance {name} must be finite and >= 0, got {v}")

    @property
    def largest(self) -> float:
        return max(self.whole, self.top_left, self.top_right,
                   self.bottom_left, self.bottom_right)

    @property
    def smallest_subwindow(self) -> float:
        return min(self.top_left, self.top_right, self.bottom_left, self.bottom_right)


@dataclass(frozen=True)
class PreservationMaps:
    """Per-patch factor map A and offset map B = (1 - A) * window mean."""

    a: np.ndarray
    b: np.ndarray


def subwindow_rects(cx: int, cy: int, radius: int, width: int, height: int):
    """Whole window and corner sub-window rects around (cx, cy), clipped.

    The unclipped window spans [cx-radius, cx+radius+1) in x and likewise
    in y; the four sub-windows are its (radius+1)^2 corners, every one
    containing the centre pixel. Each rect is clipped to the plane
    independently. Raises DegenerateWindowError when the centre is outside
    the plane.
    """
    if radius < 1:
        raise InvalidInputError(f"radius must be >= 1, got {radius}")
    if not (0 <= cx < width and 0 <= cy < height):
        raise DegenerateWindowError(
            f"centre ({cx}, {cy}) outside {width}x{height} plane"
        )
    r = radius
    whole = clip_rect(Rect(cx - r, cy - r, cx + r + 1, cy + r + 1), width, height)
    tl = clip_rect(Rect(cx - r, cy - r, cx + 1, cy + 1), width, height)
    tr = clip_rect(Rect(cx, cy - r, cx + r + 1, cy + 1), width, height)
    bl = clip_rect(Rect(cx - r, cy, cx + 1, cy + r + 1), width, height)
    br = clip_rect(Rect(cx, cy, cx + r + 1, cy + r + 1), width, height)
    return whole, (tl, tr, bl, br)


def patch_stats(sat: SatPair, cx: int, cy: int, radius: int):
    """Variance set and whole-window mean for the patch centred at (cx, cy)."""
    whole, quads = subwindow_rects(cx, cy, radius, sat.width, sat.height)
    variances = VarianceSet(
        whole=window_variance(sat, whole),
        top_left=window_variance(sat, quads[0]),
        top_right=window_variance(sat, quads[1]),
        bottom_left=window_variance(sat, quads[2]),
        bottom_right=window_variance(sat, quads[3]),
    )
    return variances, window_mean(sat, whole)


def preservation_factor(variances: VarianceSet, epsilon: float) -> float:
    """A = min(1, var_max / (var_min + epsilon)), in [0, 1]."""
    if not np.isfinite(epsilon) or epsilon <= 0:
        raise InvalidInputError(f"epsilon must be finite and > 0, got {epsilon}")
    return min(1.0, variances.largest / (variances.smallest_subwindow + epsilon))


def _kernels():
    name = backend.resolve_backend()
    if name == "numba":
        backend.apply_thread_cap()
        from . import _kernels_numba as mod
    else:
        from . import _kernels_numpy as mod
    return mod


def filter_plane(plane: np.ndarray, params: FilterParams, *, return_maps: bool = False):
    """Filter a single 2-D plane.

    Args:
        plane: 2-D finite array; any float range is acceptable.
        params: radius and epsilon. The window 2*radius+1 must fit inside
            the shorter plane side.
        return_maps: also return the per-patch PreservationMaps.

    Returns:
        Filtered float64 plane, or (plane, PreservationMaps).
    """
    arr = validate_plane(plane)
    h, w = arr.shape
    if params.window > min(h, w):
        raise InvalidInputError(
            f"window {params.window} exceeds {w}x{h} plane; "
            f"radius must be <= {(min(h, w) - 1) // 2}"
        )
    kern = _kernels()
    p0 = arr[0, 0]
    q = arr - p0
    a_map, b_shift, mean_q = kern.patch_pass(q, params.radius, params.epsilon)
    out, _, _ = kern.blend_pass(q, p0, a_map, b_shift, params.radius)
    if return_maps:
        maps = PreservationMaps(a=a_map, b=(1.0 - a_map) * (mean_q + p0))
        return out, maps
    return out


def filter_image(image: np.ndarray, params: FilterParams, color_mode: str = "per-channel"):
    """Filter a grayscale (h, w) or RGB (h, w, 3) image.

    color_mode "per-channel" filters R, G, B independently; "luma" filters
    the BT.709 luma plane and re-attaches the chroma residue, which avoids
    per-channel colour shifts at strong edges. Grayscale input ignores the
    mode.
    """
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim == 2:
        return filter_plane(arr, params)
    if arr.ndim == 3 and arr.shape[2] == 3:
        if color_mode == "per-channel":
            channels = [filter_plane(arr[:, :, c], params) for c in range(3)]
            return np.stack(channels, axis=2)
        if color_mode == "luma":
            from .imgio import merge_luma, rgb_to_luma

            luma = rgb_to_luma(arr)
            residue = arr - luma[:, :, None]
            return merge_luma(filter_plane(luma, params), residue)
        raise InvalidInputError(f"color_mode must be 'per-channel' or 'luma', got {color_mode!r}")
    raise InvalidInputError(f"image must be (h, w) or (h, w, 3), got shape {arr.shape}")
