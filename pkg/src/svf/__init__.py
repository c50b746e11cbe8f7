"""Edge-preserving sub-window variance filtering and multi-scale decomposition."""

from .core import (
    FilterParams,
    PreservationMaps,
    VarianceSet,
    filter_image,
    filter_plane,
    patch_stats,
    preservation_factor,
    subwindow_rects,
)
from .errors import (
    DecodeError,
    DegenerateWindowError,
    IntegrityError,
    InvalidInputError,
    SvfError,
)
from .imgio import (
    load_decomposition,
    load_image,
    merge_luma,
    read_pfm,
    rgb_to_luma,
    save_decomposition,
    save_image,
    write_pfm,
)
from .integral import (
    Rect,
    SatPair,
    build_sat,
    clip_rect,
    validate_plane,
    window_mean,
    window_sum,
    window_variance,
)
from .metrics import SsimParams, max_abs_diff, psnr, ssim
from .pyramid import (
    Decomposition,
    Level,
    Schedule,
    decompose,
    default_schedule,
    recompose,
    reconstruct,
    schedule_from,
)

__version__ = "0.1.0"

__all__ = [
    "DecodeError",
    "Decomposition",
    "DegenerateWindowError",
    "FilterParams",
    "IntegrityError",
    "InvalidInputError",
    "Level",
    "PreservationMaps",
    "Rect",
    "SatPair",
    "Schedule",
    "SsimParams",
    "SvfError",
    "VarianceSet",
    "build_sat",
    "clip_rect",
    "decompose",
    "default_schedule",
    "filter_image",
    "filter_plane",
    "load_decomposition",
    "load_image",
    "max_abs_diff",
    "merge_luma",
    "patch_stats",
    "preservation_factor",
    "psnr",
    "read_pfm",
    "recompose",
    "reconstruct",
    "rgb_to_luma",
    "save_decomposition",
    "save_image",
    "schedule_from",
    "ssim",
    "subwindow_rects",
    "validate_plane",
    "window_mean",
    "window_sum",
    "window_variance",
    "write_pfm",
]
