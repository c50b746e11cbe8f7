"""Multi-scale base/detail decomposition built on repeated filtering.

Filtering with growing radii peels an image into a stack of detail layers
plus a smooth base:

    B_0 = image
    B_k = filter(B_{k-1}, radius_k, epsilon_k)
    D_k = B_{k-1} - B_k

Summing everything back (base_weight 1, all detail weights 1) reproduces
the input; scaling individual weights boosts or mutes the structure sizes
captured at each level. Recomposition does not clamp, image encoding does.
"""

from dataclasses import dataclass

import numpy as np

from .core import FilterParams, filter_plane
from .errors import InvalidInputError

COLOR_MODES = ("per-channel", "luma")


@dataclass(frozen=True)
class Level:
    """Filter settings for one pyramid level."""

    radius: int
    epsilon: float

    def __post_init__(self):
        # reuse the parameter checks; FilterParams raises on bad values
        FilterParams(self.radius, self.epsilon)

    @property
    def params(self) -> FilterParams:
        return FilterParams(self.radius, self.epsilon)


@dataclass(frozen=True)
class Schedule:
    """Ordered per-level filter settings."""

    levels: tuple

    def __post_init__(self):
        if len(self.levels) == 0:
            raise InvalidInputError("schedule must have at least one level")
        for lv in self.levels:
            if not isinstance(lv, Level):
                raise InvalidInputError(f"schedule levels must be Level, got {lv!r}")

    def __len__(self) -> int:
        return len(self.levels)


def schedule_from(radii, epsilons) -> Schedule:
    """Build a Schedule from a radius list and a scalar or per-level epsilon."""
    radii = list(radii)
    if np.isscalar(epsilons):
        epsilons = [float(epsilons)] * len(radii)
    else:
        epsilons = [float(e) for e in epsilons]
    if len(epsilons) != len(radii):
        raise InvalidInputError(
            f"got {len(radii)} radii but {len(epsilons)} epsilons"
        )
    return Schedule(tuple(Level(int(r), e) for r, e in zip(radii, epsilons)))


def default_schedule(levels: int = 3, base_radius: int = 2, epsilon: float = 0.015) -> Schedule:
    """Radius doubles per level starting at base_radius, constant epsilon."""
    if levels < 1:
        raise InvalidInputError(f"levels must be >= 1, got {levels}")
    return Schedule(tuple(
        Level(base_radius * (2 ** k), epsilon) for k in range(levels)
    ))


@dataclass(frozen=True)
class Decomposition:
    """Smooth base, detail layers coarse to fine order of extraction, and
    the schedule that produced them.

    Per-channel mode: base and details all match the image shape. Luma
    mode: base is the recombined RGB image, details are single planes that
    broadcast over channels at recomposition.
    """

    base: np.ndarray
    details: tuple
    schedule: Schedule
    color_mode: str

    def __post_init__(self):
        if len(self.details) != len(self.schedule):
            raise InvalidInputError(
                f"{len(self.details)} detail layers for a "
                f"{len(self.schedule)}-level schedule"
            )
        if self.color_mode not in COLOR_MODES:
            raise InvalidInputError(f"unknown color_mode {self.color_mode!r}")

    @property
    def levels(self) -> int:
        return len(self.details)


def _check_fit(shape, schedule: Schedule) -> None:
    shortest = min(shape[0], shape[1])
    for i, lv in enumerate(schedule.levels):
        window = 2 * lv.radius + 1
        if window > shortest:
            raise InvalidInputError(
                f"level {i + 1}: window {window} exceeds the image's shorter "
                f"side {shortest}"
            )


def _decompose_plane(plane, schedule):
    current = plane
    details = []
    for lv in schedule.levels:
        nxt = filter_plane(current, lv.params)
        details.append(current - nxt)
        current = nxt
    return current, details


def decompose(image: np.ndarray, schedule: Schedule, color_mode: str = "per-channel") -> Decomposition:
    """Split an image into a base and one detail layer per schedule level."""
    if color_mode not in COLOR_MODES:
        raise InvalidInputError(f"color_mode must be one of {COLOR_MODES}, got {color_mode!r}")
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim == 2:
        _check_fit(arr.shape, schedule)
        base, details = _decompose_plane(arr, schedule)
        return Decomposition(base, tuple(details), schedule, color_mode)
    if arr.ndim == 3 and arr.shape[2] == 3:
        _check_fit(arr.shape, schedule)
        if color_mode == "per-channel":
            per_c = [_decompose_plane(arr[:, :, c], schedule) for c in range(3)]
            base = np.stack([b for b, _ in per_c], axis=2)
            details = tuple(
                np.stack([per_c[c][1][k] for c in range(3)], axis=2)
                for k in range(len(schedule))
            )
            return Decomposition(base, details, schedule, color_mode)
        from .imgio import merge_luma, rgb_to_luma

        luma = rgb_to_luma(arr)
        residue = arr - luma[:, :, None]
        luma_base, details = _decompose_plane(luma, schedule)
        base = merge_luma(luma_base, residue)
        return Decomposition(base, tuple(details), schedule, color_mode)
    raise InvalidInputError(f"image must be (h, w) or (h, w, 3), got shape {arr.shape}")


def recompose(decomposition: Decomposition, weights, base_weight: float = 1.0) -> np.ndarray:
    """Weighted sum base_weight * base + sum(w_k * D_k). No clamping."""
    weights = [float(w) for w in np.atleast_1d(weights)]
    if len(weights) != decomposition.levels:
        raise InvalidInputError(
            f"got {len(weights)} weights for {decomposition.levels} detail layers"
        )
    if not np.isfinite(base_weight) or not all(np.isfinite(w) for w in weights):
        raise InvalidInputError("weights must be finite")
    out = float(base_weight) * decomposition.base
    for w_k, detail in zip(weights, decomposition.details):
        if detail.ndim == 2 and out.ndim == 3:
            out += w_k * detail[:, :, None]
        else:
            out += w_k * detail
    return out


def reconstruct(decomposition: Decomposition) -> np.ndarray:
    """Unit-weight recomposition; equals the original input up to rounding."""
    return recompose(decomposition, [1.0] * decomposition.levels, 1.0)
