"""Decomposition and recomposition round trips."""

import numpy as np
import pytest

from svf import (
    FilterParams,
    InvalidInputError,
    Level,
    Schedule,
    decompose,
    default_schedule,
    filter_image,
    filter_plane,
    recompose,
    reconstruct,
    schedule_from,
)


def test_default_schedule_doubles_radius():
    sched = default_schedule()
    assert [lv.radius for lv in sched.levels] == [2, 4, 8]
    assert all(lv.epsilon == 0.015 for lv in sched.levels)
    assert [lv.radius for lv in default_schedule(levels=1).levels] == [2]
    assert [lv.radius for lv in default_schedule(4, base_radius=3).levels] == [3, 6, 12, 24]
    with pytest.raises(InvalidInputError):
        default_schedule(levels=0)


def test_schedule_from_broadcasts_epsilon():
    sched = schedule_from([2, 4, 8], 0.015)
    assert [lv.epsilon for lv in sched.levels] == [0.015, 0.015, 0.015]
    sched = schedule_from([10, 20], [0.03, 0.05])
    assert [(lv.radius, lv.epsilon) for lv in sched.levels] == [(10, 0.03), (20, 0.05)]
    with pytest.raises(InvalidInputError):
        schedule_from([2, 4], [0.1, 0.2, 0.3])
    with pytest.raises(InvalidInputError):
        schedule_from([], 0.015)


def test_schedule_and_level_validation():
    with pytest.raises(InvalidInputError):
        Schedule(())
    with pytest.raises(InvalidInputError):
        Schedule((Level(2, 0.01), "later"))
    with pytest.raises(InvalidInputError):
        Level(0, 0.01)
    with pytest.raises(InvalidInputError):
        Level(2, -0.5)
    assert Level(2, 0.01).params == FilterParams(2, 0.01)


def test_gray_decomposition_matches_manual_filter_chain(rng):
    plane = rng.random((32, 32))
    sched = schedule_from([2, 3], 0.01)
    result = decompose(plane, sched)
    b1 = filter_plane(plane, FilterParams(2, 0.01))
    b2 = filter_plane(b1, FilterParams(3, 0.01))
    assert np.array_equal(result.details[0], plane - b1)
    assert np.array_equal(result.details[1], b1 - b2)
    assert np.array_equal(result.base, b2)


def test_rgb_per_channel_matches_manual_filter_chain(rng):
    image = rng.random((24, 24, 3))
    sched = schedule_from([2], 0.015)
    result = decompose(image, sched)
    b1 = filter_image(image, FilterParams(2, 0.015))
    assert np.array_equal(result.base, b1)
    assert np.array_equal(result.details[0], image - b1)


def test_reconstruction_error_is_tiny(rng):
    for shape in [(48, 48), (48, 48, 3)]:
        image = rng.random(shape)
        for radii, epsilon in [([2, 4, 8], 0.015), ([10, 20], 0.03)]:
            result = decompose(image, schedule_from(radii, epsilon))
            rebuilt = reconstruct(result)
            assert np.max(np.abs(rebuilt - image)) <= 1e-6


def test_telescoping_between_levels(rng):
    plane = rng.random((40, 40))
    sched = schedule_from([2, 4, 8], 0.015)
    result = decompose(plane, sched)
    bases = [plane]
    for lv in sched.levels:
        bases.append(filter_plane(bases[-1], lv.params))
    for k in range(1, len(bases)):
        lhs = bases[k - 1]
        rhs = bases[k] + result.details[k - 1]
        assert np.max(np.abs(lhs - rhs)) <= 1e-6


def test_luma_mode_layout_and_reconstruction(rng):
    image = rng.random((32, 32, 3))
    sched = schedule_from([2, 4], 0.015)
    result = decompose(image, sched, "luma")
    assert result.base.shape == (32, 32, 3)
    assert all(d.shape == (32, 32) for d in result.details)
    rebuilt = reconstruct(result)
    assert np.max(np.abs(rebuilt - image)) <= 1e-6


def test_recompose_is_a_weighted_sum(rng):
    image = rng.random((24, 24, 3))
    result = decompose(image, schedule_from([2, 4], 0.015))
    weights = [2.0, 4.0]
    got = recompose(result, weights, base_weight=1.5)
    want = 1.5 * result.base + 2.0 * result.details[0] + 4.0 * result.details[1]
    assert np.array_equal(got, want)
    # muting every detail returns the base
    assert np.array_equal(recompose(result, [0.0, 0.0]), result.base)


def test_recompose_broadcasts_luma_details(rng):
    image = rng.random((24, 24, 3))
    result = decompose(image, schedule_from([2], 0.015), "luma")
    got = recompose(result, [3.0])
    want = result.base + 3.0 * result.details[0][:, :, None]
    assert np.array_equal(got, want)


def test_recompose_does_not_clamp(rng):
    image = rng.random((24, 24))
    result = decompose(image, schedule_from([2, 4], 0.015))
    boosted = recompose(result, [50.0, 50.0])
    assert boosted.max() > 1.0 or boosted.min() < 0.0


def test_recompose_validates_weights(rng):
    result = decompose(rng.random((24, 24)), schedule_from([2, 4], 0.015))
    with pytest.raises(InvalidInputError):
        recompose(result, [1.0])
    with pytest.raises(InvalidInputError):
        recompose(result, [1.0, 1.0, 1.0])
    with pytest.raises(InvalidInputError):
        recompose(result, [1.0, float("nan")])
    with pytest.raises(InvalidInputError):
        recompose(result, [1.0, 1.0], base_weight=float("inf"))


def test_decompose_validates_schedule_fit(rng):
    plane = rng.random((16, 16))
    with pytest.raises(InvalidInputError, match="level 2"):
        decompose(plane, schedule_from([2, 8], 0.015))


def test_decompose_validates_input_shape_and_mode(rng):
    sched = schedule_from([2], 0.015)
    with pytest.raises(InvalidInputError):
        decompose(rng.random((10, 10, 4)), sched)
    with pytest.raises(InvalidInputError):
        decompose(rng.random(10), sched)
    with pytest.raises(InvalidInputError):
        decompose(rng.random((10, 10)), sched, "rainbow")


def test_detail_layers_shrink_with_scale(rng):
    # each pass removes structure, so detail energy tapers at later levels
    # for a noise-dominated input
    noise = 0.5 + 0.1 * rng.standard_normal((48, 48))
    result = decompose(noise, schedule_from([2, 4, 8], 0.05))
    energies = [float(np.mean(d * d)) for d in result.details]
    assert energies[0] > energies[1] > energies[2]
