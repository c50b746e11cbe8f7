"""Command line behaviour and exit codes.

0 success, 1 usage, 2 file or decode trouble, 3 invalid parameters.
"""

import json
import math

import numpy as np
import pytest

from svf import load_image, save_image
from svf.cli import main


def _write_rgb(path, rng, size=24):
    image = rng.integers(0, 256, size=(size, size, 3)) / 255.0
    save_image(image, path)
    return image


def _parse_kv(stdout):
    pairs = {}
    for line in stdout.strip().splitlines():
        for token in line.split():
            key, _, value = token.partition("=")
            pairs[key] = value
    return pairs


def test_filter_happy_path(tmp_path, rng, capsys):
    source = tmp_path / "in.png"
    _write_rgb(source, rng)
    target = tmp_path / "out.png"
    code = main(["filter", str(source), str(target),
                 "--radius", "2", "--epsilon", "0.01"])
    assert code == 0
    pairs = _parse_kv(capsys.readouterr().out)
    assert float(pairs["total_ms"]) > 0.0
    assert load_image(target).shape == (24, 24, 3)

    first = target.read_bytes()
    assert main(["filter", str(source), str(target),
                 "--radius", "2", "--epsilon", "0.01"]) == 0
    assert target.read_bytes() == first


def test_filter_luma_mode_differs_from_per_channel(tmp_path, rng):
    source = tmp_path / "in.png"
    _write_rgb(source, rng)
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    assert main(["filter", str(source), str(a), "--radius", "2", "--epsilon", "0.01"]) == 0
    assert main(["filter", str(source), str(b), "--radius", "2", "--epsilon", "0.01",
                 "--color-mode", "luma"]) == 0
    assert a.read_bytes() != b.read_bytes()


def test_filter_parameter_errors_exit_3(tmp_path, rng, capsys):
    source = tmp_path / "in.png"
    _write_rgb(source, rng)
    target = tmp_path / "out.png"
    assert main(["filter", str(source), str(target),
                 "--radius", "0", "--epsilon", "0.01"]) == 3
    assert main(["filter", str(source), str(target),
                 "--radius", "2", "--epsilon", "0"]) == 3
    # window larger than the image
    assert main(["filter", str(source), str(target),
                 "--radius", "12", "--epsilon", "0.01"]) == 3
    assert "error:" in capsys.readouterr().err


def test_filter_io_errors_exit_2(tmp_path, rng, capsys):
    target = tmp_path / "out.png"
    assert main(["filter", str(tmp_path / "missing.png"), str(target),
                 "--radius", "2", "--epsilon", "0.01"]) == 2
    garbage = tmp_path / "garbage.png"
    garbage.write_bytes(b"not a png at all")
    assert main(["filter", str(garbage), str(target),
                 "--radius", "2", "--epsilon", "0.01"]) == 2
    source = tmp_path / "in.png"
    _write_rgb(source, rng)
    nested = tmp_path / "no_such_dir" / "out.png"
    assert main(["filter", str(source), str(nested),
                 "--radius", "2", "--epsilon", "0.01"]) == 2
    capsys.readouterr()


def test_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as info:
        main(["filter", "a.png", "b.png", "--radius", "two", "--epsilon", "0.01"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["filter", "a.png", "b.png", "--epsilon", "0.01"])  # radius missing
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["no-such-command"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 1
    capsys.readouterr()


def test_help_exits_0(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--help"])
    assert info.value.code == 0
    capsys.readouterr()


def test_decompose_recompose_round_trip(tmp_path, rng, capsys):
    source = tmp_path / "in.png"
    original = _write_rgb(source, rng)
    layers = tmp_path / "layers"
    code = main(["decompose", str(source), str(layers),
                 "--radii", "2,4", "--epsilon", "0.015"])
    assert code == 0
    out = capsys.readouterr().out
    assert "level=1 radius=2" in out
    assert "level=2 radius=4" in out
    manifest = json.loads((layers / "manifest.json").read_text())
    assert manifest["detail_files"] == ["detail_01.pfm", "detail_02.pfm"]

    target = tmp_path / "rebuilt.png"
    assert main(["recompose", str(layers), str(target),
                 "--weights", "1,1"]) == 0
    rebuilt = load_image(target)
    assert np.max(np.abs(rebuilt - original)) <= 1.0 / 255.0

    # float output keeps the reconstruction at float32 precision
    precise = tmp_path / "rebuilt.pfm"
    assert main(["recompose", str(layers), str(precise),
                 "--weights", "1,1"]) == 0
    assert np.max(np.abs(load_image(precise) - original)) <= 1e-6


def test_decompose_epsilon_broadcast_and_mismatch(tmp_path, rng, capsys):
    source = tmp_path / "in.png"
    _write_rgb(source, rng)
    assert main(["decompose", str(source), str(tmp_path / "l1"),
                 "--radii", "2,4", "--epsilon", "0.01,0.02"]) == 0
    assert main(["decompose", str(source), str(tmp_path / "l2"),
                 "--radii", "2,4", "--epsilon", "0.01,0.02,0.03"]) == 3
    capsys.readouterr()


def test_decompose_window_exceeding_image_exits_3(tmp_path, rng, capsys):
    source = tmp_path / "in.png"
    _write_rgb(source, rng, size=16)
    assert main(["decompose", str(source), str(tmp_path / "layers"),
                 "--radii", "2,8", "--epsilon", "0.015"]) == 3
    assert "level 2" in capsys.readouterr().err


def test_recompose_weight_mismatch_exits_3(tmp_path, rng, capsys):
    source = tmp_path / "in.png"
    _write_rgb(source, rng)
    layers = tmp_path / "layers"
    assert main(["decompose", str(source), str(layers),
                 "--radii", "2,4", "--epsilon", "0.015"]) == 0
    assert main(["recompose", str(layers), str(tmp_path / "out.png"),
                 "--weights", "1"]) == 3
    capsys.readouterr()


def test_recompose_missing_directory_exits_2(tmp_path, capsys):
    assert main(["recompose", str(tmp_path / "nowhere"), str(tmp_path / "out.png"),
                 "--weights", "1"]) == 2
    capsys.readouterr()


def test_recompose_detail_boost_brightens_edges(tmp_path, rng, capsys):
    source = tmp_path / "in.png"
    _write_rgb(source, rng)
    layers = tmp_path / "layers"
    assert main(["decompose", str(source), str(layers),
                 "--radii", "2", "--epsilon", "0.015"]) == 0
    flat = tmp_path / "flat.pfm"
    boosted = tmp_path / "boost.pfm"
    assert main(["recompose", str(layers), str(flat), "--weights", "0"]) == 0
    assert main(["recompose", str(layers), str(boosted), "--weights", "4"]) == 0
    detail_energy = np.mean((load_image(boosted) - load_image(flat)) ** 2)
    assert detail_energy > 0.0
    capsys.readouterr()


def test_metrics_outputs_key_value_lines(tmp_path, rng, capsys):
    a_path = tmp_path / "a.png"
    image = _write_rgb(a_path, rng)
    b_path = tmp_path / "b.png"
    save_image(np.clip(image + 0.05, 0, 1), b_path)

    assert main(["metrics", str(a_path), str(a_path)]) == 0
    pairs = _parse_kv(capsys.readouterr().out)
    assert pairs["ssim"] == "1"
    assert pairs["psnr"] == "inf"
    assert pairs["max_abs_diff"] == "0"

    assert main(["metrics", str(a_path), str(b_path), "--ssim"]) == 0
    pairs = _parse_kv(capsys.readouterr().out)
    assert "ssim" in pairs and "psnr" not in pairs
    assert 0.0 < float(pairs["ssim"]) < 1.0

    assert main(["metrics", str(a_path), str(b_path)]) == 0
    pairs = _parse_kv(capsys.readouterr().out)
    assert math.isfinite(float(pairs["psnr"]))
    # the 0.05 shift quantises to the nearest 8-bit step
    assert 0.0 < float(pairs["max_abs_diff"]) <= 0.05 + 0.5 / 255.0 + 1e-9


def test_metrics_shape_mismatch_exits_3(tmp_path, rng, capsys):
    a_path = tmp_path / "a.png"
    _write_rgb(a_path, rng, size=24)
    b_path = tmp_path / "b.png"
    _write_rgb(b_path, rng, size=16)
    assert main(["metrics", str(a_path), str(b_path)]) == 3
    capsys.readouterr()


def test_alpha_requires_flag(tmp_path, rng, capsys):
    from PIL import Image

    rgba = rng.integers(0, 256, size=(16, 16, 4)).astype(np.uint8)
    source = tmp_path / "rgba.png"
    Image.fromarray(rgba, mode="RGBA").save(source)
    target = tmp_path / "out.png"
    assert main(["filter", str(source), str(target),
                 "--radius", "2", "--epsilon", "0.01"]) == 2
    assert main(["filter", str(source), str(target),
                 "--radius", "2", "--epsilon", "0.01", "--drop-alpha"]) == 0
    capsys.readouterr()
