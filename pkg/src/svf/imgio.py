"""Image and decomposition storage.

In memory everything is float64; PNG values normalise to [0, 1] on load
(8-bit by 255, 16-bit by 65535) and quantise back with round-half-away-
from-zero on save. PFM stores raw float32 planes for lossless layer
round-trips. Decompositions live in a directory of layer files plus a
JSON manifest describing schedule, colour mode and provenance.
"""

import hashlib
import io
import json
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DecodeError, IntegrityError, InvalidInputError
from .pyramid import Decomposition, Schedule, schedule_from

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"

# BT.709 luma weights; they sum to exactly 1.0 in float64
_LUMA_R = 0.2126
_LUMA_G = 0.7152
_LUMA_B = 0.0722

MANIFEST_NAME = "manifest.json"
MANIFEST_VERSION = "1"
VALUE_ENCODINGS = ("float", "offset-8bit")


def rgb_to_luma(image: np.ndarray) -> np.ndarray:
    """BT.709 luma plane of an (h, w, 3) image."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise InvalidInputError(f"expected (h, w, 3) image, got shape {arr.shape}")
    return _LUMA_R * arr[:, :, 0] + _LUMA_G * arr[:, :, 1] + _LUMA_B * arr[:, :, 2]


def merge_luma(luma: np.ndarray, residue: np.ndarray) -> np.ndarray:
    """Reattach a chroma residue (image minus its luma) to a new luma plane."""
    luma = np.asarray(luma, dtype=np.float64)
    residue = np.asarray(residue, dtype=np.float64)
    if luma.ndim != 2 or residue.shape != luma.shape + (3,):
        raise InvalidInputError(
            f"luma {luma.shape} and residue {residue.shape} do not match"
        )
    return luma[:, :, None] + residue


def quantize8(image: np.ndarray) -> np.ndarray:
    """Clamp to [0, 1] and quantise to uint8, rounding half away from zero."""
    v = np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    return np.floor(v * 255.0 + 0.5).astype(np.uint8)


def quantize16(image: np.ndarray) -> np.ndarray:
    v = np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    return np.floor(v * 65535.0 + 0.5).astype(np.uint16)


def _png_header_fields(data: bytes):
    # IHDR follows the 8-byte signature: length, "IHDR", w, h, depth, type
    if len(data) < 26 or data[12:16] != b"IHDR":
        raise DecodeError("corrupt PNG header")
    depth = data[24]
    color_type = data[25]
    return depth, color_type


def decode_image_bytes(data: bytes, *, drop_alpha: bool = False) -> np.ndarray:
    """Decode PNG or PFM bytes to a float64 (h, w) or (h, w, 3) array."""
    if data[:2] in (b"Pf", b"PF"):
        return _decode_pfm(data)
    if data[: len(_PNG_SIGNATURE)] != _PNG_SIGNATURE:
        raise DecodeError("not a PNG or PFM image")
    depth, color_type = _png_header_fields(data)
    if depth == 16 and color_type in (2, 6):
        # Pillow silently narrows these to 8 bit, so refuse up front
        raise DecodeError("unsupported bit depth: 16-bit colour PNG")
    try:
        img = Image.open(io.BytesIO(data))
        img.load()
    except Exception as exc:
        raise DecodeError(f"PNG decode failed: {exc}") from exc
    if img.mode == "P":
        img = img.convert("RGBA" if "transparency" in img.info else "RGB")
    if img.mode == "1":
        img = img.convert("L")
    if img.mode in ("RGBA", "LA"):
        if not drop_alpha:
            raise DecodeError("image has an alpha channel; enable alpha dropping to load it")
        img = img.convert("RGB" if img.mode == "RGBA" else "L")
    if img.mode == "L":
        return np.asarray(img, dtype=np.float64) / 255.0
    if img.mode in ("I", "I;16"):
        arr = np.asarray(img, dtype=np.float64)
        if arr.max(initial=0.0) > 65535.0 or arr.min(initial=0.0) < 0.0:
            raise DecodeError(f"unsupported integer PNG range in mode {img.mode}")
        return arr / 65535.0
    if img.mode == "RGB":
        return np.asarray(img, dtype=np.float64) / 255.0
    raise DecodeError(f"unsupported PNG mode {img.mode}")


def load_image(path, *, drop_alpha: bool = False) -> np.ndarray:
    """Load a PNG or PFM file (detected by content, not suffix)."""
    with open(path, "rb") as fh:
        data = fh.read()
    return decode_image_bytes(data, drop_alpha=drop_alpha)


def encode_png_bytes(image: np.ndarray, *, bit_depth: int = 8) -> bytes:
    """Encode to PNG bytes; clamps to [0, 1]. 16-bit is grayscale only."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim not in (2, 3) or (arr.ndim == 3 and arr.shape[2] != 3):
        raise InvalidInputError(f"image must be (h, w) or (h, w, 3), got shape {arr.shape}")
    if bit_depth == 8:
        img = Image.fromarray(quantize8(arr), mode="L" if arr.ndim == 2 else "RGB")
    elif bit_depth == 16:
        if arr.ndim != 2:
            raise InvalidInputError("16-bit PNG output is grayscale only")
        img = Image.fromarray(quantize16(arr))  # uint16 infers mode I;16
    else:
        raise InvalidInputError(f"bit_depth must be 8 or 16, got {bit_depth}")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def _decode_pfm(data: bytes) -> np.ndarray:
    # header: magic line, "width height" line, scale line, then raw floats
    # with rows stored bottom to top; negative scale means little-endian
    try:
        pos = 0
        tokens = []
        while len(tokens) < 4:
            end = data.index(b"\n", pos)
            line = data[pos:end]
            pos = end + 1
            tokens.extend(line.split())
        magic, w_tok, h_tok, scale_tok = tokens[:4]
        if magic not in (b"Pf", b"PF"):
            raise ValueError(f"bad magic {magic!r}")
        width, height = int(w_tok), int(h_tok)
        scale = float(scale_tok)
        if width < 1 or height < 1 or scale == 0.0:
            raise ValueError("bad dimensions or scale")
    except (ValueError, IndexError) as exc:
        raise DecodeError(f"corrupt PFM header: {exc}") from exc
    channels = 3 if magic == b"PF" else 1
    count = width * height * channels
    dtype = "<f4" if scale < 0 else ">f4"
    body = data[pos:]
    if len(body) < count * 4:
        raise DecodeError(
            f"truncated PFM: expected {count * 4} data bytes, got {len(body)}"
        )
    flat = np.frombuffer(body[: count * 4], dtype=dtype)
    arr = flat.reshape(height, width, channels).astype(np.float64)
    arr = arr[::-1]  # bottom-up storage
    factor = abs(scale)
    if factor != 1.0:
        arr = arr * factor
    return arr[:, :, 0] if channels == 1 else arr


def read_pfm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return _decode_pfm(fh.read())


def write_pfm(path, image: np.ndarray) -> None:
    """Write a float32 PFM, little-endian, unit scale."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim not in (2, 3) or (arr.ndim == 3 and arr.shape[2] != 3):
        raise InvalidInputError(f"image must be (h, w) or (h, w, 3), got shape {arr.shape}")
    magic = b"PF\n" if arr.ndim == 3 else b"Pf\n"
    h, w = arr.shape[:2]
    data = arr[::-1].astype("<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(magic)
        fh.write(f"{w} {h}\n".encode("ascii"))
        fh.write(b"-1.0\n")
        fh.write(data)


def save_image(image: np.ndarray, path, *, encoding: str | None = None) -> None:
    """Save to PNG ("png8"/"png16") or PFM ("pfm"); default from suffix."""
    path = Path(path)
    if encoding is None:
        suffix = path.suffix.lower()
        if suffix == ".png":
            encoding = "png8"
        elif suffix == ".pfm":
            encoding = "pfm"
        else:
            raise InvalidInputError(
                f"cannot infer encoding from suffix {suffix!r}; pass png8, png16 or pfm"
            )
    if encoding == "pfm":
        write_pfm(path, image)
    elif encoding == "png8":
        path.write_bytes(encode_png_bytes(image, bit_depth=8))
    elif encoding == "png16":
        path.write_bytes(encode_png_bytes(image, bit_depth=16))
    else:
        raise InvalidInputError(f"unknown encoding {encoding!r}")


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def save_decomposition(decomposition: Decomposition, out_dir, *,
                       source_path=None, value_encoding: str = "float") -> Path:
    """Write layers plus manifest.json into out_dir; returns the manifest path.

    "float" stores PFM layers (float32, lossless enough for unit-weight
    reconstruction); "offset-8bit" stores 8-bit PNGs with details offset by
    +0.5, which is lossy and meant for preview tooling.
    """
    if value_encoding not in VALUE_ENCODINGS:
        raise InvalidInputError(f"value_encoding must be one of {VALUE_ENCODINGS}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    suffix = ".pfm" if value_encoding == "float" else ".png"
    base_file = "base" + suffix
    detail_files = [
        f"detail_{k + 1:02d}{suffix}" for k in range(decomposition.levels)
    ]
    if value_encoding == "float":
        write_pfm(out_dir / base_file, decomposition.base)
        for name, detail in zip(detail_files, decomposition.details):
            write_pfm(out_dir / name, detail)
    else:
        (out_dir / base_file).write_bytes(encode_png_bytes(decomposition.base))
        for name, detail in zip(detail_files, decomposition.details):
            (out_dir / name).write_bytes(encode_png_bytes(detail + 0.5))
    source = None
    if source_path is not None:
        source_path = Path(source_path)
        source = {"name": source_path.name, "sha256": _sha256(source_path)}
    manifest = {
        "version": MANIFEST_VERSION,
        "source": source,
        "color_mode": decomposition.color_mode,
        "schedule": [
            {"radius": lv.radius, "epsilon": lv.epsilon}
            for lv in decomposition.schedule.levels
        ],
        "base_file": base_file,
        "detail_files": detail_files,
        "value_encoding": value_encoding,
    }
    manifest_path = out_dir / MANIFEST_NAME
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest_path


def _load_layer(path, value_encoding: str, is_detail: bool) -> np.ndarray:
    if value_encoding == "float":
        return read_pfm(path)
    arr = decode_image_bytes(path.read_bytes())
    return arr - 0.5 if is_detail else arr


def load_decomposition(in_dir) -> Decomposition:
    """Read a decomposition directory back; raises IntegrityError on any
    mismatch between the manifest and what is actually on disk."""
    in_dir = Path(in_dir)
    manifest_path = in_dir / MANIFEST_NAME
    if not manifest_path.is_file():
        raise IntegrityError(f"missing {MANIFEST_NAME} in {in_dir}")
    try:
        manifest = json.loads(manifest_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise IntegrityError(f"unreadable manifest: {exc}") from exc
    if not isinstance(manifest, dict) or manifest.get("version") != MANIFEST_VERSION:
        raise IntegrityError(f"unsupported manifest version {manifest.get('version')!r}")
    encoding = manifest.get("value_encoding")
    if encoding not in VALUE_ENCODINGS:
        raise IntegrityError(f"unknown value_encoding {encoding!r}")
    try:
        schedule = schedule_from(
            [lv["radius"] for lv in manifest["schedule"]],
            [lv["epsilon"] for lv in manifest["schedule"]],
        )
        color_mode = manifest["color_mode"]
        base_file = manifest["base_file"]
        detail_files = list(manifest["detail_files"])
    except (KeyError, TypeError, InvalidInputError) as exc:
        raise IntegrityError(f"malformed manifest: {exc}") from exc
    if len(detail_files) != len(schedule):
        raise IntegrityError(
            f"{len(detail_files)} detail files for a {len(schedule)}-level schedule"
        )
    for name in [base_file, *detail_files]:
        if not (in_dir / name).is_file():
            raise IntegrityError(f"missing layer file {name}")
    try:
        base = _load_layer(in_dir / base_file, encoding, is_detail=False)
        details = tuple(
            _load_layer(in_dir / name, encoding, is_detail=True)
            for name in detail_files
        )
    except DecodeError as exc:
        raise IntegrityError(f"corrupt layer file: {exc}") from exc
    for k, detail in enumerate(details):
        if detail.shape == base.shape:
            continue
        if base.ndim == 3 and detail.shape == base.shape[:2]:
            continue  # single-plane details riding an RGB base
        raise IntegrityError(
            f"layer {detail_files[k]} shape {detail.shape} does not match "
            f"base shape {base.shape}"
        )
    source = manifest.get("source")
    if source:
        candidate = in_dir / source["name"]
        if candidate.is_file() and _sha256(candidate) != source["sha256"]:
            raise IntegrityError(f"checksum mismatch for source {source['name']}")
    try:
        return Decomposition(base, details, schedule, color_mode)
    except InvalidInputError as exc:
        raise IntegrityError(str(exc)) from exc
