"""HTTP service: sessions, decomposition, previews, failure codes."""

import io
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from fastapi.testclient import TestClient
from PIL import Image

from svf.imgio import decode_image_bytes, encode_png_bytes
from svf.service import create_app


@pytest.fixture
def client():
    with TestClient(create_app()) as c:
        yield c


def _png(rng, size=24, channels=3):
    shape = (size, size) if channels == 1 else (size, size, channels)
    image = rng.integers(0, 256, size=shape) / 255.0
    return encode_png_bytes(image), image


def _upload(client, data):
    response = client.post("/api/sessions", files={"file": ("img.png", data, "image/png")})
    assert response.status_code == 201, response.text
    return response.json()


def test_health(client):
    assert client.get("/api/health").json() == {"status": "ok"}


def test_upload_reports_geometry(client, rng):
    data, _ = _png(rng, size=20)
    body = _upload(client, data)
    assert body["width"] == 20
    assert body["height"] == 20
    assert body["channels"] == 3
    assert isinstance(body["session_id"], str) and body["session_id"]

    gray, _ = _png(rng, size=10, channels=1)
    assert _upload(client, gray)["channels"] == 1


def test_upload_rejects_non_images(client):
    response = client.post("/api/sessions",
                           files={"file": ("x.png", b"junk bytes", "image/png")})
    assert response.status_code == 415
    body = response.json()
    assert body["code"] == "unsupported_media"
    assert "error" in body


def test_upload_rejects_oversized_images(rng):
    with TestClient(create_app(max_image_pixels=100)) as client:
        data, _ = _png(rng, size=20)
        response = client.post("/api/sessions", files={"file": ("x.png", data, "image/png")})
        assert response.status_code == 413
        assert response.json()["code"] == "too_large"


def test_upload_drops_alpha(client, rng):
    rgba = rng.integers(0, 256, size=(8, 8, 4)).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(rgba, mode="RGBA").save(buf, format="PNG")
    body = _upload(client, buf.getvalue())
    assert body["channels"] == 3


def test_unknown_session_is_404(client):
    for response in (
        client.post("/api/sessions/nope/decompose", json={"radii": [2]}),
        client.post("/api/sessions/nope/recompose", json={"weights": [1.0]}),
        client.get("/api/sessions/nope/layers/base"),
        client.delete("/api/sessions/nope"),
    ):
        assert response.status_code == 404
        assert response.json()["code"] == "session_not_found"


def test_decompose_reports_levels_and_stats(client, rng):
    data, _ = _png(rng)
    sid = _upload(client, data)["session_id"]
    response = client.post(f"/api/sessions/{sid}/decompose",
                           json={"radii": [2, 4], "epsilons": 0.015})
    assert response.status_code == 200
    body = response.json()
    assert body["levels"] == 2
    assert body["timing_ms"] > 0.0
    assert len(body["per_level"]) == 2
    for level, radius in zip(body["per_level"], (2, 4)):
        assert level["radius"] == radius
        assert level["epsilon"] == 0.015
        assert level["min"] <= level["mean"] <= level["max"]


def test_decompose_validates_schedule(client, rng):
    data, _ = _png(rng, size=16)
    sid = _upload(client, data)["session_id"]
    for payload in (
        {"radii": []},
        {"radii": [0]},
        {"radii": [2], "epsilons": 0.0},
        {"radii": [2, 4], "epsilons": [0.1, 0.2, 0.3]},
        {"radii": [20]},                      # window exceeds the image
        {"radii": [2], "color_mode": "cmyk"},
    ):
        response = client.post(f"/api/sessions/{sid}/decompose", json=payload)
        assert response.status_code == 422, payload
        assert response.json()["code"] == "invalid_schedule", payload
    # malformed body shape
    response = client.post(f"/api/sessions/{sid}/decompose", json={"weights": [1]})
    assert response.status_code == 422
    assert response.json()["code"] == "invalid_request"


def test_recompose_requires_decomposition(client, rng):
    data, _ = _png(rng)
    sid = _upload(client, data)["session_id"]
    response = client.post(f"/api/sessions/{sid}/recompose", json={"weights": [1.0]})
    assert response.status_code == 409
    assert response.json()["code"] == "no_decomposition"


def test_recompose_validates_weight_count(client, rng):
    data, _ = _png(rng)
    sid = _upload(client, data)["session_id"]
    client.post(f"/api/sessions/{sid}/decompose", json={"radii": [2, 4]})
    response = client.post(f"/api/sessions/{sid}/recompose", json={"weights": [1.0]})
    assert response.status_code == 422
    assert response.json()["code"] == "weight_mismatch"


def test_unit_recompose_returns_the_upload(client, rng):
    data, image = _png(rng)
    sid = _upload(client, data)["session_id"]
    client.post(f"/api/sessions/{sid}/decompose",
                json={"radii": [2, 4, 8], "epsilons": 0.015})
    response = client.post(f"/api/sessions/{sid}/recompose",
                           json={"weights": [1.0, 1.0, 1.0], "base_weight": 1.0})
    assert response.status_code == 200
    assert response.headers["content-type"] == "image/png"
    rebuilt = decode_image_bytes(response.content)
    assert np.max(np.abs(rebuilt - image)) <= 1.0 / 255.0


def test_recompose_weights_change_the_preview(client, rng):
    data, _ = _png(rng)
    sid = _upload(client, data)["session_id"]
    client.post(f"/api/sessions/{sid}/decompose", json={"radii": [2]})
    flat = client.post(f"/api/sessions/{sid}/recompose",
                       json={"weights": [0.0]}).content
    boosted = client.post(f"/api/sessions/{sid}/recompose",
                          json={"weights": [5.0]}).content
    assert flat != boosted


def test_layer_endpoints(client, rng):
    data, _ = _png(rng)
    sid = _upload(client, data)["session_id"]
    assert client.get(f"/api/sessions/{sid}/layers/base").status_code == 409

    client.post(f"/api/sessions/{sid}/decompose", json={"radii": [2, 4]})
    base = client.get(f"/api/sessions/{sid}/layers/base")
    assert base.status_code == 200
    assert base.headers["content-type"] == "image/png"
    assert decode_image_bytes(base.content).shape == (24, 24, 3)

    for index in (1, 2):
        layer = client.get(f"/api/sessions/{sid}/layers/{index}")
        assert layer.status_code == 200
        assert decode_image_bytes(layer.content).shape == (24, 24, 3)

    for bad in (0, 3, -1):
        response = client.get(f"/api/sessions/{sid}/layers/{bad}")
        assert response.status_code == 404
        assert response.json()["code"] == "layer_not_found"

    # layer previews are deterministic byte-for-byte
    again = client.get(f"/api/sessions/{sid}/layers/base")
    assert again.content == base.content


def test_constant_image_detail_layer_is_mid_gray(client):
    image = np.full((16, 16), 128 / 255.0)
    sid = _upload(client, encode_png_bytes(image))["session_id"]
    client.post(f"/api/sessions/{sid}/decompose", json={"radii": [2]})
    layer = client.get(f"/api/sessions/{sid}/layers/1")
    arr = np.asarray(Image.open(io.BytesIO(layer.content)))
    assert arr.min() == 128 and arr.max() == 128


def test_luma_mode_layers_are_single_plane(client, rng):
    data, _ = _png(rng)
    sid = _upload(client, data)["session_id"]
    client.post(f"/api/sessions/{sid}/decompose",
                json={"radii": [2], "color_mode": "luma"})
    base = decode_image_bytes(client.get(f"/api/sessions/{sid}/layers/base").content)
    assert base.shape == (24, 24, 3)
    detail = decode_image_bytes(client.get(f"/api/sessions/{sid}/layers/1").content)
    assert detail.shape == (24, 24)


def test_redecompose_replaces_previous_result(client, rng):
    data, _ = _png(rng)
    sid = _upload(client, data)["session_id"]
    client.post(f"/api/sessions/{sid}/decompose", json={"radii": [2]})
    assert client.get(f"/api/sessions/{sid}/layers/2").status_code == 404
    client.post(f"/api/sessions/{sid}/decompose", json={"radii": [2, 4]})
    assert client.get(f"/api/sessions/{sid}/layers/2").status_code == 200
    response = client.post(f"/api/sessions/{sid}/recompose", json={"weights": [1.0]})
    assert response.status_code == 422  # old single-level weights no longer fit


def test_delete_session(client, rng):
    data, _ = _png(rng)
    sid = _upload(client, data)["session_id"]
    assert client.delete(f"/api/sessions/{sid}").status_code == 204
    assert client.delete(f"/api/sessions/{sid}").status_code == 404
    assert client.post(f"/api/sessions/{sid}/decompose",
                       json={"radii": [2]}).status_code == 404


def test_sessions_expire(rng):
    with TestClient(create_app(session_ttl=0.05)) as client:
        data, _ = _png(rng, size=8)
        sid = _upload(client, data)["session_id"]
        time.sleep(0.12)
        response = client.post(f"/api/sessions/{sid}/decompose", json={"radii": [2]})
        assert response.status_code == 404


def test_store_evicts_oldest_session(rng):
    with TestClient(create_app(max_sessions=2)) as client:
        data, _ = _png(rng, size=8)
        first = _upload(client, data)["session_id"]
        second = _upload(client, data)["session_id"]
        third = _upload(client, data)["session_id"]
        assert client.post(f"/api/sessions/{first}/decompose",
                           json={"radii": [2]}).status_code == 404
        for sid in (second, third):
            assert client.post(f"/api/sessions/{sid}/decompose",
                               json={"radii": [2]}).status_code == 200


def test_cors_headers_present(client, rng):
    data, _ = _png(rng, size=8)
    response = client.post("/api/sessions",
                           files={"file": ("x.png", data, "image/png")},
                           headers={"Origin": "http://localhost:5173"})
    assert response.headers.get("access-control-allow-origin") == "*"


def test_parallel_sessions_do_not_interfere(client, rng):
    uploads = [_png(rng, size=16) for _ in range(2)]
    sids = [_upload(client, data)["session_id"] for data, _ in uploads]

    def work(sid):
        client.post(f"/api/sessions/{sid}/decompose",
                    json={"radii": [2, 4], "epsilons": 0.015})
        return client.post(f"/api/sessions/{sid}/recompose",
                           json={"weights": [2.0, 1.0]}).content

    serial = [work(sid) for sid in sids]
    with ThreadPoolExecutor(max_workers=2) as pool:
        parallel = list(pool.map(work, sids))
    assert serial == parallel
    assert serial[0] != serial[1]
