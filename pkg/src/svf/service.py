"""HTTP tuning service.

Sessions hold one uploaded image plus at most one decomposition, all in
memory. A session lock serialises its decompose/recompose work and the
decomposition is swapped in as a whole, so concurrent readers observe
either the previous result or the new one, never a half-built state.
Sessions expire after a TTL and the oldest one is evicted when the store
is full.
"""

import secrets
import threading
import time
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from .errors import DecodeError, InvalidInputError
from .imgio import decode_image_bytes, encode_png_bytes
from .pyramid import COLOR_MODES, Decomposition, decompose, recompose, schedule_from


class ApiError(Exception):
    """Carries an HTTP status plus a machine-readable error code."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class _Session:
    image: np.ndarray
    touched: float
    lock: threading.Lock = field(default_factory=threading.Lock)
    decomposition: Decomposition | None = None


class _SessionStore:
    def __init__(self, ttl: float, capacity: int):
        self._ttl = ttl
        self._capacity = capacity
        self._lock = threading.Lock()
        self._items: dict[str, _Session] = {}

    def _purge(self, now: float) -> None:
        dead = [sid for sid, s in self._items.items() if now - s.touched > self._ttl]
        for sid in dead:
            del self._items[sid]

    def create(self, image: np.ndarray) -> str:
        now = time.monotonic()
        with self._lock:
            self._purge(now)
            while len(self._items) >= self._capacity:
                oldest = min(self._items, key=lambda sid: self._items[sid].touched)
                del self._items[oldest]
            sid = secrets.token_urlsafe(12)
            self._items[sid] = _Session(image=image, touched=now)
            return sid

    def get(self, sid: str) -> _Session:
        now = time.monotonic()
        with self._lock:
            session = self._items.get(sid)
            if session is None or now - session.touched > self._ttl:
                self._items.pop(sid, None)
                raise ApiError(404, "session_not_found", f"no session {sid}")
            session.touched = now
            return session

    def delete(self, sid: str) -> bool:
        with self._lock:
            return self._items.pop(sid, None) is not None


class DecomposeRequest(BaseModel):
    radii: list[int]
    epsilons: float | list[float] = 0.015
    color_mode: str = "per-channel"


class RecomposeRequest(BaseModel):
    weights: list[float]
    base_weight: float = 1.0


def create_app(*, max_image_pixels: int = 16_000_000, session_ttl: float = 900.0,
               max_sessions: int = 64) -> FastAPI:
    app = FastAPI(title="svf tuning service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = _SessionStore(ttl=session_ttl, capacity=max_sessions)

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"error": exc.message, "code": exc.code})

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=422,
                            content={"error": str(exc.errors()), "code": "invalid_request"})

    def _png_response(image: np.ndarray) -> Response:
        return Response(content=encode_png_bytes(image), media_type="image/png")

    @app.get("/api/health")
    async def health():
        return {"status": "ok"}

    @app.post("/api/sessions", status_code=201)
    async def create_session(file: UploadFile):
        data = await file.read()
        try:
            image = decode_image_bytes(data, drop_alpha=True)
        except DecodeError as exc:
            raise ApiError(415, "unsupported_media", str(exc))
        height, width = image.shape[:2]
        if height * width > max_image_pixels:
            raise ApiError(
                413, "too_large",
                f"{width}x{height} exceeds the {max_image_pixels}-pixel limit",
            )
        sid = store.create(image)
        channels = 1 if image.ndim == 2 else image.shape[2]
        return {"session_id": sid, "width": width, "height": height,
                "channels": channels}

    @app.post("/api/sessions/{sid}/decompose")
    async def run_decompose(sid: str, req: DecomposeRequest):
        session = store.get(sid)
        if req.color_mode not in COLOR_MODES:
            raise ApiError(422, "invalid_schedule",
                           f"color_mode must be one of {COLOR_MODES}")
        try:
            schedule = schedule_from(req.radii, req.epsilons)
        except InvalidInputError as exc:
            raise ApiError(422, "invalid_schedule", str(exc))
        with session.lock:
            t0 = time.perf_counter()
            try:
                result = decompose(session.image, schedule, req.color_mode)
            except InvalidInputError as exc:
                raise ApiError(422, "invalid_schedule", str(exc))
            elapsed_ms = (time.perf_counter() - t0) * 1e3
            session.decomposition = result
        per_level = [
            {
                "radius": level.radius,
                "epsilon": level.epsilon,
                "min": float(detail.min()),
                "max": float(detail.max()),
                "mean": float(detail.mean()),
            }
            for level, detail in zip(schedule.levels, result.details)
        ]
        return {"levels": result.levels, "per_level": per_level,
                "timing_ms": elapsed_ms}

    @app.post("/api/sessions/{sid}/recompose")
    async def run_recompose(sid: str, req: RecomposeRequest):
        session = store.get(sid)
        with session.lock:
            current = session.decomposition
            if current is None:
                raise ApiError(409, "no_decomposition",
                               "decompose the session before recomposing")
            try:
                result = recompose(current, req.weights, req.base_weight)
            except InvalidInputError as exc:
                raise ApiError(422, "weight_mismatch", str(exc))
        return _png_response(result)

    @app.get("/api/sessions/{sid}/layers/base")
    async def layer_base(sid: str):
        session = store.get(sid)
        current = session.decomposition
        if current is None:
            raise ApiError(409, "no_decomposition", "no decomposition yet")
        return _png_response(current.base)

    @app.get("/api/sessions/{sid}/layers/{index}")
    async def layer_detail(sid: str, index: int):
        session = store.get(sid)
        current = session.decomposition
        if current is None:
            raise ApiError(409, "no_decomposition", "no decomposition yet")
        if not 1 <= index <= current.levels:
            raise ApiError(404, "layer_not_found",
                           f"layer {index} of {current.levels}")
        # details are signed; shift into [0,1] so zero lands on mid-gray
        return _png_response(current.details[index - 1] + 0.5)

    @app.delete("/api/sessions/{sid}", status_code=204)
    async def delete_session(sid: str):
        if not store.delete(sid):
            raise ApiError(404, "session_not_found", f"no session {sid}")
        return Response(status_code=204)

    return app
