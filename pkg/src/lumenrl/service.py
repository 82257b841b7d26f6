"""HTTP facade over the inference controller.

Endpoints:
    POST /api/enhance  personalized enhancement of a base64 image
    POST /api/score    quality score, brightness and histogram
    GET  /api/health   liveness and model status

Images travel base64-encoded inside JSON bodies; responses are plain
JSON, deterministic for identical requests against one checkpoint. The
loaded model is an immutable snapshot shared by all requests.
"""

from __future__ import annotations

import base64
import binascii

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import nn, rl
from .data import image_from_bytes, image_to_bytes, load_checkpoint, downscale
from .inference import InferenceConfig, PersonalizationTarget, enhance_adaptive, normalized_zfc
from .metrics import luminance_histogram

HISTOGRAM_BINS = 32
THUMBNAIL_EDGE = 128
DEFAULT_MAX_PIXELS = 4_000_000

TARGET_KEYS = ("reference_image", "zfc_target", "fixed_iterations")


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


def _decode_image(b64: str, field: str, max_pixels: int) -> np.ndarray:
    if not isinstance(b64, str):
        raise ApiError(400, f"{field} must be a base64 string")
    try:
        payload = base64.b64decode(b64, validate=True)
    except (binascii.Error, ValueError):
        raise ApiError(400, f"{field} is not valid base64")
    try:
        image = image_from_bytes(payload)
    except ValueError as exc:
        raise ApiError(400, f"{field}: {exc}")
    if image.shape[0] * image.shape[1] > max_pixels:
        raise ApiError(413, f"{field} exceeds the {max_pixels}-pixel limit")
    return image


def _encode_image(image) -> str:
    return base64.b64encode(image_to_bytes(image)).decode("ascii")


def _histogram(image) -> list:
    return luminance_histogram(image, HISTOGRAM_BINS).tolist()


def create_app(checkpoint_path=None, max_pixels: int = DEFAULT_MAX_PIXELS,
               static_dir=None) -> FastAPI:
    app = FastAPI(title="lumenrl", docs_url=None, redoc_url=None)

    net = None
    checkpoint_round = None
    if checkpoint_path is not None:
        ckpt = load_checkpoint(checkpoint_path)
        net = nn.PolicyValueNet.from_params(ckpt.params)
        checkpoint_round = ckpt.metadata.get("round")

    @app.exception_handler(ApiError)
    async def api_error_handler(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={"detail": exc.message})

    async def read_json(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception:
            raise ApiError(400, "request body is not valid JSON")
        if not isinstance(body, dict):
            raise ApiError(400, "request body must be a JSON object")
        return body

    @app.get("/api/health")
    async def health():
        return {
            "status": "ok",
            "model_loaded": net is not None,
            "checkpoint_round": checkpoint_round,
        }

    @app.post("/api/score")
    async def score(request: Request):
        body = await read_json(request)
        if "image" not in body:
            raise ApiError(400, "missing field 'image'")
        image = _decode_image(body["image"], "image", max_pixels)
        return {
            "quality_score": rl.quality_score(image),
            "normalized_zfc": normalized_zfc(image),
            "histogram": _histogram(image),
        }

    @app.post("/api/enhance")
    async def enhance(request: Request):
        if net is None:
            raise ApiError(503, "no checkpoint loaded; enhancement unavailable")
        body = await read_json(request)
        if "input_image" not in body:
            raise ApiError(400, "missing field 'input_image'")
        image = _decode_image(body["input_image"], "input_image", max_pixels)

        target_body = body.get("target")
        if not isinstance(target_body, dict):
            raise ApiError(400, "missing or malformed 'target' object")
        given = [k for k in TARGET_KEYS if target_body.get(k) is not None]
        if len(given) != 1:
            raise ApiError(
                400, f"target must set exactly one of {TARGET_KEYS}, got {given}"
            )
        unknown = set(target_body) - set(TARGET_KEYS) - {"zfc_is_raw"}
        if unknown:
            raise ApiError(400, f"unknown target fields {sorted(unknown)}")

        reference = None
        try:
            if given[0] == "reference_image":
                reference = _decode_image(
                    target_body["reference_image"], "reference_image", max_pixels
                )
                target = PersonalizationTarget(reference_image=reference)
            elif given[0] == "zfc_target":
                target = PersonalizationTarget(
                    zfc_target=float(target_body["zfc_target"]),
                    zfc_is_raw=bool(target_body.get("zfc_is_raw", False)),
                )
            else:
                target = PersonalizationTarget(
                    fixed_iterations=int(target_body["fixed_iterations"])
                )
        except (TypeError, ValueError) as exc:
            raise ApiError(400, f"malformed target: {exc}")

        return_steps = bool(body.get("return_steps", False))
        try:
            config = InferenceConfig(
                epsilon=float(body.get("epsilon", 0.05)),
                max_iterations=int(body.get("max_iterations", 20)),
                record_trajectory=return_steps,
            )
        except (TypeError, ValueError) as exc:
            raise ApiError(400, f"malformed inference options: {exc}")

        try:
            result = enhance_adaptive(net, image, target, config)
        except ValueError as exc:
            message = str(exc)
            if "degenerate" in message:
                raise ApiError(422, message)
            raise ApiError(400, message)

        response = {
            "output_image": _encode_image(result.output),
            "iterations_used": result.iterations_used,
            "converged": result.converged,
            "zfc_trajectory": [
                {"step": step, "zfc": zfc} for step, zfc in result.zfc_trajectory
            ],
            "input_histogram": _histogram(image),
            "output_histogram": _histogram(result.output),
        }
        if reference is not None:
            response["reference_histogram"] = _histogram(reference)
        if return_steps:
            response["step_images"] = [
                _encode_image(downscale(img, THUMBNAIL_EDGE))
                for img in result.step_images
            ]
        return response

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
