"""Encoding helpers shared by the wire clients, the mock server, and the
review API: PNG bytes and base64 little-endian float32 payloads."""

from __future__ import annotations

import base64
import io

import numpy as np
from PIL import Image


def encode_png(image: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(image).save(buf, format="PNG")
    return buf.getvalue()


def decode_png_rgba(data: bytes) -> np.ndarray:
    with Image.open(io.BytesIO(data)) as img:
        return np.asarray(img.convert("RGBA"))


def b64_of_bytes(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


def bytes_of_b64(text: str) -> bytes:
    return base64.b64decode(text.encode("ascii"))


def b64_of_f32(arr: np.ndarray) -> str:
    """Row-major little-endian float32, base64-encoded."""
    return b64_of_bytes(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def f32_of_b64(text: str, count: int) -> np.ndarray:
    raw = bytes_of_b64(text)
    if len(raw) != count * 4:
        raise ValueError(f"float32 payload is {len(raw)} bytes, expected {count * 4}")
    return np.frombuffer(raw, dtype="<f4").astype(np.float32)


def b64_of_u32(arr: np.ndarray) -> str:
    return b64_of_bytes(np.ascontiguousarray(arr, dtype="<u4").tobytes())
