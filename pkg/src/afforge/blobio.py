"""Binary blob format for heatmaps, support counts, depth maps, points, and
index lists.

Layout: 4-byte ASCII magic + uint32 little-endian schema version, then the
raw payload, always little-endian and row-major. Fixed field order and
explicit endianness keep files platform-independent.
"""

from __future__ import annotations

import os
import struct
import tempfile

import numpy as np

from .errors import CorruptBlobError, SchemaVersionMismatchError

SCHEMA_VERSION = 1

MAGIC_HEAT = b"AFHB"      # float32 heat values (1D per-point or 2D per-pixel)
MAGIC_SUPPORT = b"AFSB"   # uint32 per-point support counts
MAGIC_DEPTH = b"AFDB"     # float32 H x W depth map
MAGIC_POINTS = b"AFPB"    # float64 N x 3 point positions
MAGIC_INDEX = b"AFXB"     # int64 index list

_HEADER = struct.Struct("<4sI")


def _write(path, magic: bytes, payload: bytes):
    path = os.fspath(path)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(_HEADER.pack(magic, SCHEMA_VERSION))
            f.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read(path, magic: bytes) -> bytes:
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < _HEADER.size:
        raise CorruptBlobError(f"{path}: shorter than the 8-byte header")
    got_magic, version = _HEADER.unpack_from(raw)
    if got_magic != magic:
        raise CorruptBlobError(f"{path}: magic {got_magic!r}, expected {magic!r}")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatchError(
            f"{path}: schema version {version}, this build reads {SCHEMA_VERSION}"
        )
    return raw[_HEADER.size:]


def _payload_to_array(path, payload: bytes, dtype, expected_count=None):
    dtype = np.dtype(dtype)
    if expected_count is not None and len(payload) != expected_count * dtype.itemsize:
        raise CorruptBlobError(
            f"{path}: payload is {len(payload)} bytes, expected "
            f"{expected_count} x {dtype.itemsize}"
        )
    if len(payload) % dtype.itemsize != 0:
        raise CorruptBlobError(f"{path}: payload not a multiple of {dtype.itemsize}")
    return np.frombuffer(payload, dtype=dtype).copy()


def write_heat(path, values: np.ndarray):
    arr = np.ascontiguousarray(values, dtype="<f4")
    _write(path, MAGIC_HEAT, arr.tobytes())


def read_heat_1d(path, expected_count: int | None = None) -> np.ndarray:
    payload = _read(path, MAGIC_HEAT)
    return _payload_to_array(path, payload, "<f4", expected_count).astype(np.float32)


def read_heat_2d(path, height: int, width: int) -> np.ndarray:
    payload = _read(path, MAGIC_HEAT)
    flat = _payload_to_array(path, payload, "<f4", height * width)
    return flat.astype(np.float32).reshape(height, width)


def write_support(path, support: np.ndarray):
    arr = np.ascontiguousarray(support, dtype="<u4")
    _write(path, MAGIC_SUPPORT, arr.tobytes())


def read_support(path, expected_count: int | None = None) -> np.ndarray:
    payload = _read(path, MAGIC_SUPPORT)
    return _payload_to_array(path, payload, "<u4", expected_count).astype(np.uint32)


def write_depth(path, depth: np.ndarray):
    arr = np.ascontiguousarray(depth, dtype="<f4")
    if arr.ndim != 2:
        raise ValueError(f"depth must be H x W, got shape {arr.shape}")
    _write(path, MAGIC_DEPTH, arr.tobytes())


def read_depth(path, height: int, width: int) -> np.ndarray:
    payload = _read(path, MAGIC_DEPTH)
    flat = _payload_to_array(path, payload, "<f4", height * width)
    return flat.astype(np.float32).reshape(height, width)


def write_points(path, positions: np.ndarray):
    arr = np.ascontiguousarray(positions, dtype="<f8")
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"positions must be N x 3, got shape {arr.shape}")
    _write(path, MAGIC_POINTS, arr.tobytes())


def read_points(path, expected_count: int | None = None) -> np.ndarray:
    payload = _read(path, MAGIC_POINTS)
    expected = None if expected_count is None else expected_count * 3
    flat = _payload_to_array(path, payload, "<f8", expected)
    if flat.shape[0] % 3 != 0:
        raise CorruptBlobError(f"{path}: point payload not a multiple of 3 floats")
    return flat.astype(np.float64).reshape(-1, 3)


def write_index(path, indices: np.ndarray):
    arr = np.ascontiguousarray(indices, dtype="<i8")
    _write(path, MAGIC_INDEX, arr.tobytes())


def read_index(path, expected_count: int | None = None) -> np.ndarray:
    payload = _read(path, MAGIC_INDEX)
    return _payload_to_array(path, payload, "<i8", expected_count).astype(np.int64)
