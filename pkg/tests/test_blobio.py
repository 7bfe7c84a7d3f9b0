import struct

import numpy as np
import pytest

from afforge import blobio
from afforge.errors import CorruptBlobError, SchemaVersionMismatchError


class TestRoundTrips:
    def test_heat_1d(self, tmp_path):
        p = tmp_path / "a.heat"
        vals = np.random.default_rng(0).random(257).astype(np.float32)
        blobio.write_heat(p, vals)
        back = blobio.read_heat_1d(p, expected_count=257)
        assert back.dtype == np.float32
        assert back.tobytes() == vals.tobytes()

    def test_heat_2d(self, tmp_path):
        p = tmp_path / "b.heat"
        img = np.random.default_rng(1).random((17, 23)).astype(np.float32)
        blobio.write_heat(p, img)
        back = blobio.read_heat_2d(p, 17, 23)
        assert back.shape == (17, 23)
        assert back.tobytes() == img.tobytes()

    def test_support(self, tmp_path):
        p = tmp_path / "c.support"
        sup = np.random.default_rng(2).integers(0, 26, 99).astype(np.uint32)
        blobio.write_support(p, sup)
        back = blobio.read_support(p, expected_count=99)
        assert back.dtype == np.uint32
        assert back.tobytes() == sup.tobytes()

    def test_depth(self, tmp_path):
        p = tmp_path / "d.depth"
        depth = np.random.default_rng(3).random((12, 9)).astype(np.float32)
        depth[0, 0] = np.inf  # background convention survives the trip
        blobio.write_depth(p, depth)
        back = blobio.read_depth(p, 12, 9)
        assert back.tobytes() == depth.tobytes()

    def test_points(self, tmp_path):
        p = tmp_path / "e.bin"
        pts = np.random.default_rng(4).random((41, 3))
        blobio.write_points(p, pts)
        back = blobio.read_points(p, expected_count=41)
        assert back.dtype == np.float64
        assert back.tobytes() == pts.tobytes()

    def test_index(self, tmp_path):
        p = tmp_path / "f.idx"
        idx = np.array([5, 0, 2 ** 40, -1], dtype=np.int64)
        blobio.write_index(p, idx)
        back = blobio.read_index(p, expected_count=4)
        assert back.tobytes() == idx.tobytes()

    def test_non_native_input_normalized(self, tmp_path):
        p = tmp_path / "g.heat"
        vals = np.arange(6, dtype=">f4")  # big-endian input
        blobio.write_heat(p, vals)
        back = blobio.read_heat_1d(p)
        assert np.array_equal(back, vals.astype(np.float32))


class TestCorruption:
    def test_truncated_header(self, tmp_path):
        p = tmp_path / "t.heat"
        p.write_bytes(b"AFH")
        with pytest.raises(CorruptBlobError):
            blobio.read_heat_1d(p)

    def test_wrong_magic(self, tmp_path):
        p = tmp_path / "m.heat"
        blobio.write_support(p, np.zeros(4, dtype=np.uint32))
        with pytest.raises(CorruptBlobError):
            blobio.read_heat_1d(p)

    def test_future_schema_version(self, tmp_path):
        p = tmp_path / "v.heat"
        p.write_bytes(struct.pack("<4sI", blobio.MAGIC_HEAT,
                                  blobio.SCHEMA_VERSION + 1) + b"\x00" * 4)
        with pytest.raises(SchemaVersionMismatchError):
            blobio.read_heat_1d(p)

    def test_truncated_payload(self, tmp_path):
        p = tmp_path / "p.heat"
        blobio.write_heat(p, np.zeros(8, dtype=np.float32))
        raw = p.read_bytes()
        p.write_bytes(raw[:-2])  # tear the payload mid-element
        with pytest.raises(CorruptBlobError):
            blobio.read_heat_1d(p)

    def test_count_mismatch(self, tmp_path):
        p = tmp_path / "n.heat"
        blobio.write_heat(p, np.zeros(8, dtype=np.float32))
        with pytest.raises(CorruptBlobError):
            blobio.read_heat_1d(p, expected_count=9)

    def test_points_shape_enforced(self, tmp_path):
        with pytest.raises(ValueError):
            blobio.write_points(tmp_path / "x.bin", np.zeros((4, 2)))
        with pytest.raises(ValueError):
            blobio.write_depth(tmp_path / "y.depth", np.zeros(4, np.float32))

    def test_atomic_write_leaves_no_tmp(self, tmp_path):
        p = tmp_path / "sub" / "z.heat"
        blobio.write_heat(p, np.zeros(4, dtype=np.float32))
        leftovers = [f for f in (tmp_path / "sub").iterdir()
                     if f.suffix == ".tmp"]
        assert leftovers == []
        assert p.exists()
