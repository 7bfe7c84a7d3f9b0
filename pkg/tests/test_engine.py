import os

import pytest

from afforge.clients.base import ClientBundle
from afforge.config import EngineConfig
from afforge.engine import (STAGES, Engine, ObjectOutcome, RunReport,
                            object_seed, summarize_latencies)
from afforge.errors import ServiceTimeoutError, ServiceUnreachableError

from conftest import E2E_SEED, build_shape_store, mock_bundle


def _record_files(store):
    """record -> bytes of every persisted artifact, exports included."""
    out = {}
    for key in store.record_ids():
        object_id, query_id = key.split(":")
        base = store._record_base(object_id, query_id)
        blob = {}
        for ext in (".json", ".heat", ".support"):
            with open(base + ext, "rb") as f:
                blob[ext] = f.read()
        pair_dir = store.path(f"exports/{object_id}/{query_id}")
        for name in sorted(os.listdir(pair_dir)):
            with open(os.path.join(pair_dir, name), "rb") as f:
                blob[name] = f.read()
        out[key] = blob
    return out


class _FailingSegment:
    """Delegates to the real mock except on the poisoned views."""

    def __init__(self, inner, fail_views, exc=ServiceUnreachableError):
        self.inner = inner
        self.fail_views = set(fail_views)
        self.exc = exc

    def segment_at(self, image, points, view_id):
        if view_id in self.fail_views:
            raise self.exc(f"injected failure on view {view_id}")
        return self.inner.segment_at(image, points, view_id)


class _FailingQuery:
    def generate_queries(self, images, cfg):
        raise ServiceTimeoutError("query service down")


class TestDeterminism:
    def test_rerun_byte_identical(self, tmp_path):
        a = build_shape_store(tmp_path / "a", kinds=("cube",), size=64,
                              points=1024)
        b = build_shape_store(tmp_path / "b", kinds=("cube",), size=64,
                              points=1024)
        fa, fb = _record_files(a), _record_files(b)
        assert fa.keys() == fb.keys() and len(fa) == 5
        for key in fa:
            assert fa[key] == fb[key], f"{key} differs between reruns"

    def test_worker_count_does_not_change_outputs(self, tmp_path):
        a = build_shape_store(tmp_path / "a", kinds=("cube", "sphere"),
                              size=64, points=1024, workers=1)
        b = build_shape_store(tmp_path / "b", kinds=("cube", "sphere"),
                              size=64, points=1024, workers=4)
        fa, fb = _record_files(a), _record_files(b)
        assert fa.keys() == fb.keys() and len(fa) == 10
        for key in fa:
            assert fa[key] == fb[key], f"{key} differs with threaded run"
        assert a.manifest["records"] == b.manifest["records"]

    def test_object_seed_stable_and_distinct(self):
        assert object_seed(7, "cube") == object_seed(7, "cube")
        assert object_seed(7, "cube") != object_seed(7, "sphere")
        assert object_seed(7, "cube") != object_seed(8, "cube")
        assert 0 <= object_seed(0, "x") < 2 ** 64


class TestResume:
    def test_full_store_skips_everything(self, mini_store_copy):
        engine = Engine(mini_store_copy, mock_bundle(),
                        EngineConfig(seed=E2E_SEED, workers=1))
        before = _record_files(mini_store_copy)
        report = engine.run_batch()
        assert report.count("skipped") == 1
        assert report.to_dict()["resumed_queries"] == 5
        assert _record_files(mini_store_copy) == before

    def test_partial_resume_rebuilds_only_missing(self, mini_store_copy):
        store = mini_store_copy
        victim = store.record_ids()[2]
        object_id, query_id = victim.split(":")
        os.unlink(store._record_base(object_id, query_id) + ".json")
        with store._lock:
            store.manifest["records"].remove(victim)
            store._save_manifest()
        before = _record_files(store)
        assert victim not in before

        engine = Engine(store, mock_bundle(),
                        EngineConfig(seed=E2E_SEED, workers=1))
        report = engine.run_batch()
        outcome = report.outcomes[0]
        assert outcome.status == "ok"
        assert outcome.resumed_queries == 4
        assert sorted(outcome.record_keys) == sorted(store.record_ids())

        after = _record_files(store)
        assert victim in after
        for key, blobs in before.items():
            assert after[key] == blobs  # untouched records stay untouched

    def test_resumed_records_reregistered(self, mini_store_copy):
        store = mini_store_copy
        with store._lock:
            store.manifest["records"] = []
            store._save_manifest()
        engine = Engine(store, mock_bundle(),
                        EngineConfig(seed=E2E_SEED, workers=1))
        report = engine.run_batch()
        assert report.count("skipped") == 1
        assert len(store.record_ids()) == 5


class TestDegradation:
    def test_segment_failure_marks_views_missing(self, tmp_path):
        store = build_shape_store(tmp_path / "base", kinds=("cube",),
                                  size=64, points=1024)
        # wipe the records, rerun with a poisoned segmenter
        for key in list(store.record_ids()):
            object_id, query_id = key.split(":")
            base = store._record_base(object_id, query_id)
            for ext in (".json", ".heat", ".support"):
                os.unlink(base + ext)
        with store._lock:
            store.manifest["records"] = []
            store._save_manifest()

        bundle = mock_bundle()
        poisoned = ClientBundle(query=bundle.query, point=bundle.point,
                                segment=_FailingSegment(bundle.segment, {0, 1}))
        engine = Engine(store, poisoned,
                        EngineConfig(seed=E2E_SEED, workers=1))
        report = engine.run_batch()
        assert report.count("failed") == 0
        assert report.to_dict()["missing_view_cells"] > 0
        rec = store.read_record("cube", "q0")
        assert 0 in rec.provenance.missing_views
        assert 0 not in rec.contributing_views
        # fusion still produced a usable record from the surviving views
        assert rec.heatmap.values.max() > 0

    def test_invisible_region_views_skip_silently(self, mini_store):
        rec = mini_store.read_record("cube", "q0")
        # the marked face hides from part of the ring: fewer contributors
        # than views, but nothing reported missing
        assert 0 < len(rec.contributing_views) < 25
        assert rec.provenance.missing_views == []

    def test_query_failure_fails_object_not_batch(self, tmp_path):
        store = build_shape_store(tmp_path / "s", kinds=("cube", "sphere"),
                                  size=64, points=1024)
        for key in list(store.record_ids()):
            object_id, query_id = key.split(":")
            base = store._record_base(object_id, query_id)
            for ext in (".json", ".heat", ".support"):
                os.unlink(base + ext)
        with store._lock:
            store.manifest["records"] = []
            store._save_manifest()
        bundle = mock_bundle()
        broken = ClientBundle(query=_FailingQuery(), point=bundle.point,
                              segment=bundle.segment)
        engine = Engine(store, broken, EngineConfig(seed=E2E_SEED, workers=1))
        report = engine.run_batch()
        assert report.count("failed") == 2
        failed = report.outcomes[0]
        assert failed.error and "ServiceTimeoutError" in failed.error
        assert store.record_ids() == []


class TestReporting:
    def test_stage_latencies_recorded(self, tmp_path):
        store = build_shape_store(tmp_path / "s", kinds=("cube",),
                                  size=64, points=512)
        # build_shape_store already ran the engine; run a fresh report pass
        engine = Engine(store, mock_bundle(),
                        EngineConfig(seed=E2E_SEED, workers=1))
        report = engine.run_batch()
        assert set(report.stage_latencies) <= set(STAGES)
        assert "queries" in report.stage_latencies
        d = report.to_dict()
        assert d["stage_latency"]["queries"]["count"] == 1
        assert d["wall_time_s"] > 0

    def test_summarize_latencies(self):
        assert summarize_latencies([]) is None
        s = summarize_latencies([0.1, 0.2, 0.3])
        assert s["count"] == 3
        assert s["max_ms"] == pytest.approx(300.0)
        assert s["p50_ms"] == pytest.approx(200.0)

    def test_report_counts(self):
        report = RunReport(outcomes=[
            ObjectOutcome(object_id="a", status="ok",
                          record_keys=["a:q0"], low_support_flags=1),
            ObjectOutcome(object_id="b", status="failed", error="X: boom"),
            ObjectOutcome(object_id="c", status="skipped",
                          resumed_queries=5, record_keys=["c:q0"]),
        ])
        d = report.to_dict()
        assert d["objects"] == {"ok": 1, "failed": 1, "skipped": 1}
        assert d["records_written"] == 2
        assert d["resumed_queries"] == 5
        assert d["flags"]["low_support"] == 1
        assert d["errors"] == {"b": "X: boom"}
