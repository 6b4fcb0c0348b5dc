import itertools
from concurrent.futures import ThreadPoolExecutor

import pytest

from vigil.backend.db import Database
from vigil.backend.service import BackendService
from vigil.classify import InferenceRecord, stub_scores
from vigil.errors import (
    AlertConflictError,
    UnknownAlertError,
    UnknownChunkError,
    ValidationError,
)
from vigil.ingest import VideoChunk
from vigil.labels import ClassLabel

F, S, C, N = ClassLabel.FALLING, ClassLabel.STAGGERING, ClassLabel.CHEST_PAIN, ClassLabel.NORMAL


class FakeClock:
    def __init__(self):
        self._tick = itertools.count(1000, 10)

    def __call__(self) -> int:
        return next(self._tick)


@pytest.fixture
def service():
    svc = BackendService(Database(":memory:"), clock=FakeClock())
    for i in range(12):
        svc.register_chunk(
            VideoChunk(
                chunk_id=f"cam1:{i * 10000}",
                stream_id="cam1",
                start_ts=i * 10000,
                duration_s=10.0,
                frame_count=300,
                storage_key=f"cam1/{i * 10000:012d}.svf",
                partial=False,
            )
        )
    return svc


def make_record(chunk_id: str, label: ClassLabel, model_id="stub", created_ts=0):
    return InferenceRecord(
        chunk_id=chunk_id,
        label=label,
        scores=stub_scores(label),
        model_id=model_id,
        latency_ms=4.2,
        created_ts=created_ts,
    )


def test_normal_inference_no_alert(service):
    outcome = service.record_inference(make_record("cam1:0", N))
    assert outcome.alert is None
    assert not outcome.duplicate
    assert service.alert_counts() == {"pending": 0, "confirmed": 0, "dismissed": 0}


def test_critical_inference_creates_alert_and_notification(service):
    outcome = service.record_inference(make_record("cam1:0", F))
    assert outcome.alert is not None
    assert outcome.alert.state == "pending"
    assert outcome.alert.label == F
    rows = service.db.query("SELECT * FROM notifications")
    assert len(rows) == 1
    assert rows[0]["alert_id"] == outcome.alert.alert_id
    assert rows[0]["delivery_state"] == "queued"


def test_duplicate_submission_is_idempotent(service):
    first = service.record_inference(make_record("cam1:0", F))
    second = service.record_inference(make_record("cam1:0", F))
    assert second.duplicate
    assert second.inference_id == first.inference_id
    assert second.alert is None
    assert service.alert_counts()["pending"] == 1
    assert len(service.db.query("SELECT * FROM notifications")) == 1


def test_same_chunk_different_model_not_duplicate(service):
    service.record_inference(make_record("cam1:0", F, model_id="m1"))
    outcome = service.record_inference(make_record("cam1:0", F, model_id="m2"))
    assert not outcome.duplicate
    assert service.alert_counts()["pending"] == 2


def test_unknown_chunk_rejected(service):
    with pytest.raises(UnknownChunkError, match="unknown chunk"):
        service.record_inference(make_record("cam9:0", F))


def test_persistence_failure_goes_to_dead_letter(service, monkeypatch):
    import sqlite3

    def broken_transaction():
        raise sqlite3.OperationalError("disk I/O error")

    rec = make_record("cam1:0", F)
    monkeypatch.setattr(service.db, "transaction", broken_transaction)
    with pytest.raises(Exception, match="persistence failure"):
        service.record_inference(rec)
    assert service.dead_letter == [(rec, "disk I/O error")]


def test_review_confirm_leaves_retraining_queue_alone(service):
    alert = service.record_inference(make_record("cam1:0", F)).alert
    reviewed = service.review_alert(alert.alert_id, "confirmed", reviewer="nurse-1")
    assert reviewed.state == "confirmed"
    assert reviewed.reviewed_ts is not None
    assert reviewed.reviewer == "nurse-1"
    assert service.list_retraining() == []


def test_review_dismiss_appends_retraining_item(service):
    alert = service.record_inference(make_record("cam1:0", F)).alert
    service.review_alert(alert.alert_id, "dismissed", reviewer="nurse-1", corrected_label=N)
    items = service.list_retraining()
    assert len(items) == 1
    assert items[0].predicted == F
    assert items[0].corrected == N
    assert items[0].chunk_id == "cam1:0"


def test_review_twice_conflicts(service):
    alert = service.record_inference(make_record("cam1:0", S)).alert
    service.review_alert(alert.alert_id, "confirmed", reviewer="a")
    with pytest.raises(AlertConflictError):
        service.review_alert(alert.alert_id, "dismissed", reviewer="b")
    # and the state did not move
    assert service.get_alert(alert.alert_id).state == "confirmed"


def test_review_unknown_alert(service):
    with pytest.raises(UnknownAlertError):
        service.review_alert("al-nope", "confirmed", reviewer="a")


def test_review_validates_decision_and_corrected(service):
    alert = service.record_inference(make_record("cam1:0", F)).alert
    with pytest.raises(ValidationError):
        service.review_alert(alert.alert_id, "maybe", reviewer="a")
    with pytest.raises(ValidationError, match="corrected"):
        service.review_alert(alert.alert_id, "dismissed", reviewer="a", corrected_label=F)
    # failed review left the alert pending
    assert service.get_alert(alert.alert_id).state == "pending"


def test_no_transition_out_of_terminal_states(service):
    alert = service.record_inference(make_record("cam1:0", C)).alert
    service.review_alert(alert.alert_id, "dismissed", reviewer="a", corrected_label=N)
    for decision in ("confirmed", "dismissed"):
        with pytest.raises(AlertConflictError):
            service.review_alert(alert.alert_id, decision, reviewer="b")
    assert service.get_alert(alert.alert_id).state == "dismissed"


def test_list_alerts_filtering_and_order(service):
    service.record_inference(make_record("cam1:0", F))
    service.record_inference(make_record("cam1:10000", S))
    service.record_inference(make_record("cam1:20000", C))
    service.record_inference(make_record("cam1:30000", N))
    page = service.list_alerts(state="pending")
    assert page.total == 3
    created = [a.created_ts for a in page.alerts]
    assert created == sorted(created, reverse=True)

    future = service.list_alerts(since_ts=10**15)
    assert future.alerts == [] and future.total == 0

    with pytest.raises(ValidationError, match="unknown alert state"):
        service.list_alerts(state="resolved")


def test_list_alerts_stable_pagination(service):
    for i in range(10):
        service.record_inference(make_record(f"cam1:{i * 10000}", F))
    p1 = service.list_alerts(page=1, page_size=4)
    p2 = service.list_alerts(page=2, page_size=4)
    p3 = service.list_alerts(page=3, page_size=4)
    ids = [a.alert_id for p in (p1, p2, p3) for a in p.alerts]
    assert len(ids) == 10
    assert len(set(ids)) == 10
    assert p1.total == 10
    # re-reading a page yields the same slice
    again = service.list_alerts(page=2, page_size=4)
    assert [a.alert_id for a in again.alerts] == [a.alert_id for a in p2.alerts]


def test_alert_count_equals_critical_minus_duplicates_under_concurrency(service):
    # 8 distinct critical chunks, each submitted 4 times concurrently, plus
    # 4 Normal chunks: expect exactly 8 alerts whatever the interleaving.
    jobs = []
    for i in range(8):
        jobs.extend([make_record(f"cam1:{i * 10000}", F)] * 4)
    for i in range(8, 12):
        jobs.append(make_record(f"cam1:{i * 10000}", N))

    with ThreadPoolExecutor(max_workers=12) as pool:
        outcomes = list(pool.map(service.record_inference, jobs))

    alerts = [o.alert for o in outcomes if o.alert is not None]
    assert len(alerts) == 8
    assert service.alert_counts()["pending"] == 8
    assert sum(o.duplicate for o in outcomes) == 24
    # exactly one notification per alert
    rows = service.db.query("SELECT alert_id, COUNT(*) AS n FROM notifications GROUP BY alert_id")
    assert len(rows) == 8
    assert all(r["n"] == 1 for r in rows)


def test_concurrent_reviews_single_winner(service):
    alert = service.record_inference(make_record("cam1:0", F)).alert
    results = []

    def review(decision):
        try:
            service.review_alert(alert.alert_id, decision, reviewer=decision)
            results.append(decision)
        except AlertConflictError:
            pass

    with ThreadPoolExecutor(max_workers=4) as pool:
        list(pool.map(review, ["confirmed", "dismissed", "confirmed", "dismissed"]))
    assert len(results) == 1
    assert service.get_alert(alert.alert_id).state == results[0]


def test_retraining_queue_size_invariant(service):
    a1 = service.record_inference(make_record("cam1:0", F)).alert
    a2 = service.record_inference(make_record("cam1:10000", S)).alert
    a3 = service.record_inference(make_record("cam1:20000", C)).alert
    service.review_alert(a1.alert_id, "dismissed", reviewer="r", corrected_label=N)
    service.review_alert(a2.alert_id, "confirmed", reviewer="r")
    service.review_alert(a3.alert_id, "dismissed", reviewer="r")
    service.report_false_classification("cam1:30000", predicted=N, corrected=F)
    assert len(service.list_retraining()) == 3  # 2 dismissals + 1 explicit report


def test_retraining_export_annotation_format(service):
    alert = service.record_inference(make_record("cam1:0", F)).alert
    service.review_alert(alert.alert_id, "dismissed", reviewer="r", corrected_label=N)
    export = service.retraining_export()
    assert export == b"cam1/000000000000.svf 3\n"
    # deterministic: same bytes on a second export
    assert service.retraining_export() == export


def test_retraining_export_skips_uncorrected(service):
    alert = service.record_inference(make_record("cam1:0", F)).alert
    service.review_alert(alert.alert_id, "dismissed", reviewer="r")
    assert service.retraining_export() == b""
    assert len(service.list_retraining()) == 1


def test_metrics_summary_counts(service):
    service.record_inference(make_record("cam1:0", F))
    service.record_inference(make_record("cam1:10000", N))
    service.record_inference(make_record("cam1:20000", N))
    summary = service.metrics_summary()
    assert summary["inference_counts"]["Falling"] == 1
    assert summary["inference_counts"]["Normal"] == 2
    assert summary["total_inferences"] == 3
    assert summary["alerts"]["pending"] == 1
    assert summary["chunks"] == 12
