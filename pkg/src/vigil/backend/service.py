"""Backend service: persist inferences, raise alerts for critical classes,
drive the review workflow, and maintain the retraining queue.

Alert lifecycle is a single transition: pending -> confirmed or
pending -> dismissed, exactly once, enforced with compare-and-set on the
state column. A dismissed alert appends a retraining item; confirmed
alerts do not feed retraining. Idempotency key for inference submission is
(chunk_id, model_id), so at-least-once delivery never double-alerts.
"""

from __future__ import annotations

import json
import sqlite3
from dataclasses import dataclass
from typing import Callable, Optional

from ..classify import InferenceRecord, now_ms
from ..errors import (
    AlertConflictError,
    UnknownAlertError,
    UnknownChunkError,
    ValidationError,
    VigilError,
)
from ..evaluation.datasets import DatasetManifest, ManifestEntry, write_annotation_file
from ..ingest import VideoChunk
from ..labels import ClassLabel, is_critical
from .db import Database

ALERT_STATES = ("pending", "confirmed", "dismissed")
DEFAULT_PAGE_SIZE = 50


@dataclass(frozen=True)
class AlertRecord:
    alert_id: str
    chunk_id: str
    stream_id: str
    label: ClassLabel
    scores: tuple[float, float, float, float]
    state: str
    created_ts: int
    reviewed_ts: Optional[int] = None
    reviewer: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "alert_id": self.alert_id,
            "chunk_id": self.chunk_id,
            "stream_id": self.stream_id,
            "label": int(self.label),
            "label_name": self.label.display,
            "scores": list(self.scores),
            "state": self.state,
            "created_ts": self.created_ts,
            "reviewed_ts": self.reviewed_ts,
            "reviewer": self.reviewer,
        }


@dataclass(frozen=True)
class RetrainingItem:
    item_id: int
    chunk_id: str
    predicted: ClassLabel
    corrected: Optional[ClassLabel]
    created_ts: int
    alert_id: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "item_id": self.item_id,
            "chunk_id": self.chunk_id,
            "predicted": int(self.predicted),
            "corrected": None if self.corrected is None else int(self.corrected),
            "created_ts": self.created_ts,
            "alert_id": self.alert_id,
        }


@dataclass(frozen=True)
class RecordOutcome:
    inference_id: int
    duplicate: bool
    alert: Optional[AlertRecord] = None


@dataclass(frozen=True)
class AlertPage:
    alerts: list[AlertRecord]
    page: int
    page_size: int
    total: int


def _row_to_alert(row) -> AlertRecord:
    return AlertRecord(
        alert_id=row["alert_id"],
        chunk_id=row["chunk_id"],
        stream_id=row["stream_id"],
        label=ClassLabel(row["label"]),
        scores=tuple(json.loads(row["scores"])),
        state=row["state"],
        created_ts=row["created_ts"],
        reviewed_ts=row["reviewed_ts"],
        reviewer=row["reviewer"],
    )


def _row_to_item(row) -> RetrainingItem:
    return RetrainingItem(
        item_id=row["item_id"],
        chunk_id=row["chunk_id"],
        predicted=ClassLabel(row["predicted"]),
        corrected=None if row["corrected"] is None else ClassLabel(row["corrected"]),
        created_ts=row["created_ts"],
        alert_id=row["alert_id"],
    )


class BackendService:
    def __init__(self, db: Database, clock: Callable[[], int] = now_ms):
        self.db = db
        self.clock = clock
        self.dead_letter: list[tuple[InferenceRecord, str]] = []

    # --- chunks -----------------------------------------------------------

    def register_chunk(self, chunk: VideoChunk) -> None:
        with self.db.transaction() as cur:
            cur.execute(
                "INSERT OR IGNORE INTO chunks "
                "(chunk_id, stream_id, start_ts, duration_s, frame_count, storage_key, partial) "
                "VALUES (?, ?, ?, ?, ?, ?, ?)",
                (
                    chunk.chunk_id,
                    chunk.stream_id,
                    chunk.start_ts,
                    chunk.duration_s,
                    chunk.frame_count,
                    chunk.storage_key,
                    int(chunk.partial),
                ),
            )

    def get_chunk(self, chunk_id: str) -> VideoChunk:
        row = self.db.query_one("SELECT * FROM chunks WHERE chunk_id = ?", (chunk_id,))
        if row is None:
            raise UnknownChunkError(f"unknown chunk: {chunk_id}")
        return VideoChunk(
            chunk_id=row["chunk_id"],
            stream_id=row["stream_id"],
            start_ts=row["start_ts"],
            duration_s=row["duration_s"],
            frame_count=row["frame_count"],
            storage_key=row["storage_key"],
            partial=bool(row["partial"]),
        )

    def chunk_inferences(self, chunk_id: str) -> list[dict]:
        rows = self.db.query(
            "SELECT * FROM inferences WHERE chunk_id = ? ORDER BY inference_id",
            (chunk_id,),
        )
        return [
            {
                "inference_id": r["inference_id"],
                "chunk_id": r["chunk_id"],
                "model_id": r["model_id"],
                "label": r["label"],
                "label_name": ClassLabel(r["label"]).display,
                "scores": json.loads(r["scores"]),
                "latency_ms": r["latency_ms"],
                "created_ts": r["created_ts"],
            }
            for r in rows
        ]

    # --- inference intake -------------------------------------------------

    def record_inference(self, rec: InferenceRecord) -> RecordOutcome:
        """Persist one inference; atomically raise a pending alert plus one
        queued notification when the label is critical.

        Duplicate (chunk_id, model_id) submissions are idempotent and never
        produce a second alert. A persistence failure retains the record in
        the dead-letter queue and re-raises.
        """
        chunk = self.get_chunk(rec.chunk_id)  # unknown chunk -> error before any write
        try:
            with self.db.transaction() as cur:
                cur.execute(
                    "INSERT OR IGNORE INTO inferences "
                    "(chunk_id, model_id, label, scores, latency_ms, created_ts) "
                    "VALUES (?, ?, ?, ?, ?, ?)",
                    (
                        rec.chunk_id,
                        rec.model_id,
                        int(rec.label),
                        json.dumps(list(rec.scores)),
                        rec.latency_ms,
                        rec.created_ts,
                    ),
                )
                if cur.rowcount == 0:
                    existing = cur.execute(
                        "SELECT inference_id FROM inferences WHERE chunk_id = ? AND model_id = ?",
                        (rec.chunk_id, rec.model_id),
                    ).fetchone()
                    return RecordOutcome(inference_id=existing["inference_id"], duplicate=True)

                inference_id = cur.lastrowid
                alert = None
                if is_critical(rec.label):
                    alert_id = f"al-{rec.chunk_id}-{rec.model_id}"
                    created = self.clock()
                    cur.execute(
                        "INSERT INTO alerts "
                        "(alert_id, chunk_id, stream_id, label, scores, state, created_ts) "
                        "VALUES (?, ?, ?, ?, ?, 'pending', ?)",
                        (
                            alert_id,
                            rec.chunk_id,
                            chunk.stream_id,
                            int(rec.label),
                            json.dumps(list(rec.scores)),
                            created,
                        ),
                    )
                    cur.execute(
                        "INSERT INTO notifications "
                        "(alert_id, stream_id, label, created_ts) VALUES (?, ?, ?, ?)",
                        (alert_id, chunk.stream_id, int(rec.label), created),
                    )
                    alert = AlertRecord(
                        alert_id=alert_id,
                        chunk_id=rec.chunk_id,
                        stream_id=chunk.stream_id,
                        label=rec.label,
                        scores=rec.scores,
                        state="pending",
                        created_ts=created,
                    )
                return RecordOutcome(inference_id=inference_id, duplicate=False, alert=alert)
        except sqlite3.Error as exc:
            self.dead_letter.append((rec, str(exc)))
            raise VigilError(f"persistence failure: {exc}") from exc

    # --- alerts and review --------------------------------------------------

    def get_alert(self, alert_id: str) -> AlertRecord:
        row = self.db.query_one("SELECT * FROM alerts WHERE alert_id = ?", (alert_id,))
        if row is None:
            raise UnknownAlertError(f"unknown alert: {alert_id}")
        return _row_to_alert(row)

    def review_alert(
        self,
        alert_id: str,
        decision: str,
        reviewer: str,
        corrected_label: Optional[ClassLabel | int] = None,
    ) -> AlertRecord:
        """Apply the single pending -> confirmed|dismissed transition.

        Dismissal appends a retraining item with predicted = the alert's
        label and the optional corrected label supplied by the reviewer.
        """
        if decision not in ("confirmed", "dismissed"):
            raise ValidationError(f"decision must be 'confirmed' or 'dismissed', got {decision!r}")
        if not reviewer:
            raise ValidationError("reviewer must be non-empty")
        if corrected_label is not None:
            corrected_label = ClassLabel(int(corrected_label))
            if decision != "dismissed":
                raise ValidationError("corrected_label only applies to dismissals")

        with self.db.transaction() as cur:
            reviewed_ts = self.clock()
            cur.execute(
                "UPDATE alerts SET state = ?, reviewed_ts = ?, reviewer = ? "
                "WHERE alert_id = ? AND state = 'pending'",
                (decision, reviewed_ts, reviewer, alert_id),
            )
            if cur.rowcount == 0:
                row = cur.execute(
                    "SELECT state FROM alerts WHERE alert_id = ?", (alert_id,)
                ).fetchone()
                if row is None:
                    raise UnknownAlertError(f"unknown alert: {alert_id}")
                raise AlertConflictError(
                    f"alert {alert_id} already reviewed (state={row['state']})"
                )
            row = cur.execute(
                "SELECT * FROM alerts WHERE alert_id = ?", (alert_id,)
            ).fetchone()
            alert = _row_to_alert(row)
            if decision == "dismissed":
                if corrected_label is not None and corrected_label == alert.label:
                    raise ValidationError(
                        "corrected label equals the prediction; a dismissal corrects it"
                    )
                cur.execute(
                    "INSERT INTO retraining_items "
                    "(chunk_id, predicted, corrected, created_ts, alert_id) "
                    "VALUES (?, ?, ?, ?, ?)",
                    (
                        alert.chunk_id,
                        int(alert.label),
                        None if corrected_label is None else int(corrected_label),
                        reviewed_ts,
                        alert_id,
                    ),
                )
        return alert

    def list_alerts(
        self,
        state: Optional[str] = None,
        stream_id: Optional[str] = None,
        since_ts: Optional[int] = None,
        page: int = 1,
        page_size: int = DEFAULT_PAGE_SIZE,
    ) -> AlertPage:
        """Newest first, stable order (created_ts desc, alert_id desc)."""
        if state is not None and state not in ALERT_STATES:
            raise ValidationError(f"unknown alert state {state!r}")
        if page < 1 or page_size < 1:
            raise ValidationError("page and page_size must be >= 1")
        where = []
        params: list = []
        if state is not None:
            where.append("state = ?")
            params.append(state)
        if stream_id is not None:
            where.append("stream_id = ?")
            params.append(stream_id)
        if since_ts is not None:
            where.append("created_ts >= ?")
            params.append(int(since_ts))
        clause = ("WHERE " + " AND ".join(where)) if where else ""
        total = int(
            self.db.query_one(f"SELECT COUNT(*) AS n FROM alerts {clause}", tuple(params))["n"]
        )
        rows = self.db.query(
            f"SELECT * FROM alerts {clause} "
            "ORDER BY created_ts DESC, alert_id DESC LIMIT ? OFFSET ?",
            tuple(params) + (page_size, (page - 1) * page_size),
        )
        return AlertPage(
            alerts=[_row_to_alert(r) for r in rows],
            page=page,
            page_size=page_size,
            total=total,
        )

    def alert_counts(self) -> dict[str, int]:
        counts = {state: 0 for state in ALERT_STATES}
        for row in self.db.query("SELECT state, COUNT(*) AS n FROM alerts GROUP BY state"):
            counts[row["state"]] = int(row["n"])
        return counts

    # --- retraining queue ----------------------------------------------------

    def report_false_classification(
        self,
        chunk_id: str,
        predicted: ClassLabel | int,
        corrected: Optional[ClassLabel | int] = None,
    ) -> RetrainingItem:
        """Explicit operator report for a wrong prediction that raised no
        alert (e.g. a missed fall classified Normal)."""
        self.get_chunk(chunk_id)
        predicted = ClassLabel(int(predicted))
        if corrected is not None:
            corrected = ClassLabel(int(corrected))
            if corrected == predicted:
                raise ValidationError("corrected label equals the prediction")
        with self.db.transaction() as cur:
            cur.execute(
                "INSERT INTO retraining_items "
                "(chunk_id, predicted, corrected, created_ts, alert_id) "
                "VALUES (?, ?, ?, ?, NULL)",
                (
                    chunk_id,
                    int(predicted),
                    None if corrected is None else int(corrected),
                    self.clock(),
                ),
            )
            item_id = cur.lastrowid
        return _row_to_item(
            self.db.query_one("SELECT * FROM retraining_items WHERE item_id = ?", (item_id,))
        )

    def list_retraining(self) -> list[RetrainingItem]:
        rows = self.db.query("SELECT * FROM retraining_items ORDER BY item_id")
        return [_row_to_item(r) for r in rows]

    def retraining_export(self) -> bytes:
        """Annotation-file export of the corrected labels, with chunk
        storage keys as paths. Items without a corrected label carry no
        trainable truth and are left out."""
        rows = self.db.query(
            "SELECT r.corrected AS corrected, c.storage_key AS storage_key "
            "FROM retraining_items r JOIN chunks c ON c.chunk_id = r.chunk_id "
            "WHERE r.corrected IS NOT NULL ORDER BY r.item_id"
        )
        entries = [
            ManifestEntry(path=row["storage_key"], label=ClassLabel(row["corrected"]))
            for row in rows
        ]
        seen: dict[str, ManifestEntry] = {}
        for e in entries:  # one chunk reviewed under several models: last wins
            seen[e.path] = e
        return write_annotation_file(DatasetManifest(tuple(seen.values())))

    # --- summary ---------------------------------------------------------------

    def metrics_summary(self) -> dict:
        by_class = {label.display: 0 for label in ClassLabel}
        for row in self.db.query("SELECT label, COUNT(*) AS n FROM inferences GROUP BY label"):
            by_class[ClassLabel(row["label"]).display] = int(row["n"])
        chunk_count = int(self.db.query_one("SELECT COUNT(*) AS n FROM chunks")["n"])
        item_count = int(self.db.query_one("SELECT COUNT(*) AS n FROM retraining_items")["n"])
        return {
            "inference_counts": by_class,
            "total_inferences": sum(by_class.values()),
            "alerts": self.alert_counts(),
            "chunks": chunk_count,
            "retraining_items": item_count,
        }
