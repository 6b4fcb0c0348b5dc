"""End-to-end desk run: ingest -> segment -> store -> pipeline -> classify
-> backend -> notifications.

Streams are ingested in parallel (one segmenter each). Classification
respects the classifier's concurrency declaration: single-flight adapters
run serially, the rest fan out. A stage failure is recorded per chunk and
the run continues. With the stub classifier and a fixed seed the report is
deterministic end to end.
"""

from __future__ import annotations

import json
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .backend.db import Database
from .backend.notify import LogSink, NotificationDispatcher, WebhookSink
from .backend.service import BackendService
from .classify import Classifier, StubClassifier, ToyClassifier, train_toy
from .config import RunConfig
from .errors import ConfigurationError, DuplicateKeyError, VigilError
from .fixtures import load_sources, load_truth
from .ingest import SegmentedChunk, open_stream, put_chunk, segment
from .labels import ClassLabel
from .remote import RemoteClassifier
from .storage import ChunkStore, FileChunkStore


@dataclass
class RunReport:
    streams: int = 0
    chunks_processed: int = 0
    inferences: int = 0
    duplicates: int = 0
    alerts_raised: int = 0
    notifications_sent: int = 0
    notifications_failed: int = 0
    alerts_by_class: dict[str, int] = field(default_factory=dict)
    errors: list[dict] = field(default_factory=list)
    chunk_ids: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "streams": self.streams,
            "chunks_processed": self.chunks_processed,
            "inferences": self.inferences,
            "duplicates": self.duplicates,
            "alerts_raised": self.alerts_raised,
            "notifications_sent": self.notifications_sent,
            "notifications_failed": self.notifications_failed,
            "alerts_by_class": self.alerts_by_class,
            "errors": self.errors,
            "chunk_ids": self.chunk_ids,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def build_sink(config: RunConfig):
    if config.sink == "webhook":
        return WebhookSink(config.webhook_url, timeout_s=config.timeout_s)
    return LogSink()


def build_classifier(
    config: RunConfig,
    store: Optional[ChunkStore] = None,
    fixture_dir: Optional[str | Path] = None,
) -> Classifier:
    if config.classifier == "stub":
        return StubClassifier()
    if config.classifier == "remote":
        return RemoteClassifier(
            config.endpoint, timeout_s=config.timeout_s, retries=config.retries
        )
    # toy: load saved weights, or train on the fixture truth manifest
    if config.toy_weights and Path(config.toy_weights).exists():
        return ToyClassifier.load(
            config.toy_weights, strategy=config.sampling, transform=config.transform
        )
    if store is None or fixture_dir is None:
        raise ConfigurationError(
            "toy classifier needs saved weights (classifier.toy_weights) "
            "or a fixture directory with truth labels to train on"
        )
    labeled = []
    for row in load_truth(fixture_dir):
        try:
            labeled.append((store.get(row["path"]), ClassLabel(row["label"])))
        except VigilError:
            continue
    if not labeled:
        raise ConfigurationError("no stored chunks match the truth manifest")
    model = train_toy(
        labeled,
        seed=config.seed,
        strategy=config.sampling,
        transform=config.transform,
    )
    if config.toy_weights:
        Path(config.toy_weights).parent.mkdir(parents=True, exist_ok=True)
        model.save(config.toy_weights)
    return model


def run_simulation(
    config: RunConfig,
    fixture_dir: str | Path,
    store: Optional[ChunkStore] = None,
    service: Optional[BackendService] = None,
    dispatcher: Optional[NotificationDispatcher] = None,
    log_path: Optional[str | Path] = None,
) -> RunReport:
    sources = load_sources(fixture_dir)
    if store is None:
        store = FileChunkStore(config.store_root)
    if service is None:
        Path(config.db_path).parent.mkdir(parents=True, exist_ok=True)
        service = BackendService(Database(config.db_path))
    if dispatcher is None:
        dispatcher = NotificationDispatcher(
            service.db,
            build_sink(config),
            max_attempts=config.notify_max_attempts,
            base_backoff_s=config.notify_backoff_s,
        )

    report = RunReport(streams=len(sources))
    errors_lock = threading.Lock()

    def record_error(chunk_id: str, stage: str, exc: Exception) -> None:
        with errors_lock:
            report.errors.append({"chunk_id": chunk_id, "stage": stage, "error": str(exc)})

    # phase 1: segment and store every stream, in parallel
    stored: list[SegmentedChunk] = []

    def ingest_stream(source) -> list[SegmentedChunk]:
        chunks = []
        handle = open_stream(source)
        for piece in segment(handle, window_s=config.window_s):
            try:
                put_chunk(store, piece.meta, piece.data)
            except DuplicateKeyError:
                pass  # rerun over an existing store: bytes are write-once
            service.register_chunk(piece.meta)
            chunks.append(piece)
        return chunks

    with ThreadPoolExecutor(max_workers=max(1, len(sources))) as pool:
        for chunk_list in pool.map(ingest_stream, sources):
            stored.extend(chunk_list)
    stored.sort(key=lambda piece: piece.meta.chunk_id)
    report.chunks_processed = len(stored)
    report.chunk_ids = [piece.meta.chunk_id for piece in stored]

    # phase 2: classify and record
    classifier = build_classifier(config, store=store, fixture_dir=fixture_dir)
    flight_lock = threading.Lock() if classifier.single_flight else None
    log_lines: dict[str, str] = {}

    def process(piece: SegmentedChunk) -> Optional[dict]:
        meta = piece.meta
        try:
            if flight_lock is not None:
                with flight_lock:
                    rec = classifier.classify_chunk(meta, piece.data)
            else:
                rec = classifier.classify_chunk(meta, piece.data)
        except VigilError as exc:
            record_error(meta.chunk_id, "classify", exc)
            return None
        try:
            outcome = service.record_inference(rec)
        except VigilError as exc:
            record_error(meta.chunk_id, "record", exc)
            return None
        log_lines[meta.chunk_id] = json.dumps(
            {
                "path": meta.storage_key,
                "chunk_id": meta.chunk_id,
                "label": int(rec.label),
                "scores": list(rec.scores),
                "model_id": rec.model_id,
                "latency_ms": rec.latency_ms,
            },
            sort_keys=True,
        )
        return {
            "duplicate": outcome.duplicate,
            "alert": outcome.alert.label.display if outcome.alert else None,
        }

    if flight_lock is not None:
        outcomes = [process(piece) for piece in stored]
    else:
        with ThreadPoolExecutor(max_workers=4) as pool:
            outcomes = list(pool.map(process, stored))

    by_class: dict[str, int] = {}
    for outcome in outcomes:
        if outcome is None:
            continue
        report.inferences += 1
        report.duplicates += outcome["duplicate"]
        if outcome["alert"]:
            report.alerts_raised += 1
            by_class[outcome["alert"]] = by_class.get(outcome["alert"], 0) + 1
    report.alerts_by_class = dict(sorted(by_class.items()))
    report.errors.sort(key=lambda e: e["chunk_id"])

    # phase 3: notifications
    delivered = dispatcher.process_queued()
    report.notifications_sent = delivered["sent"]
    report.notifications_failed = delivered["failed"]

    if log_path is not None:
        path = Path(log_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        ordered = [log_lines[cid] for cid in report.chunk_ids if cid in log_lines]
        path.write_text("".join(line + "\n" for line in ordered), "utf-8")

    return report
