"""Embedded relational store behind the persistence interface.

SQLite keeps desk-scale runs hermetic; the schema is plain enough that a
server-backed engine could sit behind the same service layer. All writes
go through one serialized transaction context, so the review state machine
and alert/notification atomicity hold under concurrent API handlers.
"""

from __future__ import annotations

import sqlite3
import threading
from contextlib import contextmanager
from pathlib import Path

_SCHEMA = """
CREATE TABLE IF NOT EXISTS chunks (
    chunk_id     TEXT PRIMARY KEY,
    stream_id    TEXT NOT NULL,
    start_ts     INTEGER NOT NULL,
    duration_s   REAL NOT NULL,
    frame_count  INTEGER NOT NULL,
    storage_key  TEXT NOT NULL UNIQUE,
    partial      INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS inferences (
    inference_id INTEGER PRIMARY KEY AUTOINCREMENT,
    chunk_id     TEXT NOT NULL REFERENCES chunks(chunk_id),
    model_id     TEXT NOT NULL,
    label        INTEGER NOT NULL,
    scores       TEXT NOT NULL,
    latency_ms   REAL NOT NULL,
    created_ts   INTEGER NOT NULL,
    UNIQUE (chunk_id, model_id)
);
CREATE TABLE IF NOT EXISTS alerts (
    alert_id     TEXT PRIMARY KEY,
    chunk_id     TEXT NOT NULL REFERENCES chunks(chunk_id),
    stream_id    TEXT NOT NULL,
    label        INTEGER NOT NULL,
    scores       TEXT NOT NULL,
    state        TEXT NOT NULL DEFAULT 'pending'
                 CHECK (state IN ('pending', 'confirmed', 'dismissed')),
    created_ts   INTEGER NOT NULL,
    reviewed_ts  INTEGER,
    reviewer     TEXT
);
CREATE INDEX IF NOT EXISTS idx_alerts_order ON alerts (created_ts DESC, alert_id DESC);
CREATE TABLE IF NOT EXISTS notifications (
    notification_id INTEGER PRIMARY KEY AUTOINCREMENT,
    alert_id        TEXT NOT NULL UNIQUE REFERENCES alerts(alert_id),
    stream_id       TEXT NOT NULL,
    label           INTEGER NOT NULL,
    created_ts      INTEGER NOT NULL,
    delivery_state  TEXT NOT NULL DEFAULT 'queued'
                    CHECK (delivery_state IN ('queued', 'sent', 'failed')),
    attempts        INTEGER NOT NULL DEFAULT 0,
    last_error      TEXT
);
CREATE TABLE IF NOT EXISTS retraining_items (
    item_id     INTEGER PRIMARY KEY AUTOINCREMENT,
    chunk_id    TEXT NOT NULL REFERENCES chunks(chunk_id),
    predicted   INTEGER NOT NULL,
    corrected   INTEGER,
    created_ts  INTEGER NOT NULL,
    alert_id    TEXT
);
"""


class Database:
    """One connection, one write lock; rows come back as sqlite3.Row."""

    def __init__(self, path: str | Path = ":memory:"):
        self.path = str(path)
        self._conn = sqlite3.connect(self.path, check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        self._lock = threading.RLock()
        with self.transaction() as cur:
            cur.executescript(_SCHEMA)

    @contextmanager
    def transaction(self):
        with self._lock:
            cur = self._conn.cursor()
            try:
                yield cur
                self._conn.commit()
            except BaseException:
                self._conn.rollback()
                raise
            finally:
                cur.close()

    def query(self, sql: str, params: tuple = ()) -> list[sqlite3.Row]:
        with self._lock:
            cur = self._conn.execute(sql, params)
            try:
                return cur.fetchall()
            finally:
                cur.close()

    def query_one(self, sql: str, params: tuple = ()):
        rows = self.query(sql, params)
        return rows[0] if rows else None

    def close(self) -> None:
        with self._lock:
            self._conn.close()
