"""Notification dispatch for raised alerts.

Exactly one message is queued per alert creation (enqueue happens inside
the alert's transaction). Delivery runs out-of-band: each queued message
gets up to ``max_attempts`` tries with exponential backoff, then is marked
failed with the last error. Sinks are a log line or a webhook POST.
"""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass
from typing import Callable, Optional

import requests

from ..labels import ClassLabel
from .db import Database

logger = logging.getLogger("vigil.notify")

DEFAULT_MAX_ATTEMPTS = 3
DEFAULT_BACKOFF_S = 1.0


@dataclass(frozen=True)
class NotificationMessage:
    notification_id: int
    alert_id: str
    stream_id: str
    label: ClassLabel
    created_ts: int
    delivery_state: str
    attempts: int
    last_error: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "notification_id": self.notification_id,
            "alert_id": self.alert_id,
            "stream_id": self.stream_id,
            "label": int(self.label),
            "label_name": self.label.display,
            "created_ts": self.created_ts,
            "delivery_state": self.delivery_state,
            "attempts": self.attempts,
            "last_error": self.last_error,
        }


def _row_to_message(row) -> NotificationMessage:
    return NotificationMessage(
        notification_id=row["notification_id"],
        alert_id=row["alert_id"],
        stream_id=row["stream_id"],
        label=ClassLabel(row["label"]),
        created_ts=row["created_ts"],
        delivery_state=row["delivery_state"],
        attempts=row["attempts"],
        last_error=row["last_error"],
    )


class NotificationSink:
    def deliver(self, msg: NotificationMessage) -> None:
        raise NotImplementedError


class LogSink(NotificationSink):
    def deliver(self, msg: NotificationMessage) -> None:
        logger.info(
            "ALERT %s: %s on stream %s at %d",
            msg.alert_id, msg.label.display, msg.stream_id, msg.created_ts,
        )


class WebhookSink(NotificationSink):
    def __init__(self, url: str, timeout_s: float = 5.0):
        self.url = url
        self.timeout_s = timeout_s

    def deliver(self, msg: NotificationMessage) -> None:
        resp = requests.post(
            self.url,
            json={
                "alert_id": msg.alert_id,
                "stream_id": msg.stream_id,
                "label": int(msg.label),
                "label_name": msg.label.display,
                "created_ts": msg.created_ts,
            },
            timeout=self.timeout_s,
        )
        resp.raise_for_status()


class NotificationDispatcher:
    """Works the queued-notification backlog against one sink."""

    def __init__(
        self,
        db: Database,
        sink: NotificationSink,
        max_attempts: int = DEFAULT_MAX_ATTEMPTS,
        base_backoff_s: float = DEFAULT_BACKOFF_S,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.db = db
        self.sink = sink
        self.max_attempts = max_attempts
        self.base_backoff_s = base_backoff_s
        self._sleep = sleep
        self._worker: Optional[threading.Thread] = None
        self._stop = threading.Event()

    def _deliver_with_retries(self, msg: NotificationMessage) -> tuple[str, int, Optional[str]]:
        error: Optional[str] = None
        for attempt in range(1, self.max_attempts + 1):
            try:
                self.sink.deliver(msg)
                return "sent", attempt, None
            except Exception as exc:
                error = str(exc)
                if attempt < self.max_attempts:
                    self._sleep(self.base_backoff_s * 2 ** (attempt - 1))
        return "failed", self.max_attempts, error

    def process_queued(self) -> dict[str, int]:
        """Deliver every queued message once (with retries); returns counts."""
        rows = self.db.query(
            "SELECT * FROM notifications WHERE delivery_state = 'queued' "
            "ORDER BY notification_id"
        )
        counts = {"sent": 0, "failed": 0}
        for row in rows:
            msg = _row_to_message(row)
            state, attempts, error = self._deliver_with_retries(msg)
            with self.db.transaction() as cur:
                cur.execute(
                    "UPDATE notifications SET delivery_state = ?, attempts = ?, "
                    "last_error = ? WHERE notification_id = ?",
                    (state, attempts, error, msg.notification_id),
                )
            counts[state] += 1
        return counts

    # background worker for serve mode ------------------------------------

    def start_worker(self, poll_interval_s: float = 0.5) -> None:
        if self._worker is not None:
            return
        self._stop.clear()

        def loop() -> None:
            while not self._stop.is_set():
                try:
                    self.process_queued()
                except Exception:
                    logger.exception("notification worker pass failed")
                self._stop.wait(poll_interval_s)

        self._worker = threading.Thread(target=loop, name="notify-worker", daemon=True)
        self._worker.start()

    def stop_worker(self) -> None:
        if self._worker is None:
            return
        self._stop.set()
        self._worker.join(timeout=5)
        self._worker = None

    def sent_count(self) -> int:
        row = self.db.query_one(
            "SELECT COUNT(*) AS n FROM notifications WHERE delivery_state = 'sent'"
        )
        return int(row["n"])
