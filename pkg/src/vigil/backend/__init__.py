"""Persistence, alerting, notification dispatch, human review, and the
retraining feedback queue, exposed over a REST API."""

from .notify import LogSink, NotificationDispatcher, NotificationMessage, WebhookSink
from .service import AlertPage, AlertRecord, BackendService, RecordOutcome, RetrainingItem

__all__ = [
    "AlertPage",
    "AlertRecord",
    "BackendService",
    "LogSink",
    "NotificationDispatcher",
    "NotificationMessage",
    "RecordOutcome",
    "RetrainingItem",
    "WebhookSink",
]
