"""HTTP adapter delegating classification to an external model server.

Wire protocol: POST {endpoint}/v1/classify with JSON {"chunk_key": str};
the server fetches the bytes from the shared chunk store and answers
{"label": int 0-3, "scores": [4 floats], "model_id": str}. Responses are
validated against the score-vector invariants before a record is built.
"""

from __future__ import annotations

import time
from typing import Callable

import requests

from .classify import Classifier, InferenceRecord, argmax_label, now_ms, validate_scores
from .errors import InferenceUnavailableError, ResponseSchemaError, ValidationError
from .ingest import VideoChunk

DEFAULT_TIMEOUT_S = 5.0


class RemoteClassifier(Classifier):
    """Client for the remote classification endpoint.

    Declared single-flight: one in-flight request per adapter, matching a
    model server that pipelines poorly under concurrent load.
    """

    single_flight = True

    def __init__(
        self,
        endpoint: str,
        timeout_s: float = DEFAULT_TIMEOUT_S,
        retries: int = 0,
        clock: Callable[[], int] = now_ms,
        session: requests.Session | None = None,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.timeout_s = timeout_s
        self.retries = retries
        self.model_id = f"remote:{self.endpoint}"
        self._clock = clock
        self._session = session or requests.Session()

    def classify_chunk(self, chunk: VideoChunk, data: bytes = b"") -> InferenceRecord:
        url = f"{self.endpoint}/v1/classify"
        payload = {"chunk_key": chunk.storage_key}
        start = time.perf_counter()
        last_exc: Exception | None = None
        for _ in range(self.retries + 1):
            try:
                resp = self._session.post(url, json=payload, timeout=self.timeout_s)
                break
            except requests.RequestException as exc:
                last_exc = exc
        else:
            raise InferenceUnavailableError(f"inference unavailable: {last_exc}") from last_exc
        latency = (time.perf_counter() - start) * 1000.0

        if not 200 <= resp.status_code < 300:
            raise InferenceUnavailableError(
                f"inference unavailable: server returned {resp.status_code}"
            )
        try:
            body = resp.json()
            label = int(body["label"])
            scores = validate_scores(body["scores"])
            model_id = str(body["model_id"])
            if not 0 <= label <= 3:
                raise ValidationError(f"label out of range: {label}")
            if argmax_label(scores) != label:
                raise ValidationError("label does not match score argmax")
        except (KeyError, TypeError, ValueError) as exc:
            raise ResponseSchemaError(f"bad classify response: {exc}") from exc

        return InferenceRecord(
            chunk_id=chunk.chunk_id,
            label=argmax_label(scores),
            scores=scores,
            model_id=model_id,
            latency_ms=latency,
            created_ts=self._clock(),
        )
