import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from vigil.errors import InferenceUnavailableError, ResponseSchemaError
from vigil.ingest import VideoChunk
from vigil.labels import ClassLabel
from vigil.remote import RemoteClassifier

CHUNK = VideoChunk("cam1:0", "cam1", 0, 10.0, 300, "cam1/000000000000.svf", False)


class MockModelServer:
    """Configurable /v1/classify responder on an ephemeral port."""

    def __init__(self, payload=None, status=200, delay_s=0.0):
        self.payload = payload or {
            "label": 0,
            "scores": [0.97, 0.01, 0.01, 0.01],
            "model_id": "mock-model",
        }
        self.status = status
        self.delay_s = delay_s
        self.requests: list[dict] = []
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                import time

                if outer.delay_s:
                    time.sleep(outer.delay_s)
                length = int(self.headers.get("Content-Length", 0))
                outer.requests.append(json.loads(self.rfile.read(length)))
                body = json.dumps(outer.payload).encode()
                self.send_response(outer.status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, *args):
                pass

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()

    @property
    def endpoint(self) -> str:
        return f"http://127.0.0.1:{self.server.server_port}"

    def close(self):
        self.server.shutdown()
        self.server.server_close()


@pytest.fixture
def mock_server():
    server = MockModelServer()
    yield server
    server.close()


def test_conformant_server_yields_valid_record(mock_server):
    classifier = RemoteClassifier(mock_server.endpoint)
    rec = classifier.classify_chunk(CHUNK)
    assert rec.label == ClassLabel.FALLING
    assert rec.model_id == "mock-model"
    assert rec.chunk_id == "cam1:0"
    assert rec.latency_ms > 0
    # server saw the storage key, not the bytes
    assert mock_server.requests == [{"chunk_key": "cam1/000000000000.svf"}]


def test_scores_not_summing_is_schema_violation():
    server = MockModelServer(
        payload={"label": 0, "scores": [0.5, 0.1, 0.1, 0.1], "model_id": "m"}
    )
    try:
        with pytest.raises(ResponseSchemaError, match="sum"):
            RemoteClassifier(server.endpoint).classify_chunk(CHUNK)
    finally:
        server.close()


def test_label_argmax_mismatch_is_schema_violation():
    server = MockModelServer(
        payload={"label": 2, "scores": [0.97, 0.01, 0.01, 0.01], "model_id": "m"}
    )
    try:
        with pytest.raises(ResponseSchemaError, match="argmax"):
            RemoteClassifier(server.endpoint).classify_chunk(CHUNK)
    finally:
        server.close()


def test_missing_field_is_schema_violation():
    server = MockModelServer(payload={"scores": [1.0, 0.0, 0.0, 0.0]})
    try:
        with pytest.raises(ResponseSchemaError):
            RemoteClassifier(server.endpoint).classify_chunk(CHUNK)
    finally:
        server.close()


def test_non_2xx_is_unavailable():
    server = MockModelServer(status=503)
    try:
        with pytest.raises(InferenceUnavailableError, match="503"):
            RemoteClassifier(server.endpoint).classify_chunk(CHUNK)
    finally:
        server.close()


def test_downed_server_is_unavailable():
    classifier = RemoteClassifier("http://127.0.0.1:1", timeout_s=0.5)
    with pytest.raises(InferenceUnavailableError, match="inference unavailable"):
        classifier.classify_chunk(CHUNK)


def test_timeout_is_unavailable():
    server = MockModelServer(delay_s=2.0)
    try:
        with pytest.raises(InferenceUnavailableError):
            RemoteClassifier(server.endpoint, timeout_s=0.2).classify_chunk(CHUNK)
    finally:
        server.close()


def test_remote_declares_single_flight():
    assert RemoteClassifier("http://example").single_flight is True
