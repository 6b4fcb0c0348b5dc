"""Synthetic stream fixtures with scripted events and ground truth.

Each stream is rendered as an SVF file: a noisy static background plus one
moving block whose motion pattern depends on the frame's action code, so
motion-energy features carry class signal. An event script overrides the
default Normal frames for its time range. The ground-truth manifest lists
the expected majority label per fixed window, which is what the stub
classifier must reproduce chunk by chunk.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import svf
from .errors import ValidationError
from .ingest import DEFAULT_WINDOW_S, StreamSource, chunk_id_for, storage_key_for
from .labels import ClassLabel

SOURCES_FILENAME = "sources.json"
TRUTH_FILENAME = "truth.jsonl"


@dataclass(frozen=True)
class ScriptEvent:
    stream_id: str
    start_s: float
    duration_s: float
    action_code: ClassLabel
    subtype: int = 0

    def __post_init__(self) -> None:
        if self.start_s < 0 or self.duration_s <= 0:
            raise ValidationError(
                f"event on {self.stream_id} has bad timing "
                f"(start {self.start_s}, duration {self.duration_s})"
            )
        if not 0 <= self.subtype <= 39:
            raise ValidationError(f"subtype {self.subtype} outside 0..39")

    @property
    def end_s(self) -> float:
        return self.start_s + self.duration_s


@dataclass(frozen=True)
class StreamSpec:
    stream_id: str
    fps: int = 30
    width: int = 32
    height: int = 24
    client_id: str = ""


def _overlap(a: ScriptEvent, b: ScriptEvent) -> bool:
    return a.start_s < b.end_s and b.start_s < a.end_s


def _validate_script(
    streams: Sequence[StreamSpec], duration_s: float, events: Sequence[ScriptEvent]
) -> None:
    known = {s.stream_id for s in streams}
    if len(known) != len(streams):
        raise ValidationError("duplicate stream ids")
    per_stream: dict[str, list[ScriptEvent]] = {}
    for ev in events:
        if ev.stream_id not in known:
            raise ValidationError(f"event references unknown stream {ev.stream_id!r}")
        if ev.end_s > duration_s + 1e-9:
            raise ValidationError(
                f"event on {ev.stream_id} ends at {ev.end_s}s, stream is {duration_s}s"
            )
        per_stream.setdefault(ev.stream_id, []).append(ev)
    for stream_id, evs in per_stream.items():
        evs.sort(key=lambda e: e.start_s)
        for a, b in zip(evs, evs[1:]):
            if _overlap(a, b):
                raise ValidationError(
                    f"overlapping events on {stream_id}: "
                    f"[{a.start_s}, {a.end_s}) and [{b.start_s}, {b.end_s})"
                )


def _frame_codes_for_stream(
    spec: StreamSpec,
    duration_s: float,
    events: Sequence[ScriptEvent],
    default_subtype: int,
) -> tuple[np.ndarray, np.ndarray]:
    n = round(duration_s * spec.fps)
    codes = np.full(n, int(ClassLabel.NORMAL), dtype=np.uint8)
    subtypes = np.full(n, default_subtype, dtype=np.uint8)
    for ev in events:
        if ev.stream_id != spec.stream_id:
            continue
        lo = round(ev.start_s * spec.fps)
        hi = min(n, round(ev.end_s * spec.fps))
        codes[lo:hi] = int(ev.action_code)
        subtypes[lo:hi] = ev.subtype
    return codes, subtypes


def _block_origin(code: int, t: int, width: int, height: int, side: int, phase: int) -> tuple[int, int]:
    """Per-class motion pattern for the rendered block."""
    max_x = max(1, width - side)
    max_y = max(1, height - side)
    if code == int(ClassLabel.FALLING):  # rapid vertical drop, restarting
        return (max_x // 2, (phase + t * max(2, height // 6)) % max_y)
    if code == int(ClassLabel.STAGGERING):  # wide side-to-side lurch
        period = 6
        pos = abs((t + phase) % (2 * period) - period) / period
        return (int(pos * (max_x - 1)), max_y // 2)
    if code == int(ClassLabel.CHEST_PAIN):  # clutching tremor near center
        return (max_x // 2 + ((t + phase) % 3 - 1), max_y // 2 + ((t // 2 + phase) % 3 - 1))
    # Normal: slow drift
    return ((phase + t // 6) % max_x, max_y // 3)


def render_stream(
    spec: StreamSpec,
    duration_s: float,
    events: Sequence[ScriptEvent],
    seed: int,
) -> bytes:
    """Deterministic SVF bytes for one stream; same seed, same bytes."""
    rng = np.random.default_rng([seed, *spec.stream_id.encode()])
    default_subtype = int(rng.integers(0, 40))
    phase = int(rng.integers(0, 1000))
    background = rng.integers(0, 64, size=(spec.height, spec.width, 3), dtype=np.uint8)
    codes, subtypes = _frame_codes_for_stream(spec, duration_s, events, default_subtype)

    side = max(4, min(spec.width, spec.height) // 3)
    frames = []
    for t, (code, subtype) in enumerate(zip(codes, subtypes)):
        frame = background.copy()
        x, y = _block_origin(int(code), t, spec.width, spec.height, side, phase)
        frame[y:y + side, x:x + side] = 200
        frames.append((int(code), int(subtype), frame))
    return svf.write_svf(spec.width, spec.height, spec.fps, frames)


def expected_chunk_labels(
    codes: np.ndarray,
    subtypes: np.ndarray,
    fps: int,
    window_s: float,
    stream_id: str,
) -> list[dict]:
    """Majority label (ties toward the lowest code) per fixed window, plus
    the majority subtype for Normal-majority windows."""
    frames_per_window = round(window_s * fps)
    out = []
    start = 0
    index = 0
    while start < len(codes):
        stop = min(start + frames_per_window, len(codes))
        window_codes = codes[start:stop]
        counts = np.bincount(window_codes, minlength=4)[:4]
        label = int(np.argmax(counts))
        subtype: Optional[int] = None
        if label == int(ClassLabel.NORMAL):
            normal_subtypes = subtypes[start:stop][window_codes == int(ClassLabel.NORMAL)]
            subtype = int(np.bincount(normal_subtypes, minlength=40).argmax())
        start_ts = round(index * window_s * 1000)
        out.append(
            {
                "path": storage_key_for(stream_id, start_ts),
                "chunk_id": chunk_id_for(stream_id, start_ts),
                "stream_id": stream_id,
                "start_ts": start_ts,
                "label": label,
                "normal_subtype": subtype,
            }
        )
        start = stop
        index += 1
    return out


@dataclass
class FixtureSet:
    out_dir: Path
    sources: list[StreamSource]
    truth_path: Path
    sources_path: Path
    truth: list[dict] = field(default_factory=list)


def gen_fixtures(
    out_dir: str | Path,
    streams: Sequence[StreamSpec],
    duration_s: float,
    events: Sequence[ScriptEvent] = (),
    seed: int = 0,
    window_s: float = DEFAULT_WINDOW_S,
) -> FixtureSet:
    """Write one SVF per stream plus sources.json and truth.jsonl."""
    if duration_s <= 0:
        raise ValidationError(f"duration_s must be positive, got {duration_s}")
    _validate_script(streams, duration_s, events)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sources: list[StreamSource] = []
    truth: list[dict] = []
    for spec in streams:
        data = render_stream(spec, duration_s, events, seed)
        path = out / f"{spec.stream_id}.svf"
        path.write_bytes(data)
        sources.append(
            StreamSource(
                stream_id=spec.stream_id,
                uri=str(path),
                fps=spec.fps,
                width=spec.width,
                height=spec.height,
                client_id=spec.client_id or f"client-{spec.stream_id}",
            )
        )
        codes = svf.frame_codes(data)
        subs = svf.frame_subtypes(data)
        truth.extend(expected_chunk_labels(codes, subs, spec.fps, window_s, spec.stream_id))

    sources_path = out / SOURCES_FILENAME
    sources_path.write_text(
        json.dumps(
            [
                {
                    "stream_id": s.stream_id,
                    "uri": Path(s.uri).name,  # relative to the fixture dir
                    "fps": s.fps,
                    "width": s.width,
                    "height": s.height,
                    "client_id": s.client_id,
                }
                for s in sources
            ],
            indent=2,
        )
        + "\n",
        "utf-8",
    )
    truth_path = out / TRUTH_FILENAME
    truth_path.write_text(
        "".join(json.dumps(row, sort_keys=True) + "\n" for row in truth), "utf-8"
    )
    return FixtureSet(
        out_dir=out, sources=sources, truth_path=truth_path,
        sources_path=sources_path, truth=truth,
    )


def load_sources(fixture_dir: str | Path) -> list[StreamSource]:
    """Read sources.json, resolving fixture uris relative to the directory."""
    root = Path(fixture_dir)
    index = root / SOURCES_FILENAME
    if not index.exists():
        raise ValidationError(f"no {SOURCES_FILENAME} in {root}")
    rows = json.loads(index.read_text("utf-8"))
    return [
        StreamSource(
            stream_id=r["stream_id"],
            uri=str(root / r["uri"]),
            fps=r["fps"],
            width=r["width"],
            height=r["height"],
            client_id=r.get("client_id", ""),
        )
        for r in rows
    ]


def load_truth(fixture_dir: str | Path) -> list[dict]:
    path = Path(fixture_dir) / TRUTH_FILENAME
    if not path.exists():
        raise ValidationError(f"no {TRUTH_FILENAME} in {fixture_dir}")
    return [json.loads(line) for line in path.read_text("utf-8").splitlines() if line.strip()]


def parse_script_file(path: str | Path) -> list[ScriptEvent]:
    """Event script JSON: a list of {stream, start_s, duration_s,
    action_code, subtype?} objects."""
    rows = json.loads(Path(path).read_text("utf-8"))
    if not isinstance(rows, list):
        raise ValidationError("event script must be a JSON list")
    events = []
    for i, row in enumerate(rows):
        try:
            events.append(
                ScriptEvent(
                    stream_id=row["stream"],
                    start_s=float(row["start_s"]),
                    duration_s=float(row["duration_s"]),
                    action_code=ClassLabel(int(row["action_code"])),
                    subtype=int(row.get("subtype", 0)),
                )
            )
        except (KeyError, ValueError) as exc:
            raise ValidationError(f"bad script entry {i}: {exc}") from exc
    return events
