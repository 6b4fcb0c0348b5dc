"""SVF synthetic-video fixture format.

Bit-exact layout: magic ``SVF1`` (4 ASCII bytes), then little-endian u32
width, height, fps, frame_count, then ``frame_count`` records of
[u8 action_code, u8 normal_subtype, width*height*3 bytes RGB row-major].
The subtype byte is meaningful only when action_code = 3 (Normal).

Chunk files reuse the same layout with a recomputed frame_count, so chunking
is pure byte slicing plus a header rewrite.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import MalformedFixtureError

MAGIC = b"SVF1"
_HEADER = struct.Struct("<4sIIII")
HEADER_SIZE = _HEADER.size  # 20 bytes


@dataclass(frozen=True)
class SvfHeader:
    width: int
    height: int
    fps: int
    frame_count: int

    @property
    def pixel_bytes(self) -> int:
        return self.width * self.height * 3

    @property
    def record_bytes(self) -> int:
        # action_code + normal_subtype + RGB payload
        return 2 + self.pixel_bytes

    @property
    def duration_s(self) -> float:
        return self.frame_count / self.fps


@dataclass(frozen=True)
class SvfFrame:
    action_code: int
    normal_subtype: int
    pixels: np.ndarray  # (height, width, 3) uint8


def write_svf(
    width: int,
    height: int,
    fps: int,
    frames: Iterable[tuple[int, int, np.ndarray]],
) -> bytes:
    """Serialize (action_code, normal_subtype, pixels) triples to SVF bytes."""
    body = bytearray()
    count = 0
    expected = height * width * 3
    for code, subtype, pixels in frames:
        arr = np.ascontiguousarray(pixels, dtype=np.uint8)
        if arr.size != expected:
            raise ValueError(
                f"frame {count}: expected {expected} pixel bytes, got {arr.size}"
            )
        body.append(code & 0xFF)
        body.append(subtype & 0xFF)
        body.extend(arr.tobytes())
        count += 1
    return _HEADER.pack(MAGIC, width, height, fps, count) + bytes(body)


def read_header(data: bytes) -> SvfHeader:
    if len(data) < HEADER_SIZE:
        raise MalformedFixtureError("malformed fixture: truncated header")
    magic, width, height, fps, frame_count = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise MalformedFixtureError(f"malformed fixture: bad magic {magic!r}")
    if width == 0 or height == 0 or fps == 0:
        raise MalformedFixtureError("malformed fixture: zero width/height/fps")
    header = SvfHeader(width, height, fps, frame_count)
    expected = HEADER_SIZE + frame_count * header.record_bytes
    if len(data) < expected:
        raise MalformedFixtureError(
            f"malformed fixture: {len(data)} bytes, header implies {expected}"
        )
    return header


def read_frame(data: bytes, header: SvfHeader, index: int) -> SvfFrame:
    """Random access to one frame; O(1) in the fixture size."""
    if not 0 <= index < header.frame_count:
        raise IndexError(f"frame index {index} out of range")
    offset = HEADER_SIZE + index * header.record_bytes
    code = data[offset]
    subtype = data[offset + 1]
    pixels = np.frombuffer(
        data, dtype=np.uint8, count=header.pixel_bytes, offset=offset + 2
    ).reshape(header.height, header.width, 3)
    return SvfFrame(code, subtype, pixels)


def iter_frames(data: bytes) -> Iterator[SvfFrame]:
    header = read_header(data)
    for i in range(header.frame_count):
        yield read_frame(data, header, i)


def frame_codes(data: bytes) -> np.ndarray:
    """Per-frame action codes without decoding pixels."""
    header = read_header(data)
    arr = np.frombuffer(data, dtype=np.uint8)
    stop = HEADER_SIZE + header.frame_count * header.record_bytes
    return arr[HEADER_SIZE:stop:header.record_bytes].copy()


def frame_subtypes(data: bytes) -> np.ndarray:
    """Per-frame normal_subtype bytes without decoding pixels."""
    header = read_header(data)
    arr = np.frombuffer(data, dtype=np.uint8)
    stop = HEADER_SIZE + header.frame_count * header.record_bytes
    return arr[HEADER_SIZE + 1:stop:header.record_bytes].copy()


def slice_frames(data: bytes, start: int, count: int) -> bytes:
    """New SVF holding frames [start, start+count) with a recomputed header."""
    header = read_header(data)
    if start < 0 or count < 0 or start + count > header.frame_count:
        raise ValueError(
            f"slice [{start}, {start + count}) outside 0..{header.frame_count}"
        )
    rec = header.record_bytes
    lo = HEADER_SIZE + start * rec
    hi = lo + count * rec
    new_header = _HEADER.pack(MAGIC, header.width, header.height, header.fps, count)
    return new_header + data[lo:hi]


def read_svf(data: bytes) -> tuple[SvfHeader, Sequence[SvfFrame]]:
    header = read_header(data)
    return header, [read_frame(data, header, i) for i in range(header.frame_count)]
