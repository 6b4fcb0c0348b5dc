"""Dataset manifests, stratified splitting, and the annotation file format.

An annotation file holds one `<relative_path> <label_int>` line per entry,
LF-terminated UTF-8. Splits are 75% / 12.5% / 12.5% by default, preserve
per-class proportions, and are deterministic under the seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from ..errors import AnnotationFormatError, ValidationError
from ..labels import ClassLabel

MIN_CLASS_SIZE = 8


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    label: ClassLabel
    normal_subtype: Optional[int] = None

    def __post_init__(self) -> None:
        if self.normal_subtype is not None:
            if self.label != ClassLabel.NORMAL:
                raise ValidationError(
                    f"{self.path}: subtype only applies to Normal entries"
                )
            if not 0 <= self.normal_subtype <= 39:
                raise ValidationError(
                    f"{self.path}: subtype {self.normal_subtype} outside 0..39"
                )


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]

    def __post_init__(self) -> None:
        paths = [e.path for e in self.entries]
        if len(set(paths)) != len(paths):
            dupes = sorted({p for p in paths if paths.count(p) > 1})
            raise ValidationError(f"duplicate paths in manifest: {dupes[:3]}")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def class_counts(self) -> dict[ClassLabel, int]:
        counts = {label: 0 for label in ClassLabel}
        for e in self.entries:
            counts[e.label] += 1
        return counts

    @classmethod
    def build(cls, entries: Iterable[ManifestEntry]) -> "DatasetManifest":
        return cls(tuple(entries))

    def to_jsonl(self) -> str:
        lines = []
        for e in self.entries:
            lines.append(
                json.dumps(
                    {"path": e.path, "label": int(e.label), "normal_subtype": e.normal_subtype},
                    sort_keys=True,
                )
            )
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_jsonl(cls, text: str) -> "DatasetManifest":
        entries = []
        for i, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                d = json.loads(line)
                entries.append(
                    ManifestEntry(
                        path=d["path"],
                        label=ClassLabel(int(d["label"])),
                        normal_subtype=d.get("normal_subtype"),
                    )
                )
            except (KeyError, ValueError) as exc:
                raise AnnotationFormatError(f"bad manifest line ({exc})", i) from exc
        return cls(tuple(entries))


@dataclass(frozen=True)
class SplitSpec:
    train: float = 0.75
    val: float = 0.125
    test: float = 0.125
    seed: int = 0

    def __post_init__(self) -> None:
        total = self.train + self.val + self.test
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(f"split fractions sum to {total}, expected 1")
        if min(self.train, self.val, self.test) < 0:
            raise ValidationError("split fractions must be non-negative")


def _round_half_even(x: float) -> int:
    return int(round(x))


def stratified_split(
    manifest: DatasetManifest, spec: SplitSpec = SplitSpec()
) -> tuple[DatasetManifest, DatasetManifest, DatasetManifest]:
    """Partition per class: val and test get round(fraction * class size)
    entries each (ties to even), the remainder goes to train.

    Deterministic under spec.seed; no path lands in two splits.
    """
    by_class: dict[ClassLabel, list[ManifestEntry]] = {label: [] for label in ClassLabel}
    for entry in manifest:
        by_class[entry.label].append(entry)

    for label, members in by_class.items():
        if 0 < len(members) < MIN_CLASS_SIZE:
            raise ValidationError(
                f"class too small: {label.display} has {len(members)} samples, "
                f"need >= {MIN_CLASS_SIZE}"
            )

    rng = np.random.default_rng(spec.seed)
    train: list[ManifestEntry] = []
    val: list[ManifestEntry] = []
    test: list[ManifestEntry] = []
    for label in ClassLabel:  # fixed class order keeps the shuffle reproducible
        members = by_class[label]
        if not members:
            continue
        order = rng.permutation(len(members))
        shuffled = [members[i] for i in order]
        n = len(shuffled)
        n_val = _round_half_even(spec.val * n)
        n_test = _round_half_even(spec.test * n)
        val.extend(shuffled[:n_val])
        test.extend(shuffled[n_val:n_val + n_test])
        train.extend(shuffled[n_val + n_test:])

    return (
        DatasetManifest(tuple(train)),
        DatasetManifest(tuple(val)),
        DatasetManifest(tuple(test)),
    )


def write_annotation_file(manifest: DatasetManifest) -> bytes:
    """`<relative_path> <label_int>` lines, LF-terminated, UTF-8."""
    lines = [f"{e.path} {int(e.label)}\n" for e in manifest]
    return "".join(lines).encode("utf-8")


def parse_annotation_file(data: bytes) -> DatasetManifest:
    """Exact inverse of write_annotation_file (subtypes are not carried)."""
    entries = []
    for i, raw in enumerate(data.decode("utf-8").splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line:
            continue
        parts = line.rsplit(" ", 1)
        if len(parts) != 2 or not parts[0]:
            raise AnnotationFormatError("malformed annotation line", i)
        path, label_str = parts
        try:
            label_int = int(label_str)
        except ValueError:
            raise AnnotationFormatError(f"bad label {label_str!r}", i) from None
        if not 0 <= label_int <= 3:
            raise AnnotationFormatError("label out of range", i)
        entries.append(ManifestEntry(path=path, label=ClassLabel(label_int)))
    return DatasetManifest(tuple(entries))
