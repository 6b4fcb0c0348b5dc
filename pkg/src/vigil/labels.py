"""Action classes and the routine-activity subtype table."""

from __future__ import annotations

from enum import IntEnum


class ClassLabel(IntEnum):
    """The four action classes. Integer values are the wire/storage encoding."""

    FALLING = 0
    STAGGERING = 1
    CHEST_PAIN = 2
    NORMAL = 3

    @property
    def display(self) -> str:
        return _DISPLAY[self]


_DISPLAY = {
    ClassLabel.FALLING: "Falling",
    ClassLabel.STAGGERING: "Staggering",
    ClassLabel.CHEST_PAIN: "ChestPain",
    ClassLabel.NORMAL: "Normal",
}

# Any prediction in this set raises an alert.
CRITICAL_LABELS = frozenset(
    {ClassLabel.FALLING, ClassLabel.STAGGERING, ClassLabel.CHEST_PAIN}
)


def is_critical(label: ClassLabel | int) -> bool:
    return ClassLabel(label) in CRITICAL_LABELS


def parse_label(value: int) -> ClassLabel:
    """Validate an integer label from the wire; raises ValueError out of range."""
    if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value <= 3:
        raise ValueError(f"label out of range: {value!r}")
    return ClassLabel(value)


# The 40 routine daily activities the Normal class aggregates. Index = the
# normal_subtype byte carried by SVF frames; names surface in the
# misclassification breakdown reports.
NORMAL_SUBTYPE_NAMES: tuple[str, ...] = (
    "drink water",
    "eat meal",
    "brush teeth",
    "brush hair",
    "drop",
    "pick up",
    "throw",
    "sit down",
    "stand up",
    "clapping",
    "reading",
    "writing",
    "tear up paper",
    "put on jacket",
    "take off jacket",
    "put on a shoe",
    "take off a shoe",
    "put on glasses",
    "take off glasses",
    "put on a hat/cap",
    "take off a hat/cap",
    "cheer up",
    "hand waving",
    "kicking something",
    "reach into pocket",
    "hopping",
    "jump up",
    "phone call",
    "play with phone/tablet",
    "type on a keyboard",
    "point to something",
    "taking a selfie",
    "check time",
    "rub two hands",
    "nod head/bow",
    "shake head",
    "wipe face",
    "salute",
    "put palms together",
    "cross hands in front",
)

assert len(NORMAL_SUBTYPE_NAMES) == 40
