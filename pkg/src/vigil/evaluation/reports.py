"""Accuracy/efficiency trade-off tables: CSV (RFC 4180) and Markdown.

One row per candidate model joins its card metadata with macro metrics.
Two extra CSV series pair each performance metric against throughput and
against parameter count for plotting.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from ..classify import ModelCard
from ..errors import ValidationError
from .metrics import MacroMetrics

_CARD_COLUMNS = (
    "model",
    "mean_class_accuracy_pct",
    "throughput_per_s",
    "params_m",
    "gflops",
    "train_hours_total",
    "train_hours_to_90pct",
    "macro_recall_pct",
    "macro_precision_pct",
    "macro_f1_pct",
)


def _fmt(value: Optional[float]) -> str:
    """Two decimals max, trailing zeros trimmed; '-' for missing."""
    if value is None:
        return "-"
    text = f"{value:.2f}".rstrip("0").rstrip(".")
    return text if text else "0"


@dataclass(frozen=True)
class TradeoffReport:
    cards: tuple[ModelCard, ...]
    macros: Mapping[str, MacroMetrics]

    def _rows(self) -> list[list[str]]:
        rows = []
        for card in self.cards:
            macro = self.macros.get(card.model_id)
            rows.append(
                [
                    card.model_id,
                    _fmt(card.mean_class_accuracy),
                    _fmt(card.throughput),
                    _fmt(card.params_m),
                    _fmt(card.gflops),
                    _fmt(card.train_hours_total),
                    _fmt(card.train_hours_to_90),
                    _fmt(macro.macro_recall if macro else None),
                    _fmt(macro.macro_precision if macro else None),
                    _fmt(macro.macro_f1 if macro else None),
                ]
            )
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_CARD_COLUMNS)
        writer.writerows(self._rows())
        return buf.getvalue()

    def to_markdown(self) -> str:
        header = "| " + " | ".join(_CARD_COLUMNS) + " |"
        rule = "|" + "|".join(["---"] * len(_CARD_COLUMNS)) + "|"
        lines = [header, rule]
        for row in self._rows():
            lines.append("| " + " | ".join(row) + " |")
        return "\n".join(lines) + "\n"

    def _series(self, x_name: str, x_getter) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["model", x_name, "macro_f1_pct", "macro_precision_pct", "macro_recall_pct"]
        )
        for card in self.cards:
            macro = self.macros.get(card.model_id)
            if macro is None:
                continue
            writer.writerow(
                [
                    card.model_id,
                    _fmt(x_getter(card)),
                    _fmt(macro.macro_f1),
                    _fmt(macro.macro_precision),
                    _fmt(macro.macro_recall),
                ]
            )
        return buf.getvalue()

    def metric_vs_throughput_csv(self) -> str:
        """Performance against inference speed: the deployment trade-off."""
        return self._series("throughput_per_s", lambda c: c.throughput)

    def metric_vs_params_csv(self) -> str:
        """Performance against model complexity."""
        return self._series("params_m", lambda c: c.params_m)


def tradeoff_report(
    cards: Sequence[ModelCard], macros: Mapping[str, MacroMetrics]
) -> TradeoffReport:
    if not cards:
        raise ValidationError("tradeoff report needs at least one model card")
    ids = [c.model_id for c in cards]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate model ids in cards")
    return TradeoffReport(cards=tuple(cards), macros=dict(macros))
