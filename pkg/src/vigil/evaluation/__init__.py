"""Dataset preparation, the metric suite, throughput measurement, and the
capacity/cost planner."""

from .capacity import CapacityPlan, ThroughputReport, capacity_plan, measure_throughput
from .datasets import (
    DatasetManifest,
    ManifestEntry,
    SplitSpec,
    parse_annotation_file,
    stratified_split,
    write_annotation_file,
)
from .metrics import (
    ClassMetrics,
    ConfusionMatrix,
    MacroMetrics,
    class_metrics,
    class_metrics_from_counts,
    confusion_from_records,
    macro_metrics,
    misclass_breakdown,
    round_pct,
)
from .reports import TradeoffReport, tradeoff_report

__all__ = [
    "CapacityPlan",
    "ThroughputReport",
    "capacity_plan",
    "measure_throughput",
    "DatasetManifest",
    "ManifestEntry",
    "SplitSpec",
    "parse_annotation_file",
    "stratified_split",
    "write_annotation_file",
    "ClassMetrics",
    "ConfusionMatrix",
    "MacroMetrics",
    "class_metrics",
    "class_metrics_from_counts",
    "confusion_from_records",
    "macro_metrics",
    "misclass_breakdown",
    "round_pct",
    "TradeoffReport",
    "tradeoff_report",
]
