#!/usr/bin/env python3
"""Rebuild the per-class and macro metric tables for the four candidate
deployment models from their bundled test-split counts, and emit the
trade-off table.

Usage: python scripts/rebuild_benchmark_tables.py [--out DIR]
"""

import argparse
from pathlib import Path

from vigil.evaluation.benchmarks import (
    REFERENCE_CLASS_COUNTS,
    REFERENCE_MACRO_METRICS,
    REFERENCE_MODEL_CARDS,
)
from vigil.evaluation.metrics import class_metrics_from_counts, round_pct
from vigil.evaluation.reports import tradeoff_report
from vigil.labels import ClassLabel


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", help="also write CSV/Markdown files here")
    args = parser.parse_args()

    models = list(REFERENCE_CLASS_COUNTS)
    for label in (ClassLabel.FALLING, ClassLabel.STAGGERING, ClassLabel.CHEST_PAIN):
        print(f"\n== Predicting {label.display} ==")
        print(f"{'metric':<10} " + " ".join(f"{m:>22}" for m in models))
        rows = {"recall": [], "precision": [], "f1": []}
        for model in models:
            tp, fn, fp = REFERENCE_CLASS_COUNTS[model][label]
            m = class_metrics_from_counts(tp, fn, fp, label)
            rows["recall"].append(round_pct(m.recall))
            rows["precision"].append(round_pct(m.precision))
            rows["f1"].append(round_pct(m.f1))
        for name, values in rows.items():
            print(f"{name:<10} " + " ".join(f"{v:>21.2f}%" for v in values))

    print("\n== Macro metrics (recall / precision / F1) ==")
    for model in models:
        macro = REFERENCE_MACRO_METRICS[model]
        print(
            f"{model:<22} {macro.macro_recall:6.2f}% / "
            f"{macro.macro_precision:6.2f}% / {macro.macro_f1:6.2f}%"
        )

    report = tradeoff_report(REFERENCE_MODEL_CARDS, REFERENCE_MACRO_METRICS)
    print("\n== Accuracy / efficiency trade-offs ==")
    print(report.to_markdown())

    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "tradeoffs.csv").write_text(report.to_csv(), "utf-8")
        (out / "tradeoffs.md").write_text(report.to_markdown(), "utf-8")
        (out / "metric_vs_throughput.csv").write_text(report.metric_vs_throughput_csv(), "utf-8")
        (out / "metric_vs_params.csv").write_text(report.metric_vs_params_csv(), "utf-8")
        print(f"wrote CSV/Markdown tables to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
