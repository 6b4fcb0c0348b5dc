"""Operator entry point.

Subcommands: gen-fixtures, prepare-dataset, simulate, serve, evaluate,
bench-throughput, capacity-plan, report-tradeoffs. Exit codes: 0 success,
1 validation/configuration error, 2 runtime failure. Reports go to stdout,
JSON with --json.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .backend.api import create_app
from .backend.db import Database
from .backend.notify import NotificationDispatcher
from .backend.service import BackendService
from .config import RunConfig, load_config
from .errors import ValidationError, VigilError
from .evaluation import (
    capacity_plan,
    confusion_from_records,
    macro_metrics,
    measure_throughput,
    misclass_breakdown,
    stratified_split,
    tradeoff_report,
    write_annotation_file,
)
from .evaluation.benchmarks import REFERENCE_MACRO_METRICS, REFERENCE_MODEL_CARDS
from .evaluation.datasets import DatasetManifest, SplitSpec
from .evaluation.metrics import LabeledPrediction, all_class_metrics, round_pct
from .fixtures import ScriptEvent, StreamSpec, gen_fixtures, parse_script_file
from .ingest import VideoChunk
from .labels import ClassLabel
from .simulate import build_classifier, build_sink, run_simulation
from .storage import FileChunkStore
from .svf import read_header


def _print(payload: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
        return
    for key, value in payload.items():
        print(f"{key}: {value}")


# --- subcommand handlers ------------------------------------------------------


def cmd_gen_fixtures(args) -> int:
    streams = [
        StreamSpec(
            stream_id=sid.strip(),
            fps=args.fps,
            width=args.width,
            height=args.height,
        )
        for sid in args.streams.split(",")
        if sid.strip()
    ]
    if not streams:
        raise ValidationError("no stream ids given")
    events: list[ScriptEvent] = []
    if args.script:
        events = parse_script_file(args.script)
    fixture_set = gen_fixtures(
        args.out,
        streams,
        duration_s=args.duration,
        events=events,
        seed=args.seed,
        window_s=args.window,
    )
    labels = [row["label"] for row in fixture_set.truth]
    _print(
        {
            "out_dir": str(fixture_set.out_dir),
            "streams": len(streams),
            "events": len(events),
            "expected_chunks": len(fixture_set.truth),
            "expected_critical_chunks": sum(1 for x in labels if x != int(ClassLabel.NORMAL)),
            "truth": str(fixture_set.truth_path),
        },
        args.json,
    )
    return 0


def cmd_prepare_dataset(args) -> int:
    manifest = DatasetManifest.from_jsonl(Path(args.manifest).read_text("utf-8"))
    spec = SplitSpec(seed=args.seed)
    train, val, test = stratified_split(manifest, spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, split in (("train", train), ("val", val), ("test", test)):
        (out / f"{name}.txt").write_bytes(write_annotation_file(split))
    _print(
        {
            "train": len(train),
            "val": len(val),
            "test": len(test),
            "out_dir": str(out),
        },
        args.json,
    )
    return 0


def cmd_simulate(args) -> int:
    config = load_config(args.config)
    report = run_simulation(config, args.fixtures, log_path=args.log)
    if args.json:
        print(report.to_json())
    else:
        d = report.to_dict()
        errors = d.pop("errors")
        d.pop("chunk_ids")
        _print(d, as_json=False)
        for err in errors:
            print(f"error: {err['chunk_id']} [{err['stage']}] {err['error']}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    config = load_config(args.config)
    Path(config.db_path).parent.mkdir(parents=True, exist_ok=True)
    service = BackendService(Database(config.db_path))
    store = FileChunkStore(config.store_root)
    dispatcher = NotificationDispatcher(
        service.db,
        build_sink(config),
        max_attempts=config.notify_max_attempts,
        base_backoff_s=config.notify_backoff_s,
    )
    app = create_app(service, store, dispatcher=dispatcher, token=config.api_token or None)
    dispatcher.start_worker()
    try:
        uvicorn.run(app, host=config.api_host, port=config.api_port, log_level="warning")
    finally:
        dispatcher.stop_worker()
    return 0


def _load_predictions(path: str | Path) -> dict[str, int]:
    preds = {}
    for line in Path(path).read_text("utf-8").splitlines():
        if not line.strip():
            continue
        row = json.loads(line)
        preds[row["path"]] = int(row["label"])
    return preds


def cmd_evaluate(args) -> int:
    truth_rows = [
        json.loads(line)
        for line in Path(args.truth).read_text("utf-8").splitlines()
        if line.strip()
    ]
    predictions = _load_predictions(args.log)

    truths, preds, records = [], [], []
    missing = 0
    for row in truth_rows:
        predicted = predictions.get(row["path"])
        if predicted is None:
            missing += 1
            continue
        truths.append(ClassLabel(row["label"]))
        preds.append(ClassLabel(predicted))
        records.append(
            LabeledPrediction(
                truth=ClassLabel(row["label"]),
                predicted=ClassLabel(predicted),
                normal_subtype=row.get("normal_subtype"),
            )
        )
    if not truths:
        raise ValidationError("no overlapping paths between truth manifest and inference log")

    cm = confusion_from_records(truths, preds)
    per_class = all_class_metrics(cm)
    macro = macro_metrics(per_class)
    breakdown = misclass_breakdown(records)

    payload = {
        "samples": len(truths),
        "unmatched_truth_rows": missing,
        "confusion_matrix": [list(row) for row in cm.counts],
        "per_class": {
            m.label.display: {
                "tp": m.tp,
                "fn": m.fn,
                "fp": m.fp,
                "recall_pct": round_pct(m.recall),
                "precision_pct": round_pct(m.precision),
                "f1_pct": round_pct(m.f1),
            }
            for m in per_class
        },
        "macro": {
            "recall_pct": round_pct(macro.macro_recall),
            "precision_pct": round_pct(macro.macro_precision),
            "f1_pct": round_pct(macro.macro_f1),
        },
        "misclassified_normals": {
            label.display: [{"action": name, "count": count} for name, count in items]
            for label, items in breakdown.items()
        },
    }
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"samples: {payload['samples']} (unmatched: {missing})")
        print("confusion matrix (rows=truth, cols=predicted):")
        for label, row in zip(ClassLabel, payload["confusion_matrix"]):
            print(f"  {label.display:<11} {row}")
        for name, m in payload["per_class"].items():
            print(
                f"{name:<11} recall {m['recall_pct']:6.2f}%  precision "
                f"{m['precision_pct']:6.2f}%  F1 {m['f1_pct']:6.2f}%"
            )
        macro_row = payload["macro"]
        print(
            f"{'macro':<11} recall {macro_row['recall_pct']:6.2f}%  precision "
            f"{macro_row['precision_pct']:6.2f}%  F1 {macro_row['f1_pct']:6.2f}%"
        )
        for label_name, rows in payload["misclassified_normals"].items():
            if rows:
                pairs = ", ".join(f"{r['action']} {r['count']}" for r in rows)
                print(f"normals misread as {label_name}: {pairs}")
    return 0


def cmd_bench_throughput(args) -> int:
    config = load_config(args.config) if args.config else RunConfig()
    root = Path(args.fixtures)
    files = sorted(root.rglob("*.svf"))
    if args.limit:
        files = files[: args.limit]
    chunks = []
    for i, path in enumerate(files):
        data = path.read_bytes()
        header = read_header(data)
        chunks.append(
            (
                VideoChunk(
                    chunk_id=f"bench:{i}",
                    stream_id="bench",
                    start_ts=i,
                    duration_s=header.duration_s,
                    frame_count=header.frame_count,
                    storage_key=path.relative_to(root).as_posix(),
                    partial=False,
                ),
                data,
            )
        )
    classifier = build_classifier(
        config, store=FileChunkStore(config.store_root), fixture_dir=args.fixtures
    )
    report = measure_throughput(classifier, chunks)
    _print(
        {
            "samples": report.samples,
            "elapsed_s": round(report.elapsed_s, 3),
            "samples_per_second": report.rate_2dp,
            "completed": report.completed,
            "error": report.error,
        },
        args.json,
    )
    return 0


def cmd_capacity_plan(args) -> int:
    plan = capacity_plan(args.throughput, args.chunk_seconds, args.hourly_price)
    _print(plan.to_dict(), args.json)
    return 0


def cmd_report_tradeoffs(args) -> int:
    report = tradeoff_report(REFERENCE_MODEL_CARDS, REFERENCE_MACRO_METRICS)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "tradeoffs.csv").write_text(report.to_csv(), "utf-8")
        (out / "tradeoffs.md").write_text(report.to_markdown(), "utf-8")
        (out / "metric_vs_throughput.csv").write_text(report.metric_vs_throughput_csv(), "utf-8")
        (out / "metric_vs_params.csv").write_text(report.metric_vs_params_csv(), "utf-8")
        _print({"out_dir": str(out), "models": len(REFERENCE_MODEL_CARDS)}, args.json)
    elif args.json:
        print(json.dumps({"csv": report.to_csv()}, indent=2))
    else:
        print(report.to_markdown(), end="")
    return 0


# --- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vigil", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-fixtures", help="write synthetic stream fixtures + ground truth")
    p.add_argument("--out", required=True)
    p.add_argument("--streams", default="cam1,cam2,cam3", help="comma-separated stream ids")
    p.add_argument("--duration", type=float, default=60.0, help="seconds per stream")
    p.add_argument("--fps", type=int, default=30)
    p.add_argument("--width", type=int, default=32)
    p.add_argument("--height", type=int, default=24)
    p.add_argument("--script", help="JSON event script file")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--window", type=float, default=10.0, help="window for expected labels")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_gen_fixtures)

    p = sub.add_parser("prepare-dataset", help="stratified split + annotation files")
    p.add_argument("--manifest", required=True, help="JSONL manifest (path/label/subtype)")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_prepare_dataset)

    p = sub.add_parser("simulate", help="run the full pipeline over fixtures")
    p.add_argument("--config", help="TOML run config")
    p.add_argument("--fixtures", required=True)
    p.add_argument("--log", help="write per-chunk inference log (JSONL)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("serve", help="serve the backend REST API")
    p.add_argument("--config", help="TOML run config")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("evaluate", help="metrics from an inference log vs a truth manifest")
    p.add_argument("--log", required=True, help="inference log JSONL")
    p.add_argument("--truth", required=True, help="truth manifest JSONL")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("bench-throughput", help="samples/second over stored chunks")
    p.add_argument("--fixtures", required=True, help="directory of .svf chunks")
    p.add_argument("--config", help="TOML run config (classifier choice)")
    p.add_argument("--limit", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_bench_throughput)

    p = sub.add_parser("capacity-plan", help="clients and cost for a deployment")
    p.add_argument("--throughput", type=float, required=True)
    p.add_argument("--chunk-seconds", type=float, default=10.0)
    p.add_argument("--hourly-price", type=float, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_capacity_plan)

    p = sub.add_parser("report-tradeoffs", help="model accuracy/efficiency trade-off tables")
    p.add_argument("--out", help="directory for CSV/Markdown outputs")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_report_tradeoffs)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; that is a validation failure here
        return 0 if exc.code in (0, None) else 1
    try:
        return args.fn(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except VigilError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 2


if __name__ == "__main__":
    sys.exit(main())
