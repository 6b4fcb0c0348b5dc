#!/usr/bin/env python3
"""End-to-end desk demo: generate scripted fixtures, run the full
monitoring pipeline with the stub classifier, review one alert, evaluate
the inference log against ground truth, and print the capacity plan.

Usage: python scripts/desk_demo.py [--workdir DIR]
"""

import argparse
import json
import tempfile
from pathlib import Path

from vigil.backend.db import Database
from vigil.backend.notify import LogSink, NotificationDispatcher
from vigil.backend.service import BackendService
from vigil.config import RunConfig
from vigil.evaluation.benchmarks import (
    DEPLOYED_CHUNK_S,
    DEPLOYED_GPU_HOURLY_USD,
    DEPLOYED_THROUGHPUT,
)
from vigil.evaluation.capacity import capacity_plan
from vigil.fixtures import ScriptEvent, StreamSpec, gen_fixtures
from vigil.labels import ClassLabel
from vigil.simulate import run_simulation
from vigil.storage import FileChunkStore


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", help="working directory (default: a temp dir)")
    args = parser.parse_args()
    workdir = Path(args.workdir) if args.workdir else Path(tempfile.mkdtemp(prefix="vigil-demo-"))
    workdir.mkdir(parents=True, exist_ok=True)
    print(f"working directory: {workdir}")

    streams = [StreamSpec(f"cam{i}", fps=10) for i in (1, 2, 3)]
    events = [
        ScriptEvent("cam1", 20.0, 10.0, ClassLabel.FALLING),
        ScriptEvent("cam1", 40.0, 10.0, ClassLabel.CHEST_PAIN),
        ScriptEvent("cam2", 0.0, 10.0, ClassLabel.STAGGERING),
        ScriptEvent("cam3", 50.0, 10.0, ClassLabel.FALLING),
    ]
    fixture_dir = workdir / "fixtures"
    gen_fixtures(fixture_dir, streams, duration_s=60.0, events=events, seed=7)
    print(f"generated {len(streams)} streams with {len(events)} scripted events")

    config = RunConfig()
    service = BackendService(Database(workdir / "vigil.db"))
    dispatcher = NotificationDispatcher(service.db, LogSink(), sleep=lambda _s: None)
    report = run_simulation(
        config,
        fixture_dir,
        store=FileChunkStore(workdir / "store"),
        service=service,
        dispatcher=dispatcher,
        log_path=workdir / "inferences.jsonl",
    )
    print("\nsimulation report:")
    print(report.to_json())

    pending = service.list_alerts(state="pending")
    first = pending.alerts[0]
    print(f"\nreviewing alert {first.alert_id} ({first.label.display}) as a false positive")
    service.review_alert(first.alert_id, "dismissed", reviewer="demo", corrected_label=ClassLabel.NORMAL)
    print(f"retraining queue: {len(service.list_retraining())} item(s)")
    print(f"retraining export:\n{service.retraining_export().decode().rstrip()}")

    print("\nmetrics summary:")
    print(json.dumps(service.metrics_summary(), indent=2, sort_keys=True))

    plan = capacity_plan(DEPLOYED_THROUGHPUT, DEPLOYED_CHUNK_S, DEPLOYED_GPU_HOURLY_USD)
    print("\ncapacity plan for the deployed model on one cloud GPU:")
    print(json.dumps(plan.to_dict(), indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
