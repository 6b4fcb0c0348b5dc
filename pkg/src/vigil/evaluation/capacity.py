"""Inference throughput measurement and the capacity/cost planner.

A client needs one chunk classified every chunk_s seconds, so a server
sustaining `throughput` samples/second monitors floor(throughput * chunk_s)
clients 24/7. Cost math uses a 720-hour month (24 x 30).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from ..classify import Classifier
from ..errors import InsufficientCapacityError, ValidationError
from ..ingest import VideoChunk

HOURS_PER_MONTH = 24 * 30
MIN_BENCH_CHUNKS = 10


@dataclass(frozen=True)
class ThroughputReport:
    samples: int
    elapsed_s: float
    samples_per_second: float
    completed: bool
    failed_index: Optional[int] = None
    error: Optional[str] = None

    @property
    def rate_2dp(self) -> float:
        return round(self.samples_per_second, 2)


def measure_throughput(
    classifier: Classifier, chunks: Sequence[tuple[VideoChunk, bytes]]
) -> ThroughputReport:
    """Wall-clock samples/second over one full sequential pass.

    A classifier failure mid-run aborts with a partial report covering the
    samples finished before the failure. Single-flight by construction.
    """
    if len(chunks) < MIN_BENCH_CHUNKS:
        raise ValidationError(
            f"need >= {MIN_BENCH_CHUNKS} chunks for stable timing, got {len(chunks)}"
        )
    done = 0
    error = None
    failed_index = None
    start = time.perf_counter()
    for i, (meta, data) in enumerate(chunks):
        try:
            classifier.classify_chunk(meta, data)
        except Exception as exc:  # partial report rather than a lost run
            error = str(exc)
            failed_index = i
            break
        done += 1
    elapsed = max(time.perf_counter() - start, 1e-9)
    return ThroughputReport(
        samples=done,
        elapsed_s=elapsed,
        samples_per_second=done / elapsed,
        completed=error is None,
        failed_index=failed_index,
        error=error,
    )


@dataclass(frozen=True)
class CapacityPlan:
    throughput: float  # samples / second
    chunk_s: float
    hourly_price: float
    clients_fractional: float
    clients: int
    monthly_cost: float
    cost_per_client: float

    def to_dict(self) -> dict:
        return {
            "throughput": self.throughput,
            "chunk_s": self.chunk_s,
            "hourly_price": self.hourly_price,
            "clients_fractional": self.clients_fractional,
            "clients": self.clients,
            "monthly_cost": round(self.monthly_cost, 2),
            "cost_per_client": round(self.cost_per_client, 2),
        }


def capacity_plan(throughput: float, chunk_s: float, hourly_price: float) -> CapacityPlan:
    """clients = floor(throughput * chunk_s); monthly = hourly * 720;
    per-client = monthly / clients_fractional."""
    if throughput <= 0 or chunk_s <= 0 or hourly_price <= 0:
        raise ValidationError(
            f"all inputs must be positive: throughput={throughput}, "
            f"chunk_s={chunk_s}, hourly_price={hourly_price}"
        )
    fractional = throughput * chunk_s
    clients = math.floor(fractional)
    if clients < 1:
        raise InsufficientCapacityError(
            f"insufficient capacity: {fractional:.3f} clients at this throughput"
        )
    monthly = hourly_price * HOURS_PER_MONTH
    return CapacityPlan(
        throughput=throughput,
        chunk_s=chunk_s,
        hourly_price=hourly_price,
        clients_fractional=fractional,
        clients=clients,
        monthly_cost=monthly,
        cost_per_client=monthly / fractional,
    )
