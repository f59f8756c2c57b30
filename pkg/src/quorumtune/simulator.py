"""Deterministic discrete-event simulator of an N-replica quorum store.

Timing model: every operation fans out one request message per replica and
waits for `required_acks` replies. A replica applies a write (or snapshots a
read) when the request message arrives, one sampled one-way delay after
issue; the coordinator completes at the k-th smallest round trip. Replicas
that were not needed for the ack quorum still receive and apply the write
when their own message lands, which is what opens stale-read windows under
sub-ALL levels. All times are integer microseconds on a single logical
timeline.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .levels import ConsistencyLevel, ReadLevel, WriteLevel, required_acks
from .workload import WorkloadOp

INITIAL_TOKEN = "init"

TRACE_HEADER = "op_id,key,kind,start_us,finish_us,value,read_level,write_level,messages"

LOGNORMAL = "lognormal"
FIXED = "fixed"


@dataclass(frozen=True)
class LatencyModel:
    """Per-message one-way delay distribution, microseconds."""

    kind: str = LOGNORMAL
    median_us: float = 2000.0
    sigma: float = 0.5

    def __post_init__(self) -> None:
        if self.kind not in (LOGNORMAL, FIXED):
            raise ValueError(f"unknown latency model {self.kind!r}")
        if not self.median_us > 0:
            raise ValueError(f"median_us must be > 0, got {self.median_us}")
        if self.kind == LOGNORMAL and not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """`count` integer one-way delays, each at least 1 us."""
        if self.kind == FIXED:
            delays = np.full(count, self.median_us)
        else:
            delays = self.median_us * np.exp(self.sigma * rng.standard_normal(count))
        return np.maximum(np.rint(delays).astype(np.int64), 1)


@dataclass(frozen=True)
class ClusterConfig:
    replica_count: int = 5
    latency: LatencyModel = field(default_factory=LatencyModel)
    seed: int = 0
    clock_skew_bound_us: int = 0

    def __post_init__(self) -> None:
        if self.replica_count < 1:
            raise ValueError(f"replica_count must be >= 1, got {self.replica_count}")
        if self.clock_skew_bound_us < 0:
            raise ValueError(f"clock_skew_bound_us must be >= 0, got {self.clock_skew_bound_us}")


@dataclass(frozen=True)
class OperationRecord:
    op_id: int
    key: str
    kind: str  # "read" | "write"
    start_us: int
    finish_us: int
    value: str
    level: ConsistencyLevel
    messages: int


class ClusterState:
    """Mutable replica state plus the RNG stream for one simulation run."""

    def __init__(self, config: ClusterConfig):
        self.config = config
        self.rng = np.random.Generator(np.random.PCG64(config.seed))
        n = config.replica_count
        if config.clock_skew_bound_us > 0:
            bound = config.clock_skew_bound_us
            self.skew_us = np.rint(self.rng.uniform(-bound, bound, size=n)).astype(np.int64)
        else:
            self.skew_us = np.zeros(n, dtype=np.int64)
        # versions[replica][key] -> list of (install_us, ts, op_id, token)
        self.versions: list[dict[str, list[tuple[int, int, int, str]]]] = [dict() for _ in range(n)]
        self.write_counters: dict[str, int] = {}
        self.total_messages = 0
        self.next_op_id = 0
        self.serial_clock = 0  # issue point for bare execute() calls


def execute(
    cluster: ClusterState,
    kind: str,
    key: str,
    level: ConsistencyLevel,
    start_us: int | None = None,
) -> OperationRecord:
    """Run one read or write; returns its timed record.

    With start_us omitted the call behaves as a serial client: the op is
    issued at the finish time of the previous bare call.
    """
    if kind not in ("read", "write"):
        raise ValueError(f"kind must be 'read' or 'write', got {kind!r}")
    if not isinstance(level, ConsistencyLevel):
        raise TypeError(f"level must be a ConsistencyLevel, got {level!r}")
    if start_us is None:
        start_us = cluster.serial_clock

    cfg = cluster.config
    n = cfg.replica_count
    rng = cluster.rng
    op_id = cluster.next_op_id
    cluster.next_op_id += 1

    coordinator = int(rng.integers(n))
    delays = cfg.latency.sample(rng, 2 * n)
    d_request, d_reply = delays[:n], delays[n:]
    arrivals = start_us + d_request
    round_trips = d_request + d_reply

    if kind == "read":
        acks = required_acks(level.read, n)
        order = np.lexsort((np.arange(n), round_trips))  # ties -> low replica id
        responders = order[:acks]
        # Sentinel below any coordinator timestamp, including skewed-negative ones.
        best: tuple[int, int, str] = (-(1 << 62), -1, INITIAL_TOKEN)
        for replica in responders:
            for install_us, ts, writer_id, token in cluster.versions[replica].get(key, ()):
                if install_us <= arrivals[replica] and (ts, writer_id) > best[:2]:
                    best = (ts, writer_id, token)
        value = best[2]
    else:
        acks = required_acks(level.write, n)
        order = np.lexsort((np.arange(n), round_trips))
        counter = cluster.write_counters.get(key, 0) + 1
        cluster.write_counters[key] = counter
        value = f"{key}#{counter}"
        ts = start_us + int(cluster.skew_us[coordinator])
        for replica in range(n):
            cluster.versions[replica].setdefault(key, []).append(
                (int(arrivals[replica]), ts, op_id, value)
            )

    finish_us = int(start_us + round_trips[order[acks - 1]])
    messages = 2 * n
    cluster.total_messages += messages
    cluster.serial_clock = max(cluster.serial_clock, finish_us)
    return OperationRecord(op_id, key, kind, int(start_us), finish_us, value, level, messages)


LevelPolicy = ConsistencyLevel | Callable[[WorkloadOp], ConsistencyLevel]


def run_window(
    cluster: ClusterState,
    workload_stream: Iterable[WorkloadOp],
    level_policy: LevelPolicy,
    window_us: int,
) -> list[OperationRecord]:
    """Execute every operation the closed-loop sessions issue inside the window.

    Each session issues its first op at time 0 and the next at the previous
    finish; ops issued before window_us run to completion. The returned trace
    is ordered by issue time (session id breaks ties).
    """
    if window_us <= 0:
        raise ValueError(f"window_us must be > 0, got {window_us}")
    sessions: dict[int, list[WorkloadOp]] = {}
    for op in workload_stream:
        sessions.setdefault(op.session_id, []).append(op)

    heap = [(0, session_id, 0) for session_id in sorted(sessions)]
    heapq.heapify(heap)
    trace: list[OperationRecord] = []
    while heap:
        issue_us, session_id, index = heapq.heappop(heap)
        if issue_us >= window_us:
            continue
        op = sessions[session_id][index]
        level = level_policy(op) if callable(level_policy) else level_policy
        record = execute(cluster, op.kind, op.key, level, start_us=issue_us)
        trace.append(record)
        if index + 1 < len(sessions[session_id]):
            heapq.heappush(heap, (record.finish_us, session_id, index + 1))
    return trace


def write_trace(trace: Iterable[OperationRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(TRACE_HEADER + "\n")
        for rec in trace:
            handle.write(
                f"{rec.op_id},{rec.key},{rec.kind},{rec.start_us},{rec.finish_us},"
                f"{rec.value},{rec.level.read.value},{rec.level.write.value},{rec.messages}\n"
            )


def read_trace(path: str | Path) -> list[OperationRecord]:
    records: list[OperationRecord] = []
    with open(path, "r", encoding="utf-8") as handle:
        header = handle.readline().rstrip("\n")
        if header != TRACE_HEADER:
            raise ValueError(f"{path}:1: bad trace header {header!r}")
        for lineno, raw in enumerate(handle, start=2):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 9:
                raise ValueError(f"{path}:{lineno}: expected 9 fields, got {len(parts)}")
            try:
                records.append(
                    OperationRecord(
                        op_id=int(parts[0]),
                        key=parts[1],
                        kind=parts[2],
                        start_us=int(parts[3]),
                        finish_us=int(parts[4]),
                        value=parts[5],
                        level=ConsistencyLevel(ReadLevel(parts[6]), WriteLevel(parts[7])),
                        messages=int(parts[8]),
                    )
                )
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return records


_CONFIG_FIELDS = {
    "replica_count": int,
    "latency_model": str,
    "latency_median_us": float,
    "latency_sigma": float,
    "seed": int,
    "clock_skew_bound_us": int,
}


def load_cluster_config(path: str | Path, **overrides) -> ClusterConfig:
    """Read a ClusterConfig from a key=value text file."""
    fields: dict = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _CONFIG_FIELDS:
                raise ValueError(f"{path}:{lineno}: unknown cluster field {key!r}")
            fields[key] = _CONFIG_FIELDS[key](value)
    fields.update(overrides)
    latency = LatencyModel(
        kind=fields.pop("latency_model", LOGNORMAL),
        median_us=fields.pop("latency_median_us", 2000.0),
        sigma=fields.pop("latency_sigma", 0.5),
    )
    return ClusterConfig(latency=latency, **fields)


def mean_latency_ms(trace: list[OperationRecord]) -> float:
    if not trace:
        raise ValueError("empty trace has no mean latency")
    return float(np.mean([rec.finish_us - rec.start_us for rec in trace])) / 1000.0
