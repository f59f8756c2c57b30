"""Window observation and the training-corpus file.

One TrainingRow aggregates a simulated window: workload features (rw, tc),
the packet count p, the applied consistency level c, and the observed mean
latency, staleness score, and throughput. Numeric fields are quantized to
6 decimal places so the dataset file round-trips exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .levels import ConsistencyLevel
from .simulator import OperationRecord
from .staleness import gamma_score, intervals_from_trace
from .workload import WorkloadSpec

DATASET_HEADER = "rw,tc,p,c,l_ms,s_ms,t_ops"


def _q6(value: float) -> float:
    """Quantize to the dataset file's 6-decimal fixed-point grid."""
    return float(f"{value:.6f}")


@dataclass(frozen=True)
class TrainingRow:
    rw: float
    tc: int
    p: int
    c: ConsistencyLevel
    l_ms: float
    s_ms: float
    t_ops: float

    def __post_init__(self) -> None:
        for name in ("rw", "l_ms", "s_ms", "t_ops"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value}")
        if self.rw > 1.0:
            raise ValueError(f"rw must be <= 1, got {self.rw}")
        if self.tc < 1:
            raise ValueError(f"tc must be >= 1, got {self.tc}")
        if self.p < 0:
            raise ValueError(f"p must be >= 0, got {self.p}")

    @property
    def features(self) -> tuple[float, int, int]:
        return (self.rw, self.tc, self.p)


def observe(
    trace: Sequence[OperationRecord],
    spec: WorkloadSpec,
    level: ConsistencyLevel,
    window_us: int,
    percentile: float = 95.0,
) -> TrainingRow:
    """Aggregate one window's trace into a TrainingRow."""
    if not trace:
        raise ValueError("cannot observe an empty trace")
    if window_us <= 0:
        raise ValueError(f"window_us must be > 0, got {window_us}")
    latencies_us = [rec.finish_us - rec.start_us for rec in trace]
    l_ms = sum(latencies_us) / len(latencies_us) / 1000.0
    s_ms = gamma_score(intervals_from_trace(trace), percentile).score_ms
    t_ops = len(trace) / (window_us / 1_000_000.0)
    p = sum(rec.messages for rec in trace)
    return TrainingRow(
        rw=_q6(spec.read_proportion),
        tc=spec.thread_count,
        p=p,
        c=level,
        l_ms=_q6(l_ms),
        s_ms=_q6(s_ms),
        t_ops=_q6(t_ops),
    )


def write_dataset(rows: Iterable[TrainingRow], path: str | Path) -> None:
    rows = list(rows)
    if not rows:
        raise ValueError("refusing to write an empty dataset")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(DATASET_HEADER + "\n")
        for row in rows:
            handle.write(
                f"{row.rw:.6f},{row.tc},{row.p},{row.c.key},"
                f"{row.l_ms:.6f},{row.s_ms:.6f},{row.t_ops:.6f}\n"
            )


def load_dataset(path: str | Path) -> list[TrainingRow]:
    rows: list[TrainingRow] = []
    with open(path, "r", encoding="utf-8") as handle:
        header = handle.readline().rstrip("\n")
        if header != DATASET_HEADER:
            raise ValueError(f"{path}:1: bad dataset header {header!r}")
        for lineno, raw in enumerate(handle, start=2):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 7:
                raise ValueError(f"{path}:{lineno}: expected 7 fields, got {len(parts)}")
            try:
                rows.append(
                    TrainingRow(
                        rw=float(parts[0]),
                        tc=int(parts[1]),
                        p=int(parts[2]),
                        c=ConsistencyLevel.parse(parts[3]),
                        l_ms=float(parts[4]),
                        s_ms=float(parts[5]),
                        t_ops=float(parts[6]),
                    )
                )
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return rows
