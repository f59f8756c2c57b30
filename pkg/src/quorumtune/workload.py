"""Synthetic read/write workload generation.

Sessions are closed-loop client threads: each issues its next operation when
the previous one finishes. generate() fixes everything that is decidable
ahead of simulation (session, kind, key, per-session order) and stamps
issue_time 0 as the earliest permissible issue; the simulator realizes
issue-on-completion scheduling when the stream is run.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable

import numpy as np

UNIFORM = "uniform"
ZIPFIAN = "zipfian"


@dataclass(frozen=True)
class WorkloadSpec:
    read_proportion: float
    thread_count: int
    key_count: int = 1000
    key_distribution: str = ZIPFIAN
    zipf_theta: float = 0.99
    ops_per_thread_per_window: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.read_proportion <= 1.0:
            raise ValueError(f"read_proportion must be in [0,1], got {self.read_proportion}")
        if self.thread_count < 1:
            raise ValueError(f"thread_count must be >= 1, got {self.thread_count}")
        if self.key_count < 1:
            raise ValueError(f"key_count must be >= 1, got {self.key_count}")
        if self.key_distribution not in (UNIFORM, ZIPFIAN):
            raise ValueError(f"unknown key_distribution {self.key_distribution!r}")
        if self.key_distribution == ZIPFIAN and not self.zipf_theta > 0:
            raise ValueError(f"zipf_theta must be > 0, got {self.zipf_theta}")
        if self.ops_per_thread_per_window < 1:
            raise ValueError(f"ops_per_thread_per_window must be >= 1, got {self.ops_per_thread_per_window}")


@dataclass(frozen=True)
class WorkloadOp:
    session_id: int
    kind: str  # "read" | "write"
    key: str
    issue_time: int = 0  # microseconds; earliest permissible issue


def _key_probabilities(spec: WorkloadSpec) -> np.ndarray:
    if spec.key_distribution == UNIFORM:
        return np.full(spec.key_count, 1.0 / spec.key_count)
    ranks = np.arange(1, spec.key_count + 1, dtype=np.float64)
    weights = ranks ** (-spec.zipf_theta)
    return weights / weights.sum()


def generate(spec: WorkloadSpec) -> list[WorkloadOp]:
    """Deterministic operation stream, ordered by (session, per-session seq)."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    cumulative = np.cumsum(_key_probabilities(spec))
    ops: list[WorkloadOp] = []
    for session in range(spec.thread_count):
        count = spec.ops_per_thread_per_window
        is_read = rng.random(count) < spec.read_proportion
        key_idx = np.searchsorted(cumulative, rng.random(count), side="right")
        for i in range(count):
            ops.append(
                WorkloadOp(
                    session_id=session,
                    kind="read" if is_read[i] else "write",
                    key=f"key{key_idx[i]:05d}",
                )
            )
    return ops


def sweep_read_proportion(base: WorkloadSpec, values: Iterable[float]) -> list[WorkloadSpec]:
    """One spec per read-proportion value, everything else copied from base."""
    return [replace(base, read_proportion=float(value)) for value in values]


_FIELD_PARSERS = {
    "read_proportion": float,
    "thread_count": int,
    "key_count": int,
    "key_distribution": str,
    "zipf_theta": float,
    "ops_per_thread_per_window": int,
    "seed": int,
}


def load_workload_spec(path: str | Path, **overrides) -> WorkloadSpec:
    """Read a WorkloadSpec from a key=value text file."""
    fields: dict = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _FIELD_PARSERS:
                raise ValueError(f"{path}:{lineno}: unknown workload field {key!r}")
            fields[key] = _FIELD_PARSERS[key](value)
    fields.update(overrides)
    return WorkloadSpec(**fields)
