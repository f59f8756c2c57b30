"""SLA parsing and satisfaction checks.

An SLA is an ordered list of subSLAs; each subSLA pairs a latency threshold
with a staleness threshold, both in milliseconds and both inclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class SubSLA:
    latency_threshold_ms: float
    staleness_threshold_ms: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.latency_threshold_ms) and self.latency_threshold_ms > 0):
            raise ValueError(f"latency threshold must be finite and > 0, got {self.latency_threshold_ms}")
        if not (math.isfinite(self.staleness_threshold_ms) and self.staleness_threshold_ms >= 0):
            raise ValueError(f"staleness threshold must be finite and >= 0, got {self.staleness_threshold_ms}")

    def __str__(self) -> str:
        return f"(latency<={self.latency_threshold_ms}ms, staleness<={self.staleness_threshold_ms}ms)"


@dataclass(frozen=True)
class SLA:
    subslas: tuple[SubSLA, ...]

    def __post_init__(self) -> None:
        if not self.subslas:
            raise ValueError("an SLA needs at least one subSLA row")

    def __len__(self) -> int:
        return len(self.subslas)

    def __getitem__(self, index: int) -> SubSLA:
        return self.subslas[index]


def satisfies(subsla: SubSLA, l_ms: float, s_ms: float) -> bool:
    """True iff both observed values are within their thresholds (inclusive)."""
    if not (math.isfinite(l_ms) and math.isfinite(s_ms)) or l_ms < 0 or s_ms < 0:
        raise ValueError(f"observed values must be finite and non-negative, got ({l_ms}, {s_ms})")
    return l_ms <= subsla.latency_threshold_ms and s_ms <= subsla.staleness_threshold_ms


def m_statistic(outcomes: list[tuple[float, float]], subsla: SubSLA) -> float:
    """Percentage of (l_ms, s_ms) outcomes that satisfy the subSLA."""
    if not outcomes:
        raise ValueError("m_statistic needs at least one outcome")
    hits = sum(1 for l_ms, s_ms in outcomes if satisfies(subsla, l_ms, s_ms))
    return 100.0 * hits / len(outcomes)


def parse_subsla_line(line: str) -> SubSLA:
    parts = line.split()
    if len(parts) != 2:
        raise ValueError(f"expected 'latency_ms staleness_ms', got {line!r}")
    return SubSLA(float(parts[0]), float(parts[1]))


def parse_sla(path: str | Path) -> SLA:
    """Read an SLA file: one subSLA per line, `latency_ms staleness_ms`."""
    rows = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rows.append(parse_subsla_line(line))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    if not rows:
        raise ValueError(f"{path}: no subSLA rows found")
    return SLA(tuple(rows))
