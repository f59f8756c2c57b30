"""Client-centric staleness over operation traces.

A single-key trace is atomic when its operations admit a total order that
respects real-time precedence (A finishes before B starts implies A orders
before B) in which every read returns the latest preceding write. It is
gamma-atomic when it becomes atomic after widening every interval by gamma/2
on both ends. The minimal such gamma, per key, is the staleness measure; a
trace-level score is the nearest-rank percentile over per-key values.

Verification exploits unique write tokens: group operations into one cluster
per token (the write plus the reads returning it). A valid order exists iff
(a) no read widened-precedes its own cluster's write and (b) the forced
cluster precedence graph is acyclic, where cluster U must precede cluster V
whenever some op of U widened-precedes some op of V, and the initial-token
cluster must precede everything. Widened precedence of a before b means
start(b) - finish(a) > gamma, so raising gamma only removes constraints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .simulator import INITIAL_TOKEN, OperationRecord

BRUTE_FORCE_MAX_OPS = 8


class MalformedTraceError(ValueError):
    """Trace violates the unique-write-token or known-token contract."""


@dataclass(frozen=True)
class IntervalOp:
    start: int
    finish: int
    kind: str  # "read" | "write"
    value: str
    key: str

    def __post_init__(self) -> None:
        if self.start >= self.finish:
            raise ValueError(f"start must precede finish, got [{self.start}, {self.finish}]")
        if self.kind not in ("read", "write"):
            raise ValueError(f"kind must be 'read' or 'write', got {self.kind!r}")


@dataclass(frozen=True)
class StalenessReport:
    per_key_gamma_us: dict[str, int]
    percentile: float
    score_us: int

    @property
    def score_ms(self) -> float:
        return self.score_us / 1000.0


def intervals_from_trace(trace: Iterable[OperationRecord]) -> list[IntervalOp]:
    return [
        IntervalOp(rec.start_us, rec.finish_us, rec.kind, rec.value, rec.key) for rec in trace
    ]


def _validate_single_key(ops: Sequence[IntervalOp]) -> None:
    keys = {op.key for op in ops}
    if len(keys) > 1:
        raise ValueError(f"operations span multiple keys: {sorted(keys)}")
    write_tokens: set[str] = set()
    for op in ops:
        if op.kind != "write":
            continue
        if op.value == INITIAL_TOKEN:
            raise MalformedTraceError(f"write uses the reserved initial token {INITIAL_TOKEN!r}")
        if op.value in write_tokens:
            raise MalformedTraceError(f"duplicate write token {op.value!r}")
        write_tokens.add(op.value)
    for op in ops:
        if op.kind == "read" and op.value != INITIAL_TOKEN and op.value not in write_tokens:
            raise MalformedTraceError(f"read returned unknown token {op.value!r}")


@dataclass
class _Cluster:
    write_start: int | None  # None for the initial-token cluster
    min_finish: int  # over all member ops
    max_start: int  # over all member ops
    min_read_finish: int | None  # over member reads


def _build_clusters(ops: Sequence[IntervalOp]) -> dict[str, _Cluster]:
    clusters: dict[str, _Cluster] = {}
    for op in ops:
        cluster = clusters.get(op.value)
        if cluster is None:
            cluster = _Cluster(None, op.finish, op.start, None)
            clusters[op.value] = cluster
        cluster.min_finish = min(cluster.min_finish, op.finish)
        cluster.max_start = max(cluster.max_start, op.start)
        if op.kind == "write":
            cluster.write_start = op.start
        else:
            if cluster.min_read_finish is None or op.finish < cluster.min_read_finish:
                cluster.min_read_finish = op.finish
    return clusters


def _acyclic(adjacency: list[list[int]]) -> bool:
    indegree = [0] * len(adjacency)
    for targets in adjacency:
        for v in targets:
            indegree[v] += 1
    stack = [u for u, deg in enumerate(indegree) if deg == 0]
    seen = 0
    while stack:
        u = stack.pop()
        seen += 1
        for v in adjacency[u]:
            indegree[v] -= 1
            if indegree[v] == 0:
                stack.append(v)
    return seen == len(adjacency)


def check_atomic(ops: Sequence[IntervalOp], gamma: int) -> bool:
    """True iff the single-key trace is atomic after widening by gamma/2."""
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    if not ops:
        return True
    _validate_single_key(ops)
    clusters = _build_clusters(ops)

    for cluster in clusters.values():
        if cluster.write_start is not None and cluster.min_read_finish is not None:
            if cluster.write_start - cluster.min_read_finish > gamma:
                return False

    names = list(clusters)
    index = {name: i for i, name in enumerate(names)}
    adjacency: list[list[int]] = [[] for _ in names]
    for u_name, u in clusters.items():
        for v_name, v in clusters.items():
            if u_name == v_name:
                continue
            if v.max_start - u.min_finish > gamma:
                adjacency[index[u_name]].append(index[v_name])
    if INITIAL_TOKEN in index:
        # Initial-token reads precede every cluster; incoming edges then cycle.
        init = index[INITIAL_TOKEN]
        adjacency[init] = [v for v in range(len(names)) if v != init]
    return _acyclic(adjacency)


def _cluster_candidates(ops: Sequence[IntervalOp]) -> list[int]:
    clusters = _build_clusters(ops)
    values = {0}
    for cluster in clusters.values():
        if cluster.write_start is not None and cluster.min_read_finish is not None:
            values.add(cluster.write_start - cluster.min_read_finish)
    for u_name, u in clusters.items():
        for v_name, v in clusters.items():
            if u_name != v_name:
                values.add(v.max_start - u.min_finish)
    return sorted(v for v in values if v >= 0)


def per_key_gamma(ops: Sequence[IntervalOp]) -> int:
    """Minimal gamma (microseconds) making the single-key trace gamma-atomic."""
    if not ops:
        return 0
    _validate_single_key(ops)
    candidates = _cluster_candidates(ops)
    lo, hi = 0, len(candidates) - 1
    if check_atomic(ops, candidates[lo]):
        return candidates[lo]
    # check_atomic is monotone in gamma, so bisect for the first passing value.
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if check_atomic(ops, candidates[mid]):
            hi = mid
        else:
            lo = mid
    return candidates[hi]


def gamma_score(trace: Sequence[IntervalOp], percentile: float = 95.0) -> StalenessReport:
    """Per-key minimal gamma plus its nearest-rank percentile over keys."""
    if not trace:
        raise ValueError("cannot score an empty trace")
    if not 0.0 < percentile <= 100.0:
        raise ValueError(f"percentile must be in (0, 100], got {percentile}")
    by_key: dict[str, list[IntervalOp]] = {}
    for op in trace:
        by_key.setdefault(op.key, []).append(op)
    per_key = {key: per_key_gamma(ops) for key, ops in by_key.items()}
    ranked = sorted(per_key.values())
    rank = max(1, math.ceil(len(ranked) * percentile / 100.0 - 1e-9))
    return StalenessReport(per_key, percentile, ranked[rank - 1])


def brute_force_min_gamma(ops: Sequence[IntervalOp]) -> int:
    """Test oracle: minimal gamma by exhaustive search over total orders.

    Tries every candidate shift in ascending order and, at each, every
    real-time-consistent total order (backtracking over permutations),
    replaying register semantics. Rejects traces above BRUTE_FORCE_MAX_OPS.
    """
    if len(ops) > BRUTE_FORCE_MAX_OPS:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_MAX_OPS} ops, got {len(ops)}")
    if not ops:
        return 0
    _validate_single_key(ops)
    candidates = sorted(
        {0}
        | {b.start - a.finish for a in ops for b in ops if a is not b and b.start - a.finish > 0}
    )
    for gamma in candidates:
        if _orderable(list(ops), gamma):
            return gamma
    raise AssertionError("unreachable: every trace is atomic at the largest candidate")


def _orderable(ops: list[IntervalOp], gamma: int) -> bool:
    def precedes(a: IntervalOp, b: IntervalOp) -> bool:
        return b.start - a.finish > gamma

    def extend(remaining: list[IntervalOp], register: str) -> bool:
        if not remaining:
            return True
        for i, op in enumerate(remaining):
            if any(precedes(other, op) for j, other in enumerate(remaining) if j != i):
                continue
            if op.kind == "read":
                if op.value != register:
                    continue
                if extend(remaining[:i] + remaining[i + 1 :], register):
                    return True
            else:
                if extend(remaining[:i] + remaining[i + 1 :], op.value):
                    return True
        return False

    return extend(ops, INITIAL_TOKEN)
