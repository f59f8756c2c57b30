"""quorumtune: SLA-aware consistency tuning over a simulated quorum store."""

from .levels import ALL_LEVELS, ConsistencyLevel, ReadLevel, WriteLevel, required_acks
from .simulator import (
    ClusterConfig,
    ClusterState,
    LatencyModel,
    OperationRecord,
    execute,
    load_cluster_config,
    read_trace,
    run_window,
    write_trace,
)
from .sla import SLA, SubSLA, m_statistic, parse_sla, satisfies
from .staleness import (
    IntervalOp,
    StalenessReport,
    brute_force_min_gamma,
    check_atomic,
    gamma_score,
    intervals_from_trace,
    per_key_gamma,
)
from .dataset import TrainingRow, load_dataset, observe, write_dataset
from .workload import WorkloadSpec, WorkloadOp, generate, load_workload_spec, sweep_read_proportion

__version__ = "0.1.0"
