"""gearrsim: slot-based simulator and policy library for goal-oriented /
data-oriented spectrum sharing with drift-plus-penalty orchestration."""

__version__ = "0.1.0"

from .orchestrator import (
    DynamicPolicy,
    PolicyConfig,
    SlotDecision,
    StaticPolicy,
    admit_arrivals,
    decide_slot,
    min_feasible_F,
    slot_objective,
    static_policy,
)
from .phy import (
    ChannelDraw,
    LinkMetrics,
    PhyConfig,
    ber_mqam,
    compute_delay,
    compute_link_metrics,
    draw_channel,
    qfunc,
    rate_do,
)
from .queueing import (
    QueueState,
    RunningAverages,
    fifo_sojourn_delay,
    queueing_delay,
    update_buffer,
    update_virtual_Y,
    update_virtual_Z,
)
from .reliability import (
    ModelCatalog,
    ProfileError,
    ReliabilityProfile,
    accuracy_at,
    default_synthetic_catalog,
    load_catalog,
    save_catalog,
    synthetic_catalog,
)
from .sim import (
    RunSummary,
    SimConfig,
    TraceRecord,
    max_feasible_effectiveness,
    run,
    static_scan,
    sweep_gearr,
    sweep_tradeoff,
)

__all__ = [
    "ChannelDraw", "DynamicPolicy", "LinkMetrics", "ModelCatalog",
    "PhyConfig", "PolicyConfig", "ProfileError", "QueueState",
    "ReliabilityProfile", "RunningAverages", "RunSummary", "SimConfig",
    "SlotDecision", "StaticPolicy", "TraceRecord",
    "accuracy_at", "admit_arrivals", "ber_mqam", "compute_delay",
    "compute_link_metrics", "decide_slot", "default_synthetic_catalog",
    "draw_channel", "fifo_sojourn_delay", "load_catalog",
    "max_feasible_effectiveness", "min_feasible_F", "qfunc", "queueing_delay",
    "rate_do", "run", "save_catalog", "slot_objective", "static_policy",
    "static_scan", "sweep_gearr", "sweep_tradeoff", "synthetic_catalog",
    "update_buffer", "update_virtual_Y", "update_virtual_Z",
]
