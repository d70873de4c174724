"""Deterministic simulator of an auction-coordinated lunar mining fleet.

Scouts sweep the arena in outward spirals and auction each found resource
site to the excavators; excavators dig minerals one by one and auction (or,
under the coalition policy, hand directly) each mineral to a hauler, which
delivers it to the central processing plant.  Three bidding policies are
built in and compared by a seeded sweep harness.
"""

__version__ = "0.1.0"

from .agents import (
    AuctionView,
    ExcavatorActivity,
    HaulerActivity,
    RobotState,
    ScoutActivity,
    scan_for_sites,
)
from .auction import (
    Auction,
    AuctionPhase,
    evaluate_self_utility,
    handle_ack,
    open_auction,
    select_winner,
    submit_bid,
)
from .bus import (
    Ack,
    Announcement,
    Bid,
    BroadcastBus,
    Close,
    Envelope,
    Message,
    WinnerDecl,
)
from .engine import RunResult, RunStatus, SimContext, Simulation, run_to_completion
from .events import EventLog, LogParseError
from .metrics import (
    AuctionSpan,
    MetricsError,
    MetricsReport,
    build_summary,
    collect_metrics,
    sweep,
)
from .pathing import (
    PathCursor,
    PathEstimate,
    advance_along_path,
    estimate_path,
    straight_line_planner,
)
from .policy import Policy, PolicyName, make_policy
from .spiral import SpiralPlan, build_spiral, ring_index
from .verify import Violation, derive_auction_histories, verify_records
from .world import (
    Point,
    ResourceSite,
    RobotKind,
    ScenarioConfig,
    ScenarioGenerationError,
    TaskType,
    TimingConfig,
    WorldState,
    generate_scenario,
    transfer_mineral_to_plant,
)

__all__ = [
    "__version__",
    "Ack", "Announcement", "Auction", "AuctionPhase", "AuctionSpan",
    "AuctionView", "Bid", "BroadcastBus", "Close", "Envelope", "EventLog",
    "ExcavatorActivity", "HaulerActivity", "LogParseError", "Message",
    "MetricsError", "MetricsReport", "PathCursor", "PathEstimate", "Point",
    "Policy", "PolicyName", "ResourceSite", "RobotKind", "RobotState",
    "RunResult", "RunStatus", "ScenarioConfig", "ScenarioGenerationError",
    "ScoutActivity", "SimContext", "Simulation", "SpiralPlan", "TaskType",
    "TimingConfig", "Violation", "WinnerDecl", "WorldState",
    "advance_along_path", "build_spiral", "build_summary", "collect_metrics",
    "derive_auction_histories", "estimate_path", "evaluate_self_utility",
    "generate_scenario", "handle_ack", "make_policy", "open_auction",
    "ring_index", "run_to_completion", "scan_for_sites", "select_winner",
    "straight_line_planner", "submit_bid", "sweep", "transfer_mineral_to_plant",
    "verify_records",
]
