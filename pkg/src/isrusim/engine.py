"""Deterministic tick loop.

Each tick runs the same fixed phases: agents step in kind-then-name order
(draining the previous tick's broadcasts, acting, publishing), then every
auctioneer fires its auction timers, then termination is evaluated.  The
only randomness in a run is the scenario generator's seed, so equal configs
produce byte-identical event logs.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

from .agents import (
    ExcavatorController,
    HaulerController,
    RobotController,
    RobotState,
    ScoutActivity,
    ExcavatorActivity,
    HaulerActivity,
    ScoutController,
)
from .bus import BroadcastBus
from .events import EventLog
from .pathing import PathPlanner, straight_line_planner
from .policy import Policy, make_policy
from .spiral import build_spiral
from .world import (
    Point,
    ResourceSite,
    RobotKind,
    ScenarioConfig,
    WorldState,
    generate_scenario,
)

if TYPE_CHECKING:
    from .metrics import MetricsReport

# Robots start evenly spaced on a small circle around the plant.
START_CIRCLE_RADIUS = 5.0


class RunStatus(str, Enum):
    RUNNING = "running"
    COMPLETED = "completed"
    STALLED = "stalled"


@dataclass
class SimContext:
    """Everything an agent may touch during its own step."""

    config: ScenarioConfig
    world: WorldState
    bus: BroadcastBus
    log: EventLog
    policy: Policy
    planner: PathPlanner
    robots: dict[str, RobotState] = field(default_factory=dict)
    controllers: dict[str, RobotController] = field(default_factory=dict)
    _site_by_location: dict[tuple[float, float], ResourceSite] = field(
        default_factory=dict)

    def site_at(self, location: Point) -> ResourceSite:
        site = self._site_by_location.get(location.as_pair())
        if site is None:
            raise ValueError(f"no resource site at {location}")
        return site


def _start_poses(config: ScenarioConfig, plant: Point) -> list[Point]:
    names = config.robot_names()
    n = len(names)
    poses = []
    for k in range(n):
        angle = 2.0 * math.pi * k / n
        poses.append(Point(plant.x + START_CIRCLE_RADIUS * math.cos(angle),
                           plant.y + START_CIRCLE_RADIUS * math.sin(angle)))
    return poses


class Simulation:
    """One run: world, fleet, bus and event log, advanced tick by tick."""

    def __init__(self, config: ScenarioConfig, snapshots: bool = False):
        self.config = config
        self.snapshots = snapshots
        self.status = RunStatus.RUNNING
        self.tick = 0
        self.completed_tick: int | None = None
        self._finished = False

        world = generate_scenario(config)
        log = EventLog()
        bus = BroadcastBus(log)
        names = config.robot_names()
        excavators = [n for n, k in names if k is RobotKind.EXCAVATOR]
        haulers = [n for n, k in names if k is RobotKind.HAULER]
        policy = make_policy(config.policy, excavators, haulers)
        self.ctx = SimContext(
            config=config, world=world, bus=bus, log=log, policy=policy,
            planner=straight_line_planner(config.arena_side),
        )
        self.ctx._site_by_location = {s.location.as_pair(): s for s in world.sites}

        plans = build_spiral(config.arena_side, config.cell_side, config.n_scouts)
        poses = _start_poses(config, world.plant_location)
        scout_index = 0
        for (name, kind), pose in zip(names, poses):
            if kind is RobotKind.SCOUT:
                state = RobotState(name, kind, pose, ScoutActivity.SEARCHING)
                controller: RobotController = ScoutController(
                    state, self.ctx, plans[scout_index])
                scout_index += 1
            elif kind is RobotKind.EXCAVATOR:
                state = RobotState(name, kind, pose, ExcavatorActivity.IDLE)
                controller = ExcavatorController(state, self.ctx)
            else:
                state = RobotState(name, kind, pose, HaulerActivity.IDLE)
                controller = HaulerController(state, self.ctx)
            self.ctx.robots[name] = state
            self.ctx.controllers[name] = controller

        # scouts, then excavators, then haulers; name order within each kind
        self._step_order = [
            self.ctx.controllers[n]
            for kind in (RobotKind.SCOUT, RobotKind.EXCAVATOR, RobotKind.HAULER)
            for n in sorted(n for n, k in names if k is kind)
        ]

        log.append({
            "type": "run_start",
            "policy": config.policy,
            "seed": config.seed,
            "arena_side": config.arena_side,
            "n_sites": config.n_sites,
            "n_minerals": config.n_minerals,
            "tick_cap": config.tick_cap,
            "robots": [[n, k.value] for n, k in names],
            "coalition_pairs": [list(p) for p in policy.pairs],
        })

    # -- one tick ----------------------------------------------------------

    def step(self) -> None:
        """Advance one tick: deliver, step agents, fire timers, check goal."""
        if self.status is not RunStatus.RUNNING:
            raise RuntimeError("cannot step a finished run")
        tick = self.tick
        self.ctx.world.tick = tick
        for controller in self._step_order:  # drains tick-1 broadcasts
            controller.step(tick)
        for controller in self._step_order:
            controller.fire_auction_timers(tick)
        self._assert_mineral_conservation()
        if self.snapshots:
            self._emit_snapshots(tick)
        if self._goal_reached():
            self.status = RunStatus.COMPLETED
            self.completed_tick = tick
        self.tick = tick + 1

    def _goal_reached(self) -> bool:
        world = self.ctx.world
        if any(not site.discovered for site in world.sites):
            return False
        if world.minerals_at_plant != self.config.n_minerals:
            return False
        return not any(c.has_open_auctions() for c in self._step_order)

    def _assert_mineral_conservation(self) -> None:
        world = self.ctx.world
        buffered = sum(1 for c in self._step_order
                       if isinstance(c, ExcavatorController) and c.bucket is not None)
        carried = sum(r.carried_minerals for r in self.ctx.robots.values())
        total = (world.minerals_at_plant + world.minerals_remaining_on_sites()
                 + buffered + carried)
        assert total == world.minerals_total, (
            f"mineral conservation broken at tick {self.tick}: {total} != "
            f"{world.minerals_total}")

    def _emit_snapshots(self, tick: int) -> None:
        for controller in self._step_order:
            s = controller.state
            self.ctx.log.append({
                "type": "snapshot", "tick": tick, "name": s.name,
                "loc": [s.pose.x, s.pose.y], "activity": s.activity.value,
                "odometry": s.odometry, "carried": s.carried_minerals,
            })

    # -- whole runs ----------------------------------------------------------

    def run(self) -> RunStatus:
        """Step until the mission completes or the tick cap is hit."""
        if self._finished:
            return self.status
        while self.status is RunStatus.RUNNING and self.tick < self.config.tick_cap:
            self.step()
        if self.status is RunStatus.RUNNING:
            self.status = RunStatus.STALLED
        self._finished = True
        world = self.ctx.world
        self.ctx.log.append({
            "type": "run_end",
            "tick": self.completed_tick if self.completed_tick is not None else self.tick,
            "status": self.status.value,
            "minerals_at_plant": world.minerals_at_plant,
            "sites_discovered": sum(1 for s in world.sites if s.discovered),
            "odometry": {s.name: s.odometry for s in
                         (c.state for c in self._step_order)},
        })
        return self.status

    def state_digest(self) -> str:
        """Process-independent hash of the full simulation state."""
        world = self.ctx.world
        state = {
            "tick": self.tick,
            "status": self.status.value,
            "plant": world.minerals_at_plant,
            "sites": [[s.site_id, s.location.x, s.location.y, s.minerals_remaining,
                       s.discovered, s.claimed_by or ""] for s in world.sites],
            "robots": [[r.name, r.activity.value, r.pose.x, r.pose.y,
                        r.odometry, r.carried_minerals]
                       for r in (c.state for c in self._step_order)],
            "auctions": [[a.auctioneer, list(a.key[1]), a.state.value,
                          a.round_opened_tick, a.rounds,
                          sorted(a.bids.items()), sorted(a.late_bids.items()),
                          a.offered_to, a.winner or ""]
                         for c in self._step_order for a in c.book.values()],
            "messages": self.ctx.bus.messages_published,
        }
        blob = json.dumps(state, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class RunResult:
    """Outcome of run_to_completion: status, metrics and the event log."""

    status: RunStatus
    metrics: "MetricsReport"
    log: EventLog
    simulation: Simulation


def run_to_completion(config: ScenarioConfig, snapshots: bool = False) -> RunResult:
    """Run a scenario to Completed or Stalled and collect its metrics.

    A stalled run is a distinguished outcome, not an error; its partial
    metrics are still collected.
    """
    from .metrics import collect_metrics

    sim = Simulation(config, snapshots=snapshots)
    status = sim.run()
    report = collect_metrics(sim.ctx.log.records)
    return RunResult(status=status, metrics=report, log=sim.ctx.log, simulation=sim)
