"""Behavior controllers for the three robot kinds.

Scouts sweep their spiral share of the arena, open an excavation auction for
every site their scanner picks up, and keep scouting while those auctions
run.  Excavators win a site, claim it exclusively, and alternate digging one
mineral with waiting for a hauler to carry it off; each dug mineral triggers
exactly one transport allocation.  Haulers fetch minerals from waiting
excavators and empty their single-mineral bin at the plant.

Every cross-robot influence flows through the broadcast bus or through the
shared world during the owner's step, so a run is a single deterministic
thread of execution.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

from .auction import (
    NEG_INF,
    Auction,
    evaluate_self_utility,
    handle_ack,
    open_auction,
    record_bid,
    step_auction_timers,
    submit_bid,
)
from .bus import (
    Ack,
    Announcement,
    AuctionKey,
    Bid,
    Close,
    Envelope,
    WinnerDecl,
    auction_key,
)
from .pathing import PathCursor, make_path
from .spiral import SpiralPlan
from .world import (
    Point,
    ResourceSite,
    RobotKind,
    TaskType,
    WorldState,
    _segment_distance,
    claim_site,
    release_site,
    transfer_mineral_to_plant,
)

if TYPE_CHECKING:
    from .engine import SimContext

# A coalition-paired hauler parks this far from its parent's site, on the
# plant side, while waiting for the next mineral.
STANDBY_OFFSET = 2.0


class ScoutActivity(str, Enum):
    SEARCHING = "searching"
    DONE = "done"


class ExcavatorActivity(str, Enum):
    IDLE = "idle"
    TRAVELING = "traveling"
    DIGGING = "digging"
    WAITING_FOR_HAULER = "waiting_for_hauler"


class HaulerActivity(str, Enum):
    IDLE = "idle"
    STANDBY = "standby"
    TO_SITE = "to_site"
    LOADING = "loading"
    TO_PLANT = "to_plant"
    UNLOADING = "unloading"


Activity = ScoutActivity | ExcavatorActivity | HaulerActivity

_AVAILABLE = (ExcavatorActivity.IDLE, HaulerActivity.IDLE, HaulerActivity.STANDBY)


@dataclass
class RobotState:
    """Pose, activity and odometry of one robot."""

    name: str
    kind: RobotKind
    pose: Point
    activity: Activity
    odometry: float = 0.0
    carried_minerals: int = 0

    @property
    def busy(self) -> bool:
        """The availability rule behind the busy-sentinel bid: scouts never
        report busy, excavators are busy unless idle, haulers unless idle or
        standing by."""
        if self.kind is RobotKind.SCOUT:
            return False
        return self.activity not in _AVAILABLE


def scan_for_sites(scout_pose: Point, world: WorldState,
                   scan_radius: float) -> list[int]:
    """Undiscovered sites within scan range of the pose; marks them found."""
    found: list[int] = []
    for site in world.sites:
        if not site.discovered and site.location.distance_to(scout_pose) <= scan_radius:
            site.discovered = True
            found.append(site.site_id)
    return found


def scan_swept_segment(a: Point, b: Point, world: WorldState,
                       scan_radius: float) -> list[int]:
    """Scan the whole segment a scout swept this tick, not just its endpoint,
    so the covered swath has no sampling gaps at any speed."""
    found: list[int] = []
    for site in world.sites:
        if not site.discovered and _segment_distance(site.location, a, b) <= scan_radius:
            site.discovered = True
            found.append(site.site_id)
    return found


@dataclass
class AuctionView:
    """A bidder's receiver-side picture of someone else's open auction."""

    auctioneer: str
    task_type: TaskType
    task_location: Point
    first_tick: int
    rounds_seen: int = 1
    bid_round: int = 0  # last announcement round this robot answered
    last_bid: float | None = None

    @property
    def key(self) -> AuctionKey:
        return (self.auctioneer, self.task_location.as_pair())

    @property
    def order_key(self) -> tuple:
        return (self.first_tick, self.auctioneer, self.task_location.as_pair())


class RobotController:
    """Shared machinery: inbox handling, win resolution, bidding, timers."""

    bids_on: TaskType | None = None

    def __init__(self, state: RobotState, ctx: "SimContext"):
        self.state = state
        self.ctx = ctx
        self.views: dict[AuctionKey, AuctionView] = {}
        self.pending_wins: list[tuple[int, WinnerDecl]] = []
        self.book: dict[AuctionKey, Auction] = {}
        self.closed_auctions: list[Auction] = []

    # -- engine hooks --------------------------------------------------

    def step(self, tick: int) -> None:
        self._ingest(self.ctx.bus.drain_inbox(self.state.name, tick), tick)
        self._resolve_wins(tick)
        self._act(tick)
        self._place_bids(tick)

    def fire_auction_timers(self, tick: int) -> None:
        timing = self.ctx.config.timing
        for auction in list(self.book.values()):
            step_auction_timers(auction, tick, self.ctx.bus, timing.bid_window)

    def has_open_auctions(self) -> bool:
        return bool(self.book)

    # -- message handling ----------------------------------------------

    def _ingest(self, envelopes: list[Envelope], tick: int) -> None:
        for env in envelopes:
            msg = env.payload
            if isinstance(msg, Announcement):
                if self.bids_on is msg.task_type:
                    view = self.views.get(auction_key(msg))
                    if view is None:
                        self.views[auction_key(msg)] = AuctionView(
                            auctioneer=msg.auctioneer,
                            task_type=msg.task_type,
                            task_location=msg.task_location,
                            first_tick=env.publish_tick,
                        )
                    else:
                        view.rounds_seen += 1
            elif isinstance(msg, Bid):
                auction = self.book.get(auction_key(msg))
                if auction is not None:  # everyone else ignores the bid
                    record_bid(auction, msg)
            elif isinstance(msg, WinnerDecl):
                if msg.winner == self.state.name:
                    self.pending_wins.append((tick, msg))
            elif isinstance(msg, Ack):
                auction = self.book.get(auction_key(msg))
                if auction is not None:
                    handle_ack(auction, msg, tick, self.ctx.bus)
                    if not auction.is_open:
                        del self.book[auction.key]
                        self.closed_auctions.append(auction)
            elif isinstance(msg, Close):
                self.views.pop(auction_key(msg), None)

    def _resolve_wins(self, tick: int) -> None:
        window = self.ctx.config.timing.win_resolution_window
        ready = [w for t0, w in self.pending_wins if tick >= t0 + window - 1]
        if not ready:
            return
        self.pending_wins = [(t0, w) for t0, w in self.pending_wins
                             if tick < t0 + window - 1]
        accept, declines = self.ctx.policy.resolve_wins(
            self.state, ready, self.ctx.planner)
        if accept is not None and not self._accept_win(accept, tick):
            declines = declines + [accept]
            accept = None
        if accept is not None:
            self.ctx.bus.publish(Ack(accept.auctioneer, self.state.name,
                                     accept.task_location, accepted=True), tick)
        for declined in declines:
            self.ctx.bus.publish(Ack(declined.auctioneer, self.state.name,
                                     declined.task_location, accepted=False), tick)

    def _accept_win(self, win: WinnerDecl, tick: int) -> bool:
        raise NotImplementedError(f"{self.state.kind} does not take tasks")

    def _place_bids(self, tick: int) -> None:
        """Bid once per announcement round in the auctions the policy picks.

        Busy-but-capable robots answer too, with the -inf sentinel.  A robot
        whose standing bid is the sentinel corrects it the moment it goes
        idle: it is honestly available now, and waiting for the next
        re-announcement round would misrepresent that.
        """
        if self.bids_on is None or not self.views:
            return
        ordered = sorted(self.views.values(), key=lambda v: v.order_key)
        busy = self.state.busy
        for view in self.ctx.policy.bid_filter(self.state, ordered):
            fresh_round = view.bid_round < view.rounds_seen
            now_available = view.last_bid == NEG_INF and not busy
            if fresh_round or now_available:
                view.bid_round = view.rounds_seen
                utility = evaluate_self_utility(self.state, view.task_location,
                                                self.ctx.planner)
                view.last_bid = utility
                submit_bid(self.state, view.auctioneer, view.task_type,
                           view.task_location, utility, tick, self.ctx.bus)

    def _act(self, tick: int) -> None:
        raise NotImplementedError

    # -- movement helper -------------------------------------------------

    def _advance(self, cursor: PathCursor) -> bool:
        """Move along the cursor at configured speed; True when arrived."""
        pose, moved, _ = cursor.step(self.ctx.config.timing.robot_speed)
        self.state.pose = pose
        self.state.odometry += moved
        return cursor.arrived


class ScoutController(RobotController):
    """Sweeps a spiral plan, scanning continuously, auctioning every find."""

    bids_on = None

    def __init__(self, state: RobotState, ctx: "SimContext", plan: SpiralPlan):
        super().__init__(state, ctx)
        self.plan = plan
        self.cursor = PathCursor(make_path([state.pose] + plan.waypoints()))
        self._scanned_spawn = False

    def _act(self, tick: int) -> None:
        if self.state.activity is ScoutActivity.DONE:
            return
        world = self.ctx.world
        radius = self.ctx.config.scan_radius
        if not self._scanned_spawn:
            self._scanned_spawn = True
            self._handle_finds(scan_for_sites(self.state.pose, world, radius), tick)
        pose, moved, swept = self.cursor.step(self.ctx.config.timing.robot_speed)
        self.state.pose = pose
        self.state.odometry += moved
        for a, b in swept:
            self._handle_finds(scan_swept_segment(a, b, world, radius), tick)
        if self.cursor.arrived:
            self.state.activity = ScoutActivity.DONE

    def _handle_finds(self, site_ids: list[int], tick: int) -> None:
        for site_id in site_ids:
            site = self.ctx.world.site_by_id(site_id)
            self.ctx.log.append({
                "type": "discovery", "tick": tick, "site": site_id,
                "scout": self.state.name,
                "loc": [site.location.x, site.location.y],
            })
            open_auction(self.book, self.state.name, TaskType.EXCAVATE,
                         site.location, tick, self.ctx.bus)


class ExcavatorController(RobotController):
    """Claims one site at a time; digs minerals and hands each to a hauler."""

    bids_on = TaskType.EXCAVATE

    def __init__(self, state: RobotState, ctx: "SimContext"):
        super().__init__(state, ctx)
        self.site: ResourceSite | None = None
        self.cursor: PathCursor | None = None
        self.bucket: str | None = None  # mineral id sitting in the bucket
        self._dig_left = 0
        self._travel_estimate = 0.0
        self._travel_start_odometry = 0.0

    def _accept_win(self, win: WinnerDecl, tick: int) -> bool:
        site = self.ctx.site_at(win.task_location)
        if site.claimed_by is not None:
            return False  # someone beat us to the claim: decline instead
        claim_site(self.ctx.world, site.site_id, self.state.name)
        self.ctx.log.append({"type": "claim", "tick": tick,
                             "site": site.site_id, "excavator": self.state.name})
        self.site = site
        path = self.ctx.planner(self.state.pose, site.location)
        self.cursor = PathCursor(path)
        self._travel_estimate = path.length
        self._travel_start_odometry = self.state.odometry
        self.state.activity = ExcavatorActivity.TRAVELING
        return True

    def _act(self, tick: int) -> None:
        activity = self.state.activity
        if activity is ExcavatorActivity.TRAVELING:
            if self._advance(self.cursor):
                traveled = self.state.odometry - self._travel_start_odometry
                # obstacle-free arena: executed cost equals the bid estimate
                assert abs(traveled - self._travel_estimate) < 1e-6
                if self.site.minerals_remaining == 0:
                    self._release(tick)
                else:
                    self.state.activity = ExcavatorActivity.DIGGING
                    self._dig_left = self.ctx.config.timing.dig_duration
        elif activity is ExcavatorActivity.DIGGING:
            self._dig_left -= 1
            if self._dig_left == 0:
                site = self.site
                site.minerals_remaining -= 1
                ordinal = site.minerals_initial - site.minerals_remaining
                self.bucket = f"m{site.site_id}_{ordinal}"
                self.ctx.log.append({"type": "dig", "tick": tick,
                                     "mineral": self.bucket, "site": site.site_id,
                                     "excavator": self.state.name})
                self.state.activity = ExcavatorActivity.WAITING_FOR_HAULER
                self._dispatch_transport(tick)
        elif activity is ExcavatorActivity.WAITING_FOR_HAULER:
            if self.bucket is None:  # a hauler emptied the bucket last tick
                if self.site.minerals_remaining > 0:
                    self.state.activity = ExcavatorActivity.DIGGING
                    self._dig_left = self.ctx.config.timing.dig_duration
                else:
                    self._release(tick)

    def _dispatch_transport(self, tick: int) -> None:
        """Allocate transport for the bucket: directly to an available paired
        hauler under coalition, otherwise by auction."""
        paired = self.ctx.policy.paired_hauler(self.state.name)
        if paired is not None:
            hauler = self.ctx.controllers[paired]
            if hauler.state.activity in (HaulerActivity.IDLE, HaulerActivity.STANDBY):
                hauler.assign_transport(self.state.name, self.site.location)
                return
        open_auction(self.book, self.state.name, TaskType.TRANSPORT,
                     self.site.location, tick, self.ctx.bus)

    def take_bucket(self) -> str:
        """Called by the loading hauler; empties the bucket into its bin."""
        assert self.state.activity is ExcavatorActivity.WAITING_FOR_HAULER
        assert self.bucket is not None, "no mineral waiting at this excavator"
        mineral, self.bucket = self.bucket, None
        return mineral

    def _release(self, tick: int) -> None:
        release_site(self.ctx.world, self.site.site_id, self.state.name)
        self.ctx.log.append({"type": "release", "tick": tick,
                             "site": self.site.site_id,
                             "excavator": self.state.name})
        self.site = None
        self.cursor = None
        self.state.activity = ExcavatorActivity.IDLE


class HaulerController(RobotController):
    """Carries one mineral at a time from a waiting excavator to the plant."""

    bids_on = TaskType.TRANSPORT

    def __init__(self, state: RobotState, ctx: "SimContext"):
        super().__init__(state, ctx)
        self.parent: str | None = ctx.policy.parent_of(state.name)
        if self.parent is not None:
            state.activity = HaulerActivity.STANDBY
        self.task: tuple[str, Point] | None = None  # (excavator, site location)
        self.carrying: str | None = None
        self.cursor: PathCursor | None = None
        self._standby_cursor: PathCursor | None = None
        self._load_left = 0
        self._unload_left = 0
        self._travel_estimate = 0.0
        self._travel_start_odometry = 0.0

    def _accept_win(self, win: WinnerDecl, tick: int) -> bool:
        self._begin_transport(win.auctioneer, win.task_location)
        return True

    def assign_transport(self, excavator: str, location: Point) -> None:
        """Coalition direct dispatch: no auction, no protocol messages."""
        assert self.state.activity in (HaulerActivity.IDLE, HaulerActivity.STANDBY)
        self._begin_transport(excavator, location)

    def _begin_transport(self, excavator: str, location: Point) -> None:
        self.task = (excavator, location)
        self._standby_cursor = None
        self._set_course(location)
        self.state.activity = HaulerActivity.TO_SITE

    def _set_course(self, goal: Point) -> None:
        path = self.ctx.planner(self.state.pose, goal)
        self.cursor = PathCursor(path)
        self._travel_estimate = path.length
        self._travel_start_odometry = self.state.odometry

    def _act(self, tick: int) -> None:
        activity = self.state.activity
        if activity is HaulerActivity.TO_SITE:
            if self._advance(self.cursor):
                traveled = self.state.odometry - self._travel_start_odometry
                assert abs(traveled - self._travel_estimate) < 1e-6
                self.state.activity = HaulerActivity.LOADING
                self._load_left = self.ctx.config.timing.load_duration
        elif activity is HaulerActivity.LOADING:
            self._load_left -= 1
            if self._load_left == 0:
                excavator = self.ctx.controllers[self.task[0]]
                site = excavator.site
                self.carrying = excavator.take_bucket()
                self.state.carried_minerals = 1
                self.ctx.log.append({"type": "load", "tick": tick,
                                     "mineral": self.carrying,
                                     "site": site.site_id,
                                     "excavator": self.task[0],
                                     "hauler": self.state.name})
                self._set_course(self.ctx.world.plant_location)
                self.state.activity = HaulerActivity.TO_PLANT
        elif activity is HaulerActivity.TO_PLANT:
            if self._advance(self.cursor):
                traveled = self.state.odometry - self._travel_start_odometry
                assert abs(traveled - self._travel_estimate) < 1e-6
                self.state.activity = HaulerActivity.UNLOADING
                self._unload_left = self.ctx.config.timing.unload_duration
        elif activity is HaulerActivity.UNLOADING:
            self._unload_left -= 1
            if self._unload_left == 0:
                transfer_mineral_to_plant(self.ctx.world, self.state)
                self.ctx.log.append({"type": "unload", "tick": tick,
                                     "mineral": self.carrying,
                                     "hauler": self.state.name})
                self.carrying = None
                self.task = None
                self.state.activity = (HaulerActivity.STANDBY if self.parent
                                       else HaulerActivity.IDLE)
        elif activity is HaulerActivity.STANDBY:
            self._standby_act()

    def _standby_act(self) -> None:
        """Shadow the parent excavator: wait two meters plant-side of its
        current site; hold position while the parent has no claim."""
        parent = self.ctx.controllers[self.parent]
        site = parent.site
        if site is None:
            self._standby_cursor = None
            return
        target = standby_point(site.location, self.ctx.world.plant_location)
        if self.state.pose == target:
            return
        if (self._standby_cursor is None
                or self._standby_cursor.path.goal != target
                or self._standby_cursor.arrived):
            self._standby_cursor = PathCursor(
                self.ctx.planner(self.state.pose, target))
        self._advance(self._standby_cursor)


def standby_point(site: Point, plant: Point) -> Point:
    """The parking spot for a paired hauler: offset from the site toward
    the plant."""
    d = site.distance_to(plant)
    if d <= STANDBY_OFFSET:
        return plant
    t = STANDBY_OFFSET / d
    return Point(site.x + (plant.x - site.x) * t, site.y + (plant.y - site.y) * t)
