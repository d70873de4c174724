"""Mining arena model: geometry, resource sites, scenario configuration.

The arena is a flat square with the processing plant at its center and a
number of resource sites scattered around it.  Each site holds an integer
number of mineral units; one mineral unit is exactly one hauler load.
Scenario generation is a pure function of the configuration (seed included),
which is what makes whole simulation runs replayable bit for bit.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Mapping


class RobotKind(str, Enum):
    SCOUT = "scout"
    EXCAVATOR = "excavator"
    HAULER = "hauler"


class TaskType(str, Enum):
    EXCAVATE = "excavate"
    TRANSPORT = "transport"


POLICY_NAMES = ("fcfs", "coalition", "nearest")

# Sites are kept this many scan radii away from the plant so no site is
# discovered before the scouts actually move.
PLANT_CLEARANCE_FACTOR = 2.0
# Total placement attempts before a configuration is declared over-dense.
MAX_PLACEMENT_ATTEMPTS = 10_000


class ScenarioGenerationError(ValueError):
    """Raised when sites cannot be placed under the separation rules."""


@dataclass(frozen=True)
class Point:
    """A position in the arena, in simulation meters."""

    x: float
    y: float

    def distance_to(self, other: Point) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def as_pair(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass
class ResourceSite:
    """A mineral deposit. At most one excavator may hold a claim on it."""

    site_id: int
    location: Point
    minerals_initial: int
    minerals_remaining: int
    discovered: bool = False
    claimed_by: str | None = None

    def __post_init__(self) -> None:
        if self.minerals_initial < 1:
            raise ValueError("site must start with at least one mineral")
        if not 0 <= self.minerals_remaining <= self.minerals_initial:
            raise ValueError("minerals_remaining out of range")


@dataclass(frozen=True)
class TimingConfig:
    """Duration constants, all expressed in ticks (speed in meters/tick).

    bid_window must be at least 2: the broadcast bus has a one-tick delivery
    latency in each direction, so a shorter window closes before any bid can
    physically arrive.
    """

    robot_speed: float = 1.0
    dig_duration: int = 20
    load_duration: int = 5
    unload_duration: int = 5
    bid_window: int = 3
    win_resolution_window: int = 1

    def __post_init__(self) -> None:
        if self.robot_speed <= 0:
            raise ValueError("robot_speed must be positive")
        for name in ("dig_duration", "load_duration", "unload_duration",
                     "bid_window", "win_resolution_window"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive tick count")
        if self.bid_window < 2:
            raise ValueError("bid_window below 2 can never collect a bid")


@dataclass(frozen=True)
class ScenarioConfig:
    """Full description of one simulation run (world + fleet + policy)."""

    arena_side: float = 100.0
    n_scouts: int = 2
    n_excavators: int = 4
    n_haulers: int = 6
    n_sites: int = 10
    n_minerals: int = 64
    scan_radius: float = 2.5
    seed: int = 0
    policy: str = "fcfs"
    timing: TimingConfig = field(default_factory=TimingConfig)
    tick_cap: int = 200_000

    def __post_init__(self) -> None:
        if self.arena_side <= 0:
            raise ValueError("arena_side must be positive")
        if self.n_scouts not in (1, 2):
            raise ValueError("n_scouts must be 1 or 2")
        if self.n_excavators < 1 or self.n_haulers < 1:
            raise ValueError("need at least one excavator and one hauler")
        if self.n_sites < 0:
            raise ValueError("n_sites must be non-negative")
        if self.n_minerals < self.n_sites:
            raise ValueError("every site needs at least one mineral")
        if self.n_sites == 0 and self.n_minerals != 0:
            raise ValueError("minerals require sites to hold them")
        if self.scan_radius <= 0:
            raise ValueError("scan_radius must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.policy not in POLICY_NAMES:
            raise ValueError(f"policy must be one of {POLICY_NAMES}")
        if self.tick_cap < 1:
            raise ValueError("tick_cap must be positive")
        # Scout coverage divides the arena into square cells of one scan
        # diameter; the arena must tile exactly.
        cells = self.arena_side / self.cell_side
        if abs(cells - round(cells)) > 1e-9 or round(cells) < 1:
            raise ValueError(
                "arena_side must be an exact multiple of 2*scan_radius")

    @property
    def cell_side(self) -> float:
        return 2.0 * self.scan_radius

    @property
    def grid_cells(self) -> int:
        """Cells per arena side."""
        return round(self.arena_side / self.cell_side)

    def robot_names(self) -> list[tuple[str, RobotKind]]:
        """All robot names with kinds, in scout/excavator/hauler order."""
        names: list[tuple[str, RobotKind]] = []
        names += [(f"scout_{i + 1}", RobotKind.SCOUT) for i in range(self.n_scouts)]
        names += [(f"excavator_{i + 1}", RobotKind.EXCAVATOR)
                  for i in range(self.n_excavators)]
        names += [(f"hauler_{i + 1}", RobotKind.HAULER) for i in range(self.n_haulers)]
        return names


@dataclass
class WorldState:
    """Shared mutable world: sites, plant stock and the current tick."""

    arena_side: float
    plant_location: Point
    sites: list[ResourceSite]
    minerals_at_plant: int = 0
    tick: int = 0

    @property
    def minerals_total(self) -> int:
        return sum(s.minerals_initial for s in self.sites)

    def minerals_remaining_on_sites(self) -> int:
        return sum(s.minerals_remaining for s in self.sites)

    def site_by_id(self, site_id: int) -> ResourceSite:
        return self.sites[site_id]


def _sweep_segments(config: ScenarioConfig) -> list[tuple[Point, Point]]:
    """The segments the scouts will sweep, from their coverage plans."""
    from .spiral import build_spiral  # import here: spiral imports this module

    segments: list[tuple[Point, Point]] = []
    for plan in build_spiral(config.arena_side, config.cell_side, config.n_scouts):
        waypoints = plan.waypoints()
        if len(waypoints) == 1:
            segments.append((waypoints[0], waypoints[0]))
        segments.extend(zip(waypoints, waypoints[1:]))
    return segments


def _segment_distance(p: Point, a: Point, b: Point) -> float:
    dx, dy = b.x - a.x, b.y - a.y
    norm2 = dx * dx + dy * dy
    if norm2 == 0.0:
        return p.distance_to(a)
    t = max(0.0, min(1.0, ((p.x - a.x) * dx + (p.y - a.y) * dy) / norm2))
    return math.hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy))


def generate_scenario(config: ScenarioConfig) -> WorldState:
    """Build the world for a configuration. Pure in the config (seed included).

    Sites are placed by rejection sampling under four rules: at least
    2*scan_radius from the plant, at least scan_radius from every other
    site, at least scan_radius in from the arena boundary, and within scan
    range of the scouts' planned sweep.  The last rule exists because a
    circular scanner of half a cell side leaves small blind wedges at the
    sweep's turns (a cell corner is sqrt(2)/2 cell sides from the cell
    center); a site inside a wedge could never be found and would deadlock
    the mission.  Mineral counts are a uniformly drawn composition of
    n_minerals into n_sites positive parts.
    """
    rng = random.Random(config.seed)
    side = config.arena_side
    plant = Point(side / 2.0, side / 2.0)
    margin = config.scan_radius
    plant_clearance = PLANT_CLEARANCE_FACTOR * config.scan_radius
    sweep = _sweep_segments(config) if config.n_sites > 0 else []

    locations: list[Point] = []
    attempts = 0
    while len(locations) < config.n_sites:
        if attempts >= MAX_PLACEMENT_ATTEMPTS:
            raise ScenarioGenerationError(
                f"could not place {config.n_sites} sites with the required "
                f"separations after {attempts} attempts (scenario too dense)")
        attempts += 1
        candidate = Point(rng.uniform(margin, side - margin),
                          rng.uniform(margin, side - margin))
        if candidate.distance_to(plant) < plant_clearance:
            continue
        if any(candidate.distance_to(p) < config.scan_radius for p in locations):
            continue
        if all(_segment_distance(candidate, a, b) > config.scan_radius
               for a, b in sweep):
            continue  # inside a scan blind spot: unreachable by any scout
        locations.append(candidate)

    counts = _mineral_composition(rng, config.n_minerals, config.n_sites)
    sites = [ResourceSite(site_id=i, location=loc,
                          minerals_initial=counts[i], minerals_remaining=counts[i])
             for i, loc in enumerate(locations)]
    return WorldState(arena_side=side, plant_location=plant, sites=sites)


def _mineral_composition(rng: random.Random, total: int, parts: int) -> list[int]:
    """Uniform composition of `total` into `parts` parts, each >= 1."""
    if parts == 0:
        return []
    if parts == 1:
        return [total]
    cuts = sorted(rng.sample(range(1, total), parts - 1))
    bounds = [0] + cuts + [total]
    return [bounds[i + 1] - bounds[i] for i in range(parts)]


def transfer_mineral_to_plant(world: WorldState, hauler) -> WorldState:
    """Empty the hauler's bin into the plant. Rejected if the bin is empty."""
    if getattr(hauler, "carried_minerals", 0) < 1:
        raise ValueError(f"{getattr(hauler, 'name', 'hauler')} carries no mineral")
    hauler.carried_minerals -= 1
    world.minerals_at_plant += 1
    return world


def claim_site(world: WorldState, site_id: int, excavator: str) -> None:
    """Give `excavator` the exclusive claim on a site."""
    site = world.site_by_id(site_id)
    if site.claimed_by is not None:
        raise ValueError(f"site {site_id} already claimed by {site.claimed_by}")
    site.claimed_by = excavator


def release_site(world: WorldState, site_id: int, excavator: str) -> None:
    site = world.site_by_id(site_id)
    if site.claimed_by != excavator:
        raise ValueError(f"site {site_id} is not claimed by {excavator}")
    site.claimed_by = None


# --- flat key=value scenario files -----------------------------------------

_CONFIG_FIELDS: dict[str, type] = {
    "arena_side": float,
    "n_scouts": int,
    "n_excavators": int,
    "n_haulers": int,
    "n_sites": int,
    "n_minerals": int,
    "scan_radius": float,
    "seed": int,
    "policy": str,
    "tick_cap": int,
}

_TIMING_FIELDS: dict[str, type] = {
    "robot_speed": float,
    "dig_duration": int,
    "load_duration": int,
    "unload_duration": int,
    "bid_window": int,
    "win_resolution_window": int,
}


def parse_scenario_file(path: str | Path) -> dict[str, str]:
    """Parse a flat `key = value` scenario file (# starts a comment)."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_FIELDS and key not in _TIMING_FIELDS:
            raise ValueError(f"{path}:{lineno}: unknown scenario key {key!r}")
        values[key] = value
    return values


def build_config(*mappings: Mapping[str, object]) -> ScenarioConfig:
    """Build a ScenarioConfig from layered key/value mappings.

    Later mappings override earlier ones (defaults < file < CLI flags).
    Values may be strings (as parsed from a file) or already-typed.
    """
    merged: dict[str, object] = {}
    for mapping in mappings:
        for key, value in mapping.items():
            if value is not None:
                merged[key] = value

    config_kwargs: dict[str, object] = {}
    timing_kwargs: dict[str, object] = {}
    for key, value in merged.items():
        if key in _CONFIG_FIELDS:
            config_kwargs[key] = _CONFIG_FIELDS[key](value)
        elif key in _TIMING_FIELDS:
            timing_kwargs[key] = _TIMING_FIELDS[key](value)
        else:
            raise ValueError(f"unknown scenario key {key!r}")
    if timing_kwargs:
        config_kwargs["timing"] = TimingConfig(**timing_kwargs)  # type: ignore[arg-type]
    return ScenarioConfig(**config_kwargs)  # type: ignore[arg-type]


def with_overrides(config: ScenarioConfig, **overrides) -> ScenarioConfig:
    """Return a copy of `config` with the given fields replaced."""
    return replace(config, **overrides)
