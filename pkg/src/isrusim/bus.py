"""Broadcast message transport and the five auction message formats.

Every published message reaches every robot (the publisher included) at the
start of the next tick, with no loss and a global sequence number that makes
the delivery order total.  Addressing is purely receiver-side: a robot that
has no business with a message simply drops it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .events import EventLog
from .world import Point, TaskType

AuctionKey = tuple[str, tuple[float, float]]


def _require_name(value: str, field_name: str) -> None:
    if not value or not isinstance(value, str):
        raise ValueError(f"{field_name} must be a non-empty robot name")


@dataclass(frozen=True)
class Announcement:
    """A task put up for auction (status is always 'open')."""

    auctioneer: str
    task_type: TaskType
    task_location: Point

    def __post_init__(self) -> None:
        _require_name(self.auctioneer, "auctioneer")


@dataclass(frozen=True)
class Bid:
    """A bidder's utility for an announced task.

    Utility is -path_cost, hence never positive; negative infinity is the
    busy sentinel of a robot that is capable but currently occupied.
    """

    auctioneer: str
    bidder: str
    task_location: Point
    utility: float

    def __post_init__(self) -> None:
        _require_name(self.auctioneer, "auctioneer")
        _require_name(self.bidder, "bidder")
        if math.isnan(self.utility) or self.utility > 0.0:
            raise ValueError("utility must be <= 0 or -inf")


@dataclass(frozen=True)
class WinnerDecl:
    """The auctioneer names the bidder it picked (auction stays open)."""

    auctioneer: str
    task_type: TaskType
    task_location: Point
    winner: str

    def __post_init__(self) -> None:
        _require_name(self.auctioneer, "auctioneer")
        _require_name(self.winner, "winner")


@dataclass(frozen=True)
class Ack:
    """The declared winner accepts or declines the task."""

    auctioneer: str
    auction_winner: str
    task_location: Point
    accepted: bool

    def __post_init__(self) -> None:
        _require_name(self.auctioneer, "auctioneer")
        _require_name(self.auction_winner, "auction_winner")


@dataclass(frozen=True)
class Close:
    """The auction ends; the task is allocated (status 'closed')."""

    auctioneer: str
    task_type: TaskType
    task_location: Point
    allocated_to: str

    def __post_init__(self) -> None:
        _require_name(self.auctioneer, "auctioneer")
        _require_name(self.allocated_to, "allocated_to")


Message = Union[Announcement, Bid, WinnerDecl, Ack, Close]

_VARIANTS = {Announcement: "announcement", Bid: "bid", WinnerDecl: "winner",
             Ack: "ack", Close: "close"}


def auction_key(msg: Message) -> AuctionKey:
    """(auctioneer, task_location) — the unique key of an auction."""
    return (msg.auctioneer, msg.task_location.as_pair())


@dataclass(frozen=True)
class Envelope:
    publish_tick: int
    sequence: int
    payload: Message


def envelope_record(env: Envelope) -> dict:
    """Flatten an envelope into one event-log record."""
    msg = env.payload
    record: dict = {
        "type": "msg",
        "tick": env.publish_tick,
        "seq": env.sequence,
        "variant": _VARIANTS[type(msg)],
        "auctioneer": msg.auctioneer,
        "loc": [msg.task_location.x, msg.task_location.y],
    }
    if isinstance(msg, Announcement):
        record["task_type"] = msg.task_type.value
        record["status"] = "open"
    elif isinstance(msg, Bid):
        record["bidder"] = msg.bidder
        record["utility"] = msg.utility
    elif isinstance(msg, WinnerDecl):
        record["task_type"] = msg.task_type.value
        record["status"] = "open"
        record["winner"] = msg.winner
    elif isinstance(msg, Ack):
        record["auction_winner"] = msg.auction_winner
        record["verdict"] = "accepted" if msg.accepted else "declined"
    else:
        record["task_type"] = msg.task_type.value
        record["status"] = "closed"
        record["allocated_to"] = msg.allocated_to
    return record


def envelope_from_record(record: dict) -> Envelope:
    """Rebuild an envelope from its event-log record."""
    loc = Point(record["loc"][0], record["loc"][1])
    variant = record["variant"]
    msg: Message
    if variant == "announcement":
        msg = Announcement(record["auctioneer"], TaskType(record["task_type"]), loc)
    elif variant == "bid":
        msg = Bid(record["auctioneer"], record["bidder"], loc, record["utility"])
    elif variant == "winner":
        msg = WinnerDecl(record["auctioneer"], TaskType(record["task_type"]),
                         loc, record["winner"])
    elif variant == "ack":
        msg = Ack(record["auctioneer"], record["auction_winner"], loc,
                  record["verdict"] == "accepted")
    elif variant == "close":
        msg = Close(record["auctioneer"], TaskType(record["task_type"]), loc,
                    record["allocated_to"])
    else:
        raise ValueError(f"unknown message variant {variant!r}")
    return Envelope(publish_tick=record["tick"], sequence=record["seq"], payload=msg)


class BroadcastBus:
    """Lossless broadcast with a fixed one-tick delivery latency."""

    def __init__(self, log: EventLog | None = None):
        self._log = log
        self._by_tick: dict[int, list[Envelope]] = {}
        self._sequence = 0
        self._last_drain: dict[str, int] = {}

    def publish(self, msg: Message, tick: int) -> Envelope:
        """Enqueue a message; every robot receives it at tick + 1."""
        env = Envelope(publish_tick=tick, sequence=self._sequence, payload=msg)
        self._sequence += 1
        self._by_tick.setdefault(tick, []).append(env)
        if self._log is not None:
            self._log.append(envelope_record(env))
        return env

    def drain_inbox(self, robot: str, tick: int) -> list[Envelope]:
        """All envelopes published at tick-1, in sequence order.

        Idempotent within a tick: a second drain returns nothing.
        """
        if self._last_drain.get(robot, -1) >= tick:
            return []
        self._last_drain[robot] = tick
        return self._by_tick.get(tick - 1, [])

    @property
    def messages_published(self) -> int:
        return self._sequence
