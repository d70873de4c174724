import math

import pytest

from isrusim import (
    Ack,
    Announcement,
    Bid,
    BroadcastBus,
    Close,
    EventLog,
    Point,
    TaskType,
    WinnerDecl,
)
from isrusim.bus import envelope_from_record, envelope_record


LOC = Point(30.0, 40.0)


def test_publish_delivers_to_every_robot_next_tick():
    bus = BroadcastBus()
    bus.publish(Announcement("scout_1", TaskType.EXCAVATE, LOC), tick=10)
    for robot in ("scout_1", "excavator_1", "hauler_3"):
        inbox = bus.drain_inbox(robot, tick=11)
        assert len(inbox) == 1
        assert inbox[0].payload.auctioneer == "scout_1"


def test_not_delivered_same_tick():
    bus = BroadcastBus()
    bus.publish(Announcement("scout_1", TaskType.EXCAVATE, LOC), tick=10)
    assert bus.drain_inbox("excavator_1", tick=10) == []


def test_same_tick_messages_keep_publish_order():
    bus = BroadcastBus()
    bus.publish(Bid("scout_1", "excavator_1", LOC, -2.0), tick=4)
    bus.publish(Announcement("scout_2", TaskType.EXCAVATE, LOC), tick=4)
    inbox = bus.drain_inbox("hauler_1", tick=5)
    assert [e.sequence for e in inbox] == [0, 1]
    assert isinstance(inbox[0].payload, Bid)
    assert isinstance(inbox[1].payload, Announcement)


def test_drain_is_idempotent_within_tick():
    bus = BroadcastBus()
    bus.publish(Announcement("scout_1", TaskType.EXCAVATE, LOC), tick=0)
    assert len(bus.drain_inbox("hauler_1", tick=1)) == 1
    assert bus.drain_inbox("hauler_1", tick=1) == []


def test_no_traffic_empty_inbox():
    bus = BroadcastBus()
    assert bus.drain_inbox("scout_1", tick=5) == []


def test_fanout_counts():
    bus = BroadcastBus()
    for i in range(3):
        bus.publish(Bid("scout_1", f"excavator_{i + 1}", LOC, -float(i)), tick=7)
    for robot in ("a", "b", "c"):
        assert len(bus.drain_inbox(robot, tick=8)) == 3


def test_envelopes_logged():
    log = EventLog()
    bus = BroadcastBus(log)
    bus.publish(Announcement("scout_1", TaskType.EXCAVATE, LOC), tick=2)
    assert len(log) == 1
    assert log.records[0]["variant"] == "announcement"
    assert log.records[0]["status"] == "open"


@pytest.mark.parametrize("msg", [
    Announcement("scout_1", TaskType.EXCAVATE, LOC),
    Bid("scout_1", "excavator_2", LOC, -12.5),
    Bid("excavator_1", "hauler_2", LOC, float("-inf")),
    WinnerDecl("scout_1", TaskType.EXCAVATE, LOC, "excavator_3"),
    Ack("scout_1", "excavator_3", LOC, accepted=True),
    Ack("scout_1", "excavator_3", LOC, accepted=False),
    Close("excavator_1", TaskType.TRANSPORT, LOC, "hauler_2"),
])
def test_record_round_trip(msg):
    bus = BroadcastBus()
    env = bus.publish(msg, tick=9)
    assert envelope_from_record(envelope_record(env)) == env


def test_busy_sentinel_survives_jsonl(tmp_path):
    log = EventLog()
    bus = BroadcastBus(log)
    bus.publish(Bid("excavator_1", "hauler_1", LOC, float("-inf")), tick=1)
    path = tmp_path / "events.jsonl"
    log.dump_jsonl(path)
    assert "-Infinity" not in path.read_text()  # valid JSON on the wire
    loaded = EventLog.load_jsonl(path)
    assert loaded.records[0]["utility"] == float("-inf")


def test_malformed_bid_rejected():
    with pytest.raises(ValueError):
        Bid("scout_1", "excavator_1", LOC, utility=3.0)  # positive utility
    with pytest.raises(ValueError):
        Bid("scout_1", "excavator_1", LOC, utility=math.nan)
    with pytest.raises(ValueError):
        Announcement("", TaskType.EXCAVATE, LOC)
