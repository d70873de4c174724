import json

import jsonschema
import pytest

from conftest import tiny_config, tiny_run

from isrusim import (
    EventLog,
    MetricsError,
    ScenarioConfig,
    Simulation,
    TimingConfig,
    collect_metrics,
    sweep,
)
from isrusim.metrics import (
    TIER_EXCAVATOR_TO_HAULER,
    TIER_SCOUT_TO_EXCAVATOR,
    build_run_meta,
)

SCHEMA_PATH = "src/isrusim/schemas/summary.schema.json"


def synthetic_log(announce_tick=10, close_tick=25, task_type="excavate"):
    loc = [30.0, 40.0]
    return [
        {"type": "run_start", "policy": "fcfs", "seed": 1, "arena_side": 100.0,
         "n_sites": 1, "n_minerals": 0, "tick_cap": 100,
         "robots": [["scout_1", "scout"]], "coalition_pairs": []},
        {"type": "msg", "tick": announce_tick, "seq": 0,
         "variant": "announcement", "auctioneer": "scout_1", "loc": loc,
         "task_type": task_type, "status": "open"},
        {"type": "discovery", "tick": announce_tick, "site": 0,
         "scout": "scout_1", "loc": loc},
        {"type": "msg", "tick": close_tick, "seq": 1, "variant": "close",
         "auctioneer": "scout_1", "loc": loc, "task_type": task_type,
         "status": "closed", "allocated_to": "excavator_1"},
        {"type": "run_end", "tick": close_tick, "status": "completed",
         "minerals_at_plant": 0, "sites_discovered": 1,
         "odometry": {"scout_1": 12.5}},
    ]


def test_duration_is_close_minus_open():
    report = collect_metrics(synthetic_log(announce_tick=10, close_tick=25))
    (span,) = report.auction_durations
    assert span.duration == 15
    assert span.tier == TIER_SCOUT_TO_EXCAVATOR
    assert span.allocated_to == "excavator_1"


def test_transport_auctions_land_in_the_other_tier():
    report = collect_metrics(synthetic_log(task_type="transport"))
    assert report.auction_durations[0].tier == TIER_EXCAVATOR_TO_HAULER


def test_close_without_announcement_is_an_error():
    records = synthetic_log()
    del records[1]
    with pytest.raises(MetricsError, match="never announced"):
        collect_metrics(records)


def test_missing_run_records_is_an_error():
    with pytest.raises(MetricsError, match="run_start"):
        collect_metrics(synthetic_log()[1:-1])


def test_malformed_record_names_its_index():
    records = synthetic_log()
    records.insert(2, {"no_type": True})
    with pytest.raises(MetricsError, match="record 2"):
        collect_metrics(records)


def test_report_from_full_run_satisfies_invariants():
    result = tiny_run(seed=5)
    report = result.metrics
    report.validate()
    config = tiny_config()
    assert report.status == "completed"
    assert len(report.per_robot_distance) == (config.n_scouts
                                              + config.n_excavators
                                              + config.n_haulers)
    for kind in ("scout", "excavator", "hauler"):
        per_robot = sum(d for n, d in report.per_robot_distance.items()
                        if n.startswith(kind))
        assert report.per_kind_distance[kind] == pytest.approx(per_robot)
    assert report.discovery_complete_tick <= report.completion_ticks
    # every close in the log appears exactly once
    closes = sum(1 for r in result.log.records
                 if r["type"] == "msg" and r["variant"] == "close")
    assert len(report.auction_durations) == closes


def test_metrics_purely_from_dumped_log(tmp_path):
    result = tiny_run(seed=8)
    path = tmp_path / "events.jsonl"
    result.log.dump_jsonl(path)
    reloaded = collect_metrics(EventLog.load_jsonl(path).records)
    assert reloaded.to_dict() == result.metrics.to_dict()


def test_coalition_with_free_paired_hauler_never_auctions_transport():
    # one excavator, its paired hauler, and a dig long enough that the
    # hauler is always back before the next mineral surfaces
    config = ScenarioConfig(
        arena_side=40.0, n_scouts=1, n_excavators=1, n_haulers=3,
        n_sites=2, n_minerals=2, seed=3, policy="coalition",
        timing=TimingConfig(dig_duration=100), tick_cap=20_000)
    sim = Simulation(config)
    status = sim.run()
    assert status.value == "completed"
    report = collect_metrics(sim.ctx.log.records)
    assert report.durations_for(TIER_EXCAVATOR_TO_HAULER) == []
    assert report.durations_for(TIER_SCOUT_TO_EXCAVATOR)  # sites were auctioned


def test_odometry_equals_sum_of_per_tick_displacements():
    config = tiny_config(seed=13)
    sim = Simulation(config, snapshots=True)
    sim.run()
    report = collect_metrics(sim.ctx.log.records)
    trace: dict[str, list[float]] = {}
    for r in sim.ctx.log.records:
        if r["type"] == "snapshot":
            trace.setdefault(r["name"], []).append(r["odometry"])
    for name, odometries in trace.items():
        assert odometries == sorted(odometries)
        assert report.per_robot_distance[name] == odometries[-1]


def test_csv_is_byte_identical_across_sweeps(tmp_path):
    from isrusim.metrics import CSV_COLUMNS

    base = tiny_config(seed=0)
    for directory in ("a", "b"):
        sweep(["fcfs", "nearest"], [0, 1], base_config=base,
              out_dir=tmp_path / directory)
    assert (tmp_path / "a/metrics.csv").read_bytes() == \
        (tmp_path / "b/metrics.csv").read_bytes()
    assert (tmp_path / "a/summary.json").read_bytes() == \
        (tmp_path / "b/summary.json").read_bytes()
    lines = (tmp_path / "a/metrics.csv").read_text().strip().splitlines()
    assert len(lines) == 5  # header + 2 policies x 2 seeds
    assert lines[0].strip() == ",".join(CSV_COLUMNS)  # documented stable set


def test_summary_validates_against_shipped_schema(tmp_path):
    base = tiny_config(seed=0)
    result = sweep(["fcfs", "coalition", "nearest"], [0, 1], base_config=base)
    schema = json.loads(open(SCHEMA_PATH).read())
    jsonschema.validate(result.summary, schema)
    # single-policy summaries validate too (orderings report null)
    partial = sweep(["fcfs"], [0], base_config=base)
    jsonschema.validate(partial.summary, schema)
    assert partial.summary["orderings"]["completion_fcfs_least"]["pass"] is None


def test_summary_reports_stalled_runs():
    base = tiny_config(seed=0, tick_cap=5)
    result = sweep(["fcfs"], [0, 1], base_config=base)
    assert result.any_stalled
    assert result.summary["stalled_runs"] == [
        {"policy": "fcfs", "seed": 0}, {"policy": "fcfs", "seed": 1}]


def test_run_meta_contains_resolved_config_and_pairs():
    meta = build_run_meta(ScenarioConfig(policy="coalition", seed=4))
    assert meta["config"]["n_haulers"] == 6
    assert meta["config"]["timing"]["bid_window"] == 3
    assert len(meta["coalition_pairs"]) == 4
    assert meta["constants"]["cell_side"] == 5.0
    assert meta["constants"]["coalition_excavate_tier"] == "fcfs"


def test_validate_catches_tampered_report():
    report = collect_metrics(synthetic_log())
    report.per_kind_distance["scout"] += 1.0
    with pytest.raises(MetricsError, match="per-kind"):
        report.validate()
