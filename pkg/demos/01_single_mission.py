"""Run one full mining mission and narrate what happened.

Two scouts spiral outward from the central processing plant, auctioning
every resource site they find to the four excavators; excavators dig
minerals one at a time and auction each one to the six haulers, which carry
them to the plant.  The run below uses the first-come-first-serve bidding
policy and a fixed seed, so it reproduces exactly.
"""

from isrusim import ScenarioConfig, run_to_completion, verify_records

config = ScenarioConfig(policy="fcfs", seed=7)
print(f"scenario: {config.n_sites} sites, {config.n_minerals} minerals, "
      f"{config.arena_side:.0f}x{config.arena_side:.0f} arena, "
      f"fleet {config.n_scouts}/{config.n_excavators}/{config.n_haulers} "
      f"(scouts/excavators/haulers), policy={config.policy}, seed={config.seed}")

result = run_to_completion(config)
records = result.log.records

first = {}
for record in records:
    first.setdefault(record["type"], record)

print(f"\nstatus: {result.status.value} at tick {result.metrics.completion_ticks}")
print(f"first site found:     tick {first['discovery']['tick']:>5} "
      f"by {first['discovery']['scout']}")
print(f"first task allocated: tick "
      f"{next(r['tick'] for r in records if r.get('variant') == 'close'):>5}")
print(f"first mineral dug:    tick {first['dig']['tick']:>5} "
      f"by {first['dig']['excavator']}")
print(f"first delivery:       tick {first['unload']['tick']:>5} "
      f"by {first['unload']['hauler']}")
print(f"all sites found:      tick {result.metrics.discovery_complete_tick:>5}")

m = result.metrics
print(f"\nmessages on the bus: {m.message_count}")
print("distance traveled by kind:")
for kind, distance in m.per_kind_distance.items():
    print(f"  {kind:10s} {distance:9.1f}")

scout_tier = m.durations_for("scout_to_excavator")
hauler_tier = m.durations_for("excavator_to_hauler")
print(f"auctions closed: {len(m.auction_durations)} "
      f"({len(scout_tier)} excavation, {len(hauler_tier)} transport)")
print(f"mean auction open time: excavation {sum(scout_tier)/len(scout_tier):.1f} "
      f"ticks, transport {sum(hauler_tier)/len(hauler_tier):.1f} ticks")

violations = verify_records(records)
print(f"\nprotocol safety check over the event log: "
      f"{'clean' if not violations else violations}")
