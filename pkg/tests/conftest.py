import pytest

from isrusim import ScenarioConfig, TimingConfig, run_to_completion


def tiny_config(**overrides) -> ScenarioConfig:
    """A small arena that completes in a few hundred ticks."""
    base = dict(arena_side=30.0, n_scouts=1, n_excavators=2, n_haulers=3,
                n_sites=2, n_minerals=4, seed=11, policy="fcfs", tick_cap=20_000)
    base.update(overrides)
    return ScenarioConfig(**base)


def tiny_run(**overrides):
    return run_to_completion(tiny_config(**overrides))


ALT_TIMING = TimingConfig(robot_speed=2.0, dig_duration=7, load_duration=3,
                          unload_duration=2, bid_window=4,
                          win_resolution_window=1)


@pytest.fixture
def small_config() -> ScenarioConfig:
    return tiny_config()
