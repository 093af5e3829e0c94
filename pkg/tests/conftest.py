"""Shared fixtures: hypothesis profile and one-time kernel warmup."""

from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger JIT compilation once so timings inside tests stay honest."""
    import rotorlab as rl
    from rotorlab import rotor

    g = rl.cycle_graph(5)
    cfg = rl.canonical_config(g)
    rotor.run_until_vertex_cover(g, cfg, 0)
    rotor.run_until_edge_cover(g, cfg, 0)
    state = rotor.WalkState.begin(g, cfg, 0)
    checked = rotor.CheckedRun.begin(g)
    rotor.run_steps_checked(g, state, checked, 10)
    rotor.run_recorded(g, cfg, 0, 5)
    rl.mc_random_walk(g, 0, "vertex_cover", 2, seed=1)
    rl.mc_hitting_time(g, 0, 1, 2, seed=1)
    yield
