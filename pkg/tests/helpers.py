"""Shared builders and hypothesis strategies for the test suite."""

from __future__ import annotations

from hypothesis import strategies as st

from defusal.harness import RandomizationSpec, generate_instance
from defusal.world import AgentSpec, BombSpec, WorldConfig

RED, GREEN, BLUE = 0, 1, 2


def two_room(apply_mode: str = "guarded", tools=(RED, GREEN), sequence=(RED, GREEN)) -> WorldConfig:
    """Rooms 1 and 2, one bomb in room 2, a single agent starting in room 1."""
    return WorldConfig.build(
        [1, 2], [(1, 2)], [BombSpec(1, 2, tuple(sequence))],
        [AgentSpec("Alpha", 1, frozenset(tools))], apply_mode=apply_mode,
    )


def small_spec(apply_mode: str = "guarded") -> RandomizationSpec:
    return RandomizationSpec(n_rooms=3, room_pool=(1, 2, 3, 4), bomb_sizes=(1, 2), n_agents=2,
                             round_limit=8, apply_mode=apply_mode)


paper_scale_worlds = st.builds(
    lambda seed, mode: generate_instance(RandomizationSpec(apply_mode=mode), seed),
    st.integers(0, 10_000), st.sampled_from(["guarded", "explosive"]),
)

small_worlds = st.builds(
    lambda seed, mode: generate_instance(small_spec(mode), seed),
    st.integers(0, 10_000), st.sampled_from(["guarded", "explosive"]),
)
