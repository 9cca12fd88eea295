import dataclasses
import random

import pytest
from hypothesis import given, settings

from defusal.harness import RandomizationSpec, generate_instance
from defusal.planner import (
    PlanDivergence,
    brute_force_optimal,
    certify,
    compose_and_execute,
    partition_subtasks,
    sort_tasks,
)
from defusal.world import AgentSpec, Apply, BombSpec, Move, WorldConfig, paper_config
from helpers import small_worlds


def tiny_family(n: int, seed: int = 1):
    """Instances with at most 3 rooms, 2 bombs, 2 agents, 2 colours, horizon 8."""
    rng = random.Random(seed)
    for _ in range(n):
        nr = rng.randint(1, 3)
        edges = [(i, i + 1) for i in range(nr - 1)]
        if nr == 3 and rng.random() < 0.5:
            edges.append((0, 2))
        bombs = [BombSpec(i + 1, rng.randrange(nr), tuple(rng.randrange(2) for _ in range(rng.randint(1, 3))))
                 for i in range(rng.randint(0, 2))]
        agents = [AgentSpec(name, rng.randrange(nr), frozenset(rng.sample(range(2), rng.randint(1, 2))))
                  for name in ("Alpha", "Bravo")[: rng.randint(1, 2)]]
        yield WorldConfig.build(range(nr), edges, bombs, agents, n_colors=2,
                                color_names=("red", "green"), round_limit=8)


def test_planner_matches_brute_force_on_tiny_family():
    mismatches = []
    for cfg in tiny_family(250):
        best = brute_force_optimal(cfg, 8)
        plan, _ = compose_and_execute(cfg)
        if (plan.score, plan.rounds) != (best.score, best.rounds):
            mismatches.append((cfg, best.score, best.rounds, plan.score, plan.rounds))
    assert mismatches == []


@settings(max_examples=25, deadline=None)
@given(small_worlds)
def test_planner_matches_brute_force_on_generated_small_worlds(cfg):
    best = brute_force_optimal(cfg, cfg.round_limit)
    plan, _ = compose_and_execute(cfg)
    assert (plan.score, plan.rounds) == (best.score, best.rounds)


def test_reference_map_plan():
    plan, results = compose_and_execute(paper_config())
    assert (plan.score, plan.rounds) == (90, 5)
    assert all(out.ok for r in results for out in r.outcomes)
    assert certify(paper_config(), plan).score == 90


@pytest.mark.parametrize("k,rounds", [(1, 17), (2, 10), (3, 8), (4, 8), (9, 5), (None, 5)])
def test_chunk_size_on_reference_map(k, rounds):
    plan, _ = compose_and_execute(paper_config(), k=k)
    assert plan.score == 90 and plan.rounds == rounds
    certify(paper_config(), plan)


def test_larger_chunks_never_lose_return():
    for seed in range(8):
        cfg = generate_instance(RandomizationSpec(), seed)
        returns = [compose_and_execute(cfg, k=k)[0].score for k in (1, 2, 3, None)]
        assert returns == sorted(returns)


def test_plans_certify_on_paper_scale_instances():
    for seed in range(50):
        cfg = generate_instance(RandomizationSpec(), seed)
        plan, _ = compose_and_execute(cfg)
        assert certify(cfg, plan).score == plan.score == cfg.max_score


def test_uncuttable_bomb_is_reported_and_skipped():
    cfg = paper_config()
    cfg = dataclasses.replace(cfg, bombs=cfg.bombs + (BombSpec(6, 3, (3,)),), n_colors=4,
                              color_names=("red", "green", "blue", "white"))
    plan, _ = compose_and_execute(cfg)
    assert plan.score == 90 and plan.meta["infeasible"] == [6]


def test_tampered_plan_is_rejected():
    cfg = paper_config()
    plan, _ = compose_and_execute(cfg)
    plan.actions["Alpha"][0] = Apply(2)  # Alpha holds no blue cutter
    with pytest.raises(PlanDivergence):
        certify(cfg, plan)
    plan, _ = compose_and_execute(cfg)
    plan.actions["Alpha"][0] = Move(3)
    with pytest.raises(PlanDivergence):
        certify(cfg, plan)


def test_task_ordering_and_partition():
    cfg = paper_config()
    by_distance = [t.bomb for t in sort_tasks(cfg)]
    assert by_distance == [1, 2, 3, 4, 5]
    assert [t.bomb for t in sort_tasks(cfg, "id")] == [1, 2, 3, 4, 5]
    chunks = partition_subtasks(sort_tasks(cfg), 4)
    assert [len(c) for c in chunks] == [4, 4, 1]
    assert chunks[0] == ((1, 0), (2, 0), (3, 0), (3, 1))
    with pytest.raises(ValueError):
        partition_subtasks(sort_tasks(cfg), 0)
    with pytest.raises(ValueError):
        sort_tasks(cfg, "alphabetical")


def test_brute_force_refuses_large_instances():
    with pytest.raises(ValueError):
        brute_force_optimal(paper_config(), 30)


def test_plan_json_table():
    plan, _ = compose_and_execute(paper_config())
    data = plan.to_json()
    assert data["score"] == 90 and len(data["table"]) == 5
    assert data["table"][0]["Alpha"] == "Apply red Tool"
