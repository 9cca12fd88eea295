import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from defusal.belief import (
    BombIntel,
    BeliefDoc,
    apply_claims,
    initial_belief,
    parse_belief,
    reference_update,
    render_belief,
    score_belief,
)
from defusal.epistemic import Claim
from defusal.harness import TrialConfig, run_trial
from defusal.textio import render_observation
from defusal.world import Apply, Inspect, Message, Move, Turn, apply_action, new_world, paper_config, step_round
from helpers import BLUE, GREEN, RED, paper_scale_worlds

words = st.text(st.sampled_from("abcdefgh XYZ019,'"), min_size=1, max_size=60).map(lambda s: " ".join(s.split()) or "x")


@st.composite
def belief_docs(draw):
    config = draw(paper_scale_worlds)
    agent = draw(st.sampled_from(config.agent_names))
    doc = initial_belief(config, agent)
    for bomb, _ in doc.bombs:
        intel = draw(st.one_of(
            st.just(BombIntel()),
            st.builds(
                BombIntel,
                room=st.one_of(st.none(), st.sampled_from(config.rooms)),
                sequence=st.one_of(st.none(), st.lists(st.integers(0, config.n_colors - 1), min_size=1, max_size=3).map(tuple)),
                defused=st.booleans(),
                updated=st.integers(0, 30),
            ).filter(lambda i: i.known),
        ))
        doc = doc.with_intel(bomb, intel)
    teammates = tuple((n, draw(st.sampled_from(config.rooms))) for n in config.agent_names)
    return dataclasses.replace(doc, round=draw(st.integers(1, 30)), score=draw(st.integers(0, 90)),
                               observation=draw(words), teammates=teammates)


def test_initial_belief_round_trips_for_every_agent():
    cfg = paper_config()
    for agent in cfg.agent_names:
        doc = initial_belief(cfg, agent)
        assert parse_belief(render_belief(doc)) == doc
        assert doc.intel(1) == BombIntel(room=0)


@settings(max_examples=200, deadline=None)
@given(belief_docs())
def test_render_parse_round_trip(doc):
    parsed = parse_belief(render_belief(doc), doc.color_names)
    assert parsed == doc
    assert parsed.issues == ()


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=400))
def test_parser_tolerates_arbitrary_text(text):
    doc = parse_belief(text)
    assert isinstance(doc, BeliefDoc)


def test_parser_accepts_markdown_flavoured_documents():
    text = render_belief(initial_belief(paper_config(), "Charlie"))
    messy = text.replace("Bomb Intel:", "**Bomb Intel:**").replace("- Bomb", "* Bomb").replace("Current round: 1", "current round:   1")
    assert parse_belief(messy) == initial_belief(paper_config(), "Charlie")


def test_parser_records_issues_without_failing():
    text = render_belief(initial_belief(paper_config(), "Alpha"))
    text = text.replace("Bomb 2: Details currently unknown.", "Bomb two is somewhere")
    text = text.split("Tool inventory:")[0]
    doc = parse_belief(text)
    assert "missing section: tools" in doc.issues
    assert any(i.startswith("bombs:") for i in doc.issues)
    assert doc.intel(1) == BombIntel(room=0)


def test_last_writer_wins_by_round():
    doc = initial_belief(paper_config(), "Alpha")
    newer = Message("Bravo", 5, "", (Claim("located", bomb=4, room=6),))
    older = Message("Charlie", 3, "", (Claim("located", bomb=4, room=8),))
    doc = apply_claims(doc, [newer])
    doc = apply_claims(doc, [older])
    assert doc.intel(4) == BombIntel(room=6, updated=5)


def test_known_sequence_is_not_forgotten():
    doc = initial_belief(paper_config(), "Alpha")
    doc = apply_claims(doc, [Message("Bravo", 2, "", (Claim("sequence", bomb=3, sequence=(RED, GREEN, BLUE)),))])
    doc = apply_claims(doc, [Message("Bravo", 4, "", (Claim("located", bomb=3, room=5),))])
    assert doc.intel(3) == BombIntel(room=5, sequence=(RED, GREEN, BLUE), updated=4)


def test_contents_claim_marks_missing_bombs_defused():
    doc = initial_belief(paper_config(), "Bravo")
    doc = apply_claims(doc, [Message("Alpha", 2, "", (Claim("contents", room=0, bombs=()),))])
    assert doc.intel(1).defused


def test_reference_update_follows_first_hand_observations():
    cfg = paper_config()
    state = new_world(cfg)
    doc = initial_belief(cfg, "Alpha")
    idle = [Turn("Bravo", Move(3)), Turn("Charlie", Move(8))]
    for action in (Inspect(), Apply(RED), Move(5)):
        state, result = step_round(state, [Turn("Alpha", action)] + idle)
        idle = [Turn(t.agent, Move(0 if t.action.room != 0 else 3)) for t in idle]
        out = result.outcomes[0]
        doc = reference_update(doc, render_observation(state, "Alpha", out), out)
        if isinstance(action, Inspect):
            assert doc.intel(1).sequence == (RED,)
    assert doc.intel(1).defused and doc.intel(1).sequence == (RED,)
    assert doc.intel(3) == BombIntel(room=5, updated=4)
    assert score_belief(doc, state).consistency == 1.0
    assert parse_belief(render_belief(doc)) == doc


def test_scoring_categories():
    cfg = paper_config()
    state = new_world(cfg)
    state, _ = apply_action(state, "Bravo", Move(6))
    state, _ = apply_action(state, "Bravo", Apply(GREEN))  # bomb 4 now has blue left
    doc = initial_belief(cfg, "Alpha")
    doc = doc.with_intel(2, BombIntel(room=8))                        # wrong room
    doc = doc.with_intel(4, BombIntel(room=6, sequence=(GREEN, BLUE)))  # stale sequence
    doc = doc.with_intel(5, BombIntel(room=8, sequence=(BLUE, RED)))    # consistent
    doc = doc.with_intel(9, BombIntel(room=3))                        # no such bomb
    score = score_belief(doc, state)
    assert score.locations.contradicted == 1 and score.locations.consistent == 3
    assert (score.sequences.stale, score.sequences.consistent, score.sequences.unknown) == (1, 1, 3)
    assert score.hallucinated == [9]
    # Bravo moved since the doc was written: stale, not contradicted
    assert (score.teammates.consistent, score.teammates.stale) == (2, 1)
    good = 3 + 2 + 5 + 3
    assert score.consistency == pytest.approx(good / (good + 2))


def test_greedy_reference_docs_stay_consistent_and_round_trip():
    tc = TrialConfig(world=paper_config(), default_policy="greedy", belief=True, tom=False)
    result = run_trial(tc, 0)
    for agent, memory in result.memories.items():
        doc = memory.belief
        assert score_belief(doc, result.state).consistency == 1.0
        assert parse_belief(render_belief(doc), doc.color_names) == doc
