import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from defusal.world import (
    Apply,
    ApplyMode,
    BombDefused,
    BombExploded,
    BombStatus,
    ConfigError,
    ErrorKind,
    Inspect,
    Invalid,
    Move,
    PhaseCut,
    SequenceRevealed,
    Status,
    Turn,
    WorldConfig,
    action_space,
    apply_action,
    check_termination,
    legal_actions,
    new_world,
    paper_config,
    step_round,
)
from helpers import BLUE, GREEN, RED, paper_scale_worlds, two_room

# Hand-written transition table for the two-room world (agent holds red+green,
# bomb 1 in room 2 with sequence red, green). Keys: (room, remaining, action);
# values: (error, room after, remaining after, score delta). "X" = exploded.
ACTIONS = {
    "m1": Move(1), "m2": Move(2), "ins": Inspect(),
    "r": Apply(RED), "g": Apply(GREEN), "b": Apply(BLUE), "bad": Invalid("unparseable"),
}
NA, NB, ND = ErrorKind.NOT_ADJACENT, ErrorKind.NO_BOMB, ErrorKind.NOTHING_TO_DEFUSE
WS, MT, UP = ErrorKind.WRONG_SEQUENCE, ErrorKind.MISSING_TOOL, ErrorKind.UNPARSEABLE

COMMON = {
    # agent in room 1: the bomb is elsewhere whatever its state
    **{(1, rem, "m1"): (NA, 1, rem, 0) for rem in ("RG", "G", "", "X")},
    **{(1, rem, "m2"): (None, 2, rem, 0) for rem in ("RG", "G", "", "X")},
    **{(1, rem, "ins"): (NB, 1, rem, 0) for rem in ("RG", "G", "", "X")},
    **{(1, rem, "r"): (ND, 1, rem, 0) for rem in ("RG", "G", "", "X")},
    **{(1, rem, "g"): (ND, 1, rem, 0) for rem in ("RG", "G", "", "X")},
    **{(room, rem, "b"): (MT, room, rem, 0) for room in (1, 2) for rem in ("RG", "G", "", "X")},
    **{(room, rem, "bad"): (UP, room, rem, 0) for room in (1, 2) for rem in ("RG", "G", "", "X")},
    **{(2, rem, "m1"): (None, 1, rem, 0) for rem in ("RG", "G", "", "X")},
    **{(2, rem, "m2"): (NA, 2, rem, 0) for rem in ("RG", "G", "", "X")},
    (2, "RG", "ins"): (None, 2, "RG", 0),
    (2, "G", "ins"): (None, 2, "G", 0),
    (2, "", "ins"): (NB, 2, "", 0),
    (2, "X", "ins"): (NB, 2, "X", 0),
    (2, "RG", "r"): (None, 2, "G", 0),
    (2, "G", "g"): (None, 2, "", 20),
    (2, "", "r"): (ND, 2, "", 0),
    (2, "", "g"): (ND, 2, "", 0),
    (2, "X", "r"): (ND, 2, "X", 0),
    (2, "X", "g"): (ND, 2, "X", 0),
}
GUARDED = {**COMMON, (2, "RG", "g"): (WS, 2, "RG", 0), (2, "G", "r"): (WS, 2, "G", 0)}
EXPLOSIVE = {**COMMON, (2, "RG", "g"): (None, 2, "X", 0), (2, "G", "r"): (None, 2, "X", 0)}
COLOR = {"R": RED, "G": GREEN}


def _state(mode: str, room: int, rem: str):
    state = new_world(two_room(mode))
    bomb = state.bombs[0]
    if rem == "X":
        bomb = dataclasses.replace(bomb, exploded=True)
    else:
        bomb = dataclasses.replace(bomb, remaining=tuple(COLOR[c] for c in rem))
    agent = dataclasses.replace(state.agents[0], location=room)
    return dataclasses.replace(state, bombs=(bomb,), agents=(agent,))


def _summary(state):
    bomb = state.bombs[0]
    rem = "X" if bomb.exploded else "".join("RGB"[c] for c in bomb.remaining)
    return state.agents[0].location, rem


@pytest.mark.parametrize("mode,table", [("guarded", GUARDED), ("explosive", EXPLOSIVE)])
def test_two_room_transition_table(mode, table):
    assert len(table) == 2 * 4 * len(ACTIONS)
    for (room, rem, key), (err, room2, rem2, delta) in table.items():
        before = _state(mode, room, rem)
        after, out = apply_action(before, "Alpha", ACTIONS[key])
        assert out.error == err, (room, rem, key)
        assert _summary(after) == (room2, rem2), (room, rem, key)
        assert out.score_delta == delta and after.score == before.score + delta
        if err is not None:
            assert after is before


@pytest.mark.parametrize("mode,table", [("guarded", GUARDED), ("explosive", EXPLOSIVE)])
def test_legal_actions_match_table(mode, table):
    for room in (1, 2):
        for rem in ("RG", "G", "", "X"):
            state = _state(mode, room, rem)
            legal = set(legal_actions(state, "Alpha"))
            expected = {ACTIONS[k] for (r, m, k), row in table.items() if (r, m) == (room, rem) and row[0] is None}
            assert legal == expected, (room, rem)


def test_guarded_offers_no_apply_for_unheld_head():
    # Alpha holds red+green; a blue-headed bomb offers no Apply at all
    state = new_world(two_room(sequence=(BLUE, RED)))
    state, _ = apply_action(state, "Alpha", Move(2))
    assert not [a for a in legal_actions(state, "Alpha") if isinstance(a, Apply)]


def test_inspect_reveals_all_live_bombs_to_actor_only():
    cfg = paper_config()
    cfg = dataclasses.replace(cfg, bombs=cfg.bombs + (dataclasses.replace(cfg.bombs[1], id=6, room=0),))
    state = new_world(cfg)
    state, out = apply_action(state, "Bravo", Inspect())
    assert [e.bomb for e in out.effects if isinstance(e, SequenceRevealed)] == [1, 6]
    assert state.known_sequence("Bravo", 6) == (BLUE,)
    assert state.known_sequence("Alpha", 6) is None


def test_apply_targets_lowest_id_matching_bomb():
    cfg = paper_config()
    cfg = dataclasses.replace(cfg, bombs=cfg.bombs + (dataclasses.replace(cfg.bombs[0], id=7),))
    state, out = apply_action(new_world(cfg), "Alpha", Apply(RED))
    assert out.target == 1 and out.effects == (PhaseCut(1, RED), BombDefused(1, 10))
    assert state.bomb(7).live


def test_cut_twice_is_wrong_sequence_when_guarded():
    state = _state("guarded", 2, "RG")
    state, first = apply_action(state, "Alpha", Apply(RED))
    again, second = apply_action(state, "Alpha", Apply(RED))
    assert first.ok and second.error is ErrorKind.WRONG_SEQUENCE and again is state


def test_explosion_is_permanent_and_scores_nothing():
    state = _state("explosive", 2, "RG")
    state, out = apply_action(state, "Alpha", Apply(GREEN))
    assert out.effects == (BombExploded(1),) and state.score == 0
    assert state.bombs[0].state is BombStatus.EXPLODED
    for action in action_space(state.config):
        after, _ = apply_action(state, "Alpha", action)
        assert after.bombs == state.bombs


def test_messages_are_delivered_next_round():
    state = new_world(paper_config())
    turns = [Turn("Alpha", Inspect(), "hello"), Turn("Bravo", Inspect()), Turn("Charlie", Inspect())]
    state, result = step_round(state, turns)
    assert [m.text for m in result.messages] == ["hello"]
    assert [m.text for m in state.inbox] == ["hello"] and state.pending == ()


def test_round_stops_once_everything_is_resolved():
    state = new_world(two_room(sequence=(RED,)))
    state, _ = apply_action(state, "Alpha", Move(2))
    state, result = step_round(state, [Turn("Alpha", Apply(RED))])
    assert result.status is Status.ALL_DEFUSED and state.score == 10


def test_step_round_requires_every_agent_once():
    state = new_world(paper_config())
    with pytest.raises(ValueError):
        step_round(state, [Turn("Alpha", Inspect())])


def test_deadlock_after_identical_rounds():
    state = new_world(paper_config())
    turns = [Turn(a, Move(3)) for a in ("Alpha", "Bravo", "Charlie")]
    back = [Turn(a, Inspect()) for a in ("Alpha", "Bravo", "Charlie")]
    state, result = step_round(state, turns)
    assert result.status is Status.RUNNING
    for expected in (Status.RUNNING, Status.RUNNING, Status.DEADLOCK):
        state, result = step_round(state, back)
        assert result.status is expected


def test_time_limit():
    state = new_world(paper_config(round_limit=2))
    for rnd in (1, 2):
        turns = [Turn(a, Move(3) if rnd % 2 else Move(0)) for a in ("Alpha", "Bravo", "Charlie")]
        state, result = step_round(state, turns)
    assert result.status is Status.TIME_LIMIT
    assert check_termination(state) is Status.TIME_LIMIT


def test_paper_config_score_and_json_round_trip():
    cfg = paper_config()
    assert cfg.max_score == 90 and cfg.n_rooms == 5
    assert WorldConfig.from_json(cfg.to_json()) == cfg


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(edges=[[0, 99]]),
    lambda d: d.update(edges=[[0, 3]]),
    lambda d: d["bombs"].append(dict(d["bombs"][0])),
    lambda d: d["agents"][0].update(tools=["mauve"]),
    lambda d: d.update(apply_mode="sometimes"),
])
def test_invalid_configs_are_rejected(mutate):
    data = paper_config().to_json()
    mutate(data)
    with pytest.raises(ConfigError):
        WorldConfig.from_json(data)


@settings(max_examples=60, deadline=None)
@given(paper_scale_worlds, st.lists(st.integers(0, 10_000), min_size=1, max_size=40))
def test_engine_invariants_under_random_play(cfg, picks):
    state = new_world(cfg)
    names = cfg.agent_names
    defused_points = 0
    for i, pick in enumerate(picks):
        agent = names[i % len(names)]
        legal = legal_actions(state, agent)
        space = action_space(cfg)
        action = legal[pick % len(legal)] if pick % 3 else space[pick % len(space)]
        before = state
        state, out = apply_action(state, agent, action)
        assert out.ok == (action in legal)
        for old, new in zip(before.bombs, state.bombs):
            assert new.full_sequence[len(new.full_sequence) - len(new.remaining):] == new.remaining
            if old.exploded or not old.live:
                assert new == old
        defused_points += sum(e.points for e in out.effects if isinstance(e, BombDefused))
        assert state.score == defused_points
    assert cfg.apply_mode in (ApplyMode.GUARDED, ApplyMode.EXPLOSIVE)
