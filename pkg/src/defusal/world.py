"""Ground-truth game engine for the cooperative bomb-defusal task.

States are immutable; every operation returns a new :class:`WorldState`.
Colors are small integers ``0..n_colors-1``; :attr:`WorldConfig.color_names`
maps them to words for the text layer.
"""

from __future__ import annotations

import dataclasses
import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

DEFAULT_COLOR_NAMES = ("red", "green", "blue")
POINTS_PER_PHASE = 10


class ConfigError(ValueError):
    """Raised for a world configuration that violates its invariants."""


class ApplyMode(str, enum.Enum):
    GUARDED = "guarded"
    EXPLOSIVE = "explosive"


class ErrorKind(str, enum.Enum):
    NOT_ADJACENT = "not_adjacent"
    NO_BOMB = "no_bomb"
    NOTHING_TO_DEFUSE = "nothing_to_defuse"
    WRONG_SEQUENCE = "wrong_sequence"
    MISSING_TOOL = "missing_tool"
    UNPARSEABLE = "unparseable"


class Status(str, enum.Enum):
    RUNNING = "running"
    ALL_DEFUSED = "all_defused"
    TIME_LIMIT = "time_limit"
    DEADLOCK = "deadlock"


# --- actions ---------------------------------------------------------------


@dataclass(frozen=True)
class Move:
    room: int


@dataclass(frozen=True)
class Inspect:
    pass


@dataclass(frozen=True)
class Apply:
    color: int


@dataclass(frozen=True)
class Invalid:
    reason: str = "no_action"


Action = Union[Move, Inspect, Apply, Invalid]


# --- effects ---------------------------------------------------------------


@dataclass(frozen=True)
class MovedTo:
    room: int


@dataclass(frozen=True)
class SequenceRevealed:
    bomb: int
    sequence: tuple[int, ...]


@dataclass(frozen=True)
class PhaseCut:
    bomb: int
    color: int


@dataclass(frozen=True)
class BombDefused:
    bomb: int
    points: int


@dataclass(frozen=True)
class BombExploded:
    bomb: int


Effect = Union[MovedTo, SequenceRevealed, PhaseCut, BombDefused, BombExploded]


# --- configuration ---------------------------------------------------------


@dataclass(frozen=True)
class BombSpec:
    id: int
    room: int
    sequence: tuple[int, ...]


@dataclass(frozen=True)
class AgentSpec:
    name: str
    start: int
    tools: frozenset[int]


@dataclass(frozen=True)
class WorldConfig:
    rooms: tuple[int, ...]
    edges: frozenset[tuple[int, int]]
    bombs: tuple[BombSpec, ...]
    agents: tuple[AgentSpec, ...]
    n_colors: int = 3
    color_names: tuple[str, ...] = DEFAULT_COLOR_NAMES
    round_limit: int = 30
    deadlock_window: int = 3
    apply_mode: ApplyMode = ApplyMode.GUARDED
    seed: int = 0

    @classmethod
    def build(
        cls,
        rooms: Iterable[int],
        edges: Iterable[tuple[int, int]],
        bombs: Iterable[BombSpec],
        agents: Iterable[AgentSpec],
        **kwargs,
    ) -> "WorldConfig":
        """Normalise loose inputs (lists, unordered pairs) and validate."""
        norm_edges = frozenset((min(a, b), max(a, b)) for a, b in edges)
        kwargs.setdefault("apply_mode", ApplyMode.GUARDED)
        try:
            kwargs["apply_mode"] = ApplyMode(kwargs["apply_mode"])
        except ValueError:
            raise ConfigError(f"unknown apply mode {kwargs['apply_mode']!r}") from None
        if "color_names" in kwargs:
            kwargs["color_names"] = tuple(kwargs["color_names"])
        cfg = cls(
            rooms=tuple(rooms),
            edges=norm_edges,
            bombs=tuple(bombs),
            agents=tuple(agents),
            **kwargs,
        )
        cfg.validate()
        return cfg

    def to_json(self) -> dict:
        names = self.color_names
        return {
            "rooms": list(self.rooms),
            "edges": [list(e) for e in sorted(self.edges)],
            "bombs": [
                {"id": b.id, "room": b.room, "sequence": [names[c] for c in b.sequence]} for b in self.bombs
            ],
            "agents": [
                {"name": a.name, "start": a.start, "tools": [names[c] for c in sorted(a.tools)]}
                for a in self.agents
            ],
            "n_colors": self.n_colors,
            "color_names": list(names),
            "round_limit": self.round_limit,
            "deadlock_window": self.deadlock_window,
            "apply_mode": self.apply_mode.value,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, data: dict) -> "WorldConfig":
        """Inverse of :meth:`to_json`; colours may be given as names or indices."""
        extra = {k: data[k] for k in ("n_colors", "color_names", "round_limit", "deadlock_window",
                                      "apply_mode", "seed") if k in data}
        names = tuple(extra.get("color_names", DEFAULT_COLOR_NAMES))
        if "n_colors" not in extra:
            extra["n_colors"] = len(names)
        index = {n.lower(): i for i, n in enumerate(names)}

        def color(c) -> int:
            if isinstance(c, int):
                return c
            try:
                return index[str(c).lower()]
            except KeyError:
                raise ConfigError(f"unknown colour {c!r}") from None

        try:
            bombs = [BombSpec(int(b["id"]), int(b["room"]), tuple(color(c) for c in b["sequence"]))
                     for b in data["bombs"]]
            agents = [AgentSpec(a["name"], int(a["start"]), frozenset(color(c) for c in a["tools"]))
                      for a in data["agents"]]
            return cls.build(data["rooms"], [tuple(e) for e in data["edges"]], bombs, agents, **extra)
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed world config: {exc!r}") from None

    @property
    def n_rooms(self) -> int:
        return len(self.rooms)

    @property
    def agent_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.agents)

    @property
    def max_score(self) -> int:
        return sum(POINTS_PER_PHASE * len(b.sequence) for b in self.bombs)

    def neighbors(self, room: int) -> tuple[int, ...]:
        return self._adjacency().get(room, ())

    def _adjacency(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, set[int]] = {r: set() for r in self.rooms}
        for a, b in self.edges:
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
        return {r: tuple(sorted(n)) for r, n in adj.items()}

    def distances(self, source: int) -> dict[int, int]:
        """BFS hop counts from ``source`` to every reachable room."""
        adj = self._adjacency()
        dist = {source: 0}
        queue = deque([source])
        while queue:
            r = queue.popleft()
            for n in adj[r]:
                if n not in dist:
                    dist[n] = dist[r] + 1
                    queue.append(n)
        return dist

    def agent_index(self, name: str) -> int:
        for i, a in enumerate(self.agents):
            if a.name == name:
                return i
        raise KeyError(f"unknown agent {name!r}")

    def color_name(self, color: int) -> str:
        return self.color_names[color]

    def validate(self) -> None:
        rooms = set(self.rooms)
        if not rooms:
            raise ConfigError("at least one room is required")
        if len(rooms) != len(self.rooms):
            raise ConfigError("duplicate room ids")
        for a, b in self.edges:
            if a not in rooms or b not in rooms:
                raise ConfigError(f"edge ({a}, {b}) references an unlisted room")
            if a == b:
                raise ConfigError(f"self-loop on room {a}")
        if len(self.distances(self.rooms[0])) != len(rooms):
            raise ConfigError("room graph is not connected")
        if self.n_colors < 1:
            raise ConfigError("n_colors must be positive")
        if len(self.color_names) < self.n_colors:
            raise ConfigError("color_names must name every color")
        ids = [b.id for b in self.bombs]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate bomb ids")
        for b in self.bombs:
            if b.room not in rooms:
                raise ConfigError(f"bomb {b.id} is in unlisted room {b.room}")
            if not b.sequence:
                raise ConfigError(f"bomb {b.id} has an empty sequence")
            if any(not 0 <= c < self.n_colors for c in b.sequence):
                raise ConfigError(f"bomb {b.id} uses a color outside 0..{self.n_colors - 1}")
        if not self.agents:
            raise ConfigError("at least one agent is required")
        names = [a.name for a in self.agents]
        if len(set(names)) != len(names):
            raise ConfigError("duplicate agent names")
        for a in self.agents:
            if a.start not in rooms:
                raise ConfigError(f"agent {a.name} starts in unlisted room {a.start}")
            if not a.tools:
                raise ConfigError(f"agent {a.name} has no tools")
            if any(not 0 <= c < self.n_colors for c in a.tools):
                raise ConfigError(f"agent {a.name} holds a color outside 0..{self.n_colors - 1}")
        if self.round_limit < 1:
            raise ConfigError("round_limit must be at least 1")
        if self.deadlock_window < 1:
            raise ConfigError("deadlock_window must be at least 1")


def action_space(config: WorldConfig) -> list[Action]:
    """All n + m + 1 action variants, independent of state."""
    return (
        [Move(r) for r in config.rooms]
        + [Inspect()]
        + [Apply(c) for c in range(config.n_colors)]
    )


# --- state -----------------------------------------------------------------


class BombStatus(str, enum.Enum):
    INTACT = "intact"
    PARTIALLY_CUT = "partially_cut"
    DEFUSED = "defused"
    EXPLODED = "exploded"


@dataclass(frozen=True)
class Bomb:
    id: int
    location: int
    full_sequence: tuple[int, ...]
    remaining: tuple[int, ...]
    exploded: bool = False

    @property
    def state(self) -> BombStatus:
        if self.exploded:
            return BombStatus.EXPLODED
        if not self.remaining:
            return BombStatus.DEFUSED
        if len(self.remaining) < len(self.full_sequence):
            return BombStatus.PARTIALLY_CUT
        return BombStatus.INTACT

    @property
    def live(self) -> bool:
        return not self.exploded and bool(self.remaining)

    @property
    def points(self) -> int:
        return POINTS_PER_PHASE * len(self.full_sequence)


@dataclass(frozen=True)
class AgentState:
    name: str
    location: int
    tools: frozenset[int]


@dataclass(frozen=True)
class Message:
    sender: str
    round: int
    text: str
    claims: tuple = ()


@dataclass(frozen=True)
class Turn:
    agent: str
    action: Action
    message: str = ""
    claims: tuple = ()


@dataclass(frozen=True)
class ActionOutcome:
    agent: str
    action: Action
    error: ErrorKind | None
    effects: tuple[Effect, ...] = ()
    score_delta: int = 0
    room: int = 0
    target: int | None = None
    sequence: tuple[int, ...] | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class RoundResult:
    round: int
    outcomes: tuple[ActionOutcome, ...]
    messages: tuple[Message, ...]
    status: Status


@dataclass(frozen=True)
class WorldState:
    config: WorldConfig
    round: int
    score: int
    bombs: tuple[Bomb, ...]
    agents: tuple[AgentState, ...]
    pending: tuple[Message, ...] = ()
    inbox: tuple[Message, ...] = ()
    # (agent index, bomb id) -> sequence as last seen by that agent
    intel: tuple[tuple[tuple[int, int], tuple[int, ...]], ...] = ()
    round_turns: tuple[tuple[str, Action, str], ...] = ()
    signatures: tuple[tuple[tuple[str, Action, str], ...], ...] = field(default=())

    def agent(self, name: str) -> AgentState:
        return self.agents[self.config.agent_index(name)]

    def bomb(self, bomb_id: int) -> Bomb:
        for b in self.bombs:
            if b.id == bomb_id:
                return b
        raise KeyError(f"unknown bomb {bomb_id}")

    def live_bombs_in(self, room: int) -> list[Bomb]:
        return [b for b in self.bombs if b.location == room and b.live]

    def locations(self) -> dict[str, int]:
        return {a.name: a.location for a in self.agents}

    def known_sequence(self, agent: str, bomb_id: int) -> tuple[int, ...] | None:
        idx = self.config.agent_index(agent)
        for key, seq in self.intel:
            if key == (idx, bomb_id):
                return seq
        return None

    @property
    def resolved(self) -> bool:
        return all(not b.live for b in self.bombs)


def new_world(config: WorldConfig) -> WorldState:
    config.validate()
    bombs = tuple(
        Bomb(id=b.id, location=b.room, full_sequence=tuple(b.sequence), remaining=tuple(b.sequence))
        for b in config.bombs
    )
    agents = tuple(AgentState(a.name, a.start, frozenset(a.tools)) for a in config.agents)
    return WorldState(config=config, round=1, score=0, bombs=bombs, agents=agents)


def _target_bomb(bombs: Sequence[Bomb], color: int) -> Bomb | None:
    """Lowest-id live bomb whose next phase is ``color``."""
    for b in bombs:
        if b.remaining[0] == color:
            return b
    return None


def legal_actions(state: WorldState, agent: str) -> list[Action]:
    me = state.agent(agent)
    actions: list[Action] = [Move(r) for r in state.config.neighbors(me.location)]
    here = state.live_bombs_in(me.location)
    if here:
        actions.append(Inspect())
    for c in sorted(me.tools):
        if not here:
            break
        if state.config.apply_mode is ApplyMode.EXPLOSIVE or _target_bomb(here, c) is not None:
            actions.append(Apply(c))
    return actions


def _set_intel(state: WorldState, agent_idx: int, bomb_id: int, seq: tuple[int, ...]):
    kept = tuple((k, s) for k, s in state.intel if k != (agent_idx, bomb_id))
    return tuple(sorted(kept + (((agent_idx, bomb_id), seq),)))


def _replace_bomb(bombs: tuple[Bomb, ...], new: Bomb) -> tuple[Bomb, ...]:
    return tuple(new if b.id == new.id else b for b in bombs)


def apply_action(state: WorldState, agent: str, action: Action) -> tuple[WorldState, ActionOutcome]:
    """Execute one agent's action against ``state``.

    Rule violations come back as an outcome with ``error`` set and leave the
    state untouched; this function never raises on an action variant.
    """
    idx = state.config.agent_index(agent)
    me = state.agents[idx]
    room = me.location

    def reject(kind: ErrorKind, target=None, sequence=None):
        return state, ActionOutcome(agent, action, kind, room=room, target=target, sequence=sequence)

    if isinstance(action, Move):
        if action.room not in state.config.neighbors(room):
            return reject(ErrorKind.NOT_ADJACENT, target=action.room)
        agents = tuple(
            dataclasses.replace(a, location=action.room) if i == idx else a
            for i, a in enumerate(state.agents)
        )
        new = dataclasses.replace(state, agents=agents)
        return new, ActionOutcome(agent, action, None, (MovedTo(action.room),), room=room, target=action.room)

    if isinstance(action, Inspect):
        here = state.live_bombs_in(room)
        if not here:
            return reject(ErrorKind.NO_BOMB)
        intel = state.intel
        effects = []
        for b in here:
            effects.append(SequenceRevealed(b.id, b.remaining))
            intel = _set_intel(dataclasses.replace(state, intel=intel), idx, b.id, b.remaining)
        new = dataclasses.replace(state, intel=intel)
        return new, ActionOutcome(agent, action, None, tuple(effects), room=room, target=here[0].id)

    if isinstance(action, Apply):
        if action.color not in me.tools:
            return reject(ErrorKind.MISSING_TOOL, target=action.color)
        here = state.live_bombs_in(room)
        if not here:
            return reject(ErrorKind.NOTHING_TO_DEFUSE, target=action.color)
        bomb = _target_bomb(here, action.color)
        if bomb is None:
            victim = here[0]
            if state.config.apply_mode is ApplyMode.GUARDED:
                return reject(ErrorKind.WRONG_SEQUENCE, target=victim.id, sequence=victim.remaining)
            bombs = _replace_bomb(state.bombs, dataclasses.replace(victim, exploded=True))
            new = dataclasses.replace(state, bombs=bombs)
            return new, ActionOutcome(
                agent, action, None, (BombExploded(victim.id),), room=room, target=victim.id
            )
        cut = dataclasses.replace(bomb, remaining=bomb.remaining[1:])
        effects: list[Effect] = [PhaseCut(bomb.id, action.color)]
        delta = 0
        if not cut.remaining:
            delta = cut.points
            effects.append(BombDefused(bomb.id, delta))
        intel = state.intel
        if state.known_sequence(agent, bomb.id) is not None:
            intel = _set_intel(state, idx, bomb.id, cut.remaining)
        new = dataclasses.replace(
            state, bombs=_replace_bomb(state.bombs, cut), score=state.score + delta, intel=intel
        )
        return new, ActionOutcome(agent, action, None, tuple(effects), delta, room=room, target=bomb.id)

    return reject(ErrorKind.UNPARSEABLE)


def apply_turn(state: WorldState, turn: Turn) -> tuple[WorldState, ActionOutcome]:
    """Apply one turn and buffer its message for delivery next round."""
    new, outcome = apply_action(state, turn.agent, turn.action)
    pending = new.pending
    if turn.message or turn.claims:
        pending = pending + (Message(turn.agent, state.round, turn.message, tuple(turn.claims)),)
    signature = new.round_turns + ((turn.agent, turn.action, turn.message),)
    return dataclasses.replace(new, pending=pending, round_turns=signature), outcome


def end_round(state: WorldState) -> WorldState:
    window = state.config.deadlock_window
    signatures = (state.signatures + (state.round_turns,))[-window:]
    return dataclasses.replace(
        state,
        round=state.round + 1,
        inbox=state.pending,
        pending=(),
        round_turns=(),
        signatures=signatures,
    )


def step_round(state: WorldState, turns: Sequence[Turn]) -> tuple[WorldState, RoundResult]:
    """Apply ``turns`` sequentially, then close the round.

    Once every bomb is resolved mid-round the remaining turns are skipped.
    """
    names = [t.agent for t in turns]
    if sorted(names) != sorted(state.config.agent_names) or len(set(names)) != len(names):
        raise ValueError("turns must list every agent exactly once")
    order = {n: i for i, n in enumerate(state.config.agent_names)}
    outcomes = []
    messages = []
    played = state.round
    for turn in sorted(turns, key=lambda t: order[t.agent]):
        if state.resolved and state.bombs:
            break
        state, outcome = apply_turn(state, turn)
        outcomes.append(outcome)
        if turn.message or turn.claims:
            messages.append(state.pending[-1])
    state = end_round(state)
    return state, RoundResult(played, tuple(outcomes), tuple(messages), check_termination(state))


def check_termination(state: WorldState) -> Status:
    if state.resolved:
        return Status.ALL_DEFUSED
    window = state.config.deadlock_window
    sigs = state.signatures
    if len(sigs) >= window and all(s == sigs[-1] for s in sigs[-window:]) and sigs[-1]:
        return Status.DEADLOCK
    if state.round > state.config.round_limit:
        return Status.TIME_LIMIT
    return Status.RUNNING


def paper_config(**overrides) -> WorldConfig:
    """The five-room reference map with a 1,1,2,2,3 bomb set (max score 90).

    Room layout and tool allocation follow the published task prompt; bomb
    placement and sequences beyond bomb 1 (room 0, red) and bomb 3 (room 5)
    are fixed choices of this package.
    """
    red, green, blue = 0, 1, 2
    kwargs = dict(
        rooms=(0, 3, 5, 6, 8),
        edges=[(0, 3), (0, 5), (0, 6), (0, 8), (5, 6), (3, 8), (8, 6)],
        bombs=[
            BombSpec(1, 0, (red,)),
            BombSpec(2, 3, (blue,)),
            BombSpec(3, 5, (red, green, blue)),
            BombSpec(4, 6, (green, blue)),
            BombSpec(5, 8, (blue, red)),
        ],
        agents=[
            AgentSpec("Alpha", 0, frozenset({red, green})),
            AgentSpec("Bravo", 0, frozenset({green, blue})),
            AgentSpec("Charlie", 0, frozenset({blue, red})),
        ],
    )
    kwargs.update(overrides)
    return WorldConfig.build(**kwargs)
