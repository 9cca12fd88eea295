"""Who-knows-what tracking and automatic grading of belief-reasoning questions.

The log is append-only. Knowledge atoms are a pure function of the world
config plus the event list, so :func:`derive` can rebuild any log from
scratch. Facts that can go stale (room contents, remaining bomb sequences)
are versioned: knowing an old version does not count as knowing the current
one.

Derivation rules
----------------
R1  the actor learns every effect of its own action (inspect results, cuts).
R2  agents sharing a room witness public changes there: arrivals, bombs
    disappearing after a defusal or explosion. Witnesses gain common
    knowledge of the change among themselves.
R2' locations are public, so an agent seeing a teammate in room r knows the
    teammate knows r's current contents.
R3  an agent observing room r knows the contents version it saw; the atom
    goes stale (not false) when the contents change later.
R4  a true structured claim broadcast to the team becomes common knowledge
    among all agents on delivery; R5/R6 are the lifted atoms produced by the
    common-knowledge grants of R2 and R4.
R7  questions about an agent's knowledge of a room it announced it would
    enter but never reached are graded ambiguous rather than no.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .textio import fill, load_templates
from .world import (
    ActionOutcome,
    BombDefused,
    BombExploded,
    Message,
    MovedTo,
    PhaseCut,
    SequenceRevealed,
    WorldConfig,
)


class Answer(str, enum.Enum):
    YES = "yes"
    NO = "no"
    AMBIGUOUS = "ambiguous"


class Level(str, enum.Enum):
    INTROSPECTION = "introspection"
    FIRST_ORDER = "first_order"
    SECOND_ORDER = "second_order"


class Channel(str, enum.Enum):
    DIRECT = "direct_observation"
    CO_LOCATION = "co_location"
    COMMUNICATION = "communication"
    ASSUMPTION = "assumption"


# --- propositions ----------------------------------------------------------


@dataclass(frozen=True)
class RoomContents:
    room: int


@dataclass(frozen=True)
class BombSequence:
    bomb: int


@dataclass(frozen=True)
class BombStateChanged:
    bomb: int
    round: int


@dataclass(frozen=True)
class PhaseDefused:
    round: int
    bomb: int


Proposition = Union[RoomContents, BombSequence, BombStateChanged, PhaseDefused]

# tokens: ("contents", room, version) | ("sequence", bomb, version)
#         | ("changed", bomb, round) | ("phase", round, bomb) | ("located", bomb, room)
Token = tuple


@dataclass(frozen=True)
class Claim:
    """Machine-readable fact or intent attached to a chat message."""

    kind: str
    room: int | None = None
    bomb: int | None = None
    bombs: tuple[int, ...] | None = None
    sequence: tuple[int, ...] | None = None
    round: int | None = None

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        for key in ("room", "bomb", "bombs", "sequence", "round"):
            val = getattr(self, key)
            if val is not None:
                out[key] = list(val) if isinstance(val, tuple) else val
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "Claim":
        kw = dict(data)
        for key in ("bombs", "sequence"):
            if kw.get(key) is not None:
                kw[key] = tuple(kw[key])
        return cls(**kw)


# --- events ----------------------------------------------------------------


@dataclass(frozen=True)
class Observe:
    round: int
    agent: str
    room: int
    locations: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class Act:
    round: int
    outcome: ActionOutcome
    locations: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class Send:
    round: int
    message: Message


@dataclass(frozen=True)
class Deliver:
    round: int
    messages: tuple[Message, ...]


Event = Union[Observe, Act, Send, Deliver]


@dataclass(frozen=True)
class KnowledgeAtom:
    chain: tuple[str, ...]
    token: Token
    established_at: int
    event_index: int
    channel: Channel
    rule: str

    @property
    def order(self) -> int:
        return len(self.chain) - 1


@dataclass
class _Truth:
    bomb_room: dict[int, int]
    remaining: dict[int, tuple[int, ...]]
    live: dict[int, bool]
    contents_version: dict[int, int]
    sequence_version: dict[int, int]
    locations: dict[str, int]
    created: dict[Token, int] = field(default_factory=dict)

    def contents(self, room: int) -> tuple[int, ...]:
        return tuple(sorted(b for b, r in self.bomb_room.items() if r == room and self.live[b]))


@dataclass
class _SendRecord:
    index: int
    message: Message
    tokens: tuple[Token, ...]
    free_text: bool
    sender_known: frozenset[Token]
    delivered_at: int | None = None


@dataclass
class _Intent:
    agent: str
    room: int
    index: int
    status: str = "pending"  # pending | fulfilled | failed


class EpistemicLog:
    """Append-only event history with incrementally derived knowledge atoms."""

    def __init__(self, config: WorldConfig):
        self.config = config
        self.agents = config.agent_names
        self.events: list[Event] = []
        self.atoms: dict[tuple[tuple[str, ...], Token], KnowledgeAtom] = {}
        self.truth = _Truth(
            bomb_room={b.id: b.room for b in config.bombs},
            remaining={b.id: tuple(b.sequence) for b in config.bombs},
            live={b.id: True for b in config.bombs},
            contents_version={r: 0 for r in config.rooms},
            sequence_version={b.id: 0 for b in config.bombs},
            locations={a.name: a.start for a in config.agents},
        )
        self.sends: list[_SendRecord] = []
        self.intents: list[_Intent] = []
        self._last_act: dict[str, tuple[int, ActionOutcome]] = {}
        self._round = 1
        for room in sorted({a.start for a in config.agents}):
            group = [a.name for a in config.agents if a.start == room]
            self._common(group, self._contents_token(room), 1, -1, "R3", observer=None)

    # -- helpers --

    def _contents_token(self, room: int) -> Token:
        return ("contents", room, self.truth.contents_version[room])

    def _sequence_token(self, bomb: int) -> Token:
        return ("sequence", bomb, self.truth.sequence_version[bomb])

    def _grant(self, chain, token, rnd, idx, channel, rule) -> None:
        key = (tuple(chain), token)
        if key not in self.atoms:
            self.atoms[key] = KnowledgeAtom(tuple(chain), token, rnd, idx, channel, rule)

    def _common(self, group, token, rnd, idx, rule, observer, channel=None) -> None:
        """Common knowledge of ``token`` among ``group`` up to depth 3."""
        group = sorted(set(group), key=self.agents.index)
        for depth in (1, 2, 3):
            for chain in itertools.product(group, repeat=depth):
                if any(chain[i] == chain[i + 1] for i in range(depth - 1)):
                    continue
                if channel is not None:
                    ch = channel
                elif depth == 1 and chain[0] == observer:
                    ch = Channel.DIRECT
                else:
                    ch = Channel.CO_LOCATION
                self._grant(chain, token, rnd, idx, ch, rule)

    def _present(self, locations: Mapping[str, int], room: int) -> list[str]:
        return [a for a in self.agents if locations.get(a) == room]

    def holds(self, chain: Sequence[str], token: Token) -> bool:
        return (tuple(chain), token) in self.atoms

    def known_tokens(self, agent: str) -> frozenset[Token]:
        return frozenset(tok for (chain, tok) in self.atoms if chain == (agent,))

    @property
    def round(self) -> int:
        return self._round

    # -- propagation --

    def propagate(self, event: Event) -> "EpistemicLog":
        if event.round < self._round:
            raise ValueError(f"out-of-order event: round {event.round} after round {self._round}")
        self._round = event.round
        idx = len(self.events)
        self.events.append(event)
        if isinstance(event, Observe):
            self._on_observe(event, idx)
        elif isinstance(event, Act):
            self._on_act(event, idx)
        elif isinstance(event, Send):
            self._on_send(event, idx)
        elif isinstance(event, Deliver):
            self._on_deliver(event, idx)
        else:
            raise TypeError(f"unknown event {event!r}")
        return self

    def _on_observe(self, ev: Observe, idx: int) -> None:
        locs = dict(ev.locations)
        self.truth.locations.update(locs)
        group = self._present(locs, ev.room)
        if ev.agent not in group:
            group.append(ev.agent)
        self._common(group, self._contents_token(ev.room), ev.round, idx, "R3", observer=ev.agent)
        for other, room in ev.locations:
            if other == ev.agent:
                continue
            tok = self._contents_token(room)
            self._grant((ev.agent, other), tok, ev.round, idx, Channel.ASSUMPTION, "R2'")
            self._grant((other, ev.agent, other), tok, ev.round, idx, Channel.ASSUMPTION, "R2'")

    def _on_act(self, ev: Act, idx: int) -> None:
        out = ev.outcome
        actor = out.agent
        rnd = ev.round
        t = self.truth
        locs = dict(ev.locations)
        self._resolve_intents(actor, out, idx)
        self._last_act[actor] = (rnd, out)
        for eff in out.effects:
            if isinstance(eff, MovedTo):
                t.locations[actor] = eff.room
                locs[actor] = eff.room
                group = self._present(locs, eff.room)
                self._common(group, self._contents_token(eff.room), rnd, idx, "R2", observer=actor)
            elif isinstance(eff, SequenceRevealed):
                self._grant((actor,), self._sequence_token(eff.bomb), rnd, idx, Channel.DIRECT, "R1")
            elif isinstance(eff, PhaseCut):
                knew = self.holds((actor,), self._sequence_token(eff.bomb))
                t.remaining[eff.bomb] = t.remaining[eff.bomb][1:]
                t.sequence_version[eff.bomb] += 1
                changed = ("changed", eff.bomb, rnd)
                phase = ("phase", rnd, eff.bomb)
                for tok in (changed, phase):
                    t.created.setdefault(tok, idx)
                    self._grant((actor,), tok, rnd, idx, Channel.DIRECT, "R1")
                if knew:
                    self._grant((actor,), self._sequence_token(eff.bomb), rnd, idx, Channel.DIRECT, "R1")
            elif isinstance(eff, (BombDefused, BombExploded)):
                room = t.bomb_room[eff.bomb]
                t.live[eff.bomb] = False
                t.contents_version[room] += 1
                changed = ("changed", eff.bomb, rnd)
                t.created.setdefault(changed, idx)
                witnessed = [changed, self._contents_token(room)]
                if isinstance(eff, BombDefused):
                    witnessed.append(("phase", rnd, eff.bomb))
                    witnessed.append(self._sequence_token(eff.bomb))
                else:
                    t.sequence_version[eff.bomb] += 1
                group = self._present(locs, room)
                for tok in witnessed:
                    self._common(group, tok, rnd, idx, "R2", observer=actor)

    def _claim_token(self, claim: Claim) -> Token | None:
        t = self.truth
        if claim.kind == "contents" and claim.room in t.contents_version:
            if tuple(sorted(claim.bombs or ())) == t.contents(claim.room):
                return self._contents_token(claim.room)
        elif claim.kind == "sequence" and claim.bomb in t.remaining:
            if t.live[claim.bomb] and tuple(claim.sequence or ()) == t.remaining[claim.bomb]:
                return self._sequence_token(claim.bomb)
        elif claim.kind == "located" and claim.bomb in t.bomb_room:
            if t.bomb_room[claim.bomb] == claim.room:
                return ("located", claim.bomb, claim.room)
        elif claim.kind == "changed":
            tok = ("changed", claim.bomb, claim.round)
            if tok in t.created:
                return tok
        elif claim.kind == "phase":
            tok = ("phase", claim.round, claim.bomb)
            if tok in t.created:
                return tok
        return None

    def _on_send(self, ev: Send, idx: int) -> None:
        msg = ev.message
        tokens = []
        for claim in msg.claims:
            if claim.kind == "intent_move":
                self._register_intent(msg.sender, claim.room, idx)
                continue
            tok = self._claim_token(claim)
            if tok is not None:
                tokens.append(tok)
        free = not msg.claims and bool(msg.text.strip())
        self.sends.append(
            _SendRecord(idx, msg, tuple(tokens), free, self.known_tokens(msg.sender) if free else frozenset())
        )

    def _register_intent(self, agent: str, room: int, idx: int) -> None:
        intent = _Intent(agent, room, idx)
        last = self._last_act.get(agent)
        if self.truth.locations.get(agent) == room:
            intent.status = "fulfilled"
        elif last is not None and last[0] == self._round:
            # announced alongside this turn's action, which did not reach the room
            intent.status = "failed"
        self.intents.append(intent)

    def _resolve_intents(self, actor: str, outcome: ActionOutcome, idx: int) -> None:
        arrived = {e.room for e in outcome.effects if isinstance(e, MovedTo)}
        for intent in self.intents:
            if intent.agent != actor:
                continue
            if intent.room in arrived:
                intent.status = "fulfilled"
            elif intent.status == "pending":
                intent.status = "failed"

    def _on_deliver(self, ev: Deliver, idx: int) -> None:
        pending = [s for s in self.sends if s.delivered_at is None]
        for msg in ev.messages:
            rec = next((s for s in pending if s.message == msg), None)
            if rec is None:
                # delivered without a recorded send: validate against current truth
                self._on_send(Send(ev.round, msg), idx)
                rec = self.sends[-1]
            else:
                pending.remove(rec)
            rec.delivered_at = idx
            for tok in rec.tokens:
                self._common(self.agents, tok, ev.round, idx, "R4", observer=None,
                             channel=Channel.COMMUNICATION)

    # -- queries --

    def resolve(self, prop: Proposition) -> Token:
        if isinstance(prop, RoomContents):
            return self._contents_token(prop.room)
        if isinstance(prop, BombSequence):
            return self._sequence_token(prop.bomb)
        if isinstance(prop, BombStateChanged):
            return ("changed", prop.bomb, prop.round)
        if isinstance(prop, PhaseDefused):
            return ("phase", prop.round, prop.bomb)
        raise TypeError(f"unknown proposition {prop!r}")

    def query(self, chain: Sequence[str], prop: Proposition, stale_policy: str = "no") -> Answer:
        """Grade ``chain[0]`` knows ... ``chain[-1]`` knows ``prop`` at the log's current point.

        ``stale_policy`` decides how an outdated contents/sequence atom grades:
        ``"no"`` (default, current-contents semantics), ``"yes"`` (as-of-visit)
        or ``"ambiguous"``.
        """
        chain = tuple(chain)
        if not 1 <= len(chain) <= 3:
            raise ValueError("chains hold one to three agents")
        token = self.resolve(prop)
        if self.holds(chain, token):
            return Answer.YES
        if token[0] in ("contents", "sequence") and stale_policy != "no":
            older = any(
                c == chain and tok[:2] == token[:2] and tok[2] < token[2] for (c, tok) in self.atoms
            )
            if older:
                return Answer(stale_policy)
        if len(chain) >= 2 and isinstance(prop, RoomContents):
            subject = chain[-1]
            for intent in self.intents:
                if intent.agent == subject and intent.room == prop.room and intent.status == "failed":
                    return Answer.AMBIGUOUS
        for rec in self.sends:
            if not rec.free_text or rec.delivered_at is None:
                continue
            if token in rec.sender_known and (chain[0] != rec.message.sender or len(chain) >= 2):
                return Answer.AMBIGUOUS
        return Answer.NO

    def query_at(self, chain: Sequence[str], prop: Proposition, at: int, stale_policy: str = "no") -> Answer:
        """Query against the prefix of the first ``at`` events."""
        return derive(self.config, self.events[:at]).query(chain, prop, stale_policy)


def derive(config: WorldConfig, events: Iterable[Event]) -> EpistemicLog:
    log = EpistemicLog(config)
    for ev in events:
        log.propagate(ev)
    return log


# --- questions -------------------------------------------------------------


@dataclass
class ToMQuestion:
    id: str
    round: int
    level: Level
    asker: str
    target: str | None
    proposition: Proposition
    text: str
    truth: Answer

    def to_json(self) -> dict:
        prop = self.proposition
        return {
            "id": self.id,
            "round": self.round,
            "level": self.level.value,
            "asker": self.asker,
            "target": self.target,
            "proposition": {"type": type(prop).__name__, **prop.__dict__},
            "text": self.text,
            "truth": self.truth.value,
        }


_PROP_KEY = {
    RoomContents: "contents",
    BombSequence: "sequence",
    BombStateChanged: "changed",
    PhaseDefused: "phase",
}

PROPOSITION_TYPES = {cls.__name__: cls for cls in _PROP_KEY}


def outcome_propositions(outcome: ActionOutcome, rnd: int) -> list[Proposition]:
    props: list[Proposition] = []
    defused = {e.bomb for e in outcome.effects if isinstance(e, BombDefused)}
    for eff in outcome.effects:
        if isinstance(eff, MovedTo):
            props.append(RoomContents(eff.room))
        elif isinstance(eff, SequenceRevealed):
            props.append(BombSequence(eff.bomb))
        elif isinstance(eff, PhaseCut):
            props.append(BombStateChanged(eff.bomb, rnd))
            props.append(PhaseDefused(rnd, eff.bomb))
            if eff.bomb in defused:
                props.append(RoomContents(outcome.room))
        elif isinstance(eff, BombExploded):
            props.append(BombStateChanged(eff.bomb, rnd))
            props.append(RoomContents(outcome.room))
    return list(dict.fromkeys(props))


def generate_questions(
    log: EpistemicLog,
    agent: str,
    outcome: ActionOutcome,
    rnd: int | None = None,
    templates: Mapping | None = None,
    stale_policy: str = "no",
) -> list[ToMQuestion]:
    """Questions about the consequences of ``agent``'s action, graded now.

    Teammate locations are common knowledge and never asked about.
    """
    rnd = log.round if rnd is None else rnd
    tmpl = (templates or load_templates())["tom"]
    teammates = [a for a in log.agents if a != agent]
    questions = []
    n = 0
    for prop in outcome_propositions(outcome, rnd):
        key = _PROP_KEY[type(prop)]
        values = {"room": getattr(prop, "room", ""), "bomb": getattr(prop, "bomb", "")}
        specs = [(Level.INTROSPECTION, None, (agent,))]
        specs += [(Level.FIRST_ORDER, b, (b,)) for b in teammates]
        specs += [(Level.SECOND_ORDER, b, (b, agent)) for b in teammates]
        for level, target, chain in specs:
            text = fill(tmpl[level.value][key], player=target or "", **values)
            truth = log.query(chain, prop, stale_policy)
            questions.append(ToMQuestion(f"r{rnd}.{agent}.{n}", rnd, level, agent, target, prop, text, truth))
            n += 1
    return questions


@dataclass(frozen=True)
class LevelScore:
    correct: int
    total: int
    ambiguous: int

    @property
    def accuracy(self) -> float | None:
        return self.correct / self.total if self.total else None


def grade_answers(
    questions: Sequence[ToMQuestion],
    answers: Sequence[str | bool | None],
    overrides: Mapping[str, str] | None = None,
) -> dict[Level, LevelScore]:
    """Per-level accuracy; ambiguous questions leave the denominator."""
    if len(questions) != len(answers):
        raise ValueError(f"{len(questions)} questions but {len(answers)} answers")
    overrides = overrides or {}
    tally = {lvl: [0, 0, 0] for lvl in Level}
    for q, a in zip(questions, answers):
        truth = Answer(overrides.get(q.id, q.truth))
        row = tally[q.level]
        if truth is Answer.AMBIGUOUS:
            row[2] += 1
            continue
        row[1] += 1
        if normalize_answer(a) == truth:
            row[0] += 1
    return {lvl: LevelScore(*vals) for lvl, vals in tally.items()}


def normalize_answer(answer: str | bool | None) -> Answer | None:
    if answer is None:
        return None
    if isinstance(answer, bool):
        return Answer.YES if answer else Answer.NO
    text = str(answer).strip().lower()
    if text.startswith("yes"):
        return Answer.YES
    if text.startswith("no"):
        return Answer.NO
    return None
