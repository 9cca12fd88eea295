"""Turn-taking policies and the per-agent interaction memory.

Every policy sees the same thing an external agent would: the rendered
:class:`~defusal.textio.ObservationText` plus its own memory. Scripted
policies additionally read the structured fields of the observation (its
menu, bombs, messages with claims) instead of re-parsing the text.
"""

from __future__ import annotations

import json
import os
import queue
import random
import re
import shlex
import socket
import subprocess
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .belief import BeliefDoc, initial_belief, parse_belief, reference_update, render_belief
from .epistemic import BombSequence, BombStateChanged, Claim, Level, PhaseDefused, RoomContents, ToMQuestion
from .textio import ObservationText, format_sequence, parse_reply, render_reply
from .world import DEFAULT_COLOR_NAMES, Action, Apply, ApplyMode, Inspect, Invalid, Move, WorldConfig

PROTOCOL_VERSION = 1
DEFAULT_TIMEOUT = 120.0
TOKEN_CAP = 4096
ENDPOINT_ENV = "DEFUSAL_AGENT_ENDPOINT"


def estimate_tokens(text: str) -> int:
    return (len(text) + 3) // 4


@dataclass(frozen=True)
class AgentReply:
    raw: str
    action: Action
    message: str = ""
    belief_text: str | None = None
    latency: float = 0.0
    claims: tuple[Claim, ...] = ()


def reply_from_text(raw: str, names: Sequence[str], belief_text: str | None = None,
                    latency: float = 0.0, claims: tuple = ()) -> AgentReply:
    parsed = parse_reply(raw, names)
    return AgentReply(raw, parsed.action, parsed.message, belief_text, latency, tuple(claims))


# --- memory ----------------------------------------------------------------


@dataclass
class AgentMemory:
    """Static rules prompt, a short rolling history, and an optional belief doc."""

    context: str
    window: int = 2
    token_cap: int = TOKEN_CAP
    history: deque = field(default_factory=deque)
    belief: BeliefDoc | None = None
    belief_text: str | None = None

    def __post_init__(self) -> None:
        if self.window < 0:
            raise ValueError("window must be non-negative")
        if estimate_tokens(self.context) > self.token_cap:
            raise ValueError("static context alone exceeds the token cap")

    @property
    def belief_enabled(self) -> bool:
        return self.belief is not None or self.belief_text is not None

    def belief_block(self) -> str:
        if self.belief_text is not None:
            return self.belief_text
        if self.belief is not None:
            return render_belief(self.belief)
        return ""

    def prompt(self) -> str:
        parts = [self.context]
        if self.belief_enabled:
            parts.append(self.belief_block())
        for obs, reply in self.history:
            parts.append(obs)
            parts.append(reply)
        return "\n\n".join(p for p in parts if p)

    def token_estimate(self) -> int:
        return estimate_tokens(self.prompt())

    def _fit(self) -> None:
        while self.history and self.token_estimate() > self.token_cap:
            self.history.popleft()
        if self.token_estimate() > self.token_cap and self.belief_enabled:
            budget = 4 * (self.token_cap - estimate_tokens(self.context)) - 8
            self.belief_text = self.belief_block()[: max(budget, 0)]


def window_update(memory: AgentMemory, obs: ObservationText | str, reply: AgentReply | str) -> AgentMemory:
    """Append one (observation, reply) pair and evict beyond the window and token cap.

    With a belief doc, the observation is first folded into it: an
    agent-supplied ``belief_text`` replaces the doc, otherwise the reference
    updater advances it.
    """
    obs_text = obs.text if isinstance(obs, ObservationText) else str(obs)
    reply_text = reply.raw if isinstance(reply, AgentReply) else str(reply)
    supplied = reply.belief_text if isinstance(reply, AgentReply) else None
    if supplied is not None:
        memory.belief_text = supplied
        names = memory.belief.color_names if memory.belief is not None else DEFAULT_COLOR_NAMES
        memory.belief = parse_belief(supplied, names)
    elif memory.belief is not None and isinstance(obs, ObservationText):
        memory.belief = reference_update(memory.belief, obs, obs.outcome, obs.messages)
        memory.belief_text = None
    memory.history.append((obs_text, reply_text))
    while len(memory.history) > memory.window:
        memory.history.popleft()
    memory._fit()
    return memory


# --- policies --------------------------------------------------------------


class Policy:
    """Base class; subclasses override :meth:`act` and optionally :meth:`answer`."""

    name = "policy"

    def reset(self, config: WorldConfig, agent: str, seed: int = 0) -> None:
        self.config = config
        self.agent = agent
        self.seed = seed

    def act(self, obs: ObservationText, memory: AgentMemory) -> AgentReply:
        raise NotImplementedError

    def answer(self, question: ToMQuestion) -> str:
        return "no"

    def close(self) -> None:
        pass


def act(policy: Policy, obs: ObservationText, memory: AgentMemory) -> AgentReply:
    return policy.act(obs, memory)


class RandomPolicy(Policy):
    """Uniform choice among the observation's legal action phrases; silent."""

    name = "random"

    def reset(self, config, agent, seed=0):
        super().reset(config, agent, seed)
        self.rng = random.Random(f"random/{agent}/{seed}")

    def act(self, obs, memory):
        if not obs.menu:
            return reply_from_text("Action selection: none.", self.config.color_names)
        phrase = self.rng.choice(list(obs.menu))
        raw = f'Action selection: {phrase}. Message to Team: ""'
        return reply_from_text(raw, self.config.color_names)

    def answer(self, question):
        return self.rng.choice(("yes", "no"))


class ScriptPolicy(Policy):
    """Plays a fixed action list, then idles with a legal action from the menu."""

    name = "script"

    def __init__(self, actions: Sequence[Action] = ()):
        self.actions = list(actions)

    def reset(self, config, agent, seed=0):
        super().reset(config, agent, seed)
        self.turn = 0

    def act(self, obs, memory):
        names = self.config.color_names
        if self.turn < len(self.actions):
            action = self.actions[self.turn]
        elif "Inspect Bomb" in obs.menu:
            action = Inspect()
        elif obs.menu:
            action = parse_reply(obs.menu[0], names).action
        else:
            action = Invalid("no_action")
        self.turn += 1
        if isinstance(action, Invalid):
            return reply_from_text("Action selection: none.", names)
        return reply_from_text(render_reply(action, "", names), names)

    def answer(self, question):
        return "yes" if question.level is Level.INTROSPECTION else "no"


class ReplayPolicy(Policy):
    """Re-emits recorded replies (and recorded ToM answers) verbatim."""

    name = "replay"

    def __init__(self, replies: Sequence[Mapping], answers: Mapping[str, str] | None = None):
        self.replies = list(replies)
        self.answers = dict(answers or {})

    def reset(self, config, agent, seed=0):
        super().reset(config, agent, seed)
        self.turn = 0

    def act(self, obs, memory):
        if self.turn >= len(self.replies):
            raise IndexError(f"replay for {self.agent} ran out of recorded replies")
        rec = self.replies[self.turn]
        self.turn += 1
        claims = tuple(Claim.from_json(c) for c in rec.get("claims", ()))
        return reply_from_text(rec["raw"], self.config.color_names, rec.get("belief_text"), claims=claims)

    def answer(self, question):
        return self.answers.get(question.id, "")


class GreedyPolicy(Policy):
    """Scripted heuristic player that keeps its own reference belief doc.

    Per turn: inspect unknown bombs here; cut a bomb whose head colour it
    holds when its knowledge is fresh and it has priority; otherwise head for
    the nearest useful room (cuttable bomb, uninspected bomb, unexplored
    room). Everything it learns is broadcast as structured claims.

    Cut priority: among co-located holders of a colour, the one earliest in
    turn order cuts. Knowledge is fresh when the agent's previous action was
    an inspect (or a cut of that bomb) in the same room; together with the
    priority rule this means nobody else can have changed that bomb's head.
    """

    name = "greedy"

    def reset(self, config, agent, seed=0):
        super().reset(config, agent, seed)
        self.idx = config.agent_index(agent)
        self.tools = config.agents[self.idx].tools
        self.doc = initial_belief(config, agent)
        self.explored: set[int] = set()
        self.last_action: Action | None = None
        self.last_room: int | None = None
        self.sent_sequences: dict[int, tuple[tuple[int, ...], int]] = {}
        self.view: ObservationText | None = None
        self.pending_room: int | None = None

    # -- helpers --

    def _holders(self, color: int, names: Sequence[str]) -> list[int]:
        return [self.config.agent_index(n) for n in names if color in self.config.agents[self.config.agent_index(n)].tools]

    def _permitted(self, color: int, companions: Sequence[str]) -> bool:
        if color not in self.tools:
            return False
        return not any(i < self.idx for i in self._holders(color, companions))

    def _unchallenged(self, color: int, companions: Sequence[str]) -> bool:
        """No co-located teammate may cut ``color`` ahead of this agent."""
        return not any(i != self.idx for i in self._holders(color, companions)) or self._permitted(color, companions)

    def _fresh_bombs(self, obs: ObservationText) -> set[int]:
        out = obs.outcome
        if out is None or not out.ok or self.last_room != obs.room:
            return set()
        if isinstance(out.action, Inspect):
            return {b for b, _ in obs.bombs_here}
        if isinstance(out.action, Apply) and out.target is not None:
            return {out.target}
        return set()

    def _next_hop(self, here: int, goal: int) -> int:
        dist = self.config.distances(goal)
        return min(n for n in self.config.neighbors(here) if dist[n] == dist[here] - 1)

    def _choose_goal(self, obs: ObservationText) -> int | None:
        here = obs.room
        dist = self.config.distances(here)
        where = dict(obs.teammates)
        candidates: set[int] = set()
        for b, intel in self.doc.bombs:
            if intel.defused or intel.room is None or intel.room == here:
                continue
            if intel.sequence is None:
                candidates.add(intel.room)
                continue
            if not intel.sequence:
                continue
            head = intel.sequence[0]
            if head not in self.tools:
                continue
            there = [n for n, r in where.items() if r == intel.room and n != self.agent]
            if not self._permitted(head, there):
                continue
            candidates.add(intel.room)
        candidates |= {r for r in self.config.rooms if r not in self.explored and r != here}
        if not candidates:
            return None
        return min(candidates, key=lambda r: (dist[r], r))

    def _decide(self, obs: ObservationText) -> Action:
        menu = set(obs.menu)
        names = self.config.color_names
        fresh = self._fresh_bombs(obs)
        here = dict(obs.bombs_here)
        if any(seq is None for seq in here.values()):
            return Inspect()
        for b in sorted(here):
            seq = here[b]
            if not seq or b not in fresh:
                continue
            head = seq[0]
            if self._permitted(head, obs.companions):
                action = Apply(head)
                if self.config.apply_mode is ApplyMode.EXPLOSIVE or f"Apply {names[head]} Tool" in menu:
                    return action
        for b in sorted(here):
            seq = here[b]
            if seq and self._permitted(seq[0], obs.companions) and b not in fresh:
                return Inspect()
        goal = self._choose_goal(obs)
        if goal is not None:
            return Move(self._next_hop(obs.room, goal))
        if here:
            return Inspect()
        live_rooms = {i.room for _, i in self.doc.bombs if i.room is not None and not i.defused}
        live_rooms.discard(obs.room)
        if live_rooms:
            dist = self.config.distances(obs.room)
            return Move(self._next_hop(obs.room, min(live_rooms, key=lambda r: (dist[r], r))))
        return Move(min(self.config.neighbors(obs.room))) if self.config.neighbors(obs.room) else Inspect()

    def _claims(self, obs: ObservationText, action: Action) -> list[Claim]:
        here = dict(obs.bombs_here)
        fresh = self._fresh_bombs(obs)
        rnd = obs.round
        cut_bomb = None
        if isinstance(action, Apply):
            cut_bomb = min(
                (b for b, s in here.items() if s and s[0] == action.color and b in fresh), default=None
            )
        claims: list[Claim] = []
        live = []
        for b in sorted(here):
            seq = here[b]
            if b == cut_bomb and seq is not None and len(seq) == 1:
                continue
            live.append(b)
        if cut_bomb is not None or not isinstance(action, Apply):
            claims.append(Claim("contents", room=obs.room, bombs=tuple(live)))
        for b in live:
            claims.append(Claim("located", room=obs.room, bomb=b))
        for b in sorted(here):
            seq = here[b]
            if seq is None or b not in fresh:
                continue
            head_free = bool(seq) and self._unchallenged(seq[0], obs.companions)
            if b == cut_bomb:
                claims.append(Claim("changed", bomb=b, round=rnd))
                claims.append(Claim("phase", bomb=b, round=rnd))
                if len(seq) > 1:
                    claims.append(Claim("sequence", bomb=b, sequence=tuple(seq[1:])))
            elif head_free:
                claims.append(Claim("sequence", bomb=b, sequence=tuple(seq)))
        if isinstance(action, Move):
            claims.append(Claim("intent_move", room=action.room))
        return claims

    def _text(self, claims: Sequence[Claim]) -> str:
        names = self.config.color_names
        parts = []
        for c in claims:
            if c.kind == "contents":
                if c.bombs:
                    parts.append(f"Room {c.room} has bomb {', '.join(map(str, c.bombs))}.")
                else:
                    parts.append(f"Room {c.room} is clear.")
            elif c.kind == "sequence":
                parts.append(f"Bomb {c.bomb} sequence is {format_sequence(c.sequence, names)}.")
            elif c.kind == "phase":
                parts.append(f"I cut a phase of bomb {c.bomb}.")
            elif c.kind == "intent_move":
                parts.append(f"Heading to Room {c.room}.")
        return " ".join(parts)

    def act(self, obs, memory):
        self.doc = reference_update(self.doc, obs, obs.outcome, obs.messages)
        self.explored.add(obs.room)
        for m in obs.messages:
            for c in m.claims:
                if getattr(c, "kind", None) == "contents":
                    self.explored.add(c.room)
        action = self._decide(obs)
        claims = self._claims(obs, action)
        for c in claims:
            if c.kind == "sequence":
                self.sent_sequences[c.bomb] = (c.sequence, obs.round)
        text = self._text(claims)
        names = self.config.color_names
        self.last_action = action
        self.last_room = obs.room
        self.view = obs
        self.pending_room = action.room if isinstance(action, Move) else obs.room
        return reply_from_text(render_reply(action, text, names), names, claims=tuple(claims))

    def answer(self, question):
        """Recall rules over the agent's own view: presence and past broadcasts."""
        if question.level is Level.INTROSPECTION:
            return "yes"
        obs = self.view
        if obs is None:
            return "no"
        target = question.target
        mine = self.pending_room
        theirs = dict(obs.teammates).get(target)
        prop = question.proposition
        together = theirs == mine
        if isinstance(prop, RoomContents):
            return "yes" if together and prop.room == mine else "no"
        if isinstance(prop, BombSequence):
            sent = self.sent_sequences.get(prop.bomb)
            known = dict(obs.bombs_here).get(prop.bomb)
            return "yes" if sent is not None and sent[1] < obs.round and sent[0] == known else "no"
        if isinstance(prop, (BombStateChanged, PhaseDefused)):
            outcome_gone = prop.bomb not in {b for b, _ in obs.bombs_here}
            return "yes" if together and outcome_gone else "no"
        return "no"


# --- external agents -------------------------------------------------------


class ProtocolError(RuntimeError):
    pass


class _LineChannel:
    """Newline-delimited JSON over a subprocess pipe or a TCP socket."""

    def __init__(self, reader, writer: Callable[[str], None], closer: Callable[[], None]):
        self._writer = writer
        self._closer = closer
        self._lines: queue.Queue = queue.Queue()
        self._thread = threading.Thread(target=self._pump, args=(reader,), daemon=True)
        self._thread.start()
        self.closed = False

    def _pump(self, reader) -> None:
        try:
            for line in reader:
                self._lines.put(line)
        except (OSError, ValueError):
            pass
        self._lines.put(None)

    def send(self, frame: Mapping) -> None:
        if self.closed:
            raise ProtocolError("channel closed")
        try:
            self._writer(json.dumps(frame, sort_keys=True) + "\n")
        except (OSError, ValueError) as exc:
            self.closed = True
            raise ProtocolError(f"send failed: {exc}") from exc

    def recv(self, timeout: float) -> dict:
        if self.closed:
            raise ProtocolError("channel closed")
        try:
            line = self._lines.get(timeout=timeout)
        except queue.Empty:
            raise ProtocolError("timed out") from None
        if line is None:
            self.closed = True
            raise ProtocolError("peer closed the connection")
        try:
            frame = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"malformed frame: {exc}") from None
        if not isinstance(frame, dict):
            raise ProtocolError("frame is not an object")
        if frame.get("v") != PROTOCOL_VERSION:
            raise ProtocolError(f"protocol version {frame.get('v')!r} unsupported")
        return frame

    def close(self) -> None:
        self.closed = True
        try:
            self._closer()
        except OSError:
            pass

    @classmethod
    def spawn(cls, command: str | Sequence[str]) -> tuple["_LineChannel", subprocess.Popen]:
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        proc = subprocess.Popen(
            argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE, stderr=subprocess.DEVNULL,
            text=True, bufsize=1,
        )

        def write(data: str) -> None:
            proc.stdin.write(data)
            proc.stdin.flush()

        def close() -> None:
            try:
                proc.stdin.close()
            except OSError:
                pass
            try:
                proc.wait(timeout=2)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait()

        return cls(proc.stdout, write, close), proc

    @classmethod
    def connect(cls, address: str, timeout: float) -> "_LineChannel":
        host, _, port = address.rpartition(":")
        sock = socket.create_connection((host or "127.0.0.1", int(port)), timeout=timeout)
        sock.settimeout(None)
        reader = sock.makefile("r", encoding="utf-8")

        def write(data: str) -> None:
            sock.sendall(data.encode("utf-8"))

        def close() -> None:
            reader.close()
            sock.close()

        return cls(reader, write, close)


class ExternalPolicy(Policy):
    """Forwards observations over the wire protocol and waits for replies.

    Timeouts, malformed frames and dead peers forfeit the turn with an
    ``Invalid("unparseable")`` action; the trial carries on.
    """

    name = "external"

    def __init__(self, command: str | Sequence[str] | None = None, address: str | None = None,
                 timeout: float = DEFAULT_TIMEOUT, trial_id: str = "", belief: bool = False):
        if command is None and address is None:
            address = os.environ.get(ENDPOINT_ENV)
        if command is None and address is None:
            raise ValueError(f"external agent needs a command or an address (or ${ENDPOINT_ENV})")
        self.command = command
        self.address = address
        self.timeout = timeout
        self.trial_id = trial_id
        self.belief = belief
        self.channel: _LineChannel | None = None
        self.proc: subprocess.Popen | None = None
        self.errors: list[str] = []

    def reset(self, config, agent, seed=0):
        super().reset(config, agent, seed)
        self.first = True
        self.close()
        try:
            if self.command is not None:
                self.channel, self.proc = _LineChannel.spawn(self.command)
            else:
                self.channel = _LineChannel.connect(self.address, self.timeout)
        except (OSError, ValueError) as exc:
            self.errors.append(f"connect: {exc}")
            self.channel = None

    def _exchange(self, frame: dict) -> dict:
        if self.channel is None:
            raise ProtocolError("no connection")
        self.channel.send(frame)
        return self.channel.recv(self.timeout)

    def _forfeit(self, reason: str, latency: float) -> AgentReply:
        self.errors.append(reason)
        return AgentReply("", Invalid("unparseable"), "", None, latency)

    def act(self, obs, memory):
        frame = {
            "v": PROTOCOL_VERSION,
            "type": "turn",
            "trial_id": self.trial_id,
            "round": obs.round,
            "agent": self.agent,
            "observation": obs.text,
            "deadline_ms": int(self.timeout * 1000),
        }
        if self.first:
            frame["context"] = memory.context
            if memory.belief_enabled:
                frame["belief_seed"] = memory.belief_block()
            self.first = False
        start = time.monotonic()
        try:
            reply = self._exchange(frame)
        except ProtocolError as exc:
            return self._forfeit(str(exc), time.monotonic() - start)
        latency = time.monotonic() - start
        raw = reply.get("raw_reply")
        belief_text = reply.get("belief_text")
        if not isinstance(raw, str) or (belief_text is not None and not isinstance(belief_text, str)):
            return self._forfeit("malformed reply frame", latency)
        return reply_from_text(raw, self.config.color_names, belief_text, latency)

    def answer(self, question):
        frame = {"v": PROTOCOL_VERSION, "type": "tom", "question_id": question.id,
                 "question_text": question.text}
        try:
            reply = self._exchange(frame)
        except ProtocolError as exc:
            self.errors.append(str(exc))
            return ""
        if reply.get("question_id") != question.id:
            self.errors.append("answer for the wrong question")
            return ""
        yes_no = reply.get("yes_no")
        if isinstance(yes_no, bool):
            return "yes" if yes_no else "no"
        return str(reply.get("answer_text", ""))

    def close(self):
        if self.channel is not None:
            try:
                self.channel.send({"v": PROTOCOL_VERSION, "type": "end"})
            except ProtocolError:
                pass
            self.channel.close()
            self.channel = None


_MENU_RE = re.compile(r"Valid choices this round: (.*)\.\s*$", re.MULTILINE)


def menu_from_text(observation: str) -> list[str]:
    """Recover the legal action phrases from a rendered observation."""
    m = _MENU_RE.search(observation)
    if not m:
        return []
    return re.findall(r"'([^']*)'", m.group(1))


POLICIES: dict[str, Callable[..., Policy]] = {
    "random": RandomPolicy,
    "greedy": GreedyPolicy,
    "script": ScriptPolicy,
}


def make_policy(spec: str, **kwargs) -> Policy:
    """``random``, ``greedy``, ``external:<command>`` or ``tcp:<host:port>``."""
    if spec.startswith("external:"):
        return ExternalPolicy(command=spec[len("external:"):], **kwargs)
    if spec.startswith("tcp:"):
        return ExternalPolicy(address=spec[len("tcp:"):], **kwargs)
    if spec == "external":
        return ExternalPolicy(**kwargs)
    if spec not in POLICIES:
        raise ValueError(f"unknown policy {spec!r}; choose from {sorted(POLICIES)} or external:<cmd>")
    return POLICIES[spec]()
