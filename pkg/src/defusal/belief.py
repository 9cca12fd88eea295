"""Explicit belief-state documents: seeding, reference updates, parsing, scoring.

A :class:`BeliefDoc` has two serialisations. :func:`render_belief` produces
the natural-language form used in prompts; :meth:`BeliefDoc.to_json` the
form used for logging. :func:`parse_belief` inverts the former.

The reference updater is deterministic and is an oracle for what an agent
*could* know; it is not a model of how a language model updates its notes.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .textio import ObservationText, format_sequence, join_words, load_templates, parse_sequence
from .world import (
    ActionOutcome,
    BombDefused,
    BombExploded,
    DEFAULT_COLOR_NAMES,
    Message,
    SequenceRevealed,
    WorldConfig,
    WorldState,
)

PREAMBLE = (
    "Below is your current belief about game state based on your previous observations "
    "about the environment and interactions with your teammates."
)
SUMMARY_BUDGET = 600


@dataclass(frozen=True)
class BombIntel:
    room: int | None = None
    sequence: tuple[int, ...] | None = None
    defused: bool = False
    updated: int = 0

    @property
    def known(self) -> bool:
        return self.room is not None or self.sequence is not None or self.defused


@dataclass(frozen=True)
class BeliefDoc:
    agent: str
    round: int
    score: int
    observation: str
    teammates: tuple[tuple[str, int], ...]
    connectivity: tuple[tuple[int, tuple[int, ...]], ...]
    bombs: tuple[tuple[int, BombIntel], ...]
    tools: tuple[tuple[str, tuple[int, ...]], ...]
    actions: tuple[str, ...]
    color_names: tuple[str, ...] = DEFAULT_COLOR_NAMES
    issues: tuple[str, ...] = field(default=(), compare=False)

    def intel(self, bomb: int) -> BombIntel:
        return dict(self.bombs).get(bomb, BombIntel())

    def with_intel(self, bomb: int, intel: BombIntel) -> "BeliefDoc":
        entries = dict(self.bombs)
        entries[bomb] = intel
        return dataclasses.replace(self, bombs=tuple(sorted(entries.items())))

    def to_json(self) -> dict:
        return {
            "agent": self.agent,
            "round": self.round,
            "score": self.score,
            "observation": self.observation,
            "teammates": {n: r for n, r in self.teammates},
            "connectivity": {str(r): list(ns) for r, ns in self.connectivity},
            "bombs": {
                str(b): {
                    "room": i.room,
                    "sequence": [self.color_names[c] for c in i.sequence] if i.sequence is not None else None,
                    "defused": i.defused,
                    "updated": i.updated,
                }
                for b, i in self.bombs
            },
            "tools": {n: [self.color_names[c] for c in cs] for n, cs in self.tools},
            "actions": list(self.actions),
            "color_names": list(self.color_names),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "BeliefDoc":
        names = tuple(data.get("color_names", DEFAULT_COLOR_NAMES))
        index = {n: i for i, n in enumerate(names)}
        bombs = []
        for b, i in data["bombs"].items():
            seq = i.get("sequence")
            bombs.append((int(b), BombIntel(
                room=i.get("room"),
                sequence=tuple(index[c] for c in seq) if seq is not None else None,
                defused=bool(i.get("defused", False)),
                updated=int(i.get("updated", 0)),
            )))
        return cls(
            agent=data["agent"],
            round=int(data["round"]),
            score=int(data["score"]),
            observation=data.get("observation", ""),
            teammates=tuple((n, int(r)) for n, r in data["teammates"].items()),
            connectivity=tuple(sorted((int(r), tuple(ns)) for r, ns in data["connectivity"].items())),
            bombs=tuple(sorted(bombs)),
            tools=tuple((n, tuple(index[c] for c in cs)) for n, cs in data["tools"].items()),
            actions=tuple(data.get("actions", ())),
            color_names=names,
        )


def _clean(text: str, budget: int = SUMMARY_BUDGET) -> str:
    text = " ".join(text.split())
    return text[:budget].rstrip()


def summarize_observation(obs: ObservationText, names: Sequence[str]) -> str:
    parts = [f"You are currently in Room {obs.room}"]
    if obs.companions:
        parts[0] += " with " + join_words([f"Player {c}" for c in obs.companions])
    parts[0] += "."
    if obs.bombs_here:
        found = []
        for b, seq in obs.bombs_here:
            found.append(f"bomb {b} with " + ("unknown sequence" if seq is None else f"sequence {format_sequence(seq, names)}"))
        parts.append("In the room you also found " + join_words(found) + ". There is no other bomb in the current room.")
    else:
        parts.append("There is no bomb in the current room.")
    return " ".join(parts)


def initial_belief(config: WorldConfig, agent: str) -> BeliefDoc:
    me = config.agents[config.agent_index(agent)]
    names = config.color_names
    here = [b for b in config.bombs if b.room == me.start]
    companions = [a.name for a in config.agents if a.name != agent and a.start == me.start]
    summary = f"You are currently in Room {me.start}"
    if companions:
        summary += " with " + join_words([f"Player {c}" for c in companions])
    summary += "."
    if here:
        summary += " In the room you also found " + join_words(
            [f"bomb {b.id} with unknown sequence" for b in here]
        ) + ". There is no other bomb in the current room."
    else:
        summary += " There is no bomb in the current room."
    bombs = tuple(
        (b.id, BombIntel(room=b.room) if b.room == me.start else BombIntel())
        for b in sorted(config.bombs, key=lambda b: b.id)
    )
    return BeliefDoc(
        agent=agent,
        round=1,
        score=0,
        observation=_clean(summary),
        teammates=tuple((a.name, a.start) for a in config.agents),
        connectivity=tuple((r, config.neighbors(r)) for r in sorted(config.rooms)),
        bombs=bombs,
        tools=tuple((a.name, tuple(sorted(a.tools))) for a in config.agents),
        actions=tuple(load_templates()["menu"]),
        color_names=tuple(names),
    )


# --- reference updater -----------------------------------------------------


def _write(doc: BeliefDoc, bomb: int, rnd: int, **changes) -> BeliefDoc:
    """Last-writer-wins merge keyed on the round stamp."""
    entries = dict(doc.bombs)
    if bomb not in entries:
        return doc
    cur = entries[bomb]
    if rnd < cur.updated:
        return doc
    new = dataclasses.replace(cur, updated=rnd, **changes)
    if new.sequence is None and cur.sequence is not None:
        new = dataclasses.replace(new, sequence=cur.sequence)
    if new == cur:
        return doc
    return doc.with_intel(bomb, new)


def apply_claims(doc: BeliefDoc, messages: Sequence[Message]) -> BeliefDoc:
    for msg in sorted(messages, key=lambda m: m.round):
        for claim in msg.claims:
            kind = getattr(claim, "kind", None)
            rnd = msg.round
            if kind == "located":
                doc = _write(doc, claim.bomb, rnd, room=claim.room)
            elif kind == "sequence":
                doc = _write(doc, claim.bomb, rnd, sequence=tuple(claim.sequence), defused=False)
            elif kind == "contents":
                listed = set(claim.bombs or ())
                for b in listed:
                    doc = _write(doc, b, rnd, room=claim.room)
                for b, intel in doc.bombs:
                    if intel.room == claim.room and b not in listed and not intel.defused:
                        doc = _write(doc, b, rnd, defused=True)
    return doc


def reference_update(
    doc: BeliefDoc,
    obs: ObservationText,
    outcome: ActionOutcome | None = None,
    messages: Sequence[Message] = (),
) -> BeliefDoc:
    """Deterministically fold one observation (plus feedback and claims) into ``doc``.

    Claims are merged first, then the agent's own action feedback, then the
    observation itself, so first-hand information wins ties.
    """
    names = doc.color_names
    doc = apply_claims(doc, messages)
    if outcome is not None and outcome.ok:
        act_round = max(obs.round - 1, 0)
        for eff in outcome.effects:
            if isinstance(eff, SequenceRevealed):
                doc = _write(doc, eff.bomb, act_round, room=outcome.room, sequence=tuple(eff.sequence))
            elif isinstance(eff, (BombDefused, BombExploded)):
                doc = _write(doc, eff.bomb, act_round, room=outcome.room, defused=True)
    rnd = obs.round
    present = {b for b, _ in obs.bombs_here}
    for b, seq in obs.bombs_here:
        if seq is not None:
            doc = _write(doc, b, rnd, room=obs.room, sequence=tuple(seq), defused=False)
        else:
            doc = _write(doc, b, rnd, room=obs.room, defused=False)
    for b, intel in doc.bombs:
        if intel.room == obs.room and b not in present and not intel.defused:
            doc = _write(doc, b, rnd, defused=True)
    return dataclasses.replace(
        doc,
        round=obs.round,
        score=obs.score,
        observation=_clean(summarize_observation(obs, names)),
        teammates=tuple(obs.teammates),
    )


# --- text form -------------------------------------------------------------


def _intel_line(bomb: int, intel: BombIntel, names: Sequence[str]) -> str:
    if not intel.known:
        line = f"Bomb {bomb}: Details currently unknown."
    else:
        loc = f"Located in Room {intel.room}." if intel.room is not None else "Location unknown."
        if intel.defused:
            state = "Defused."
            if intel.sequence is not None:
                state += f" The phase sequence was {format_sequence(intel.sequence, names)}."
        elif intel.sequence is None:
            state = "The phase sequence is Unknown."
        else:
            state = f"The phase sequence is {format_sequence(intel.sequence, names)}."
        line = f"Bomb {bomb}: {loc} {state}"
    if intel.updated:
        line += f" [updated round {intel.updated}]"
    return line


def render_belief(doc: BeliefDoc) -> str:
    names = doc.color_names
    lines = [PREAMBLE]
    lines.append(f"Your role: You are playing as Player {doc.agent}.")
    lines.append(f"Current round: {doc.round}")
    lines.append(f"Total team score: {doc.score}.")
    lines.append(f"Observation: {doc.observation}")
    lines.append(
        "Teammate Locations: "
        + "; ".join(f"Player {n} is in Room {r}" for n, r in doc.teammates)
        + "."
    )
    lines.append("Room connectivity:")
    for room, ns in doc.connectivity:
        lines.append(f"- Room {room} is connected to room {join_words([str(n) for n in ns]) or 'no other room'}.")
    lines.append("Bomb Intel:")
    if not doc.bombs:
        lines.append("- none")
    for b, intel in doc.bombs:
        lines.append("- " + _intel_line(b, intel, names))
    lines.append("Tool inventory:")
    for n, cs in doc.tools:
        lines.append(f"- {n}: Equipped with {join_words([names[c] for c in cs])} wire cutters.")
    lines.append("Available action options:")
    lines.extend(f"- {a}" for a in doc.actions)
    return "\n".join(lines)


_HEADINGS = {
    "role": r"your role",
    "round": r"current round",
    "score": r"total team score",
    "observation": r"observation",
    "teammates": r"teammate locations",
    "connectivity": r"room connectivity",
    "bombs": r"bomb intel",
    "tools": r"tool inventory",
    "actions": r"available action options",
}
_HEADING_RE = re.compile(
    r"^\s*(?:\*\*)?(" + "|".join(_HEADINGS.values()) + r")(?:\*\*)?\s*:(?:\*\*)?\s*(.*)$",
    re.IGNORECASE,
)
_BULLET = re.compile(r"^\s*(?:[-*•]|\\item)\s*")


def _sections(text: str) -> dict[str, list[str]]:
    sections: dict[str, list[str]] = {}
    current = None
    by_pattern = {v: k for k, v in _HEADINGS.items()}
    for raw in text.splitlines():
        m = _HEADING_RE.match(raw)
        if m:
            current = by_pattern[m.group(1).lower()]
            sections[current] = [m.group(2).strip()] if m.group(2).strip() else []
            continue
        if current is not None and raw.strip():
            sections[current].append(raw.strip())
    return sections


def _ints(text: str) -> list[int]:
    return [int(x) for x in re.findall(r"-?\d+", text)]


def parse_belief(text: str, color_names: Sequence[str] = DEFAULT_COLOR_NAMES) -> BeliefDoc:
    """Section-wise parse of a belief document.

    Malformed sections are recorded in ``issues`` and left empty; the rest of
    the document is still returned.
    """
    names = tuple(color_names)
    sec = _sections(text)
    issues: list[str] = []

    def one_line(key: str) -> str:
        return " ".join(sec.get(key, []))

    agent = ""
    m = re.search(r"player\s+(\w+)", one_line("role"), re.IGNORECASE)
    if m:
        agent = m.group(1)
    else:
        issues.append("role")

    def number(key: str) -> int:
        vals = _ints(one_line(key))
        if not vals:
            issues.append(key)
            return 0
        return vals[0]

    rnd = number("round")
    score = number("score")
    observation = one_line("observation")

    teammates = []
    for m in re.finditer(r"player\s+(\w+)\s+is\s+in\s+room\s+(-?\d+)", one_line("teammates"), re.IGNORECASE):
        teammates.append((m.group(1), int(m.group(2))))
    if "teammates" in sec and not teammates:
        issues.append("teammates")

    connectivity = []
    for line in sec.get("connectivity", []):
        line = _BULLET.sub("", line)
        m = re.match(r"room\s+(-?\d+)\s+is\s+connected\s+to\s+(.*)$", line, re.IGNORECASE)
        if not m:
            issues.append(f"connectivity: {line}")
            continue
        connectivity.append((int(m.group(1)), tuple(sorted(_ints(m.group(2))))))

    bombs = []
    for line in sec.get("bombs", []):
        line = _BULLET.sub("", line)
        if line.lower() == "none":
            continue
        m = re.match(r"bomb\s+(\d+)\s*:\s*(.*)$", line, re.IGNORECASE)
        if not m:
            issues.append(f"bombs: {line}")
            continue
        bomb, body = int(m.group(1)), m.group(2)
        updated = 0
        um = re.search(r"\[updated round (\d+)\]", body, re.IGNORECASE)
        if um:
            updated = int(um.group(1))
            body = body[: um.start()].strip()
        if re.match(r"details currently unknown", body, re.IGNORECASE):
            bombs.append((bomb, BombIntel(updated=updated)))
            continue
        room = None
        rm = re.search(r"located in room\s+(-?\d+)", body, re.IGNORECASE)
        if rm:
            room = int(rm.group(1))
        defused = bool(re.search(r"\bdefused\b", body, re.IGNORECASE))
        seq = None
        sm = re.search(r"phase sequence (?:is|was)\s+([^.\[]+)", body, re.IGNORECASE)
        if sm and sm.group(1).strip().lower() != "unknown":
            seq = parse_sequence(sm.group(1), names)
            if seq is None:
                issues.append(f"bombs: {line}")
        bombs.append((bomb, BombIntel(room=room, sequence=seq, defused=defused, updated=updated)))

    tools = []
    for line in sec.get("tools", []):
        line = _BULLET.sub("", line)
        m = re.match(r"(\w+)\s*:\s*equipped with\s+(.*?)\s+wire cutters", line, re.IGNORECASE)
        if not m:
            issues.append(f"tools: {line}")
            continue
        colors = parse_sequence(m.group(2), names)
        if colors is None:
            issues.append(f"tools: {line}")
            continue
        tools.append((m.group(1), tuple(colors)))

    actions = tuple(_BULLET.sub("", line) for line in sec.get("actions", []))
    for key in ("connectivity", "bombs", "tools"):
        if key not in sec:
            issues.append(f"missing section: {key}")

    return BeliefDoc(
        agent=agent,
        round=rnd,
        score=score,
        observation=observation,
        teammates=tuple(teammates),
        connectivity=tuple(sorted(connectivity)),
        bombs=tuple(sorted(bombs)),
        tools=tuple(tools),
        actions=actions,
        color_names=names,
        issues=tuple(issues),
    )


# --- scoring ---------------------------------------------------------------


@dataclass
class CategoryScore:
    consistent: int = 0
    stale: int = 0
    contradicted: int = 0
    unknown: int = 0

    @property
    def known(self) -> int:
        return self.consistent + self.stale + self.contradicted


@dataclass
class BeliefScore:
    locations: CategoryScore = field(default_factory=CategoryScore)
    sequences: CategoryScore = field(default_factory=CategoryScore)
    connectivity: CategoryScore = field(default_factory=CategoryScore)
    teammates: CategoryScore = field(default_factory=CategoryScore)
    hallucinated: list[int] = field(default_factory=list)

    def categories(self) -> dict[str, CategoryScore]:
        return {
            "locations": self.locations,
            "sequences": self.sequences,
            "connectivity": self.connectivity,
            "teammates": self.teammates,
        }

    @property
    def consistency(self) -> float | None:
        """Share of known entries that are not contradicted (stale counts as consistent)."""
        good = sum(c.consistent + c.stale for c in self.categories().values())
        bad = sum(c.contradicted for c in self.categories().values()) + len(self.hallucinated)
        return good / (good + bad) if good + bad else None

    @property
    def freshness(self) -> float | None:
        fresh = sum(c.consistent for c in self.categories().values())
        known = sum(c.known for c in self.categories().values())
        return fresh / known if known else None

    def to_json(self) -> dict:
        out = {k: dataclasses.asdict(v) for k, v in self.categories().items()}
        out["hallucinated"] = list(self.hallucinated)
        out["consistency"] = self.consistency
        out["freshness"] = self.freshness
        return out


def _is_suffix(short: Sequence[int], long: Sequence[int]) -> bool:
    return len(short) <= len(long) and tuple(long[len(long) - len(short):]) == tuple(short)


def score_belief(doc: BeliefDoc, state: WorldState) -> BeliefScore:
    """Compare a belief document against ground truth.

    A sequence that was true earlier (a longer suffix of the full sequence)
    counts as stale, not contradicted.
    """
    score = BeliefScore()
    truth = {b.id: b for b in state.bombs}
    for bomb, intel in doc.bombs:
        if bomb not in truth:
            if intel.known:
                score.hallucinated.append(bomb)
            continue
        real = truth[bomb]
        if intel.room is None:
            score.locations.unknown += 1
        elif intel.room == real.location:
            score.locations.consistent += 1
        else:
            score.locations.contradicted += 1

        seqs = score.sequences
        if intel.defused:
            if real.live:
                seqs.contradicted += 1
            else:
                seqs.consistent += 1
        elif intel.sequence is None:
            seqs.unknown += 1
        elif real.live and tuple(intel.sequence) == real.remaining:
            seqs.consistent += 1
        elif _is_suffix(intel.sequence, real.full_sequence) and len(intel.sequence) > len(real.remaining):
            seqs.stale += 1
        else:
            seqs.contradicted += 1
    for b in truth:
        if b not in dict(doc.bombs):
            score.locations.unknown += 1
            score.sequences.unknown += 1

    config = state.config
    listed = dict(doc.connectivity)
    for room in config.rooms:
        if room not in listed:
            score.connectivity.unknown += 1
        elif tuple(sorted(listed[room])) == config.neighbors(room):
            score.connectivity.consistent += 1
        else:
            score.connectivity.contradicted += 1
    for room in listed:
        if room not in config.rooms:
            score.connectivity.contradicted += 1

    actual = state.locations()
    for name, room in doc.teammates:
        if name not in actual or room not in config.rooms:
            score.teammates.contradicted += 1
        elif actual[name] == room:
            score.teammates.consistent += 1
        else:
            score.teammates.stale += 1
    return score
