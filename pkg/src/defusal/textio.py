"""Rule-based text interface: prompt rendering, reply parsing, error feedback."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from string import Template
from typing import Mapping, Sequence

from .world import (
    Action,
    ActionOutcome,
    Apply,
    BombDefused,
    BombExploded,
    DEFAULT_COLOR_NAMES,
    ErrorKind,
    Inspect,
    Invalid,
    Message,
    Move,
    MovedTo,
    PhaseCut,
    SequenceRevealed,
    WorldConfig,
    WorldState,
    legal_actions,
)

NUMBER_WORDS = {
    0: "zero", 1: "one", 2: "two", 3: "three", 4: "four", 5: "five",
    6: "six", 7: "seven", 8: "eight", 9: "nine", 10: "ten",
}


@lru_cache(maxsize=None)
def _bundled_templates() -> dict:
    return json.loads(resources.files(__package__).joinpath("templates.json").read_text("utf-8"))


def load_templates(path: str | None = None) -> dict:
    """Return the template set; ``path`` swaps in an alternative JSON file."""
    if path is None:
        return _bundled_templates()
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def fill(template: str, **values) -> str:
    return Template(template).substitute({k: str(v) for k, v in values.items()})


def number_word(n: int) -> str:
    return NUMBER_WORDS.get(n, str(n))


def join_words(items: Sequence[str], conj: str = "and") -> str:
    items = list(items)
    if not items:
        return ""
    if len(items) == 1:
        return items[0]
    if len(items) == 2:
        return f"{items[0]} {conj} {items[1]}"
    return ", ".join(items[:-1]) + f", {conj} {items[-1]}"


def format_sequence(colors: Sequence[int], names: Sequence[str] = DEFAULT_COLOR_NAMES) -> str:
    if not colors:
        return "empty"
    return "-".join(names[c] for c in colors)


def parse_sequence(text: str, names: Sequence[str] = DEFAULT_COLOR_NAMES) -> tuple[int, ...] | None:
    text = text.strip().strip(".").lower()
    if text == "empty":
        return ()
    lookup = {n.lower(): i for i, n in enumerate(names)}
    out = []
    for part in re.split(r"\s*(?:-|,|\bthen\b|\band\b)\s*", text):
        if not part:
            continue
        if part not in lookup:
            return None
        out.append(lookup[part])
    return tuple(out)


# --- prompts ---------------------------------------------------------------


def _map_sentences(config: WorldConfig) -> tuple[str, str]:
    rooms = sorted(config.rooms)
    if len(rooms) == 1:
        return f"There is a single room, numbered {rooms[0]}.", ""
    room_list = "The rooms are numbered " + join_words([str(r) for r in rooms]) + "."
    others = set(rooms)
    hubs = [r for r in rooms if len(config.neighbors(r)) == len(rooms) - 1]
    sentences = []
    covered: set[tuple[int, int]] = set()
    for hub in hubs[:1]:
        sentences.append(f"Room {hub} is connected to all other rooms.")
        covered |= {(min(hub, r), max(hub, r)) for r in others - {hub}}
    for a, b in sorted(config.edges - covered):
        sentences.append(f"Room {a} is connected to room {b}.")
    return room_list, " ".join(sentences)


def render_context(config: WorldConfig, agent: str, templates: Mapping | None = None) -> str:
    """Full rules prompt for ``agent`` instantiated with the config's map and tools."""
    t = (templates or load_templates())["context"]
    names = config.color_names
    me = config.agents[config.agent_index(agent)]
    others = [a for a in config.agents if a.name != agent]
    n_team = len(others)

    sizes = sorted({len(b.sequence) for b in config.bombs})
    phase_kinds = join_words([f"{number_word(s)}-phase" for s in sizes]) or "no"
    phase_counts = join_words([str(s) for s in sizes], "or") or "0"
    first = names[0]
    second = names[1] if config.n_colors > 1 else names[0]

    tool_counts = {len(a.tools) for a in config.agents}
    if len(tool_counts) == 1:
        tool_summary = f"Each player is equipped with {number_word(tool_counts.pop())} color-coded wire cutters."
    else:
        tool_summary = "Each player is equipped with color-coded wire cutters."

    def tools_of(spec) -> str:
        return join_words([names[c] for c in sorted(spec.tools)])

    other_parts = [f"player {o.name} wields {tools_of(o)}" for o in others]
    if len(other_parts) >= 2:
        other_parts[-1] = other_parts[-1].replace(" wields ", " possesses ")
        others_text = ", " + ", ".join(other_parts[:-1]) + ", and " + other_parts[-1]
    elif other_parts:
        others_text = ", and " + other_parts[0]
    else:
        others_text = ""

    teammates_phrase = {0: "nobody", 1: "your teammate", 2: "both of your teammates"}.get(
        n_team, "all of your teammates"
    )
    room_list, connections = _map_sentences(config)
    paragraphs = [
        fill(t["intro"], teammate_count=number_word(n_team), room_count=number_word(config.n_rooms),
             bomb_count=number_word(len(config.bombs))),
        " ".join(fill(t["map"], room_list=room_list, connections=connections).split()),
        fill(t["challenge"], bomb_count=number_word(len(config.bombs)), phase_kinds=phase_kinds,
             phase_counts=phase_counts, example_sequence=f"{first}-{second}",
             example_first=first, example_second=second),
        fill(t["tools"], tool_summary=tool_summary, agent=agent, own_tools=tools_of(me), others=others_text),
        t["actions"],
        fill(t["communications"], teammates_phrase=teammates_phrase),
        t["observation"],
        t["format"],
    ]
    return "\n\n".join(paragraphs)


# --- canonical phrases & parsing --------------------------------------------


def action_phrase(action: Action, names: Sequence[str] = DEFAULT_COLOR_NAMES) -> str:
    if isinstance(action, Move):
        return f"Move to Room {action.room}"
    if isinstance(action, Inspect):
        return "Inspect Bomb"
    if isinstance(action, Apply):
        return f"Apply {names[action.color]} Tool"
    raise ValueError(f"no canonical phrase for {action!r}")


def render_reply(action: Action, message: str = "", names: Sequence[str] = DEFAULT_COLOR_NAMES) -> str:
    return f'Action selection: {action_phrase(action, names)}. Message to Team: "{message}"'


@dataclass(frozen=True)
class ParsedReply:
    action: Action
    message: str
    raw: str


_MOVE = re.compile(r"\bmove\s+to\s+room\s+(-?\d+)", re.IGNORECASE)
_INSPECT = re.compile(r"\binspect\s+(?:the\s+|a\s+)?bomb", re.IGNORECASE)
_APPLY = re.compile(r"\bapply\s+(?:the\s+)?([a-z]+)\s+(?:wire[\s-]*cutter\s+)?tool", re.IGNORECASE)
_MESSAGE = re.compile(r"message\s+to\s+team\s*:", re.IGNORECASE)
_QUOTES = {'"': '"', "“": "”", "'": "'"}


def _extract_message(tail: str) -> str:
    body = tail.strip()
    if body and body[0] in _QUOTES:
        closing = _QUOTES[body[0]]
        end = body.rfind(closing)
        if closing == body[0] and end == 0:
            end = -1
        if end > 0:
            return body[1:end]
        return body[1:]
    return body


def parse_reply(raw: str, names: Sequence[str] = DEFAULT_COLOR_NAMES) -> ParsedReply:
    """Keyword-match an agent reply into one action plus an optional message.

    Total on arbitrary input. Text after ``Message to Team:`` is treated as the
    message and never searched for actions.
    """
    if not isinstance(raw, str):
        raw = "" if raw is None else str(raw)
    m = _MESSAGE.search(raw)
    if m:
        action_text, message = raw[: m.start()], _extract_message(raw[m.end():])
    else:
        action_text, message = raw, ""

    lookup = {n.lower(): i for i, n in enumerate(names)}
    found: list[Action] = []
    for mm in _MOVE.finditer(action_text):
        found.append(Move(int(mm.group(1))))
    if _INSPECT.search(action_text):
        found.append(Inspect())
    for mm in _APPLY.finditer(action_text):
        word = mm.group(1).lower()
        found.append(Apply(lookup[word]) if word in lookup else Invalid("unknown_color"))

    distinct = list(dict.fromkeys(found))
    if not distinct:
        action: Action = Invalid("no_action")
    elif len(distinct) > 1:
        action = Invalid("ambiguous")
    else:
        action = distinct[0]
    return ParsedReply(action, message, raw)


# --- observations ----------------------------------------------------------


@dataclass(frozen=True)
class ObservationText:
    round: int
    score: int
    agent: str
    room: int
    feedback: str
    bombs_here: tuple[tuple[int, tuple[int, ...] | None], ...]
    companions: tuple[str, ...]
    teammates: tuple[tuple[str, int], ...]
    messages: tuple[Message, ...]
    menu: tuple[str, ...]
    text: str = field(repr=False, default="")
    outcome: ActionOutcome | None = field(repr=False, default=None, compare=False)

    def __str__(self) -> str:
        return self.text


def render_error(outcome: ActionOutcome, config: WorldConfig, templates: Mapping | None = None) -> str:
    """Error-correction text for a rejected action."""
    t = (templates or load_templates())["errors"]
    kind = outcome.error or ErrorKind.UNPARSEABLE
    names = config.color_names
    color = ""
    if isinstance(outcome.action, Apply) and 0 <= outcome.action.color < len(names):
        color = names[outcome.action.color]
    return fill(
        t[kind.value],
        room=outcome.room,
        target=outcome.target if outcome.target is not None else "",
        color=color,
        bomb=outcome.target if outcome.target is not None else "",
        sequence=format_sequence(outcome.sequence or (), names),
    )


def render_observation(
    state: WorldState,
    agent: str,
    last_outcome: ActionOutcome | None = None,
    inbound: Sequence[Message] = (),
    templates: Mapping | None = None,
) -> ObservationText:
    """What ``agent`` sees at the start of its turn.

    Only the agent's own room, team-wide locations and score, its own action
    feedback and teammates' broadcasts are included.
    """
    t = templates or load_templates()
    o = t["observation"]
    config = state.config
    names = config.color_names
    me = state.agent(agent)
    room = me.location

    companions = tuple(a.name for a in state.agents if a.name != agent and a.location == room)
    n_team = len(state.agents) - 1
    if not companions:
        loc_line = fill(o["location_alone"], room=room)
    elif len(companions) == n_team == 2:
        loc_line = fill(o["location_all"], room=room)
    else:
        loc_line = fill(o["location_with"], room=room,
                        companions=join_words([f"Player {c}" for c in companions]))

    bombs_here = []
    entries = []
    for b in state.live_bombs_in(room):
        known = state.known_sequence(agent, b.id)
        bombs_here.append((b.id, known))
        if known is None:
            entries.append(fill(o["bomb_unknown"], bomb=b.id))
        else:
            entries.append(fill(o["bomb_known"], bomb=b.id, sequence=format_sequence(known, names)))
    contents = fill(o["bombs_found"], bomb_list=join_words(entries)) if entries else o["no_bombs"]

    teammates = tuple((a.name, a.location) for a in state.agents)
    loc_text = "; ".join(fill(o["teammate_entry"], agent=n, room=r) for n, r in teammates) + "."

    feedback = _feedback_with_state(last_outcome, state, agent, t)
    menu = tuple(action_phrase(a, names) for a in legal_actions(state, agent))
    msgs = tuple(m for m in inbound if m.sender != agent)

    lines = [fill(o["header"], round=state.round, score=state.score)]
    if feedback:
        lines.append(fill(o["feedback"], feedback=feedback))
    lines.append(f"{loc_line} {contents}")
    lines.append(fill(o["teammates"], locations=loc_text))
    if msgs:
        lines.append(o["messages_header"])
        lines.extend(fill(o["message_entry"], sender=m.sender, text=m.text) for m in msgs)
    lines.append(o["menu_header"])
    lines.extend(f"- {item}" for item in t["menu"])
    if menu:
        lines.append(fill(o["menu_valid"], choices=", ".join(f"'{p}'" for p in menu)))

    return ObservationText(
        round=state.round,
        score=state.score,
        agent=agent,
        room=room,
        feedback=feedback,
        bombs_here=tuple(bombs_here),
        companions=companions,
        teammates=teammates,
        messages=msgs,
        menu=menu,
        text="\n".join(lines),
        outcome=last_outcome,
    )


def _feedback_with_state(outcome: ActionOutcome | None, state: WorldState, agent: str, t: Mapping) -> str:
    if outcome is None:
        return ""
    if outcome.error is not None:
        return render_error(outcome, state.config, t)
    names = state.config.color_names
    fb = t["feedback"]
    parts = []
    color = names[outcome.action.color] if isinstance(outcome.action, Apply) else ""
    for e in outcome.effects:
        if isinstance(e, MovedTo):
            parts.append(fill(fb["moved"], room=e.room))
        elif isinstance(e, SequenceRevealed):
            parts.append(fill(fb["inspected"], bomb=e.bomb, sequence=format_sequence(e.sequence, names)))
        elif isinstance(e, BombDefused):
            parts.append(fill(fb["defused"], color=color, bomb=e.bomb, points=e.points))
        elif isinstance(e, BombExploded):
            parts.append(fill(fb["exploded"], color=color, bomb=e.bomb))
    cut = next((e for e in outcome.effects if isinstance(e, PhaseCut)), None)
    if cut is not None and not any(isinstance(e, BombDefused) for e in outcome.effects):
        known = state.known_sequence(agent, cut.bomb)
        seq = format_sequence(known, names) if known is not None else "unknown"
        parts.append(fill(fb["cut"], color=color, bomb=cut.bomb, sequence=seq))
    return " ".join(parts)
