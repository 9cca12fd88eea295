"""Instance generation, the trial loop, metrics, batches, replay and ToM reports."""

from __future__ import annotations

import concurrent.futures
import dataclasses
import json
import random
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .agents import AgentMemory, AgentReply, Policy, ReplayPolicy, ScriptPolicy, make_policy, window_update
from .belief import initial_belief, render_belief, score_belief
from .epistemic import (
    Act,
    Answer,
    Deliver,
    EpistemicLog,
    Level,
    Observe,
    Send,
    generate_questions,
    normalize_answer,
)
from .textio import action_phrase, render_context, render_observation
from .world import (
    AgentSpec,
    ApplyMode,
    BombDefused,
    BombExploded,
    BombSpec,
    ConfigError,
    DEFAULT_COLOR_NAMES,
    Invalid,
    MovedTo,
    PhaseCut,
    SequenceRevealed,
    Status,
    Turn,
    WorldConfig,
    apply_turn,
    check_termination,
    end_round,
    new_world,
    paper_config,
)

TRANSCRIPT_VERSION = 1
CALL_SIGNS = ("Alpha", "Bravo", "Charlie", "Delta", "Echo", "Foxtrot")


# --- instance generation ---------------------------------------------------


@dataclass(frozen=True)
class RandomizationSpec:
    n_rooms: int = 5
    room_pool: tuple[int, ...] = tuple(range(10))
    extra_edge_prob: float = 0.3
    bomb_sizes: tuple[int, ...] = (1, 1, 2, 2, 3)
    max_bombs_per_room: int = 1
    n_colors: int = 3
    color_names: tuple[str, ...] = DEFAULT_COLOR_NAMES
    n_agents: int = 3
    tool_scheme: str = "paired"  # agent i holds colours i and i+1 (mod m)
    shared_start: bool = True
    round_limit: int = 30
    deadlock_window: int = 3
    apply_mode: str = "guarded"

    def validate(self) -> None:
        if self.n_rooms < 1 or self.n_rooms > len(self.room_pool):
            raise ConfigError("n_rooms must be between 1 and the size of room_pool")
        if len(set(self.room_pool)) != len(self.room_pool):
            raise ConfigError("room_pool has duplicates")
        if not 0 <= self.extra_edge_prob <= 1:
            raise ConfigError("extra_edge_prob must lie in [0, 1]")
        if any(s < 1 for s in self.bomb_sizes):
            raise ConfigError("bomb sizes must be positive")
        if len(self.bomb_sizes) > self.n_rooms * self.max_bombs_per_room:
            raise ConfigError("not enough room capacity for the bombs")
        if self.n_colors < 1 or len(self.color_names) < self.n_colors:
            raise ConfigError("need a name for every colour")
        if not 1 <= self.n_agents <= len(CALL_SIGNS):
            raise ConfigError(f"n_agents must be between 1 and {len(CALL_SIGNS)}")
        if self.tool_scheme not in ("paired", "all"):
            raise ConfigError(f"unknown tool scheme {self.tool_scheme!r}")
        covered = set().union(*(self.tools_for(i) for i in range(self.n_agents)))
        if covered != set(range(self.n_colors)):
            missing = sorted(set(range(self.n_colors)) - covered)
            raise ConfigError(f"tool scheme leaves colours {missing} uncuttable")
        ApplyMode(self.apply_mode)

    def tools_for(self, agent: int) -> frozenset[int]:
        m = self.n_colors
        if self.tool_scheme == "all":
            return frozenset(range(m))
        return frozenset({agent % m, (agent + 1) % m})

    def to_json(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in dataclasses.asdict(self).items()}

    @classmethod
    def from_json(cls, data: Mapping) -> "RandomizationSpec":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown randomization keys {sorted(unknown)}")
        kw = {k: tuple(v) if isinstance(v, list) else v for k, v in data.items()}
        return cls(**kw)


def generate_instance(spec: RandomizationSpec, seed: int) -> WorldConfig:
    """A connected random map with randomly placed bombs; fully determined by ``seed``."""
    spec.validate()
    rng = random.Random(seed)
    rooms = sorted(rng.sample(list(spec.room_pool), spec.n_rooms))
    order = rooms[:]
    rng.shuffle(order)
    edges = set()
    for i in range(1, len(order)):
        a, b = order[i], order[rng.randrange(i)]
        edges.add((min(a, b), max(a, b)))
    for i, a in enumerate(rooms):
        for b in rooms[i + 1:]:
            if (a, b) not in edges and rng.random() < spec.extra_edge_prob:
                edges.add((a, b))
    slots = [r for r in rooms for _ in range(spec.max_bombs_per_room)]
    places = rng.sample(slots, len(spec.bomb_sizes))
    sizes = list(spec.bomb_sizes)
    rng.shuffle(sizes)
    bombs = [
        BombSpec(i + 1, place, tuple(rng.randrange(spec.n_colors) for _ in range(size)))
        for i, (place, size) in enumerate(zip(places, sizes))
    ]
    start = rng.choice(rooms)
    agents = []
    for i in range(spec.n_agents):
        agents.append(AgentSpec(CALL_SIGNS[i], start if spec.shared_start else rng.choice(rooms), spec.tools_for(i)))
    return WorldConfig.build(
        rooms, sorted(edges), bombs, agents,
        n_colors=spec.n_colors, color_names=spec.color_names[: spec.n_colors],
        round_limit=spec.round_limit, deadlock_window=spec.deadlock_window,
        apply_mode=spec.apply_mode, seed=seed,
    )


# --- trial configuration ---------------------------------------------------


@dataclass(frozen=True)
class TrialConfig:
    world: WorldConfig | None = None
    randomization: RandomizationSpec | None = None
    policies: tuple[tuple[str, str], ...] = ()
    default_policy: str = "random"
    belief: bool = False
    apply_mode: str | None = None
    tom: bool = True
    tom_rate: float = 1.0
    stale_policy: str = "no"
    seed: int = 0
    round_limit: int | None = None
    deadlock_window: int | None = None
    window: int = 2
    token_cap: int = 4096
    agent_timeout: float = 120.0

    def resolve_world(self, seed: int | None = None) -> WorldConfig:
        seed = self.seed if seed is None else seed
        if self.world is not None:
            cfg = self.world
        else:
            cfg = generate_instance(self.randomization or RandomizationSpec(), seed)
        changes = {}
        if self.apply_mode is not None:
            changes["apply_mode"] = ApplyMode(self.apply_mode)
        if self.round_limit is not None:
            changes["round_limit"] = self.round_limit
        if self.deadlock_window is not None:
            changes["deadlock_window"] = self.deadlock_window
        if changes:
            cfg = dataclasses.replace(cfg, **changes)
            cfg.validate()
        return cfg

    def policy_for(self, agent: str) -> str:
        return dict(self.policies).get(agent, dict(self.policies).get(agent.lower(), self.default_policy))

    def with_policies(self, mapping: Mapping[str, str]) -> "TrialConfig":
        merged = dict(self.policies)
        merged.update(mapping)
        return dataclasses.replace(self, policies=tuple(sorted(merged.items())))

    def to_json(self) -> dict:
        out = {
            "policies": dict(self.policies),
            "default_policy": self.default_policy,
            "belief": self.belief,
            "apply_mode": self.apply_mode,
            "tom": self.tom,
            "tom_rate": self.tom_rate,
            "stale_policy": self.stale_policy,
            "seed": self.seed,
            "round_limit": self.round_limit,
            "deadlock_window": self.deadlock_window,
            "window": self.window,
            "token_cap": self.token_cap,
            "agent_timeout": self.agent_timeout,
        }
        if self.world is not None:
            out["world"] = self.world.to_json()
        if self.randomization is not None:
            out["randomization"] = self.randomization.to_json()
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "TrialConfig":
        data = dict(data)
        if "rooms" in data:
            return cls(world=WorldConfig.from_json(data))
        world = WorldConfig.from_json(data.pop("world")) if "world" in data else None
        rand = RandomizationSpec.from_json(data.pop("randomization")) if "randomization" in data else None
        if data.pop("paper", False):
            world = paper_config()
        policies = data.pop("policies", {})
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown trial config keys {sorted(unknown)}")
        return cls(world=world, randomization=rand, policies=tuple(sorted(policies.items())), **data)

    @classmethod
    def load(cls, path: str | Path) -> "TrialConfig":
        """Read a JSON file; the names ``paper`` and ``random`` select built-in setups."""
        if str(path) == "paper":
            return cls(world=paper_config())
        if str(path) == "random":
            return cls(randomization=RandomizationSpec())
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


# --- transcripts -----------------------------------------------------------


class Transcript:
    """Append-only JSONL event log with a monotonically increasing index."""

    def __init__(self) -> None:
        self.events: list[dict] = []

    def emit(self, kind: str, round: int, agent: str | None, **payload) -> dict:
        event = {"index": len(self.events), "type": kind, "round": round, "agent": agent, **payload}
        self.events.append(event)
        return event

    def lines(self) -> list[str]:
        return [json.dumps(e, sort_keys=True, separators=(",", ":")) for e in self.events]

    def dumps(self) -> str:
        return "\n".join(self.lines()) + "\n"

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @staticmethod
    def read(source: str | Path | Iterable[str]) -> list[dict]:
        is_path = isinstance(source, Path) or (isinstance(source, str) and "\n" not in source)
        if is_path and Path(source).exists():
            text = Path(source).read_text(encoding="utf-8").splitlines()
        elif isinstance(source, str):
            text = source.splitlines()
        else:
            text = list(source)
        events = [json.loads(line) for line in text if line.strip()]
        if not events or events[0].get("type") != "header":
            raise ValueError("transcript has no header line")
        if events[0].get("version") != TRANSCRIPT_VERSION:
            raise ValueError(f"unsupported transcript version {events[0].get('version')!r}")
        return events


def _effect_json(effect, names) -> dict:
    if isinstance(effect, MovedTo):
        return {"kind": "moved", "room": effect.room}
    if isinstance(effect, SequenceRevealed):
        return {"kind": "revealed", "bomb": effect.bomb, "sequence": [names[c] for c in effect.sequence]}
    if isinstance(effect, PhaseCut):
        return {"kind": "cut", "bomb": effect.bomb, "color": names[effect.color]}
    if isinstance(effect, BombDefused):
        return {"kind": "defused", "bomb": effect.bomb, "points": effect.points}
    if isinstance(effect, BombExploded):
        return {"kind": "exploded", "bomb": effect.bomb}
    raise TypeError(effect)


def _action_json(action, names) -> str:
    if isinstance(action, Invalid):
        return f"invalid:{action.reason}"
    return action_phrase(action, names)


# --- metrics ---------------------------------------------------------------


@dataclass
class Metrics:
    score: int
    max_score: int
    rounds_to_completion: int
    rounds_played: int
    valid_actions: int
    total_actions: int
    termination: str
    tom: dict[str, dict] = field(default_factory=dict)
    belief: dict[str, dict] | None = None

    @property
    def valid_action_pct(self) -> float:
        return 100.0 * self.valid_actions / self.total_actions if self.total_actions else 100.0

    @property
    def belief_consistency(self) -> float | None:
        if not self.belief:
            return None
        vals = [v["consistency"] for v in self.belief.values() if v.get("consistency") is not None]
        return sum(vals) / len(vals) if vals else None

    def tom_accuracy(self, level: str) -> float | None:
        row = self.tom.get(level)
        if not row or not row["total"]:
            return None
        return row["correct"] / row["total"]

    def to_json(self) -> dict:
        return {
            "score": self.score,
            "max_score": self.max_score,
            "rounds_to_completion": self.rounds_to_completion,
            "rounds_played": self.rounds_played,
            "valid_actions": self.valid_actions,
            "total_actions": self.total_actions,
            "valid_action_pct": self.valid_action_pct,
            "termination": self.termination,
            "tom": self.tom,
            "belief": self.belief,
            "belief_consistency": self.belief_consistency,
        }


def _tom_table(rows: Iterable[tuple[str, str, str | None]], overrides: Mapping[str, str] | None = None) -> dict:
    """rows of (question id, level, truth, answer) -> per-level tallies."""
    overrides = overrides or {}
    table = {lvl.value: {"correct": 0, "total": 0, "ambiguous": 0} for lvl in Level}
    for qid, level, truth, answer in rows:
        truth = Answer(overrides.get(qid, truth))
        row = table[level]
        if truth is Answer.AMBIGUOUS:
            row["ambiguous"] += 1
            continue
        row["total"] += 1
        if normalize_answer(answer) == truth:
            row["correct"] += 1
    for row in table.values():
        row["accuracy"] = row["correct"] / row["total"] if row["total"] else None
    return table


# --- trial loop ------------------------------------------------------------


@dataclass
class TrialResult:
    config: WorldConfig
    transcript: Transcript
    metrics: Metrics
    state: object
    memories: dict[str, AgentMemory]


def _bind_policies(tc: TrialConfig, cfg: WorldConfig, overrides: Mapping[str, Policy] | None, trial_id: str):
    policies: dict[str, Policy] = {}
    labels: dict[str, str] = {}
    for agent in cfg.agent_names:
        if overrides and agent in overrides:
            policies[agent] = overrides[agent]
            labels[agent] = getattr(overrides[agent], "name", type(overrides[agent]).__name__)
            continue
        spec = tc.policy_for(agent)
        kwargs = {}
        if spec.startswith(("external", "tcp:")):
            kwargs = {"timeout": tc.agent_timeout, "trial_id": trial_id, "belief": tc.belief}
        policies[agent] = make_policy(spec, **kwargs)
        labels[agent] = spec
    return policies, labels


def run_trial(
    tc: TrialConfig,
    seed: int | None = None,
    policies: Mapping[str, Policy] | None = None,
    labels: Mapping[str, str] | None = None,
) -> TrialResult:
    """Play one game to termination and return its transcript and metrics.

    Turn loop per round: deliver last round's messages, then for each agent in
    call-sign order observe, reply, parse, apply, and pose ToM questions about
    the action's consequences. Questions are asked out-of-band and never enter
    the agent's game memory.
    """
    seed = tc.seed if seed is None else seed
    cfg = tc.resolve_world(seed)
    names = cfg.color_names
    trial_id = f"seed-{seed}"
    bound, bound_labels = _bind_policies(tc, cfg, policies, trial_id)
    if labels:
        bound_labels.update(labels)
    tr = Transcript()
    tr.emit("header", 0, None, version=TRANSCRIPT_VERSION, seed=seed, config=cfg.to_json(),
            trial=tc.to_json(), policies=bound_labels)

    state = new_world(cfg)
    log = EpistemicLog(cfg)
    memories: dict[str, AgentMemory] = {}
    last: dict[str, object] = {a: None for a in cfg.agent_names}
    tom_rng = random.Random(f"tom/{seed}")
    tom_rows: list[tuple[str, str, str, str]] = []
    valid = total = 0
    try:
        for agent, policy in bound.items():
            policy.reset(cfg, agent, seed)
            memories[agent] = AgentMemory(
                context=render_context(cfg, agent), window=tc.window, token_cap=tc.token_cap,
                belief=initial_belief(cfg, agent) if tc.belief else None,
            )
        status = Status.RUNNING
        while status is Status.RUNNING:
            rnd = state.round
            if state.inbox:
                log.propagate(Deliver(rnd, state.inbox))
            for agent in cfg.agent_names:
                if state.resolved and state.bombs:
                    break
                obs = render_observation(state, agent, last[agent], state.inbox)
                log.propagate(Observe(rnd, agent, obs.room, tuple(state.locations().items())))
                tr.emit("observation", rnd, agent, text=obs.text)
                reply: AgentReply = bound[agent].act(obs, memories[agent])
                rec = {"raw": reply.raw}
                if reply.belief_text is not None:
                    rec["belief_text"] = reply.belief_text
                if reply.claims:
                    rec["claims"] = [c.to_json() for c in reply.claims]
                tr.emit("reply", rnd, agent, **rec)
                turn = Turn(agent, reply.action, reply.message, tuple(reply.claims))
                state, outcome = apply_turn(state, turn)
                log.propagate(Act(rnd, outcome, tuple(state.locations().items())))
                total += 1
                valid += outcome.ok
                tr.emit(
                    "outcome", rnd, agent,
                    action=_action_json(outcome.action, names),
                    error=outcome.error.value if outcome.error else None,
                    effects=[_effect_json(e, names) for e in outcome.effects],
                    score=state.score,
                )
                if turn.message or turn.claims:
                    msg = state.pending[-1]
                    log.propagate(Send(rnd, msg))
                    tr.emit("message", rnd, agent, text=msg.text, claims=[c.to_json() for c in msg.claims])
                last[agent] = outcome
                window_update(memories[agent], obs, reply)
                if tc.belief and memories[agent].belief is not None:
                    tr.emit("belief", rnd, agent, text=render_belief(memories[agent].belief))
                if tc.tom and outcome.ok:
                    for q in generate_questions(log, agent, outcome, rnd, stale_policy=tc.stale_policy):
                        if tc.tom_rate < 1.0 and tom_rng.random() >= tc.tom_rate:
                            continue
                        qj = q.to_json()
                        del qj["round"]
                        tr.emit("tom_question", rnd, agent, **qj)
                        answer = bound[agent].answer(q)
                        tr.emit("tom_answer", rnd, agent, id=q.id, answer=answer)
                        tom_rows.append((q.id, q.level.value, q.truth.value, answer))
            state = end_round(state)
            status = check_termination(state)
    finally:
        for policy in bound.values():
            policy.close()

    played = state.round - 1
    completed = status is Status.ALL_DEFUSED
    belief = None
    if tc.belief:
        belief = {a: score_belief(m.belief, state).to_json() for a, m in memories.items() if m.belief is not None}
    metrics = Metrics(
        score=state.score,
        max_score=cfg.max_score,
        rounds_to_completion=played if completed else cfg.round_limit,
        rounds_played=played,
        valid_actions=valid,
        total_actions=total,
        termination=status.value,
        tom=_tom_table(tom_rows),
        belief=belief,
    )
    tr.emit("termination", played, None, reason=status.value, score=state.score, metrics=metrics.to_json())
    return TrialResult(cfg, tr, metrics, state, memories)


# --- batches ---------------------------------------------------------------


BATCH_COLUMNS = ("score", "rounds_to_completion", "valid_action_pct", "tom_introspection", "tom_first_order",
                 "tom_second_order", "belief_consistency")


def trial_row(seed: int, m: Metrics) -> dict:
    return {
        "seed": seed,
        "score": m.score,
        "rounds_to_completion": m.rounds_to_completion,
        "rounds_played": m.rounds_played,
        "valid_action_pct": m.valid_action_pct,
        "termination": m.termination,
        "tom_introspection": m.tom_accuracy("introspection"),
        "tom_first_order": m.tom_accuracy("first_order"),
        "tom_second_order": m.tom_accuracy("second_order"),
        "belief_consistency": m.belief_consistency,
    }


def aggregate(rows: Sequence[Mapping], columns: Sequence[str] = BATCH_COLUMNS) -> dict[str, dict]:
    """Mean and sample standard deviation per column (sd 0 for a single value)."""
    out = {}
    for col in columns:
        vals = [r[col] for r in rows if r.get(col) is not None]
        if not vals:
            out[col] = {"mean": None, "sd": None, "n": 0}
            continue
        mean = statistics.fmean(vals)
        sd = statistics.stdev(vals) if len(vals) > 1 else 0.0
        out[col] = {"mean": mean, "sd": sd, "n": len(vals)}
    return out


def format_table(summary: Mapping[str, Mapping], title: str = "") -> str:
    width = max(len(c) for c in summary) if summary else 10
    lines = [title] if title else []
    lines.append(f"{'metric':<{width}}  {'mean':>9}  {'sd':>9}  {'n':>5}")
    lines.append("-" * (width + 29))
    for col, s in summary.items():
        if s["mean"] is None:
            lines.append(f"{col:<{width}}  {'-':>9}  {'-':>9}  {0:>5}")
        else:
            lines.append(f"{col:<{width}}  {s['mean']:>9.2f}  {s['sd']:>9.2f}  {s['n']:>5}")
    return "\n".join(lines)


def _run_one(args) -> tuple[int, dict, str]:
    tc, seed = args
    result = run_trial(tc, seed)
    return seed, trial_row(seed, result.metrics), result.transcript.dumps()


@dataclass
class BatchResult:
    rows: list[dict]
    summary: dict[str, dict]
    transcripts: dict[int, str]

    def jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.rows)

    def table(self, title: str = "") -> str:
        return format_table(self.summary, title)


def run_batch(tc: TrialConfig, seeds: Sequence[int], workers: int = 1, keep_transcripts: bool = False) -> BatchResult:
    if not seeds:
        raise ValueError("need at least one seed")
    jobs = [(tc, s) for s in seeds]
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(_run_one, jobs))
    else:
        done = [_run_one(j) for j in jobs]
    done.sort(key=lambda d: seeds.index(d[0]))
    rows = [row for _, row, _ in done]
    transcripts = {s: t for s, _, t in done} if keep_transcripts else {}
    return BatchResult(rows, aggregate(rows), transcripts)


def parse_seeds(text: str) -> list[int]:
    """``"0..9"`` (inclusive), ``"3"`` or ``"1,4,7"``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise ValueError(f"empty seed range {part!r}")
            out.extend(range(lo, hi + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise ValueError("no seeds given")
    return out


# --- planner-driven teams ---------------------------------------------------


def plan_policies(plan) -> dict[str, Policy]:
    return {a: ScriptPolicy(plan.actions[a]) for a in plan.agents}


# --- replay & reports -------------------------------------------------------


def replay(source: str | Path | Iterable[str]) -> TrialResult:
    """Re-run a transcript's recorded replies through a fresh engine."""
    events = Transcript.read(source)
    header = events[0]
    tc = TrialConfig.from_json(header["trial"])
    if tc.resolve_world(header["seed"]) != WorldConfig.from_json(header["config"]):
        raise ValueError("transcript header config does not match its trial settings")
    replies: dict[str, list[dict]] = {}
    answers: dict[str, dict[str, str]] = {}
    for ev in events[1:]:
        if ev["type"] == "reply":
            replies.setdefault(ev["agent"], []).append(ev)
        elif ev["type"] == "tom_answer":
            answers.setdefault(ev["agent"], {})[ev["id"]] = ev["answer"]
    policies = {
        a: ReplayPolicy(replies.get(a, []), answers.get(a, {}))
        for a in WorldConfig.from_json(header["config"]).agent_names
    }
    return run_trial(tc, header["seed"], policies=policies, labels=header["policies"])


def tom_rows(events: Sequence[Mapping]) -> list[tuple[str, str, str, str]]:
    questions = {}
    rows = []
    for ev in events:
        if ev["type"] == "tom_question":
            questions[ev["id"]] = ev
        elif ev["type"] == "tom_answer":
            q = questions[ev["id"]]
            rows.append((q["id"], q["level"], q["truth"], ev["answer"]))
    return rows


def tom_report(transcripts: Iterable[str | Path], overrides: Mapping[str, str] | None = None) -> dict:
    """Per-level accuracy over one or more transcripts; ambiguous questions excluded.

    ``overrides`` maps question id to a corrected truth label. Ids are only
    unique within a transcript, so with several transcripts prefix them as
    ``<n>:<id>`` (``n`` being the transcript's position).
    """
    overrides = dict(overrides or {})
    rows = []
    paths = list(transcripts)
    many = len(paths) > 1
    for n, path in enumerate(paths):
        for qid, level, truth, answer in tom_rows(Transcript.read(path)):
            key = f"{n}:{qid}" if many else qid
            rows.append((key, level, truth, answer))
    return _tom_table(rows, overrides)


def format_tom_report(table: Mapping[str, Mapping]) -> str:
    lines = [f"{'level':<14}  {'accuracy':>8}  {'correct':>7}  {'graded':>6}  {'ambiguous':>9}",
             "-" * 52]
    for level, row in table.items():
        acc = "-" if row["accuracy"] is None else f"{100 * row['accuracy']:.1f}%"
        lines.append(f"{level:<14}  {acc:>8}  {row['correct']:>7}  {row['total']:>6}  {row['ambiguous']:>9}")
    return "\n".join(lines)
