"""Full-information baselines: a conflict-based task-assignment planner and a
brute-force optimal planner for tiny instances.

Time is discrete. Agents act once per round in turn order, so agent ``i``'s
action in round ``r`` happens at tick ``(r - 1) * N + i``. A bomb's phases
must be cut at strictly increasing ticks, which lets two agents cut
consecutive phases of one bomb within the same round when the earlier phase
belongs to the agent that moves first.

High level: every assignment of phases to eligible agents is a root of a
constraint tree, expanded best-first by (return desc, makespan asc, depth
asc). Low level: for one agent and its assigned phases, an exact dynamic
program over visit orders gives the earliest finishing schedule under the
node's per-phase time constraints.

Conflicts:

* precedence: phase ``j + 1`` of a bomb cut at a tick not after phase ``j``;
* targeting: a cut in a room where a lower-id bomb shows the same head colour
  at that tick (the engine would cut the wrong bomb).
"""

from __future__ import annotations

import dataclasses
import heapq
import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .world import (
    Action,
    Apply,
    Inspect,
    Invalid,
    Move,
    POINTS_PER_PHASE,
    Turn,
    WorldConfig,
    WorldState,
    apply_action,
    legal_actions,
    new_world,
    step_round,
)

PhaseRef = tuple[int, int]  # (bomb id, index into the bomb's remaining sequence)

BRUTE_FORCE_LIMITS = {"rooms": 4, "bombs": 3, "horizon": 10}


class PlanDivergence(RuntimeError):
    """A plan step was rejected by the engine or hit the wrong bomb."""


# --- tasks -----------------------------------------------------------------


@dataclass(frozen=True)
class Task:
    bomb: int
    room: int
    phases: tuple[int, ...]
    eligible: tuple[tuple[int, ...], ...]

    @property
    def feasible(self) -> bool:
        return all(self.eligible)


@dataclass(frozen=True)
class Snapshot:
    round: int
    positions: tuple[int, ...]
    remaining: tuple[tuple[int, tuple[int, ...]], ...]

    @classmethod
    def of(cls, state: WorldState) -> "Snapshot":
        return cls(
            round=state.round,
            positions=tuple(a.location for a in state.agents),
            remaining=tuple((b.id, b.remaining if b.live else ()) for b in state.bombs),
        )

    def remaining_of(self, bomb: int) -> tuple[int, ...]:
        return dict(self.remaining)[bomb]


def _tasks(config: WorldConfig, snapshot: Snapshot) -> list[Task]:
    tasks = []
    for spec in config.bombs:
        rem = snapshot.remaining_of(spec.id)
        if not rem:
            continue
        eligible = tuple(
            tuple(i for i, a in enumerate(config.agents) if c in a.tools) for c in rem
        )
        tasks.append(Task(spec.id, spec.room, rem, eligible))
    return tasks


def sort_tasks(config: WorldConfig, heuristic: str = "distance", state: WorldState | None = None) -> list[Task]:
    """Bombs ordered by BFS distance from the nearest agent; ties by bomb id."""
    snap = Snapshot.of(state if state is not None else new_world(config))
    tasks = _tasks(config, snap)
    if heuristic == "id":
        return sorted(tasks, key=lambda t: t.bomb)
    if heuristic != "distance":
        raise ValueError(f"unknown heuristic {heuristic!r}")
    dists = [config.distances(p) for p in snap.positions]
    return sorted(tasks, key=lambda t: (min(d[t.room] for d in dists), t.bomb))


def partition_subtasks(tasks: Sequence[Task], k: int) -> list[tuple[PhaseRef, ...]]:
    """Chunk the ordered phase list into groups of at most ``k``.

    A bomb split across chunks keeps its order because chunks run one after
    another.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    phases = [(t.bomb, j) for t in tasks for j in range(len(t.phases))]
    return [tuple(phases[i:i + k]) for i in range(0, len(phases), k)]


# --- constraint tree -------------------------------------------------------


@dataclass(frozen=True)
class Constraint:
    kind: str  # "after" | "before" | "not_at" | "at"
    phase: PhaseRef
    tick: int


@dataclass(frozen=True)
class Bounds:
    lo: int = 0
    hi: int | None = None
    forbidden: frozenset[int] = frozenset()

    def add(self, c: Constraint) -> "Bounds":
        if c.kind == "after":
            return dataclasses.replace(self, lo=max(self.lo, c.tick + 1))
        if c.kind == "before":
            hi = c.tick - 1 if self.hi is None else min(self.hi, c.tick - 1)
            return dataclasses.replace(self, hi=hi)
        if c.kind == "not_at":
            return dataclasses.replace(self, forbidden=self.forbidden | {c.tick})
        if c.kind == "at":
            hi = c.tick if self.hi is None else min(self.hi, c.tick)
            return dataclasses.replace(self, lo=max(self.lo, c.tick), hi=hi)
        raise ValueError(f"unknown constraint kind {c.kind!r}")


@dataclass
class ConstraintNode:
    parent: "ConstraintNode | None"
    constraints: tuple[Constraint, ...]
    assignment: Mapping[PhaseRef, int]
    bounds: Mapping[PhaseRef, Bounds]
    # per agent: ((phase, round), ...) in execution order
    paths: tuple[tuple[tuple[PhaseRef, int], ...], ...]
    ret: int
    makespan: int
    depth: int = 0

    def schedule(self) -> dict[PhaseRef, tuple[int, int]]:
        """phase -> (agent index, round)."""
        return {ph: (a, r) for a, path in enumerate(self.paths) for ph, r in path}


@dataclass
class SubtaskResult:
    node: ConstraintNode | None
    infeasible: tuple[int, ...]
    expanded: int
    generated: int


class _Problem:
    """One subtask: phases to place, world snapshot, and the low-level solver."""

    def __init__(self, config: WorldConfig, snapshot: Snapshot, phases: Sequence[PhaseRef], horizon: int):
        self.config = config
        self.snap = snapshot
        self.n = len(config.agents)
        self.horizon = horizon
        self.room = {b.id: b.room for b in config.bombs}
        self.rem = dict(snapshot.remaining)
        self.dist = {r: config.distances(r) for r in config.rooms}
        self.phases = list(phases)
        self.color = {(b, j): self.rem[b][j] for b, j in self.phases}
        self.eligible = {
            ph: tuple(i for i, a in enumerate(config.agents) if self.color[ph] in a.tools)
            for ph in self.phases
        }
        by_bomb: dict[int, list[PhaseRef]] = {}
        for ph in self.phases:
            by_bomb.setdefault(ph[0], []).append(ph)
        self.by_bomb = by_bomb
        # a bomb whose later phases nobody can cut is never worth starting
        hopeless = {
            b for b, rem in self.rem.items()
            if any(not any(c in a.tools for a in config.agents) for c in rem)
        }
        self.infeasible = tuple(sorted(b for b in by_bomb if b in hopeless))
        # longest cuttable prefix of each bomb's portion, and the points for finishing it
        self.prefix = {}
        self.credit = {}
        for b, phs in by_bomb.items():
            m = 0
            while m < len(phs) and self.eligible[phs[m]]:
                m += 1
            self.prefix[b] = m
            self.credit[b] = 0 if b in hopeless else POINTS_PER_PHASE * len(phs)
        self._memo: dict = {}

    def tick(self, agent: int, rnd: int) -> int:
        return (rnd - 1) * self.n + agent

    def round_for(self, agent: int, tick: int) -> int:
        """Smallest round whose tick for ``agent`` is >= ``tick``."""
        return max(1, -(-(tick - agent) // self.n) + 1)

    # -- low level --

    def low_level(self, agent: int, phases: frozenset[PhaseRef], bounds: Mapping[PhaseRef, Bounds]):
        key = (agent, phases, tuple(sorted((p, bounds.get(p, Bounds())) for p in phases)))
        if key not in self._memo:
            self._memo[key] = self._solve_agent(agent, sorted(phases), bounds)
        return self._memo[key]

    def _solve_agent(self, agent: int, phases: list[PhaseRef], bounds: Mapping[PhaseRef, Bounds]):
        """Earliest-finishing order of ``phases`` for one agent, or None."""
        if not phases:
            return ()
        start_room = self.snap.positions[agent]
        start_round = self.snap.round
        m = len(phases)
        index = {p: i for i, p in enumerate(phases)}
        pred = [index.get((b, j - 1)) for b, j in phases]

        def cut_round(i: int, ready: int, frm: int) -> int | None:
            ph = phases[i]
            rnd = ready + self.dist[frm][self.room[ph[0]]]
            bd = bounds.get(ph, Bounds())
            rnd = max(rnd, self.round_for(agent, bd.lo))
            while self.tick(agent, rnd) in bd.forbidden:
                rnd += 1
            if bd.hi is not None and self.tick(agent, rnd) > bd.hi:
                return None
            if rnd > self.horizon:
                return None
            return rnd

        best: dict[tuple[int, int], tuple[int, tuple]] = {}
        for i in range(m):
            if pred[i] is not None:
                continue
            r = cut_round(i, start_round, start_room)
            if r is not None:
                best[(1 << i, i)] = (r, (i,))
        full = (1 << m) - 1
        for mask in range(1, full + 1):
            for last in range(m):
                entry = best.get((mask, last))
                if entry is None:
                    continue
                r_last, order = entry
                frm = self.room[phases[last][0]]
                for i in range(m):
                    if mask >> i & 1:
                        continue
                    if pred[i] is not None and not mask >> pred[i] & 1:
                        continue
                    r = cut_round(i, r_last + 1, frm)
                    if r is None:
                        continue
                    key = (mask | 1 << i, i)
                    cur = best.get(key)
                    if cur is None or (r, order + (i,)) < cur:
                        best[key] = (r, order + (i,))
        finals = [best[(full, i)] for i in range(m) if (full, i) in best]
        if not finals:
            return None
        r_end, order = min(finals)
        path = []
        r, frm = start_round, start_room
        for i in order:
            cr = cut_round(i, r, frm)
            path.append((phases[i], cr))
            r, frm = cr + 1, self.room[phases[i][0]]
        return tuple(path)

    # -- nodes --

    def prefix_vectors(self) -> list[tuple[int, tuple[tuple[int, int], ...]]]:
        """(return, ((bomb, phases cut), ...)) for every choice of per-bomb prefix.

        Points only come from finishing a bomb, but cutting part of an
        unfinishable bomb can still be needed to clear its head out of the
        way of a higher-id bomb in the same room.
        """
        bombs = sorted(self.by_bomb)
        out = []
        for counts in itertools.product(*(range(self.prefix[b] + 1) for b in bombs)):
            ret = sum(self.credit[b] for b, c in zip(bombs, counts) if c == len(self.by_bomb[b]))
            out.append((ret, tuple(zip(bombs, counts))))
        out.sort(key=lambda v: (-v[0], sum(c for _, c in v[1]), v[1]))
        return out

    def make_node(self, parent, constraints, assignment, bounds, paths=None, changed=None, ret=None):
        if paths is None:
            paths = [None] * self.n
        else:
            paths = list(paths)
        for a in range(self.n) if changed is None else changed:
            mine = frozenset(p for p, who in assignment.items() if who == a)
            sol = self.low_level(a, mine, bounds)
            if sol is None:
                return None
            paths[a] = sol
        finish = [path[-1][1] if path else 0 for path in paths]
        makespan = max(finish, default=0)
        if makespan > self.horizon:
            return None
        if ret is None:
            ret = parent.ret
        depth = parent.depth + 1 if parent is not None else 0
        return ConstraintNode(parent, tuple(constraints), dict(assignment), dict(bounds), tuple(paths), ret,
                              makespan, depth)

    def find_conflict(self, node: ConstraintNode):
        sched = node.schedule()
        ticks = {ph: self.tick(a, r) for ph, (a, r) in sched.items()}
        found = []
        for b, phs in self.by_bomb.items():
            for x, y in zip(phs, phs[1:]):
                if x in ticks and y in ticks and ticks[y] <= ticks[x]:
                    found.append((ticks[x], 0, ("precedence", x, y, ticks[x])))
        if found:
            return min(found)[2]
        for x, t in sorted(ticks.items(), key=lambda kv: (kv[1], kv[0])):
            bomb, _ = x
            room = self.room[bomb]
            c = self.color[x]
            for other in sorted(self.rem):
                if other >= bomb or self.room[other] != room or not self.rem[other]:
                    continue
                rem = self.rem[other]
                k = 0
                while k < len(rem) and ticks.get((other, k), float("inf")) < t:
                    k += 1
                if k < len(rem) and rem[k] == c:
                    y = (other, k)
                    w = (other, k - 1) if k > 0 else None
                    return ("target", x, y, w, t)
        return None

    def children(self, node: ConstraintNode, conflict) -> list[ConstraintNode]:
        splits: list[list[Constraint]] = []
        if conflict[0] == "precedence":
            _, x, y, t = conflict
            splits = [[Constraint("after", y, t)], [Constraint("before", x, t)]]
        else:
            _, x, y, w, t = conflict
            splits.append([Constraint("not_at", x, t)])
            if y in node.assignment:
                splits.append([Constraint("at", x, t), Constraint("before", y, t)])
            if w is not None:
                splits.append([Constraint("at", x, t), Constraint("after", w, t)])
        out = []
        for extra in splits:
            bounds = dict(node.bounds)
            for c in extra:
                bounds[c.phase] = bounds.get(c.phase, Bounds()).add(c)
            changed = sorted({node.assignment[c.phase] for c in extra if c.phase in node.assignment})
            if any(c.phase not in node.assignment for c in extra):
                continue
            child = self.make_node(node, extra, node.assignment, bounds, node.paths, changed)
            if child is not None:
                out.append(child)
        return out

    def roots(self, vector: Sequence[tuple[int, int]], ret: int) -> Iterable[ConstraintNode]:
        phases = [p for b, count in vector for p in self.by_bomb[b][:count]]
        per_agent: dict[tuple[int, frozenset], object] = {}
        for combo in itertools.product(*(self.eligible[p] for p in phases)):
            assignment = dict(zip(phases, combo))
            paths = []
            ok = True
            for a in range(self.n):
                mine = frozenset(p for p, who in assignment.items() if who == a)
                key = (a, mine)
                if key not in per_agent:
                    per_agent[key] = self.low_level(a, mine, {})
                sol = per_agent[key]
                if sol is None:
                    ok = False
                    break
                paths.append(sol)
            if not ok:
                continue
            node = self.make_node(None, (), assignment, {}, paths, changed=(), ret=ret)
            if node is not None:
                yield node


def solve_subtask(
    config: WorldConfig,
    snapshot: Snapshot,
    subtask: Sequence[PhaseRef],
    horizon: int | None = None,
    node_limit: int = 200_000,
) -> SubtaskResult:
    """Best-first search over assignments and constraint splits.

    Returns the conflict-free node with the highest return, then the smallest
    makespan. Bombs with a phase nobody can cut are reported and earn nothing.
    """
    horizon = config.round_limit if horizon is None else horizon
    prob = _Problem(config, snapshot, subtask, horizon)
    vectors = prob.prefix_vectors()
    heap: list = []
    counter = itertools.count()
    expanded = generated = 0
    pos = 0

    def push(node: ConstraintNode) -> None:
        heapq.heappush(heap, ((-node.ret, node.makespan, node.depth, next(counter)), node))

    while True:
        # roots are added lazily, one return level at a time
        while pos < len(vectors):
            ret, vector = vectors[pos]
            if heap and -heap[0][0][0] > ret:
                break
            for root in prob.roots(vector, ret):
                push(root)
                generated += 1
            pos += 1
        if not heap:
            return SubtaskResult(None, prob.infeasible, expanded, generated)
        _, node = heapq.heappop(heap)
        expanded += 1
        if expanded > node_limit:
            raise RuntimeError(f"constraint tree exceeded {node_limit} expansions")
        conflict = prob.find_conflict(node)
        if conflict is None:
            return SubtaskResult(node, prob.infeasible, expanded, generated)
        for child in prob.children(node, conflict):
            push(child)
            generated += 1


# --- plans -----------------------------------------------------------------


@dataclass
class JointPlan:
    agents: tuple[str, ...]
    actions: dict[str, list[Action]]
    score: int
    rounds: int
    color_names: tuple[str, ...] = ()
    meta: dict = field(default_factory=dict)

    def action_at(self, agent: str, rnd: int) -> Action | None:
        seq = self.actions[agent]
        return seq[rnd - 1] if 0 < rnd <= len(seq) else None

    def to_json(self) -> dict:
        from .textio import action_phrase

        names = self.color_names
        table = []
        for r in range(1, self.rounds + 1):
            row = {"round": r}
            for a in self.agents:
                act = self.action_at(a, r)
                row[a] = action_phrase(act, names) if act is not None and not isinstance(act, Invalid) else None
            table.append(row)
        return {"agents": list(self.agents), "score": self.score, "rounds": self.rounds,
                "table": table, "meta": self.meta}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def _next_hop(config: WorldConfig, here: int, goal: int) -> int:
    dist = config.distances(goal)
    return min(n for n in config.neighbors(here) if dist[n] == dist[here] - 1)


def _compile_round(state: WorldState, node: ConstraintNode, rnd: int, room_of: Mapping[int, int],
                   colors: Mapping[PhaseRef, int]):
    """Per-agent intended actions for ``rnd`` (None = free to idle)."""
    intents = []
    for a, path in enumerate(node.paths):
        todo = [(ph, r) for ph, r in path if r >= rnd]
        if not todo:
            intents.append(None)
            continue
        ph, r = todo[0]
        intents.append((ph, r, room_of[ph[0]], colors[ph]))
    return intents


def _idle(state: WorldState, agent: str) -> Action:
    legal = legal_actions(state, agent)
    if any(isinstance(x, Inspect) for x in legal):
        return Inspect()
    moves = [x for x in legal if isinstance(x, Move)]
    return moves[0] if moves else Invalid("idle")


def _fill_turns(state: WorldState, wanted: Sequence[tuple[str, Action | None]]) -> list[Turn]:
    """Replace ``None`` entries with a legal idle action for the state that agent will face."""
    sim = state
    turns = []
    for name, action in wanted:
        if action is None:
            action = _idle(sim, name)
        sim, _ = apply_action(sim, name, action)
        turns.append(Turn(name, action))
    return turns


def execute_node(state: WorldState, node: ConstraintNode, prob_colors: Mapping[PhaseRef, int]):
    """Drive the engine through ``node``'s schedule, certifying every step."""
    config = state.config
    room_of = {b.id: b.room for b in config.bombs}
    names = config.agent_names
    taken: dict[str, list[Action]] = {n: [] for n in names}
    results = []
    end = node.makespan
    while state.round <= end and not (state.resolved and state.bombs):
        rnd = state.round
        intents = _compile_round(state, node, rnd, room_of, prob_colors)
        turns = []
        planned: dict[str, PhaseRef | None] = {}
        # actions depend on earlier turns only through bomb state, never positions
        for a, name in enumerate(names):
            intent = intents[a]
            here = state.agents[a].location
            if intent is None:
                planned[name] = None
                turns.append((name, None))
                continue
            ph, r, room, color = intent
            if r == rnd:
                if here != room:
                    raise PlanDivergence(f"{name} is not in room {room} for its cut in round {rnd}")
                turns.append((name, Apply(color)))
                planned[name] = ph
            elif here != room:
                turns.append((name, Move(_next_hop(config, here, room))))
                planned[name] = None
            else:
                turns.append((name, Inspect()))
                planned[name] = None
        state, result = step_round(state, _fill_turns(state, turns))
        for out in result.outcomes:
            taken[out.agent].append(out.action)
            want = planned.get(out.agent)
            if not out.ok and not isinstance(out.action, Invalid):
                raise PlanDivergence(f"round {rnd}: {out.agent} {out.action} rejected ({out.error.value})")
            if want is not None and out.target != want[0]:
                raise PlanDivergence(f"round {rnd}: {out.agent} cut bomb {out.target}, planned {want[0]}")
        results.append(result)
    return state, taken, results


def compose_and_execute(config: WorldConfig, k: int | None = None, heuristic: str = "distance",
                        state: WorldState | None = None):
    """Solve subtasks of ``k`` phases one after another and run them through the engine.

    ``k=None`` treats the whole mission as one subtask. Returns the certified
    :class:`JointPlan` and the per-round engine results.
    """
    state = new_world(config) if state is None else state
    tasks = sort_tasks(config, heuristic, state)
    total = sum(len(t.phases) for t in tasks)
    k = total if k is None or k <= 0 else k
    chunks = partition_subtasks(tasks, max(k, 1)) if total else []
    planned_len = {t.bomb: len(t.phases) for t in tasks}
    names = config.agent_names
    actions: dict[str, list[Action]] = {n: [] for n in names}
    results = []
    infeasible: set[int] = set()
    last_cut = 0
    stats = {"expanded": 0, "generated": 0}
    for chunk in chunks:
        snap = Snapshot.of(state)
        # phase indices are relative to the mission start; rebase on what is left
        live = []
        for b, j in chunk:
            rel = j - (planned_len[b] - len(snap.remaining_of(b)))
            if 0 <= rel < len(snap.remaining_of(b)):
                live.append((b, rel))
        if not live:
            continue
        res = solve_subtask(config, snap, live, horizon=config.round_limit)
        infeasible |= set(res.infeasible)
        stats["expanded"] += res.expanded
        stats["generated"] += res.generated
        if res.node is None or not res.node.assignment:
            continue
        colors = {ph: snap.remaining_of(ph[0])[ph[1]] for ph in res.node.assignment}
        state, taken, rs = execute_node(state, res.node, colors)
        for n in names:
            actions[n].extend(taken[n])
        results.extend(rs)
        last_cut = res.node.makespan
        if state.resolved:
            break
    rounds = max((len(v) for v in actions.values()), default=0)
    rounds = max(rounds, last_cut) if any(actions.values()) else 0
    plan = JointPlan(names, actions, state.score, rounds, config.color_names,
                     {"k": k, "infeasible": sorted(infeasible), **stats})
    return plan, results


def certify(config: WorldConfig, plan: JointPlan) -> WorldState:
    """Replay ``plan`` through a fresh engine; raises on any rejected step."""
    state = new_world(config)
    for rnd in range(1, plan.rounds + 1):
        if state.resolved and state.bombs:
            break
        wanted = [(n, plan.action_at(n, rnd)) for n in config.agent_names]
        state, result = step_round(state, _fill_turns(state, wanted))
        for out in result.outcomes:
            if not out.ok:
                raise PlanDivergence(f"round {rnd}: {out.agent} {out.action} rejected ({out.error.value})")
    if state.score != plan.score:
        raise PlanDivergence(f"plan claims {plan.score} points, engine gives {state.score}")
    return state


# --- brute force -----------------------------------------------------------


def brute_force_optimal(config: WorldConfig, horizon: int) -> JointPlan:
    """Exhaustive search over joint action sequences maximising (score, -rounds).

    ``rounds`` is the round of the last scoring cut. Only legal engine
    actions are considered, and the engine itself computes every transition.
    """
    lim = BRUTE_FORCE_LIMITS
    if config.n_rooms > lim["rooms"] or len(config.bombs) > lim["bombs"] or horizon > lim["horizon"]:
        raise ValueError(f"instance exceeds brute-force limits {lim}")
    names = config.agent_names
    n = len(names)
    memo: dict = {}

    def key(state: WorldState, rnd: int, i: int):
        return (rnd, i, tuple(a.location for a in state.agents),
                tuple((b.remaining, b.exploded) for b in state.bombs))

    def value(state: WorldState, rnd: int, i: int):
        """Best (future score, last scoring round) and the action achieving it."""
        if rnd > horizon or state.resolved:
            return (0, 0), None
        k = key(state, rnd, i)
        if k in memo:
            return memo[k]
        nxt = (rnd, i + 1) if i + 1 < n else (rnd + 1, 0)
        best = None
        best_action = None
        options = legal_actions(state, names[i]) or [Invalid("idle")]
        for action in options:
            new, out = apply_action(state, names[i], action)
            (fs, fl), _ = value(new, *nxt)
            gain = out.score_delta + fs
            last = fl if fl else (rnd if out.score_delta else 0)
            cand = (gain, -last)
            if best is None or cand > best:
                best, best_action = cand, action
        result = ((best[0], -best[1]), best_action)
        memo[k] = result
        return result

    state = new_world(config)
    (score, last), _ = value(state, 1, 0)
    actions: dict[str, list[Action]] = {nm: [] for nm in names}
    rnd, i = 1, 0
    while rnd <= last:
        _, action = value(state, rnd, i)
        if action is None:
            break
        state, _ = apply_action(state, names[i], action)
        actions[names[i]].append(action)
        rnd, i = (rnd, i + 1) if i + 1 < n else (rnd + 1, 0)
    return JointPlan(names, actions, score, last, config.color_names, {"oracle": "brute_force"})
