"""Command-line entry point: ``defusal run|plan|replay|tom-score|gen``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

from .harness import (
    RandomizationSpec,
    TrialConfig,
    format_tom_report,
    generate_instance,
    parse_seeds,
    replay,
    run_batch,
    tom_report,
)
from .planner import certify, compose_and_execute
from .textio import action_phrase
from .world import ConfigError


def _policy_map(text: str) -> dict[str, str]:
    """``alpha=greedy,bravo=random`` -> {"Alpha": "greedy", "Bravo": "random"}; ``all=x`` sets the default."""
    out = {}
    for part in text.split(","):
        if not part.strip():
            continue
        name, sep, spec = part.partition("=")
        if not sep or not spec.strip():
            raise argparse.ArgumentTypeError(f"bad policy binding {part!r}; expected name=policy")
        out[name.strip().capitalize()] = spec.strip()
    return out


def _trial_config(args) -> TrialConfig:
    tc = TrialConfig.load(args.config)
    changes = {}
    if getattr(args, "belief", False):
        changes["belief"] = True
    if getattr(args, "apply_mode", None):
        changes["apply_mode"] = args.apply_mode
    if getattr(args, "no_tom", False):
        changes["tom"] = False
    if getattr(args, "round_limit", None):
        changes["round_limit"] = args.round_limit
    if changes:
        tc = dataclasses.replace(tc, **changes)
    if getattr(args, "policy", None):
        bindings = dict(args.policy)
        default = bindings.pop("All", None)
        if default:
            tc = dataclasses.replace(tc, default_policy=default)
        tc = tc.with_policies(bindings)
    return tc


def cmd_run(args) -> int:
    tc = _trial_config(args)
    seeds = parse_seeds(args.seeds)
    start = time.perf_counter()
    batch = run_batch(tc, seeds, workers=args.workers, keep_transcripts=args.out is not None)
    elapsed = time.perf_counter() - start
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for seed, text in batch.transcripts.items():
            (out / f"trial_{seed}.jsonl").write_text(text, encoding="utf-8")
    if args.jsonl is not None:
        Path(args.jsonl).write_text(batch.jsonl(), encoding="utf-8")
    print(batch.table(f"{len(seeds)} trial(s), {elapsed:.2f}s"))
    return 0


def cmd_plan(args) -> int:
    tc = TrialConfig.load(args.config)
    cfg = tc.resolve_world(args.seed)
    start = time.perf_counter()
    plan, _ = compose_and_execute(cfg, k=args.k, heuristic=args.heuristic)
    elapsed = time.perf_counter() - start
    certify(cfg, plan)
    if args.json:
        print(plan.dumps())
    else:
        for rnd in range(1, plan.rounds + 1):
            acts = [(a, plan.action_at(a, rnd)) for a in plan.agents]
            cells = [f"{a}: {'-' if x is None else action_phrase(x, cfg.color_names)}" for a, x in acts]
            print(f"round {rnd:>2}  " + "  |  ".join(cells))
        print(f"score {plan.score}/{cfg.max_score} in {plan.rounds} rounds ({elapsed:.3f}s, certified)")
    return 0


def cmd_replay(args) -> int:
    original = Path(args.transcript).read_text(encoding="utf-8")
    result = replay(args.transcript)
    same = result.transcript.dumps() == original
    print(json.dumps(result.metrics.to_json(), sort_keys=True))
    print("identical" if same else "DIVERGED")
    return 0 if same else 1


def cmd_tom_score(args) -> int:
    overrides = None
    if args.overrides:
        with open(args.overrides, encoding="utf-8") as fh:
            overrides = json.load(fh)
    table = tom_report(args.transcript, overrides)
    print(json.dumps(table, sort_keys=True) if args.json else format_tom_report(table))
    return 0


def cmd_gen(args) -> int:
    spec = RandomizationSpec()
    if args.spec:
        with open(args.spec, encoding="utf-8") as fh:
            spec = RandomizationSpec.from_json(json.load(fh))
    print(json.dumps(generate_instance(spec, args.seed).to_json(), indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="defusal", description="Cooperative bomb-defusal text-game simulator.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a batch of trials and print the metrics table")
    run.add_argument("--config", default="paper", help="trial config JSON, or 'paper' / 'random'")
    run.add_argument("--seeds", default="0")
    run.add_argument("--belief", action="store_true", help="enable explicit belief documents")
    run.add_argument("--policy", type=_policy_map, help="e.g. alpha=greedy,bravo=random or all=greedy")
    run.add_argument("--apply-mode", choices=("guarded", "explosive"))
    run.add_argument("--round-limit", type=int)
    run.add_argument("--no-tom", action="store_true", help="skip ToM questions")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--out", help="directory for per-trial transcripts")
    run.add_argument("--jsonl", help="file for per-trial metric rows")
    run.set_defaults(func=cmd_run)

    plan = sub.add_parser("plan", help="solve and certify a joint plan")
    plan.add_argument("--config", default="paper")
    plan.add_argument("--seed", type=int, default=0, help="instance seed for randomized configs")
    plan.add_argument("--k", type=int, default=None, help="phases per subtask (default: whole mission)")
    plan.add_argument("--heuristic", choices=("distance", "id"), default="distance")
    plan.add_argument("--json", action="store_true")
    plan.set_defaults(func=cmd_plan)

    rep = sub.add_parser("replay", help="re-run a transcript and check it reproduces byte for byte")
    rep.add_argument("transcript")
    rep.set_defaults(func=cmd_replay)

    tom = sub.add_parser("tom-score", help="per-level ToM accuracy from transcripts")
    tom.add_argument("transcript", nargs="+")
    tom.add_argument("--overrides", help="JSON object mapping question id to a corrected label")
    tom.add_argument("--json", action="store_true")
    tom.set_defaults(func=cmd_tom_score)

    gen = sub.add_parser("gen", help="print a generated world config")
    gen.add_argument("--spec", help="randomization spec JSON (defaults: 5 rooms, 5 bombs, 3 agents)")
    gen.add_argument("--seed", type=int, default=0)
    gen.set_defaults(func=cmd_gen)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"defusal: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
