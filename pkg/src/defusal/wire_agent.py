"""Minimal external agent speaking the NDJSON wire protocol.

Useful as a reference bridge and for exercising the adapter's failure paths:

    python3 -m defusal.wire_agent --policy random --seed 3
    python3 -m defusal.wire_agent --listen 7001
"""

from __future__ import annotations

import argparse
import json
import random
import socket
import sys
import time
from typing import Callable, Iterable

from .agents import PROTOCOL_VERSION, menu_from_text


def _reply_for(frame: dict, rng: random.Random, policy: str) -> dict | None:
    kind = frame.get("type")
    if kind == "turn":
        menu = menu_from_text(frame.get("observation", ""))
        if policy == "first" and menu:
            phrase = menu[0]
        elif menu:
            phrase = rng.choice(menu)
        else:
            phrase = "none"
        return {"v": PROTOCOL_VERSION, "type": "reply",
                "raw_reply": f'Action selection: {phrase}. Message to Team: ""'}
    if kind == "tom":
        return {"v": PROTOCOL_VERSION, "type": "answer",
                "question_id": frame.get("question_id"), "yes_no": rng.random() < 0.5}
    return None


def serve(lines: Iterable[str], write: Callable[[str], None], policy: str = "random", seed: int = 0,
          crash_after: int | None = None, silent: bool = False, delay: float = 0.0) -> int:
    """Answer frames until an ``end`` frame or EOF; returns the number of turns served."""
    rng = random.Random(f"wire/{seed}")
    turns = 0
    for line in lines:
        try:
            frame = json.loads(line)
        except json.JSONDecodeError:
            continue
        if not isinstance(frame, dict) or frame.get("type") == "end":
            break
        if frame.get("type") == "turn":
            if crash_after is not None and turns >= crash_after:
                raise SystemExit(3)
            turns += 1
        if silent:
            continue
        reply = _reply_for(frame, rng, policy)
        if reply is None:
            continue
        if delay:
            time.sleep(delay)
        write(json.dumps(reply, sort_keys=True) + "\n")
    return turns


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="defusal.wire_agent", description=__doc__.splitlines()[0])
    ap.add_argument("--policy", choices=("random", "first"), default="random")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--crash-after", type=int, default=None, help="exit after serving N turns")
    ap.add_argument("--silent", action="store_true", help="read frames but never reply")
    ap.add_argument("--delay", type=float, default=0.0, help="seconds to wait before each reply")
    ap.add_argument("--listen", type=int, default=None,
                    help="serve one TCP connection on this port (0 picks one and prints it)")
    args = ap.parse_args(argv)
    opts = dict(policy=args.policy, seed=args.seed, crash_after=args.crash_after,
                silent=args.silent, delay=args.delay)
    if args.listen is None:
        def write(data: str) -> None:
            sys.stdout.write(data)
            sys.stdout.flush()
        serve(sys.stdin, write, **opts)
        return 0
    with socket.create_server(("127.0.0.1", args.listen)) as server:
        print(server.getsockname()[1], flush=True)
        conn, _ = server.accept()
        with conn, conn.makefile("r", encoding="utf-8") as reader:
            serve(reader, lambda data: conn.sendall(data.encode("utf-8")), **opts)
    return 0


if __name__ == "__main__":
    sys.exit(main())
