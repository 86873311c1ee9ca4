"""Command line interface.

    tileswarm run <scenario> [--seed N] [--out PATH]
    tileswarm replay <log>
    tileswarm metrics <log> [--oracle]
    tileswarm serve <scenario> [--seed N] [--port P] [--tick-hz HZ] [--out PATH]

Exit code 0 on success; errors print one machine-readable JSON object to
stderr and exit 1.  SEED in the environment supplies the default seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from ..similarity import get_provider
from . import events as ev
from .metrics import compute_metrics, idea_sequence
from .oracle import oracle_assign
from .runner import SimulationAborted, replay, run
from .scenario import load_scenario


def _default_seed() -> int:
    return int(os.environ.get("SEED", "0"))


def _fail(code: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": {"code": code, "message": message}}) + "\n")
    return 1


def _cmd_run(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    out = Path(args.out) if args.out else Path(args.scenario).with_suffix(".log")
    try:
        result = run(scenario, args.seed)
    except SimulationAborted as exc:
        # flush whatever the run produced, then fail machine-readably
        out.write_text(ev.to_text(exc.records), encoding="utf-8")
        return _fail(type(exc.cause).__name__, f"{exc} (partial log at {out})")
    result.write(out)
    metrics = compute_metrics(result.records)
    print(
        json.dumps(
            {
                "scenario": scenario.name,
                "seed": args.seed,
                "ticks": scenario.duration_ticks,
                "log": str(out),
                "metrics": metrics.to_dict(),
            }
        )
    )
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    text = Path(args.log).read_text(encoding="utf-8")
    result = replay(text)
    metrics = compute_metrics(result.records)
    print(
        json.dumps(
            {
                "scenario": result.scenario.name,
                "seed": result.seed,
                "records": len(result.records),
                "verified": True,
                "metrics": metrics.to_dict(),
            }
        )
    )
    return 0


def _cmd_metrics(args: argparse.Namespace) -> int:
    records = ev.read_log(args.log)
    oracle = None
    if args.oracle:
        header = records[0].data["scenario"]
        oracle = oracle_assign(
            idea_sequence(records),
            threshold=header["threshold"],
            marker_count=len(header["markers"]),
            provider=get_provider(header["provider"]),
        )
    print(json.dumps(compute_metrics(records, oracle).to_dict()))
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from ..gateway.server import serve

    scenario = load_scenario(args.scenario)
    serve(
        scenario,
        seed=args.seed,
        host=args.host,
        port=args.port,
        tick_hz=args.tick_hz,
        out=args.out,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tileswarm", description="Idea-clustering tile swarm simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario and write its event log")
    p_run.add_argument("scenario")
    p_run.add_argument("--seed", type=int, default=_default_seed())
    p_run.add_argument("--out", default=None)
    p_run.set_defaults(func=_cmd_run)

    p_replay = sub.add_parser("replay", help="verify an event log by re-execution")
    p_replay.add_argument("log")
    p_replay.set_defaults(func=_cmd_replay)

    p_metrics = sub.add_parser("metrics", help="compute metrics from an event log")
    p_metrics.add_argument("log")
    p_metrics.add_argument(
        "--oracle", action="store_true", help="include oracle agreement"
    )
    p_metrics.set_defaults(func=_cmd_metrics)

    p_serve = sub.add_parser("serve", help="run live with the HTTP gateway")
    p_serve.add_argument("scenario")
    p_serve.add_argument("--seed", type=int, default=_default_seed())
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8642)
    p_serve.add_argument(
        "--tick-hz",
        type=float,
        default=10.0,
        help="simulation ticks per wall second; 0 runs as fast as possible",
    )
    p_serve.add_argument("--out", default=None, help="write the event log here when done")
    p_serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        return _fail("FileNotFound", str(exc))
    except Exception as exc:  # surface errors machine-readably, per contract
        return _fail(type(exc).__name__, str(exc))


if __name__ == "__main__":
    sys.exit(main())
