"""Command-line entry point.

    churnforge generate|extract|compare|train-final|predict|rank-features
               [--config PATH] [--task 1..7] [--seed N] [--top-n N]
               [--out DIR] [--holdout]

Every command is deterministic under the configured seeds and exits 0 on
success, nonzero with a one-line diagnostic on failure.
"""

from __future__ import annotations

import argparse
import sys

from . import tasks

COMMANDS = {
    "generate": lambda cfg, args: tasks.cmd_generate(cfg),
    "extract": lambda cfg, args: tasks.cmd_extract(cfg),
    "compare": lambda cfg, args: tasks.cmd_compare(cfg),
    "train-final": lambda cfg, args: tasks.cmd_train_final(cfg),
    "predict": lambda cfg, args: tasks.cmd_predict(cfg, holdout=args.holdout),
    "rank-features": lambda cfg, args: tasks.cmd_rank_features(cfg),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="churnforge",
        description="Telco churn / win-back prediction pipeline.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--task", type=int, choices=range(1, 8),
                        help="prediction problem id (1..7)")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--top-n", type=int, dest="top_n",
                        help="prediction list / feature ranking length")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--holdout", action="store_true",
                        help="with predict: also score labeled test rows")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_values = tasks.parse_config_file(args.config) if args.config else {}
        cfg = tasks.build_config(file_values, task_id=args.task, seed=args.seed,
                                 top_n=args.top_n, out_dir=args.out)
        print(COMMANDS[args.command](cfg, args))
    except Exception as exc:  # noqa: BLE001 - single-line diagnostic contract
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
