"""``shadow <experiment> --config cfg.json [--seed N] [--out path] [--format csv|json]``.

Exit codes: 0 success, 2 invariant violation, 3 net budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .experiments import EXPERIMENTS, ExperimentConfig, InvariantViolation, load_config, run
from .nets import NetBudgetExceeded
from .records import to_text

EXIT_OK = 0
EXIT_INVARIANT = 2
EXIT_BUDGET = 3

# used when no --config is given
DEFAULTS = {
    "scaling_cUn": {"n_list": [5, 10, 20, 40], "samples_per_n": 20},
    "scaling_sandwich": {"n_list": [25, 50, 100], "samples_per_n": 200, "optimizer": {"restarts": 8}},
    "rare_event": {"n_list": [10, 20, 40], "samples_per_n": 200, "params": {"lambda": 0.05}},
    "concentration": {"n_list": [10, 50], "samples_per_n": 10000},
    "nets_audit": {"n_list": [4, 6, 8], "samples_per_n": 10000},
    "section_diameter": {"n_list": [10, 20, 40], "samples_per_n": 50},
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shadow", description="Minimal complex-line shadows of rotated cubes.")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", type=Path, help="JSON file mirroring ExperimentConfig")
    p.add_argument("--seed", type=int, help="override the master seed")
    p.add_argument("--out", type=Path, help="record file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), help="record format (default: from config, else csv)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def make_config(args) -> ExperimentConfig:
    if args.config is not None:
        cfg = load_config(args.config)
        cfg = replace(cfg, experiment=args.experiment)
    else:
        cfg = ExperimentConfig.from_dict({"experiment": args.experiment, **DEFAULTS[args.experiment]})
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.format is not None:
        cfg = replace(cfg, format=args.format)
    if args.out is not None:
        cfg = replace(cfg, output_path=str(args.out))
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = make_config(args)
    except (ValueError, TypeError, OSError) as exc:
        print(f"shadow: bad config: {exc}", file=sys.stderr)
        return 1
    try:
        result = run(cfg)
    except InvariantViolation as exc:
        print(f"shadow: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except NetBudgetExceeded as exc:
        print(f"shadow: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    text = to_text(result.records, cfg.format)
    summary = json.dumps(result.summary, indent=2, sort_keys=True, default=float)
    if cfg.output_path:
        out = Path(cfg.output_path)
        out.write_text(text, encoding="utf-8", newline="\n")
        out.with_name(out.name + ".summary.json").write_text(summary + "\n", encoding="utf-8", newline="\n")
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
