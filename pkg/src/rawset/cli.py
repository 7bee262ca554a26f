"""``rawset-bench``: run the OR-Set vs remove&add-wins experiments."""

from __future__ import annotations

import argparse
import logging
import sys

from .bench import ExperimentConfig, run_experiment, write_csv
from .sim import VARIANTS


def parse_mix(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"mix must look like A:R:W, got {text!r}")
    try:
        pct = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"mix entries must be numbers, got {text!r}") from None
    if any(p < 0 for p in pct) or abs(sum(pct) - 100) > 1e-6:
        raise argparse.ArgumentTypeError(f"mix percentages must be non-negative and sum to 100, got {text!r}")
    return tuple(p / 100 for p in pct)


def parse_sync(text: str):
    if text == "never":
        return None
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--sync-every takes a count or 'never', got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("--sync-every must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rawset-bench", description=__doc__)
    p.add_argument("--variant", choices=VARIANTS + ("all",), default="all")
    p.add_argument("--replicas", type=int, default=3)
    p.add_argument("--ops", type=int, default=400_000, help="operations per replica")
    p.add_argument("--alphabet", type=int, default=20_000)
    p.add_argument("--sync-every", type=parse_sync, default=20_000, metavar="N|never")
    p.add_argument("--mix", type=parse_mix, default=(0.5, 0.25, 0.25), metavar="A:R:W",
                   help="percentages of add, remove, removeWins (default 50:25:25)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--out", default="results.csv", metavar="FILE.csv")
    p.add_argument("--histories", default=None, metavar="DIR", help="dump History files and run manifests here")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    variants = VARIANTS if args.variant == "all" else (args.variant,)
    try:
        cfg = ExperimentConfig(
            n_replicas=args.replicas,
            ops_per_replica=args.ops,
            alphabet_size=args.alphabet,
            mix=args.mix,
            sync_every=args.sync_every,
            seed=args.seed,
            variants=variants,
            repetitions=args.reps,
            histories_dir=args.histories,
        )
    except ValueError as exc:
        print(f"rawset-bench: {exc}", file=sys.stderr)
        return 2
    report = run_experiment(cfg)
    try:
        write_csv(report, args.out)
    except OSError as exc:
        print(f"rawset-bench: {exc}", file=sys.stderr)
        return 1
    for variant, m in report.means().items():
        print(
            f"{variant:10s} op {m['op_seconds']:.3f}s  merge {m['merge_seconds']:.3f}s  "
            f"meta {m['metadata_bytes']:.0f}B  live {m['live_elements']:.0f}"
        )
    for metric, r in report.ratios().items():
        print(f"ratio optimized/orset {metric}: {r:.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
