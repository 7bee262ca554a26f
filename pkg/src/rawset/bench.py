"""Time and metadata-size experiments: remove&add-wins sets vs the OR-Set."""

from __future__ import annotations

import csv
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from statistics import fmean
from typing import Optional

from .oracle import dump_history
from .sim import VARIANTS, WorkloadSpec, run, write_manifest

log = logging.getLogger(__name__)

# remove&add-wins variant compared against the OR-Set baseline
RATIO_NUMERATOR = "optimized"
RATIO_DENOMINATOR = "orset"


@dataclass(frozen=True)
class ExperimentConfig:
    n_replicas: int = 3
    ops_per_replica: int = 400_000
    alphabet_size: int = 20_000
    mix: tuple[float, float, float] = (0.5, 0.25, 0.25)
    sync_every: Optional[int] = 20_000
    seed: int = 0
    variants: tuple[str, ...] = ("optimized", "orset")
    repetitions: int = 5
    histories_dir: Optional[str] = None

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")
        unknown = set(self.variants) - set(VARIANTS)
        if unknown or not self.variants:
            raise ValueError(f"unknown variants {sorted(unknown)}; choose from {VARIANTS}")
        self.workload(0)  # validates the workload fields

    def workload(self, repetition: int) -> WorkloadSpec:
        return WorkloadSpec(
            self.n_replicas, self.ops_per_replica, self.alphabet_size,
            tuple(self.mix), self.sync_every, self.seed + repetition,
        )


@dataclass
class ReplicaRow:
    variant: str
    repetition: int
    replica: int
    op_seconds: float
    merge_seconds: float
    metadata_bytes: int
    live_elements: int
    add_entries: int
    rw_entries: int
    ids: int


METRICS = ("op_seconds", "merge_seconds", "metadata_bytes", "live_elements", "add_entries", "rw_entries", "ids")
TIMING_COLUMNS = ("op_seconds", "merge_seconds")


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    rows: list[ReplicaRow] = field(default_factory=list)

    def means(self) -> dict[str, dict[str, float]]:
        """Per variant, the mean of each metric over replicas x repetitions."""
        out = {}
        for v in self.config.variants:
            rows = [r for r in self.rows if r.variant == v]
            out[v] = {m: fmean(getattr(r, m) for r in rows) for m in METRICS}
            out[v]["total_seconds"] = out[v]["op_seconds"] + out[v]["merge_seconds"]
        return out

    def ratios(self) -> dict[str, float]:
        """remove&add-wins / OR-Set for time and size; empty if either is missing."""
        means = self.means()
        if RATIO_NUMERATOR not in means or RATIO_DENOMINATOR not in means:
            return {}
        num, den = means[RATIO_NUMERATOR], means[RATIO_DENOMINATOR]
        out = {}
        for m in ("op_seconds", "total_seconds", "metadata_bytes"):
            out[m] = num[m] / den[m] if den[m] else float("nan")
        return out


def measure_state_size(state, variant: str | None = None) -> int:
    """Canonical encoding length of ``state`` in bytes."""
    return state.encoded_size()


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    report = ExperimentReport(cfg)
    hist_dir = Path(cfg.histories_dir) if cfg.histories_dir else None
    if hist_dir is not None:
        hist_dir.mkdir(parents=True, exist_ok=True)
    for rep in range(cfg.repetitions):
        spec = cfg.workload(rep)
        for variant in cfg.variants:
            log.info("running %s rep %d (seed %d)", variant, rep, spec.seed)
            res = run(spec, variant, capture_history=hist_dir is not None)
            for i, stats in enumerate(res.end_stats):
                report.rows.append(ReplicaRow(
                    variant, rep, i, res.op_seconds[i], res.merge_seconds[i], **stats,
                ))
            if hist_dir is not None:
                stem = hist_dir / f"{variant}-rep{rep}"
                dump_history(res.history, stem.with_suffix(".history"))
                write_manifest(res.spec, variant, stem.with_suffix(".json"), repetition=rep)
    return report


COLUMNS = [f.name for f in fields(ReplicaRow)]


def write_csv(report: ExperimentReport, path: str | Path) -> None:
    """One row per (variant, repetition, replica), then per-variant means and ratios.

    Aggregate rows put ``mean`` or ``ratio`` in the repetition and replica
    columns; ratio rows name the pair as ``<numerator>/<denominator>``.
    """
    path = Path(path)
    try:
        with path.open("w", newline="") as f:
            w = csv.writer(f)
            w.writerow(COLUMNS)
            for row in sorted(report.rows, key=lambda r: (r.variant, r.repetition, r.replica)):
                w.writerow([_fmt(v) for v in asdict(row).values()])
            for variant, m in sorted(report.means().items()):
                w.writerow([variant, "mean", "mean"] + [_fmt(m[c]) for c in COLUMNS[3:]])
            ratios = report.ratios()
            if ratios:
                cells = {"op_seconds": ratios["op_seconds"], "metadata_bytes": ratios["metadata_bytes"]}
                w.writerow(
                    [f"{RATIO_NUMERATOR}/{RATIO_DENOMINATOR}", "ratio", "ratio"]
                    + [_fmt(cells[c]) if c in cells else "" for c in COLUMNS[3:]]
                )
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)
