"""
Experiment Harness

Expands an ExperimentSpec into points, executes the seeded runs of every point
on a worker pool, and aggregates evaluation counts into one table row per point.

Seeds: run r of point p under master seed s uses the first 64-bit word of
numpy's SeedSequence(s, spawn_key=(p, r)). SeedSequence hashes its entropy and
spawn key through a mixing function designed for independent streams, so two
(p, r) pairs collide with probability about 2^-64.
"""

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from ..core.errors import require
from ..db.schemas import (
    AlgorithmConfig,
    ExperimentSpec,
    Normalization,
    ParentSelection,
    RunResult,
    StatsSummary,
    TableRow,
    Variant,
)
from .algorithms import run_to_optimum

logger = logging.getLogger(__name__)


@dataclass
class ExperimentPoint:
    index: int
    series: int
    config: AlgorithmConfig
    runs: int


@dataclass
class PointResult:
    point: ExperimentPoint
    results: List[RunResult]
    summary: StatsSummary
    row: TableRow

    @property
    def evaluations(self) -> np.ndarray:
        """Evaluation counts of the runs that reached the optimum."""
        return np.array([r.evaluations for r in self.results if not r.hit_cap], dtype=float)


def derive_seed(master_seed: int, point_index: int, run_index: int) -> int:
    seq = np.random.SeedSequence(master_seed, spawn_key=(point_index, run_index))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def expand_points(spec: ExperimentSpec) -> List[ExperimentPoint]:
    """Series-major, sweep-minor enumeration; the position is the point index used for seeding."""
    points = []
    for s, series in enumerate(spec.series):
        for value in series.values:
            data = series.template.model_dump()
            data[series.sweep] = value
            config = AlgorithmConfig.model_validate(data)
            points.append(ExperimentPoint(index=len(points), series=s, config=config, runs=spec.runs_for(config.n)))
    return points


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)


def _execute(config: AlgorithmConfig) -> RunResult:
    return run_to_optimum(config)


def summarize(values: Sequence[float]) -> StatsSummary:
    """Mean and sample standard deviation (divisor N-1; 0 for a single value)."""
    data = np.asarray(values, dtype=float)
    count = int(data.size)
    if count == 0:
        return StatsSummary(mean=math.nan, std_dev=0.0, count=0)
    std = float(data.std(ddof=1)) if count > 1 else 0.0
    return StatsSummary(mean=float(data.mean()), std_dev=std, count=count)


def normalize(series_a: Sequence[StatsSummary], series_b: Sequence[StatsSummary]) -> List[StatsSummary]:
    """Divide means and standard deviations of a by the means of b, point by point."""
    require(len(series_a) == len(series_b), "normalisation needs matching sweep points")
    out = []
    for a, b in zip(series_a, series_b):
        require(b.mean > 0, "baseline mean must be positive")
        out.append(a.model_copy(update={"normalized_mean": a.mean / b.mean, "normalized_std": a.std_dev / b.mean}))
    return out


def _is_standard_two_plus_one(cfg: AlgorithmConfig) -> bool:
    return (
        cfg.variant == Variant.MuPlusOneGA
        and cfg.mu == 2
        and cfg.selection_policy == ParentSelection.uniform
        and not cfg.uses_greedy_crossover
    )


BaselineRule = Callable[[ExperimentPoint, ExperimentPoint], bool]

BASELINES: Dict[str, BaselineRule] = {
    "vs_2plus1_ga": lambda p, b: _is_standard_two_plus_one(b.config) and b.config.c == p.config.c,
    "vs_1plus1_ea": lambda p, b: b.config.variant == Variant.OnePlusOneEA and b.config.c == p.config.c,
    "vs_c_equal_1": lambda p, b: b.series == p.series and b.config.c == 1.0,
}


def _baseline_for(point: ExperimentPoint, candidates: List[PointResult], mode: Normalization) -> Optional[PointResult]:
    rule = BASELINES[mode]
    for other in candidates:
        if other.point.config.n == point.config.n and rule(point, other.point):
            return other
    return None


def apply_normalization(table: List[PointResult], mode: Normalization) -> List[PointResult]:
    if mode == "none":
        return table
    for entry in table:
        baseline = _baseline_for(entry.point, table, mode)
        if baseline is None or not baseline.summary.count or not entry.summary.count:
            logger.warning("no comparable baseline for %s at n=%d", entry.row.algorithm, entry.row.n)
            continue
        (normalized,) = normalize([entry.summary], [baseline.summary])
        entry.summary = normalized
        entry.row = entry.row.model_copy(
            update={"normalized_mean": normalized.normalized_mean, "normalized_std": normalized.normalized_std}
        )
    return table


def _make_row(spec: ExperimentSpec, point: ExperimentPoint, summary: StatsSummary, capped: int) -> TableRow:
    cfg = point.config
    return TableRow(
        name=spec.name,
        algorithm=cfg.display_name,
        n=cfg.n,
        mu=cfg.mu,
        c=cfg.c,
        runs=point.runs,
        mean=summary.mean,
        std_dev=summary.std_dev,
        capped_count=capped,
    )


def run_experiment(spec: ExperimentSpec, workers: Optional[int] = None) -> List[PointResult]:
    """Execute every point of a spec; identical master seeds give identical tables for any worker count."""
    points = expand_points(spec)
    tasks = [
        point.config.with_seed(derive_seed(spec.master_seed, point.index, r)) for point in points for r in range(point.runs)
    ]
    workers = default_workers() if workers is None else max(1, workers)
    logger.info("experiment %s: %d points, %d runs, %d workers", spec.name, len(points), len(tasks), workers)

    if workers == 1 or len(tasks) == 1:
        results = [_execute(cfg) for cfg in tasks]
    else:
        chunk = max(1, len(tasks) // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_execute, tasks, chunksize=chunk))

    table = []
    offset = 0
    for point in points:
        runs = results[offset:offset + point.runs]
        offset += point.runs
        capped = sum(r.hit_cap for r in runs)
        summary = summarize([r.evaluations for r in runs if not r.hit_cap])
        if capped:
            logger.warning("%s n=%d: %d of %d runs hit the evaluation cap", point.config.display_name, point.config.n, capped, point.runs)
        logger.info(
            "%s n=%d mu=%d c=%.6g: mean=%.6g std=%.6g",
            point.config.display_name, point.config.n, point.config.mu, point.config.c, summary.mean, summary.std_dev,
        )
        table.append(PointResult(point=point, results=runs, summary=summary, row=_make_row(spec, point, summary, capped)))
    return apply_normalization(table, spec.normalization)


def welch_less(a: Sequence[float], b: Sequence[float], alpha: float = 0.001) -> bool:
    """One-sided Welch t-test: is mean(a) < mean(b) at significance alpha?"""
    result = stats.ttest_ind(np.asarray(a, dtype=float), np.asarray(b, dtype=float), equal_var=False, alternative="less")
    return bool(result.pvalue < alpha)


def find_point(table: List[PointResult], **criteria) -> PointResult:
    """First point whose row matches all given TableRow fields."""
    for entry in table:
        if all(getattr(entry.row, key) == value for key, value in criteria.items()):
            return entry
    raise KeyError(f"no experiment point matches {criteria}")
