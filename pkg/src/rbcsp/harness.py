"""Experiment drivers: transition sweeps, hardness scaling, forced-vs-random
comparison.  Everything is seeded through :func:`rbcsp.rng.derive_stream`
(instance i of grid point j uses stream index ``j * samples + i``), so a
re-run with the same spec reproduces identical CSV bytes.

Cost statistics use medians first (search costs at the threshold are heavy
tailed); means are reported alongside.  Runs stopped by the node limit are
"censored": they are counted separately, and excluded from the median only
while they are fewer than half the samples (past that the median of all
runs, censored ones held at their cutoff counts, is reported as a lower
bound).  ``sat_fraction`` is taken over completed runs only.
"""

from __future__ import annotations

import dataclasses
import math
import statistics
from dataclasses import dataclass

from .core import CspParams, InsufficientSamplesError, ParameterError
from .generator import GenRequest, generate
from .rng import derive_stream
from .solver import SolveConfig, SolveResult, SolveStatus, solve_csp

__all__ = [
    "SweepSpec",
    "ExperimentRecord",
    "sweep",
    "sweep_csv",
    "crossing_estimate",
    "scaling_study",
    "scaling_csv",
    "forced_vs_random",
]


@dataclass(frozen=True)
class SweepSpec:
    base: CspParams
    axis: str
    values: tuple[float, ...]
    samples_per_point: int
    base_seed: int
    node_limit: int
    forced: bool = False
    heuristic: str = "mrv"

    def __post_init__(self):
        if self.axis not in ("p", "r"):
            raise ParameterError(f"axis must be 'p' or 'r', got {self.axis!r}")
        if not self.values:
            raise ParameterError("sweep needs at least one axis value")
        if list(self.values) != sorted(self.values):
            raise ParameterError("axis values must be sorted ascending")
        if self.samples_per_point < 1:
            raise ParameterError("samples_per_point must be >= 1")


@dataclass(frozen=True)
class ExperimentRecord:
    axis_value: float
    sat_fraction: float
    median_nodes: float
    mean_nodes: float
    censored: int
    samples: int


def _point_stats(axis_value: float, results: list[SolveResult]) -> ExperimentRecord:
    samples = len(results)
    completed = [res for res in results if res.status is not SolveStatus.LIMIT]
    censored = samples - len(completed)
    if completed:
        sat_fraction = sum(res.status is SolveStatus.SAT for res in completed) / len(completed)
        mean_nodes = statistics.fmean(res.nodes for res in completed)
    else:
        sat_fraction = math.nan
        mean_nodes = math.nan
    if censored < samples / 2 and completed:
        median_nodes = statistics.median(res.nodes for res in completed)
    else:
        median_nodes = statistics.median(res.nodes for res in results)
    return ExperimentRecord(
        axis_value=axis_value,
        sat_fraction=sat_fraction,
        median_nodes=float(median_nodes),
        mean_nodes=float(mean_nodes),
        censored=censored,
        samples=samples,
    )


def _solve_batch(params: CspParams, forced: bool, seeds, cfg: SolveConfig) -> list[SolveResult]:
    results = []
    for seed in seeds:
        instance = generate(GenRequest(params=params, seed=seed, forced=forced))
        results.append(solve_csp(instance, cfg))
    return results


def sweep(spec: SweepSpec) -> list[ExperimentRecord]:
    """Solve samples_per_point instances at each axis value."""
    cfg = SolveConfig(node_limit=spec.node_limit, heuristic=spec.heuristic)
    records = []
    for j, value in enumerate(spec.values):
        params = dataclasses.replace(spec.base, **{spec.axis: value})
        seeds = [
            derive_stream(spec.base_seed, j * spec.samples_per_point + i)
            for i in range(spec.samples_per_point)
        ]
        results = _solve_batch(params, spec.forced, seeds, cfg)
        records.append(_point_stats(value, results))
    return records


def crossing_estimate(records: list[ExperimentRecord]) -> float | None:
    """Axis value where sat_fraction crosses 0.5, linearly interpolated
    between the bracketing grid points; None if it never crosses."""
    for a, b in zip(records, records[1:]):
        if a.sat_fraction >= 0.5 >= b.sat_fraction and a.sat_fraction != b.sat_fraction:
            frac = (a.sat_fraction - 0.5) / (a.sat_fraction - b.sat_fraction)
            return a.axis_value + frac * (b.axis_value - a.axis_value)
    return None


def scaling_study(
    base: CspParams,
    n_values: tuple[int, ...],
    samples: int,
    base_seed: int,
    node_limit: int,
    forced: bool = True,
    heuristic: str = "mrv",
) -> list[tuple[int, ExperimentRecord]]:
    """Hardness growth in n at fixed (k, alpha, r, p): forced instances
    solved per n, medians reported."""
    cfg = SolveConfig(node_limit=node_limit, heuristic=heuristic)
    out = []
    for j, n in enumerate(n_values):
        params = dataclasses.replace(base, n=n)
        seeds = [derive_stream(base_seed, j * samples + i) for i in range(samples)]
        results = _solve_batch(params, forced, seeds, cfg)
        out.append((n, _point_stats(float(n), results)))
    return out


@dataclass(frozen=True)
class ForcedVsRandom:
    median_forced: float
    median_random_sat: float
    ratio: float
    samples_forced: int
    samples_random_sat: int
    discarded_unsat: int


def forced_vs_random(
    params: CspParams,
    samples: int,
    base_seed: int,
    node_limit: int,
    heuristic: str = "mrv",
    budget_factor: int = 20,
) -> ForcedVsRandom:
    """Median cost of forced instances vs random instances filtered to the
    satisfiable ones (rejection).  Censored runs are dropped from both arms."""
    cfg = SolveConfig(node_limit=node_limit, heuristic=heuristic)
    forced_seed_base = derive_stream(base_seed, 1)
    random_seed_base = derive_stream(base_seed, 2)

    forced_results = _solve_batch(
        params, True, [derive_stream(forced_seed_base, i) for i in range(samples)], cfg
    )
    forced_nodes = [r.nodes for r in forced_results if r.status is SolveStatus.SAT]
    if len(forced_nodes) < 10:
        raise InsufficientSamplesError(
            f"only {len(forced_nodes)} forced runs finished within the node limit"
        )

    random_nodes = []
    discarded = 0
    budget = budget_factor * samples
    for i in range(budget):
        if len(random_nodes) >= samples:
            break
        instance = generate(GenRequest(params=params, seed=derive_stream(random_seed_base, i)))
        res = solve_csp(instance, cfg)
        if res.status is SolveStatus.SAT:
            random_nodes.append(res.nodes)
        elif res.status is SolveStatus.UNSAT:
            discarded += 1
    if len(random_nodes) < 10:
        raise InsufficientSamplesError(
            f"only {len(random_nodes)} random satisfiable instances in a budget of {budget}"
        )

    median_forced = float(statistics.median(forced_nodes))
    median_random = float(statistics.median(random_nodes))
    return ForcedVsRandom(
        median_forced=median_forced,
        median_random_sat=median_random,
        ratio=median_forced / median_random,
        samples_forced=len(forced_nodes),
        samples_random_sat=len(random_nodes),
        discarded_unsat=discarded,
    )


def _csv_cell(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def sweep_csv(records: list[ExperimentRecord]) -> str:
    lines = ["axis_value,sat_fraction,median_nodes,mean_nodes,censored,samples"]
    for rec in records:
        lines.append(",".join(_csv_cell(x) for x in (
            rec.axis_value, rec.sat_fraction, rec.median_nodes,
            rec.mean_nodes, rec.censored, rec.samples,
        )))
    return "\n".join(lines) + "\n"


def scaling_csv(rows: list[tuple[int, ExperimentRecord]]) -> str:
    lines = ["n,median_nodes,sat_fraction,mean_nodes,censored,samples"]
    for n, rec in rows:
        lines.append(",".join(_csv_cell(x) for x in (
            n, rec.median_nodes, rec.sat_fraction,
            rec.mean_nodes, rec.censored, rec.samples,
        )))
    return "\n".join(lines) + "\n"
