"""Independence testing, power studies, normality diagnostics, timing.

The permutation test is exact under the null: the second coordinate is
permuted with the first held fixed, every statistic is recomputed from
the permuted pairwise tables, and the p-value is
``(1 + #{permuted >= observed}) / (B + 1)``.  The asymptotic route
scales the statistic by n and refers it to the Monte Carlo weighted
chi-square null limit built from the empirical marginals.

All three statistics inflate under dependence, so every test is
one-sided in the upper tail.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .closedform import population_kappa
from .core import FamilySpec, PairedSample, SeedSpec
from .errors import DomainError, SampleTooSmall, UnknownEstimator
from .estimators import (
    _trio_for_tables,
    delta1_plugin,
    kappa_hat,
    kappa_star,
    kappa_tilde,
    kappa_trio,
)
from .samplers import _draw
from .spectral import empirical_marginal, kernel_eigenvalues, null_limit_model, null_pvalue
from .ustats import compute_ustats, pairwise_tables

__all__ = [
    "TestResult",
    "PowerCell",
    "PowerReport",
    "NormalityRow",
    "NormalityReport",
    "TimingReport",
    "independence_test",
    "power_study",
    "normality_diagnostic",
    "timing_benchmark",
]

ESTIMATOR_NAMES = ("star", "tilde", "hat")
_METHODS = ("permutation", "asymptotic_null")
_DEFAULT_SPECTRUM_K = 100


def _check_estimator(name: str) -> str:
    if name not in ESTIMATOR_NAMES:
        raise UnknownEstimator(
            f"estimator must be one of {', '.join(ESTIMATOR_NAMES)}, got {name!r}"
        )
    return name


def _check_estimators(names) -> tuple[str, ...]:
    names = tuple(names)
    if not names:
        raise UnknownEstimator("need at least one estimator")
    return tuple(_check_estimator(name) for name in names)


def _check_method(method: str) -> str:
    if method not in _METHODS:
        raise DomainError(f"method must be one of {', '.join(_METHODS)}, got {method!r}")
    return method


@dataclass(frozen=True)
class TestResult:
    """Outcome of one independence test.

    ``statistic`` is the raw estimate for the permutation method and
    the n-scaled estimate for the asymptotic method (the scale on which
    the null limit lives).
    """

    statistic_name: str
    statistic: float
    method: str
    p_value: float
    n: int
    b_or_r: int
    seed: SeedSpec

    def as_dict(self) -> dict:
        return {
            "statistic_name": self.statistic_name,
            "statistic": self.statistic,
            "method": self.method,
            "p_value": self.p_value,
            "n": self.n,
            "b_or_r": self.b_or_r,
            "seed": {
                "master_seed": self.seed.master_seed,
                "stream_index": self.seed.stream_index,
            },
        }


@dataclass(frozen=True)
class PowerCell:
    family: str
    theta: float
    estimator: str
    power: float
    mc_stderr: float


@dataclass(frozen=True)
class PowerReport:
    n: int
    replicates: int
    alpha: float
    method: str
    b_or_r: int
    estimators: tuple[str, ...]
    seed: SeedSpec
    cells: tuple[PowerCell, ...]

    def power_for(self, family: str, theta: float, estimator: str) -> PowerCell:
        for cell in self.cells:
            if (
                cell.family == family
                and cell.estimator == estimator
                and math.isclose(cell.theta, theta, rel_tol=0.0, abs_tol=1e-12)
            ):
                return cell
        raise KeyError(f"no power cell for ({family!r}, {theta!r}, {estimator!r})")

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "replicates": self.replicates,
            "alpha": self.alpha,
            "method": self.method,
            "b_or_r": self.b_or_r,
            "estimators": list(self.estimators),
            "seed": {
                "master_seed": self.seed.master_seed,
                "stream_index": self.seed.stream_index,
            },
            "cells": [
                {
                    "family": cell.family,
                    "theta": cell.theta,
                    "estimator": cell.estimator,
                    "power": cell.power,
                    "mc_stderr": cell.mc_stderr,
                }
                for cell in self.cells
            ],
        }


@dataclass(frozen=True)
class NormalityRow:
    estimator: str
    n: int
    mean: float
    variance: float
    ks_distance: float
    rmse_sqrt_n: float


@dataclass(frozen=True)
class NormalityReport:
    family: str
    theta: float
    kappa: float
    replicates: int
    seed: SeedSpec
    rows: tuple[NormalityRow, ...]

    def row_for(self, estimator: str, n: int) -> NormalityRow:
        for row in self.rows:
            if row.estimator == estimator and row.n == n:
                return row
        raise KeyError(f"no normality row for ({estimator!r}, n={n})")

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "theta": self.theta,
            "kappa": self.kappa,
            "replicates": self.replicates,
            "seed": {
                "master_seed": self.seed.master_seed,
                "stream_index": self.seed.stream_index,
            },
            "rows": [
                {
                    "estimator": row.estimator,
                    "n": row.n,
                    "mean": row.mean,
                    "variance": row.variance,
                    "ks_distance": row.ks_distance,
                    "rmse_sqrt_n": row.rmse_sqrt_n,
                }
                for row in self.rows
            ],
        }


@dataclass(frozen=True)
class TimingReport:
    estimator: str
    n: int
    evals: int
    mean_seconds: float
    sd_seconds: float

    def as_dict(self) -> dict:
        return {
            "estimator": self.estimator,
            "n": self.n,
            "evals": self.evals,
            "mean_seconds": self.mean_seconds,
            "sd_seconds": self.sd_seconds,
        }


def _permutation_pvalues(
    tables, b: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Observed trio and its three permutation p-values in one pass."""
    observed = np.array(_trio_for_tables(tables, None))
    exceed = np.zeros(3)
    for _ in range(b):
        perm = rng.permutation(tables.n)
        exceed += np.array(_trio_for_tables(tables, perm)) >= observed
    return observed, (1.0 + exceed) / (b + 1.0)


def _asymptotic_pvalues(
    sample: PairedSample, r: int, seed: SeedSpec, k: int
) -> tuple[np.ndarray, np.ndarray]:
    """n-scaled trio and p-values against the simulated null limits."""
    trio = np.array(kappa_trio(compute_ustats(sample)))
    scaled = sample.n * trio
    lx = kernel_eigenvalues(empirical_marginal(sample.xs), k)
    ly = kernel_eigenvalues(empirical_marginal(sample.ys), k)
    centered = null_limit_model(lx, ly, k=k, r=r, seed=seed, centered=True)
    uncentered = null_limit_model(lx, ly, k=k, r=r, seed=seed.with_stream(seed.stream_index + 1), centered=False)
    pvals = np.array(
        [
            null_pvalue(centered, scaled[0]),
            null_pvalue(centered, scaled[1]),
            null_pvalue(uncentered, scaled[2]),
        ]
    )
    return scaled, pvals


def independence_test(
    sample: PairedSample,
    estimator: str = "star",
    method: str = "permutation",
    b_or_r: int = 999,
    seed: SeedSpec = SeedSpec(0),
    spectrum_k: int = _DEFAULT_SPECTRUM_K,
) -> TestResult:
    """Test independence of the two coordinates, upper tail.

    ``b_or_r`` is the permutation count B (>= 99) or the Monte Carlo
    draw count R of the null limit (>= 1000 via the null model).
    """
    estimator = _check_estimator(estimator)
    method = _check_method(method)
    if sample.n < 3:
        raise SampleTooSmall(f"independence test needs n >= 3, got {sample.n}")
    b_or_r = int(b_or_r)
    if b_or_r < 99:
        raise DomainError(f"b_or_r must be at least 99, got {b_or_r}")
    index = ESTIMATOR_NAMES.index(estimator)
    if method == "permutation":
        tables = pairwise_tables(sample)
        observed, pvals = _permutation_pvalues(tables, b_or_r, seed.generator())
    else:
        observed, pvals = _asymptotic_pvalues(sample, b_or_r, seed, spectrum_k)
    return TestResult(
        statistic_name=f"kappa_{estimator}",
        statistic=float(observed[index]),
        method=method,
        p_value=float(pvals[index]),
        n=sample.n,
        b_or_r=b_or_r,
        seed=seed,
    )


def _power_replicate_task(args) -> np.ndarray:
    (master_seed, stream, grid, n, method, b_or_r, alpha, k) = args
    rng = SeedSpec(master_seed, stream).generator()
    rejected = np.zeros((len(grid), len(ESTIMATOR_NAMES)), dtype=np.int64)
    for ci, (family, theta, sigma1, sigma2) in enumerate(grid):
        spec = FamilySpec(family, theta, sigma1, sigma2)
        xs, ys = _draw(spec, n, rng)
        sample = PairedSample(xs, ys)
        if method == "permutation":
            _, pvals = _permutation_pvalues(pairwise_tables(sample), b_or_r, rng)
        else:
            _, pvals = _asymptotic_pvalues(
                sample, b_or_r, SeedSpec(master_seed, stream), k
            )
        rejected[ci] = pvals <= alpha
    return rejected


def power_study(
    grid,
    n: int = 100,
    replicates: int = 1000,
    alpha: float = 0.05,
    method: str = "permutation",
    b_or_r: int = 199,
    seed: SeedSpec = SeedSpec(0),
    estimators=ESTIMATOR_NAMES,
    threads: int = 1,
    spectrum_k: int = _DEFAULT_SPECTRUM_K,
) -> PowerReport:
    """Rejection rate per (family, theta, estimator) cell.

    Replicate r draws everything from the substream at offset r, so the
    report is identical for any worker count.  All replicates share
    substreams across cells (common random numbers), and all three
    statistics are computed from the same permutations within a cell.
    """
    grid = tuple(grid)
    if not grid:
        raise DomainError("the family grid must be nonempty")
    for spec in grid:
        if not isinstance(spec, FamilySpec):
            raise DomainError("grid entries must be FamilySpec instances")
    estimators = _check_estimators(estimators)
    method = _check_method(method)
    replicates = int(replicates)
    if replicates < 100:
        raise DomainError(f"need at least 100 replicates, got {replicates}")
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    grid_fields = tuple(
        (spec.family, spec.theta, spec.sigma1, spec.sigma2) for spec in grid
    )
    tasks = (
        (
            seed.master_seed,
            seed.stream_index + r,
            grid_fields,
            int(n),
            method,
            int(b_or_r),
            float(alpha),
            int(spectrum_k),
        )
        for r in range(replicates)
    )
    threads = int(threads)
    if threads < 0:
        raise DomainError(f"threads must be nonnegative, got {threads}")
    totals = np.zeros((len(grid), len(ESTIMATOR_NAMES)), dtype=np.int64)
    workers = (os.cpu_count() or 1) if threads == 0 else threads
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunksize = max(1, replicates // (8 * workers))
            for rejected in pool.map(_power_replicate_task, tasks, chunksize=chunksize):
                totals += rejected
    else:
        for task in tasks:
            totals += _power_replicate_task(task)
    cells = []
    for ci, spec in enumerate(grid):
        for estimator in estimators:
            ei = ESTIMATOR_NAMES.index(estimator)
            p = totals[ci, ei] / replicates
            cells.append(
                PowerCell(
                    family=spec.family,
                    theta=spec.theta,
                    estimator=estimator,
                    power=float(p),
                    mc_stderr=float(math.sqrt(p * (1.0 - p) / replicates)),
                )
            )
    return PowerReport(
        n=int(n),
        replicates=replicates,
        alpha=float(alpha),
        method=method,
        b_or_r=int(b_or_r),
        estimators=estimators,
        seed=seed,
        cells=tuple(cells),
    )


def normality_diagnostic(
    spec: FamilySpec,
    n_grid=(100, 400),
    replicates: int = 1000,
    seed: SeedSpec = SeedSpec(0),
) -> NormalityReport:
    """Distribution of sqrt(n) * (estimate - kappa) / sqrt(delta1_hat).

    Requires a family with a closed-form kappa (normal or exponential).
    For each n the report row carries the mean, variance, and the KS
    distance to the standard normal of the standardized values, plus
    sqrt(n) times the raw RMSE of the estimate (flat across n under
    root-n consistency).
    """
    kappa0 = population_kappa(spec)
    replicates = int(replicates)
    if replicates < 100:
        raise DomainError(f"need at least 100 replicates, got {replicates}")
    rows = []
    for n_index, n in enumerate(n_grid):
        n = int(n)
        estimates = np.empty((replicates, 3))
        deviations = np.empty((replicates, 3))
        for r in range(replicates):
            stream = seed.stream_index + n_index * replicates + r
            rng = SeedSpec(seed.master_seed, stream).generator()
            xs, ys = _draw(spec, n, rng)
            sample = PairedSample(xs, ys)
            trio = np.array(kappa_trio(compute_ustats(sample)))
            scale = math.sqrt(n / delta1_plugin(sample))
            estimates[r] = trio
            deviations[r] = scale * (trio - kappa0)
        for ei, estimator in enumerate(ESTIMATOR_NAMES):
            standardized = deviations[:, ei]
            rmse = math.sqrt(float(np.mean((estimates[:, ei] - kappa0) ** 2)))
            rows.append(
                NormalityRow(
                    estimator=estimator,
                    n=n,
                    mean=float(standardized.mean()),
                    variance=float(standardized.var(ddof=1)),
                    ks_distance=float(stats.kstest(standardized, "norm").statistic),
                    rmse_sqrt_n=math.sqrt(n) * rmse,
                )
            )
    return NormalityReport(
        family=spec.family,
        theta=spec.theta,
        kappa=kappa0,
        replicates=replicates,
        seed=seed,
        rows=tuple(rows),
    )


_TIMING_FUNCS = {
    "star": lambda sample: kappa_star(compute_ustats(sample)),
    "tilde": lambda sample: kappa_tilde(compute_ustats(sample)),
    "hat": lambda sample: kappa_hat(compute_ustats(sample)),
}


def timing_benchmark(
    estimators,
    n: int = 100,
    evals: int = 100,
    spec: FamilySpec = FamilySpec("normal", 0.0),
    seed: SeedSpec = SeedSpec(0),
    repetitions: int = 10,
) -> list[TimingReport]:
    """Wall-clock seconds to compute ``evals`` estimates at size n.

    Samples are generated up front and excluded from the timed region;
    each repetition times a plain single-threaded loop over fresh
    samples, and the report carries the mean and standard deviation
    over repetitions.
    """
    estimators = _check_estimators(estimators)
    evals = int(evals)
    if evals < 10:
        raise DomainError(f"need at least 10 evaluations per repetition, got {evals}")
    repetitions = int(repetitions)
    if repetitions < 2:
        raise DomainError(f"need at least 2 repetitions, got {repetitions}")
    rng = seed.generator()
    batches = [
        [PairedSample(*_draw(spec, int(n), rng)) for _ in range(evals)]
        for _ in range(repetitions)
    ]
    reports = []
    for estimator in estimators:
        func = _TIMING_FUNCS[estimator]
        times = np.empty(repetitions)
        for rep, batch in enumerate(batches):
            start = time.perf_counter()
            for sample in batch:
                func(sample)
            times[rep] = time.perf_counter() - start
        reports.append(
            TimingReport(
                estimator=f"kappa_{estimator}",
                n=int(n),
                evals=evals,
                mean_seconds=float(times.mean()),
                sd_seconds=float(times.std(ddof=1)),
            )
        )
    return reports
