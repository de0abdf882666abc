"""Kernel spectra on discretized marginals and the null limit law.

Under independence the n-scaled statistics converge to weighted sums of
chi-square variables: ``n * kappa_tilde`` and ``n * kappa_star`` to
``sum_ij lambda_i * eta_j * (Z_ij^2 - 1)`` and ``n * kappa_hat`` to the
same sum without the centering, where Z_ij are i.i.d. standard normal
and lambda/eta are the eigenvalues of the centered absolute-difference
kernel of each marginal.

The eigenvalues solve a generalized problem ``D_p g = lambda C g`` on a
discretized marginal, with ``D_p`` the diagonal of probabilities and
``C`` a tridiagonal matrix built from inverse gaps ``c_m``.  Writing
``C = B' diag(c) B`` with ``B`` the first-difference matrix shows the
symmetric form ``M = D_p^{-1/2} C D_p^{-1/2}`` equals ``K'K`` for
``K = diag(sqrt(c)) B D_p^{-1/2}``, so the nonzero reciprocal
eigenvalues of ``M`` are exactly the eigenvalues of the positive
definite tridiagonal ``K K'``.  Solving the latter removes the constant
mode structurally instead of relying on a numerical threshold to
separate it (at t = 1000 the spurious mode computes to about 6e-11,
uncomfortably close to any fixed cutoff).  A dense eigendecomposition
of the kernel matrix itself is kept as an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, eigvalsh_tridiagonal

from .core import DEFAULT_CONFIG, NumericConfig, SeedSpec
from .errors import (
    AllValuesEqual,
    DegenerateGrid,
    DomainError,
    EmptySpectrum,
    NonMonotoneQuantile,
    SampleTooSmall,
)

__all__ = [
    "DiscreteMarginal",
    "EigenSpectrum",
    "NullLimitModel",
    "discretize_marginal",
    "empirical_marginal",
    "kernel_eigenvalues",
    "dense_kernel_eigenvalues",
    "null_limit_model",
    "null_pvalue",
]

_DENSE_T_LIMIT = 200
_DRAW_BATCH = 1024


@dataclass(frozen=True, eq=False)
class DiscreteMarginal:
    """Finitely supported marginal: strictly increasing points with
    positive probabilities summing to 1."""

    points: np.ndarray
    probs: np.ndarray

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=np.float64)
        probs = np.asarray(self.probs, dtype=np.float64)
        if points.ndim != 1 or probs.ndim != 1 or points.shape != probs.shape:
            raise DomainError("points and probs must be 1-d arrays of equal length")
        if points.size < 2:
            raise DegenerateGrid("a discrete marginal needs at least 2 support points")
        if not np.all(np.isfinite(points)):
            raise DomainError("support points must be finite")
        if np.any(np.diff(points) <= 0.0):
            raise DegenerateGrid("support points must be strictly increasing")
        if not np.all(np.isfinite(probs)) or np.any(probs <= 0.0):
            raise DomainError("probabilities must be finite and positive")
        if abs(float(probs.sum()) - 1.0) > 1e-12:
            raise DomainError("probabilities must sum to 1 within 1e-12")
        points = points.copy()
        probs = probs.copy()
        points.flags.writeable = False
        probs.flags.writeable = False
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "probs", probs)

    @property
    def t(self) -> int:
        return int(self.points.size)

    def mean_abs_difference(self) -> float:
        """E|X - X'| for two independent copies.

        Uses the layer-cake form sum over gaps of 2 F (1 - F), linear in
        t rather than quadratic.
        """
        cdf = np.cumsum(self.probs)[:-1]
        gaps = np.diff(self.points)
        return float(2.0 * np.sum(gaps * cdf * (1.0 - cdf)))

    @property
    def trace_target(self) -> float:
        """Half the mean absolute difference; equals the full eigenvalue sum."""
        return 0.5 * self.mean_abs_difference()


@dataclass(frozen=True, eq=False)
class EigenSpectrum:
    """Positive kernel eigenvalues of one marginal, descending.

    ``trace_target`` is half the marginal's mean absolute difference;
    the complete spectrum sums to it, a truncated one falls short.
    """

    lambdas: np.ndarray
    t: int
    trace_target: float

    def __post_init__(self) -> None:
        lambdas = np.asarray(self.lambdas, dtype=np.float64)
        if lambdas.ndim != 1 or lambdas.size == 0:
            raise EmptySpectrum("spectrum must contain at least one eigenvalue")
        if np.any(lambdas <= 0.0) or not np.all(np.isfinite(lambdas)):
            raise DomainError("eigenvalues must be finite and positive")
        if np.any(np.diff(lambdas) > 0.0):
            raise DomainError("eigenvalues must be sorted in descending order")
        if lambdas.size > self.t - 1:
            raise DomainError("at most t - 1 nonzero eigenvalues can exist")
        lambdas = lambdas.copy()
        lambdas.flags.writeable = False
        object.__setattr__(self, "lambdas", lambdas)

    @property
    def k(self) -> int:
        return int(self.lambdas.size)

    @property
    def total(self) -> float:
        return float(self.lambdas.sum())

    def as_dict(self) -> dict:
        return {
            "lambdas": [float(v) for v in self.lambdas],
            "t": self.t,
            "trace_target": self.trace_target,
            "sum_lambdas": self.total,
        }


@dataclass(frozen=True, eq=False)
class NullLimitModel:
    """Monte Carlo sample of the weighted chi-square null limit.

    ``centered`` selects the law: True gives the limit of the unbiased
    statistics (terms ``Z^2 - 1``), False the nonnegative one (``Z^2``).
    """

    lambdas: EigenSpectrum
    etas: EigenSpectrum
    draws: np.ndarray
    centered: bool
    seed: SeedSpec

    def __post_init__(self) -> None:
        draws = np.asarray(self.draws, dtype=np.float64)
        if draws.ndim != 1 or draws.size == 0:
            raise DomainError("the null model needs at least one draw")
        if np.any(np.diff(draws) < 0.0):
            raise DomainError("draws must be sorted ascending")
        draws = draws.copy()
        draws.flags.writeable = False
        object.__setattr__(self, "draws", draws)

    @property
    def r(self) -> int:
        return int(self.draws.size)

    def quantile_summary(self, count: int = 1024) -> np.ndarray:
        grid = (np.arange(count) + 0.5) / count
        return np.quantile(self.draws, grid)

    def as_dict(self, summary_points: int = 1024) -> dict:
        return {
            "centered": self.centered,
            "r": self.r,
            "lambdas": self.lambdas.as_dict(),
            "etas": self.etas.as_dict(),
            "draw_quantiles": [float(v) for v in self.quantile_summary(summary_points)],
        }


def discretize_marginal(quantile_fn, t: int) -> DiscreteMarginal:
    """t-point equal-weight discretization at quantile levels (m - 1/2)/t.

    Raises
    ------
    DegenerateGrid
        If t < 3.
    NonMonotoneQuantile
        If the evaluated quantiles fail to strictly increase.
    """
    t = int(t)
    if t < 3:
        raise DegenerateGrid(f"discretization needs at least 3 points, got {t}")
    levels = (np.arange(1, t + 1) - 0.5) / t
    points = np.array([float(quantile_fn(u)) for u in levels], dtype=np.float64)
    if not np.all(np.isfinite(points)):
        raise DomainError("quantile function produced non-finite values")
    if np.any(np.diff(points) <= 0.0):
        raise NonMonotoneQuantile("quantile function is not strictly increasing")
    return DiscreteMarginal(points, np.full(t, 1.0 / t))


def empirical_marginal(values) -> DiscreteMarginal:
    """Distinct sorted values weighted by multiplicity / n.

    Raises
    ------
    SampleTooSmall
        Fewer than 3 values.
    AllValuesEqual
        A single distinct value (no spread, no spectrum).
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise DomainError("values must form a 1-d array")
    if arr.size < 3:
        raise SampleTooSmall(f"need at least 3 values, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("values must be finite")
    points, counts = np.unique(arr, return_counts=True)
    if points.size < 2:
        raise AllValuesEqual("all values are identical")
    return DiscreteMarginal(points, counts / arr.size)


def kernel_eigenvalues(
    marginal: DiscreteMarginal,
    k_max: int,
    config: NumericConfig = DEFAULT_CONFIG,
) -> EigenSpectrum:
    """Top k_max kernel eigenvalues of a discrete marginal.

    Solves the positive definite tridiagonal system described in the
    module docstring; the reciprocals of its eigenvalues are the kernel
    eigenvalues, with the constant mode excluded by construction.  Any
    reciprocal mode at or below ``config.eig_zero_tol`` is discarded as
    numerically indistinguishable from degenerate.
    """
    if k_max < 1:
        raise DomainError(f"k_max must be at least 1, got {k_max}")
    t = marginal.t
    if t < 3:
        raise DegenerateGrid(f"eigen-solve needs at least 3 support points, got {t}")
    gaps = np.diff(marginal.points)
    c = 1.0 / gaps
    if not np.all(np.isfinite(c)):
        raise DegenerateGrid("consecutive support points too close: infinite coefficient")
    p = marginal.probs
    diag = c * (1.0 / p[:-1] + 1.0 / p[1:])
    off = -np.sqrt(c[:-1] * c[1:]) / p[1:-1]
    mu = eigvalsh_tridiagonal(diag, off)
    mu = mu[mu > config.eig_zero_tol]
    if mu.size == 0:
        raise EmptySpectrum("no eigenvalue exceeded the zero tolerance")
    lambdas = 1.0 / mu
    return EigenSpectrum(lambdas[:k_max], t, marginal.trace_target)


def _centered_kernel_matrix(marginal: DiscreteMarginal) -> np.ndarray:
    x = marginal.points
    p = marginal.probs
    absdiff = np.abs(x[:, None] - x[None, :])
    g = absdiff @ p
    grand = float(p @ g)
    return -0.5 * (absdiff - g[:, None] - g[None, :] + grand)


def dense_kernel_eigenvalues(
    marginal: DiscreteMarginal,
    k_max: int,
    config: NumericConfig = DEFAULT_CONFIG,
) -> EigenSpectrum:
    """Oracle route: eigendecompose [sqrt(p_i p_j) h(x_i, x_j)] directly.

    Quadratic in t, so restricted to t <= 200.  Exists to cross-check
    :func:`kernel_eigenvalues`; production code should use the
    tridiagonal solver.
    """
    if k_max < 1:
        raise DomainError(f"k_max must be at least 1, got {k_max}")
    t = marginal.t
    if t > _DENSE_T_LIMIT:
        raise DomainError(f"dense oracle limited to t <= {_DENSE_T_LIMIT}, got {t}")
    if t < 3:
        raise DegenerateGrid(f"eigen-solve needs at least 3 support points, got {t}")
    root_p = np.sqrt(marginal.probs)
    kernel = _centered_kernel_matrix(marginal) * np.outer(root_p, root_p)
    eigvals = eigh(kernel, eigvals_only=True)[::-1]
    eigvals = eigvals[eigvals > config.eig_zero_tol]
    if eigvals.size == 0:
        raise EmptySpectrum("no eigenvalue exceeded the zero tolerance")
    return EigenSpectrum(eigvals[:k_max], t, marginal.trace_target)


def _batch_generator(seed: SeedSpec, batch_index: int) -> np.random.Generator:
    # Two-level spawn key: never collides with the single-level
    # substreams handed out elsewhere for the same master seed.
    ss = np.random.SeedSequence(
        seed.master_seed, spawn_key=(seed.stream_index, batch_index)
    )
    return np.random.default_rng(ss)


def null_limit_model(
    lx: EigenSpectrum,
    ly: EigenSpectrum,
    k: int,
    r: int,
    seed: SeedSpec,
    centered: bool,
) -> NullLimitModel:
    """Monte Carlo draws of ``sum_ij lambda_i eta_j (Z_ij^2 - c)``.

    ``c`` is 1 when ``centered`` else 0.  Each spectrum is truncated to
    its top ``min(k, available)`` eigenvalues.  Draws are produced in
    fixed-size batches with per-batch generators derived from ``seed``,
    so the result is reproducible and independent of any scheduling.
    """
    if k < 1:
        raise DomainError(f"k must be at least 1, got {k}")
    if r < 1000:
        raise DomainError(f"need at least 1000 draws for a usable null model, got {r}")
    if lx.k == 0 or ly.k == 0:
        raise EmptySpectrum("both marginals need a nonempty spectrum")
    k_eff = min(k, lx.k, ly.k)
    lam = lx.lambdas[:k_eff]
    eta = ly.lambdas[:k_eff]
    chunks: list[np.ndarray] = []
    offset = 1.0 if centered else 0.0
    for batch_index in range(math.ceil(r / _DRAW_BATCH)):
        size = min(_DRAW_BATCH, r - batch_index * _DRAW_BATCH)
        rng = _batch_generator(seed, batch_index)
        z = rng.standard_normal((size, k_eff, k_eff))
        q = z * z - offset
        chunks.append((q @ eta) @ lam)
    draws = np.sort(np.concatenate(chunks))
    return NullLimitModel(
        lambdas=EigenSpectrum(lam, lx.t, lx.trace_target),
        etas=EigenSpectrum(eta, ly.t, ly.trace_target),
        draws=draws,
        centered=centered,
        seed=seed,
    )


def null_pvalue(model: NullLimitModel, statistic: float) -> float:
    """Upper-tail probability ``(1 + #{draws >= statistic}) / (r + 1)``."""
    statistic = float(statistic)
    if not math.isfinite(statistic):
        raise DomainError(f"statistic must be finite, got {statistic!r}")
    below = int(np.searchsorted(model.draws, statistic, side="left"))
    return (1 + model.r - below) / (model.r + 1)
