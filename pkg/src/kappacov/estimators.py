"""Estimators of the dependence coefficient kappa.

kappa is defined through products of doubly centered absolute-difference
kernels; it is nonnegative, zero exactly under independence, and for the
population equals ``(mu12 - 2*mu3 + mu1*mu2) / 4`` in terms of the
expected pairwise and cross moments.  Three sample versions exist:

``kappa_star``
    ``(u12 + u1*u2 - 2*u3) / 4`` from the distinct-tuple means.
``kappa_tilde``
    Mean over unordered pairs of products of kernels centered with
    leave-type ``n/(n-1)`` factors.  May be negative; exactly mean-zero
    under independence.
``kappa_hat``
    Mean over all ordered pairs of products of fully centered kernels,
    ``(v12 - 2*v3 + v1*v2) / 4``.  Always nonnegative; carries an O(1/n)
    positive bias.

``kappa_tilde`` and ``kappa_hat`` admit exact finite-n expressions in
terms of ``kappa_star`` and the distinct-tuple means; the production
paths use those, while the ``*_direct`` functions evaluate the defining
kernel sums for cross-validation.  The two routes agree to floating
point roundoff on every sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PairedSample
from .errors import DegenerateMarginal, SampleTooSmall
from .ustats import (
    PairwiseTables,
    UStatBundle,
    bundle_for_permutation,
    compute_ustats,
)

__all__ = [
    "KappaEstimates",
    "RhoEstimates",
    "kappa_star",
    "kappa_tilde",
    "kappa_hat",
    "kappa_hat_relation",
    "kappa_trio",
    "kappa_tilde_direct",
    "kappa_hat_direct",
    "statistic_scale",
    "delta1_plugin",
    "estimate",
    "rho_estimates",
]


@dataclass(frozen=True)
class KappaEstimates:
    """The three kappa estimates of one sample, optionally with the
    plug-in asymptotic variance of ``sqrt(n) * (estimate - kappa)``."""

    kappa_star: float
    kappa_tilde: float
    kappa_hat: float
    n: int
    delta1_hat: float | None = None


@dataclass(frozen=True)
class RhoEstimates:
    """Normalized dependence coefficients in [0, 1] (hat) and [-1, 1]
    (tilde), obtained by dividing each kappa by the geometric mean of
    its two self-coefficients."""

    rho_hat: float
    rho_tilde: float
    n: int


def _as_bundle(data: PairedSample | UStatBundle) -> UStatBundle:
    if isinstance(data, UStatBundle):
        return data
    return compute_ustats(data)


def kappa_star(data: PairedSample | UStatBundle) -> float:
    """Quarter combination of the distinct-tuple means.

    Accepts a sample, or a precomputed bundle when several statistics
    share one O(n^2) pass.
    """
    bundle = _as_bundle(data)
    return 0.25 * (bundle.u12 + bundle.u1 * bundle.u2 - 2.0 * bundle.u3)


def kappa_tilde(data: PairedSample | UStatBundle) -> float:
    """Leave-type centered estimate via its exact finite-n relation to
    :func:`kappa_star`."""
    bundle = _as_bundle(data)
    n = bundle.n
    nm1 = n - 1.0
    correction = 0.25 * (
        -2.0 * n / nm1**2 * bundle.u12
        + 2.0 / nm1**2 * bundle.u3
        + 2.0 / nm1 * bundle.u1 * bundle.u2
    )
    return kappa_star(bundle) + correction


def kappa_hat(data: PairedSample | UStatBundle) -> float:
    """Fully centered estimate from the with-replacement means."""
    bundle = _as_bundle(data)
    return 0.25 * (bundle.v12 - 2.0 * bundle.v3 + bundle.v1 * bundle.v2)


def kappa_hat_relation(data: PairedSample | UStatBundle) -> float:
    """:func:`kappa_hat` expressed through the distinct-tuple means.

    Exact finite-n identity; useful as an independent route when
    validating the with-replacement reductions.
    """
    bundle = _as_bundle(data)
    n = bundle.n
    square = float(n) * n
    correction = 0.25 * (
        (2.0 - 3.0 * n) / square * bundle.u12
        - 2.0 * (2.0 - 3.0 * n) / square * bundle.u3
        + (1.0 - 2.0 * n) / square * bundle.u1 * bundle.u2
    )
    return kappa_star(bundle) + correction


def kappa_trio(data: PairedSample | UStatBundle) -> tuple[float, float, float]:
    """(kappa_star, kappa_tilde, kappa_hat) from one shared bundle."""
    bundle = _as_bundle(data)
    return kappa_star(bundle), kappa_tilde(bundle), kappa_hat(bundle)


def statistic_scale(data: PairedSample | UStatBundle) -> float:
    """Natural magnitude of the kappa statistics of a sample.

    Quarter of the sum of the absolute values of the three combined
    terms.  The statistics are signed combinations of these terms, so
    this is the correct denominator floor when comparing two computation
    routes in relative terms near a zero crossing.
    """
    bundle = _as_bundle(data)
    return 0.25 * (bundle.u12 + 2.0 * bundle.u3 + bundle.u1 * bundle.u2)


def _difference_matrix(values: np.ndarray) -> np.ndarray:
    return np.abs(values[:, None] - values[None, :])


def kappa_tilde_direct(sample: PairedSample) -> float:
    """Defining kernel-product sum for the leave-type centered estimate.

    Builds both centered kernel matrices explicitly and averages their
    entrywise product over unordered pairs.  O(n^2) memory; used to
    cross-check :func:`kappa_tilde`.
    """
    n = sample.n
    if n < 2:
        raise SampleTooSmall(f"need at least 2 observations, got {n}")
    scale = n / (n - 1.0)
    dx = _difference_matrix(sample.xs)
    row_x = dx.mean(axis=1)
    grand_x = row_x.mean()
    hx = -0.5 * (dx - scale * (row_x[:, None] + row_x[None, :] - grand_x))
    dy = _difference_matrix(sample.ys)
    row_y = dy.mean(axis=1)
    grand_y = row_y.mean()
    hy = -0.5 * (dy - scale * (row_y[:, None] + row_y[None, :] - grand_y))
    upper = np.triu_indices(n, 1)
    return float((hx[upper] * hy[upper]).sum()) / math.comb(n, 2)


def kappa_hat_direct(sample: PairedSample) -> float:
    """Defining kernel-product sum for the fully centered estimate.

    Diagonal entries included: the average runs over all ordered pairs.
    """
    n = sample.n
    if n < 2:
        raise SampleTooSmall(f"need at least 2 observations, got {n}")
    dx = _difference_matrix(sample.xs)
    row_x = dx.mean(axis=1)
    hx = -0.5 * (dx - row_x[:, None] - row_x[None, :] + row_x.mean())
    dy = _difference_matrix(sample.ys)
    row_y = dy.mean(axis=1)
    hy = -0.5 * (dy - row_y[:, None] - row_y[None, :] + row_y.mean())
    return float((hx * hy).sum()) / (float(n) * n)


def delta1_plugin(sample: PairedSample) -> float:
    """Plug-in estimate of the asymptotic variance of
    ``sqrt(n) * (kappa_estimate - kappa)``.

    The limit variance is a quarter of the variance of the first
    projection of the estimating kernel.  Every population mean in that
    projection is replaced by the matching sample mean:

    * the joint pairwise mean at ``(x_i, y_i)``,
    * the two marginal pairwise means,
    * the two mixed conditional means, estimated by weighting the
      opposite coordinate's pairwise means with the observed distances,
    * and the product of the marginal pairwise means.

    Variance is taken with denominator ``n``.  All three kappa
    estimators share this limit, so one value serves for them all.
    """
    n = sample.n
    if n < 3:
        raise SampleTooSmall(f"need at least 3 observations, got {n}")
    dx = _difference_matrix(sample.xs)
    dy = _difference_matrix(sample.ys)
    g1 = dx.mean(axis=1)
    g2 = dy.mean(axis=1)
    mu1 = g1.mean()
    mu2 = g2.mean()
    g12 = (dx * dy).mean(axis=1)
    cond_x = dx @ g2 / n
    cond_y = dy @ g1 / n
    projection = g12 + mu1 * g2 + mu2 * g1 - cond_x - cond_y - g1 * g2
    return 0.25 * float(projection.var())


def estimate(sample: PairedSample, with_variance: bool = False) -> KappaEstimates:
    """All three kappa estimates of one sample in one O(n^2) pass."""
    bundle = compute_ustats(sample)
    star, tilde, hat = kappa_trio(bundle)
    delta1 = delta1_plugin(sample) if with_variance else None
    return KappaEstimates(
        kappa_star=star, kappa_tilde=tilde, kappa_hat=hat, n=bundle.n, delta1_hat=delta1
    )


# Cauchy-Schwarz bounds the normalized coefficients by 1 exactly; allow
# this much rounding slack before treating an excess as a real error.
_RHO_ROUNDING = 1e-12


def _clip_rho(value: float, lower: float) -> float:
    if 1.0 < value <= 1.0 + _RHO_ROUNDING:
        return 1.0
    if lower - _RHO_ROUNDING <= value < lower:
        return lower
    return value


def rho_estimates(sample: PairedSample) -> RhoEstimates:
    """Normalized coefficients ``kappa(x, y) / sqrt(kappa(x, x) * kappa(y, y))``.

    Raises
    ------
    DegenerateMarginal
        If either marginal is constant, making a self-coefficient zero.
    """
    both = compute_ustats(sample)
    self_x = compute_ustats(PairedSample(sample.xs, sample.xs))
    self_y = compute_ustats(PairedSample(sample.ys, sample.ys))

    hat_x, hat_y = kappa_hat(self_x), kappa_hat(self_y)
    tilde_x, tilde_y = kappa_tilde(self_x), kappa_tilde(self_y)
    if hat_x <= 0.0 or hat_y <= 0.0 or tilde_x <= 0.0 or tilde_y <= 0.0:
        raise DegenerateMarginal(
            "a marginal is constant; normalized coefficients are undefined"
        )

    rho_hat = _clip_rho(kappa_hat(both) / math.sqrt(hat_x * hat_y), 0.0)
    rho_tilde = _clip_rho(kappa_tilde(both) / math.sqrt(tilde_x * tilde_y), -1.0)
    return RhoEstimates(rho_hat=rho_hat, rho_tilde=rho_tilde, n=sample.n)


def _trio_for_tables(
    tables: PairwiseTables, perm: np.ndarray | None
) -> tuple[float, float, float]:
    # Hot path for permutation loops.
    return kappa_trio(bundle_for_permutation(tables, perm))
