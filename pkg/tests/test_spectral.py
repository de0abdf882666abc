"""Kernel eigenvalues of discretized marginals and the simulated
weighted chi-square null limit."""

import math

import numpy as np
import pytest

from kappacov import (
    AllValuesEqual,
    DegenerateGrid,
    DiscreteMarginal,
    DomainError,
    EigenSpectrum,
    EmptySpectrum,
    NonMonotoneQuantile,
    SampleTooSmall,
    SeedSpec,
    dense_kernel_eigenvalues,
    discretize_marginal,
    empirical_marginal,
    kernel_eigenvalues,
    null_limit_model,
    null_pvalue,
)


def uniform_marginal(t: int) -> DiscreteMarginal:
    return discretize_marginal(lambda u: u, t)


def random_marginal(rng: np.random.Generator, t: int) -> DiscreteMarginal:
    points = np.sort(rng.normal(size=t) * 2.0)
    while np.any(np.diff(points) <= 0):
        points = np.sort(rng.normal(size=t) * 2.0)
    probs = rng.dirichlet(np.full(t, 2.0))
    return DiscreteMarginal(points, probs / probs.sum())


# --- marginal containers -----------------------------------------------------


def test_two_point_marginal_moments():
    marginal = DiscreteMarginal(np.array([0.0, 1.0]), np.array([0.5, 0.5]))
    assert marginal.t == 2
    assert math.isclose(marginal.mean_abs_difference(), 0.5, rel_tol=1e-15)
    assert math.isclose(marginal.trace_target, 0.25, rel_tol=1e-15)


def test_three_point_marginal_moments():
    marginal = DiscreteMarginal(np.array([0.0, 1.0, 2.0]), np.full(3, 1.0 / 3.0))
    assert math.isclose(marginal.mean_abs_difference(), 8.0 / 9.0, rel_tol=1e-14)


def test_marginal_validation():
    with pytest.raises(DegenerateGrid):
        DiscreteMarginal(np.array([1.0]), np.array([1.0]))
    with pytest.raises(DegenerateGrid):
        DiscreteMarginal(np.array([0.0, 0.0]), np.array([0.5, 0.5]))
    with pytest.raises(DomainError):
        DiscreteMarginal(np.array([0.0, 1.0]), np.array([0.5, -0.5]))
    with pytest.raises(DomainError):
        DiscreteMarginal(np.array([0.0, 1.0]), np.array([0.6, 0.6]))
    with pytest.raises(DomainError):
        DiscreteMarginal(np.array([0.0, 1.0, 2.0]), np.array([0.5, 0.5]))
    with pytest.raises(DomainError):
        DiscreteMarginal(np.array([0.0, np.inf]), np.array([0.5, 0.5]))


def test_discretize_uniform_grid():
    marginal = uniform_marginal(5)
    assert np.allclose(marginal.points, [0.1, 0.3, 0.5, 0.7, 0.9])
    assert np.allclose(marginal.probs, 0.2)


def test_discretize_errors():
    with pytest.raises(DegenerateGrid):
        discretize_marginal(lambda u: u, 2)
    with pytest.raises(NonMonotoneQuantile):
        discretize_marginal(lambda u: round(u), 10)
    with pytest.raises(DomainError):
        discretize_marginal(lambda u: float("nan"), 5)


def test_empirical_marginal_counts():
    marginal = empirical_marginal([3.0, 1.0, 3.0, 2.0, 1.0, 1.0])
    assert np.array_equal(marginal.points, [1.0, 2.0, 3.0])
    assert np.allclose(marginal.probs, [0.5, 1.0 / 6.0, 1.0 / 3.0])


def test_empirical_marginal_errors():
    with pytest.raises(SampleTooSmall):
        empirical_marginal([1.0, 2.0])
    with pytest.raises(AllValuesEqual):
        empirical_marginal([5.0, 5.0, 5.0, 5.0])
    with pytest.raises(DomainError):
        empirical_marginal([1.0, 2.0, float("nan")])


# --- eigen-solve --------------------------------------------------------------


def test_uniform_spectrum_matches_continuum():
    # The continuous-marginal eigenvalues are 1/(k^2 pi^2); at t = 400
    # the discretization error grows with k and reaches ~1.4e-4 at k = 5.
    spectrum = kernel_eigenvalues(uniform_marginal(400), 5)
    for k, value in enumerate(spectrum.lambdas, start=1):
        assert math.isclose(value, 1.0 / (k * math.pi) ** 2, rel_tol=1e-3)


def test_full_spectrum_satisfies_trace_identity(rng):
    for marginal in (uniform_marginal(101), random_marginal(rng, 57)):
        spectrum = kernel_eigenvalues(marginal, marginal.t)
        assert spectrum.k <= marginal.t - 1
        assert math.isclose(spectrum.total, marginal.trace_target, rel_tol=1e-10)


def test_tridiagonal_matches_dense(rng):
    for marginal in (uniform_marginal(60), random_marginal(rng, 60), random_marginal(rng, 120)):
        k = 20
        fast = kernel_eigenvalues(marginal, k)
        dense = dense_kernel_eigenvalues(marginal, k)
        m = min(fast.k, dense.k, k)
        ratios = fast.lambdas[:m] / dense.lambdas[:m]
        assert np.max(np.abs(ratios - 1.0)) <= 1e-10


def test_dense_route_size_limit():
    with pytest.raises(DomainError):
        dense_kernel_eigenvalues(uniform_marginal(201), 5)


def test_kernel_eigenvalues_arguments():
    marginal = uniform_marginal(50)
    assert kernel_eigenvalues(marginal, 1).k == 1
    assert kernel_eigenvalues(marginal, 10_000).k <= 49
    with pytest.raises(DomainError):
        kernel_eigenvalues(marginal, 0)
    two_point = DiscreteMarginal(np.array([0.0, 1.0]), np.array([0.5, 0.5]))
    with pytest.raises(DegenerateGrid):
        kernel_eigenvalues(two_point, 1)


def test_spectrum_container_validation():
    with pytest.raises(EmptySpectrum):
        EigenSpectrum(np.array([]), t=10, trace_target=0.5)
    with pytest.raises(DomainError):
        EigenSpectrum(np.array([0.1, 0.2]), t=10, trace_target=0.5)
    with pytest.raises(DomainError):
        EigenSpectrum(np.array([0.2, -0.1]), t=10, trace_target=0.5)
    with pytest.raises(DomainError):
        EigenSpectrum(np.array([0.2, 0.1, 0.05]), t=3, trace_target=0.5)
    spectrum = EigenSpectrum(np.array([0.2, 0.1]), t=10, trace_target=0.5)
    payload = spectrum.as_dict()
    assert payload["t"] == 10
    assert payload["lambdas"] == [0.2, 0.1]
    assert math.isclose(payload["sum_lambdas"], 0.3, rel_tol=1e-15)


# --- null limit ----------------------------------------------------------------


def _small_spectra():
    marginal = uniform_marginal(200)
    return kernel_eigenvalues(marginal, 20), kernel_eigenvalues(marginal, 20)


def test_null_model_is_reproducible():
    lx, ly = _small_spectra()
    a = null_limit_model(lx, ly, k=20, r=2000, seed=SeedSpec(7), centered=True)
    b = null_limit_model(lx, ly, k=20, r=2000, seed=SeedSpec(7), centered=True)
    c = null_limit_model(lx, ly, k=20, r=2000, seed=SeedSpec(8), centered=True)
    assert np.array_equal(a.draws, b.draws)
    assert not np.array_equal(a.draws, c.draws)
    assert np.all(np.diff(a.draws) >= 0.0)
    assert a.r == 2000


def test_null_model_moments():
    lx, ly = _small_spectra()
    lam = lx.lambdas[:20]
    eta = ly.lambdas[:20]
    mean_shift = float(lam.sum() * eta.sum())
    spread = 2.0 * float((lam**2).sum() * (eta**2).sum())

    centered = null_limit_model(lx, ly, k=20, r=60_000, seed=SeedSpec(11), centered=True)
    uncentered = null_limit_model(lx, ly, k=20, r=60_000, seed=SeedSpec(11), centered=False)
    assert abs(float(centered.draws.mean())) < 3e-4
    assert abs(float(uncentered.draws.mean()) - mean_shift) < 3e-4
    assert math.isclose(float(centered.draws.var()), spread, rel_tol=0.1)
    # The two laws differ only by the deterministic mean shift.
    assert np.allclose(uncentered.draws - mean_shift, centered.draws, atol=1e-12)


def test_null_model_truncates_k():
    lx, ly = _small_spectra()
    model = null_limit_model(lx, ly, k=10_000, r=1000, seed=SeedSpec(1), centered=True)
    assert model.lambdas.k == 20
    payload = model.as_dict(summary_points=17)
    assert payload["r"] == 1000
    assert len(payload["draw_quantiles"]) == 17


def test_null_model_argument_validation():
    lx, ly = _small_spectra()
    with pytest.raises(DomainError):
        null_limit_model(lx, ly, k=0, r=2000, seed=SeedSpec(0), centered=True)
    with pytest.raises(DomainError):
        null_limit_model(lx, ly, k=5, r=999, seed=SeedSpec(0), centered=True)


def test_null_pvalue_tail_behavior():
    lx, ly = _small_spectra()
    model = null_limit_model(lx, ly, k=20, r=5000, seed=SeedSpec(5), centered=False)
    below = null_pvalue(model, float(model.draws[0]) - 1.0)
    above = null_pvalue(model, float(model.draws[-1]) + 1.0)
    assert below == 1.0
    assert math.isclose(above, 1.0 / 5001.0, rel_tol=1e-12)
    stats = np.quantile(model.draws, [0.1, 0.5, 0.9])
    pvals = [null_pvalue(model, float(s)) for s in stats]
    assert pvals[0] > pvals[1] > pvals[2]
    for q, p in zip((0.1, 0.5, 0.9), pvals):
        assert abs(p - (1.0 - q)) < 0.02
    with pytest.raises(DomainError):
        null_pvalue(model, float("nan"))


def test_quantile_summary_shape():
    lx, ly = _small_spectra()
    model = null_limit_model(lx, ly, k=20, r=1500, seed=SeedSpec(2), centered=True)
    summary = model.quantile_summary(count=33)
    assert summary.shape == (33,)
    assert np.all(np.diff(summary) >= 0.0)
