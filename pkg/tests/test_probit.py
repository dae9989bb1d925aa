"""Design construction and sampler behavior, without the frozen oracle."""

import numpy as np
import pytest

from bloomlab.errors import (
    DimensionMismatch,
    InsufficientRows,
    UnknownColumn,
    ValidationError,
    ZeroVarianceColumn,
)
from bloomlab.probit import (
    DEFAULT_COVARIATES,
    CovariateSpec,
    RjSample,
    TimeSeriesDataset,
    bma_predict,
    bma_summary,
    build_design,
    rjmcmc_fit,
)
from bloomlab.probit import _truncated_normal


def month_seq(start_year, start_month, n):
    months = []
    y, m = start_year, start_month
    for _ in range(n):
        months.append((y, m))
        y, m = (y + 1, 1) if m == 12 else (y, m + 1)
    return tuple(months)


def synthetic_dataset(n=77, seed=7):
    rng = np.random.default_rng(seed)
    covs = {name: rng.normal(size=n) for name in DEFAULT_COVARIATES.main_effects}
    bloom = (rng.uniform(size=n) < 0.4).astype(int)
    return TimeSeriesDataset.make(month_seq(2000, 1, n), bloom, covs)


# --- dataset validation ------------------------------------------------------

def test_dataset_months_must_be_consecutive():
    covs = {n: np.zeros(3) for n in DEFAULT_COVARIATES.main_effects}
    with pytest.raises(ValidationError):
        TimeSeriesDataset.make(((2000, 1), (2000, 3), (2000, 4)), [0, 1, 0], covs)
    with pytest.raises(ValidationError):
        TimeSeriesDataset.make(((2000, 11), (2000, 12), (2000, 12)), [0, 1, 0], covs)
    # year rollover is consecutive
    TimeSeriesDataset.make(((2000, 12), (2001, 1), (2001, 2)), [0, 1, 0], covs)


def test_dataset_indicator_must_be_binary():
    covs = {n: np.zeros(3) for n in DEFAULT_COVARIATES.main_effects}
    with pytest.raises(ValidationError):
        TimeSeriesDataset.make(month_seq(2000, 1, 3), [0, 2, 0], covs)


def test_dataset_length_agreement():
    covs = {n: np.zeros(4) for n in DEFAULT_COVARIATES.main_effects}
    with pytest.raises(ValidationError):
        TimeSeriesDataset.make(month_seq(2000, 1, 3), [0, 1, 0], covs)


# --- design matrix -----------------------------------------------------------

def test_design_shape_and_names():
    design = build_design(synthetic_dataset(77), DEFAULT_COVARIATES)
    assert design.X.shape == (76, 17)
    assert design.y.shape == (76,)
    assert len(design.columns) == 17
    mains = DEFAULT_COVARIATES.main_effects
    assert design.columns[:5] == mains
    assert design.columns[5:10] == tuple(f"{m}_lag1" for m in mains)
    assert all("*" in c for c in design.columns[10:])


def test_design_standardization_invariant():
    design = build_design(synthetic_dataset(), DEFAULT_COVARIATES)
    for j in range(10):  # mains + lags, not interactions
        col = design.X[:, j]
        assert abs(col.mean()) < 1e-9
        assert abs(col.std() - 1.0) < 1e-9


def test_ar_column_is_lagged_standardized_main():
    data = synthetic_dataset(30)
    design = build_design(data, DEFAULT_COVARIATES)
    name = DEFAULT_COVARIATES.main_effects[2]
    raw = np.asarray(data.covariates[name])
    lagged = raw[:-1]
    expected = (lagged - lagged.mean()) / lagged.std()
    np.testing.assert_allclose(design.X[:, 7], expected, atol=1e-12)


def test_interaction_is_product_of_standardized_parents():
    design = build_design(synthetic_dataset(40), DEFAULT_COVARIATES)
    a, b = DEFAULT_COVARIATES.interactions[0]
    ia = design.columns.index(a)
    ib = design.columns.index(b)
    ic = design.columns.index(f"{a}*{b}")
    np.testing.assert_allclose(
        design.X[:, ic], design.X[:, ia] * design.X[:, ib], atol=1e-12)


def test_design_response_is_lag_aligned():
    data = synthetic_dataset(25)
    design = build_design(data, DEFAULT_COVARIATES)
    np.testing.assert_array_equal(design.y, np.asarray(data.bloom)[1:])


def test_design_errors():
    one = TimeSeriesDataset.make(
        month_seq(2000, 1, 1), [0],
        {n: np.zeros(1) for n in DEFAULT_COVARIATES.main_effects})
    with pytest.raises(InsufficientRows):
        build_design(one, DEFAULT_COVARIATES)

    data = synthetic_dataset(10)
    bad = CovariateSpec(("nope",) + DEFAULT_COVARIATES.main_effects[1:], ())
    with pytest.raises(UnknownColumn):
        build_design(data, bad)

    flat = {n: np.ones(10) for n in DEFAULT_COVARIATES.main_effects}
    const = TimeSeriesDataset.make(month_seq(2000, 1, 10),
                                   [0, 1] * 5, flat)
    with pytest.raises(ZeroVarianceColumn):
        build_design(const, DEFAULT_COVARIATES)


def test_covariate_spec_candidate_count():
    assert len(DEFAULT_COVARIATES.candidates()) == 17
    assert len(DEFAULT_COVARIATES.main_effects) == 5
    assert len(DEFAULT_COVARIATES.interactions) == 7
    # interactions must reference declared main effects
    with pytest.raises(ValidationError):
        CovariateSpec(("a", "b"), (("a", "zz"),)).candidates()


# --- truncated latent draws ----------------------------------------------------

def test_latent_signs_match_response():
    rng = np.random.default_rng(50)
    mu = rng.normal(scale=4.0, size=500)
    y = (rng.uniform(size=500) < 0.5).astype(int)
    z = _truncated_normal(rng, mu, y)
    assert np.all(z[y == 1] > 0)
    assert np.all(z[y == 0] <= 0)
    assert np.all(np.isfinite(z))


def test_latent_deep_tail_is_finite():
    rng = np.random.default_rng(51)
    mu = np.full(200, -12.0)
    z = _truncated_normal(rng, mu, np.ones(200, dtype=int))
    assert np.all(np.isfinite(z)) and np.all(z > 0)
    # conditioned on z > 0 with far-negative mean, mass hugs the boundary
    assert z.max() < 1.0


# --- sampler ---------------------------------------------------------------------

def toy_problem(n=120, k=5, strong=None, seed=3):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, k))
    X = (X - X.mean(axis=0)) / X.std(axis=0)
    eta = np.zeros(n)
    if strong is not None:
        j, coef = strong
        eta = coef * X[:, j]
    y = (eta + rng.normal(size=n) > 0).astype(int)
    return X, y


def test_seed_determinism():
    X, y = toy_problem()
    a = rjmcmc_fit(X, y, prior_scale=3.0, iterations=300, burn_in=50, seed=11)
    b = rjmcmc_fit(X, y, prior_scale=3.0, iterations=300, burn_in=50, seed=11)
    assert len(a) == len(b) == 250
    for sa, sb in zip(a, b):
        assert sa.gamma == sb.gamma
        np.testing.assert_array_equal(sa.beta, sb.beta)
    c = rjmcmc_fit(X, y, prior_scale=3.0, iterations=300, burn_in=50, seed=12)
    assert any(sa.gamma != sc.gamma or not np.array_equal(sa.beta, sc.beta)
               for sa, sc in zip(a, c))


def test_fit_validates_iteration_budget():
    X, y = toy_problem()
    with pytest.raises(ValidationError):
        rjmcmc_fit(X, y, prior_scale=3.0, iterations=10, burn_in=10, seed=1)
    with pytest.raises(ValidationError):
        rjmcmc_fit(X, y, prior_scale=3.0, iterations=10, burn_in=-1, seed=1)
    with pytest.raises(ValidationError):
        rjmcmc_fit(X, y, prior_scale=0.0, iterations=10, burn_in=1, seed=1)


def test_null_truth_prefers_null_model():
    rng = np.random.default_rng(60)
    n, k = 200, 17
    X = rng.normal(size=(n, k))
    X = (X - X.mean(axis=0)) / X.std(axis=0)
    y = (rng.normal(size=n) > 0).astype(int)  # intercept-only truth
    samples = rjmcmc_fit(X, y, prior_scale=3.0, iterations=4000, burn_in=500, seed=61)
    summary = bma_summary(samples)
    top_gamma, top_p, _ = summary.models[0]
    assert top_gamma == (0,) * k
    assert top_p > 0.2


def test_strong_covariate_always_included():
    X, y = toy_problem(n=200, strong=(2, 2.0), seed=62)
    samples = rjmcmc_fit(X, y, prior_scale=3.0, iterations=3000, burn_in=500, seed=63)
    summary = bma_summary(samples)
    prob, _ = summary.inclusion[2]
    assert prob > 0.9


# --- model averaging ---------------------------------------------------------------

def test_summary_single_model_degenerate():
    samples = [RjSample((1, 0, 1), np.array([0.1, 0.5, -0.2]))] * 20
    summary = bma_summary(samples)
    assert summary.models[0][0] == (1, 0, 1)
    assert summary.models[0][1] == 1.0
    assert [p for p, _ in summary.inclusion] == [1.0, 0.0, 1.0]
    assert summary.top_mass(1)[0] == 1.0


def test_inclusion_is_mean_of_bits():
    samples = [
        RjSample((1, 0), np.array([0.0, 1.0])),
        RjSample((0, 0), np.array([0.0])),
        RjSample((1, 1), np.array([0.0, 1.0, 1.0])),
        RjSample((1, 0), np.array([0.0, 1.0])),
    ]
    summary = bma_summary(samples)
    assert summary.inclusion[0][0] == pytest.approx(0.75)
    assert summary.inclusion[1][0] == pytest.approx(0.25)
    with pytest.raises(ValidationError):
        bma_summary([])


def test_predict_zero_beta_is_half():
    samples = [RjSample((0, 0, 0, 0), np.zeros(1))]
    assert bma_predict(samples, np.zeros(4)) == pytest.approx(0.5)


def test_predict_order_invariant_and_checked():
    rng = np.random.default_rng(70)
    samples = [
        RjSample((1, 1), rng.normal(size=3)),
        RjSample((0, 1), rng.normal(size=2)),
        RjSample((0, 0), rng.normal(size=1)),
    ]
    x = rng.normal(size=2)
    p1 = bma_predict(samples, x)
    p2 = bma_predict(list(reversed(samples)), x)
    assert p1 == pytest.approx(p2, abs=1e-15)
    assert 0.0 <= p1 <= 1.0
    with pytest.raises(DimensionMismatch):
        bma_predict(samples, np.zeros(3))
