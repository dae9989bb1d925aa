"""Bayesian probit time-series regression with reversible-jump selection.

The response is a monthly bloom indicator; candidates are five main
effects, their first-order lags, and declared pairwise interactions.
Within a model, coefficients update by latent-utility data augmentation
(truncated-normal utilities, conjugate normal draws). Across models,
single-bit birth/death proposals draw the entering coefficient from its
prior, so the acceptance ratio reduces to the observed-data likelihood
ratio. Priors: beta ~ Normal(0, prior_scale^2 I), uniform over models.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.special import log_ndtr, ndtr, ndtri

from .errors import (
    DimensionMismatch,
    InsufficientRows,
    NumericalFailure,
    UnknownColumn,
    ValidationError,
    ZeroVarianceColumn,
)

MAIN_EFFECTS = ("min_temp", "max_temp", "solar_exposure", "clear_sky", "rainfall_mm")

# the seven bundled pairwise products (documented default; freely overridable)
DEFAULT_INTERACTIONS = (
    ("min_temp", "max_temp"),
    ("min_temp", "solar_exposure"),
    ("max_temp", "solar_exposure"),
    ("min_temp", "rainfall_mm"),
    ("max_temp", "rainfall_mm"),
    ("solar_exposure", "clear_sky"),
    ("clear_sky", "rainfall_mm"),
)


@dataclass(frozen=True)
class TimeSeriesDataset:
    """Consecutive monthly records: bloom indicator plus covariate series."""

    months: tuple[tuple[int, int], ...]
    bloom: np.ndarray
    covariates: Mapping[str, np.ndarray]

    @classmethod
    def make(cls, months, bloom, covariates) -> "TimeSeriesDataset":
        months = tuple((int(y), int(m)) for y, m in months)
        for (y0, m0), (y1, m1) in zip(months, months[1:]):
            expected = (y0 + 1, 1) if m0 == 12 else (y0, m0 + 1)
            if (y1, m1) != expected:
                raise ValidationError(
                    f"months not consecutive: {(y0, m0)} followed by {(y1, m1)}"
                )
        for _, m in months:
            if not 1 <= m <= 12:
                raise ValidationError(f"month out of range: {m}")
        bloom = np.asarray(bloom, dtype=np.int64)
        if bloom.shape != (len(months),):
            raise ValidationError("bloom indicator length differs from months")
        if not np.isin(bloom, (0, 1)).all():
            raise ValidationError("bloom indicator must be 0/1")
        series = {}
        for name, values in covariates.items():
            arr = np.asarray(values, dtype=np.float64)
            if arr.shape != (len(months),):
                raise ValidationError(f"covariate {name!r} length differs from months")
            series[str(name)] = arr
        return cls(months, bloom, series)

    def __len__(self):
        return len(self.months)


@dataclass(frozen=True)
class CovariateSpec:
    """Named candidates: main effects, their lag-1 terms, declared interactions."""

    main_effects: tuple[str, ...]
    interactions: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if len(set(self.main_effects)) != len(self.main_effects):
            raise ValidationError("duplicate main effect names")
        for a, b in self.interactions:
            if a not in self.main_effects or b not in self.main_effects:
                raise ValidationError(f"interaction ({a!r}, {b!r}) references unknown main effect")

    @property
    def ar_terms(self) -> tuple[str, ...]:
        return tuple(f"{name}_lag1" for name in self.main_effects)

    def candidates(self) -> tuple[str, ...]:
        inter = tuple(f"{a}*{b}" for a, b in self.interactions)
        return self.main_effects + self.ar_terms + inter


DEFAULT_COVARIATES = CovariateSpec(MAIN_EFFECTS, DEFAULT_INTERACTIONS)


@dataclass(frozen=True)
class Design:
    """Standardized candidate matrix with the transforms that built it."""

    X: np.ndarray
    y: np.ndarray
    columns: tuple[str, ...]
    means: Mapping[str, float]
    sds: Mapping[str, float]
    spec: CovariateSpec

    def row_from_raw(self, current: Mapping[str, float], previous: Mapping[str, float]) -> np.ndarray:
        """Standardize one new month (and its predecessor) into a candidate row."""
        values: dict[str, float] = {}
        for name in self.spec.main_effects:
            values[name] = (float(current[name]) - self.means[name]) / self.sds[name]
            lag = f"{name}_lag1"
            values[lag] = (float(previous[name]) - self.means[lag]) / self.sds[lag]
        for a, b in self.spec.interactions:
            values[f"{a}*{b}"] = values[a] * values[b]
        return np.array([values[c] for c in self.columns])


def _standardize(column: np.ndarray, name: str) -> tuple[np.ndarray, float, float]:
    mean = float(column.mean())
    sd = float(column.std())
    if sd < 1e-12:
        raise ZeroVarianceColumn(f"column {name!r} has zero variance")
    return (column - mean) / sd, mean, sd


def build_design(data: TimeSeriesDataset, spec: CovariateSpec) -> Design:
    """Lag-aligned, standardized candidate matrix.

    The first row is dropped for lag alignment; every main and lag column
    is then standardized over its own remaining window, and interaction
    columns are products of the standardized main columns.
    """
    if len(data) < 2:
        raise InsufficientRows(f"need at least 2 rows, got {len(data)}")
    for name in spec.main_effects:
        if name not in data.covariates:
            raise UnknownColumn(f"dataset has no covariate {name!r}")

    columns: dict[str, np.ndarray] = {}
    means: dict[str, float] = {}
    sds: dict[str, float] = {}
    for name in spec.main_effects:
        raw = data.covariates[name]
        columns[name], means[name], sds[name] = _standardize(raw[1:], name)
        lag = f"{name}_lag1"
        columns[lag], means[lag], sds[lag] = _standardize(raw[:-1], lag)
    for a, b in spec.interactions:
        columns[f"{a}*{b}"] = columns[a] * columns[b]

    names = spec.candidates()
    X = np.column_stack([columns[c] for c in names])
    return Design(X, data.bloom[1:].copy(), names, means, sds, spec)


def load_dataset_csv(path) -> TimeSeriesDataset:
    """Read monthly records from a delimited text file.

    Expected header: year, month, bloom, then one column per covariate.
    """
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise ValidationError(f"{path}: empty dataset file")
        fields = [f.strip() for f in reader.fieldnames]
        for required in ("year", "month", "bloom"):
            if required not in fields:
                raise ValidationError(f"{path}: missing column {required!r}")
        covariate_names = [f for f in fields if f not in ("year", "month", "bloom")]
        months, bloom = [], []
        covariates: dict[str, list[float]] = {name: [] for name in covariate_names}
        for row in reader:
            row = {k.strip(): v for k, v in row.items() if k is not None}
            months.append((int(row["year"]), int(row["month"])))
            bloom.append(int(row["bloom"]))
            for name in covariate_names:
                covariates[name].append(float(row[name]))
    return TimeSeriesDataset.make(months, bloom, covariates)


# --- sampler -----------------------------------------------------------------

@dataclass(frozen=True)
class RjSample:
    """One posterior draw: model bits plus intercept-first coefficients."""

    gamma: tuple[int, ...]
    beta: np.ndarray  # length popcount(gamma) + 1


def _truncated_normal(rng: np.random.Generator, mu: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Draw z ~ Normal(mu, 1) conditioned on sign agreement with y.

    Uses the one-sided inverse-CDF form on the truncated tail, which stays
    finite even when the constraint sits many standard deviations out.
    """
    u = rng.uniform(size=mu.shape)
    # tail sample T ~ N(0,1) | T > a is -ndtri(ndtr(-a) * u)
    a = np.where(y == 1, -mu, mu)
    t = -ndtri(ndtr(-a) * u)
    z = np.where(y == 1, mu + t, mu - t)
    if not np.all(np.isfinite(z)):
        raise NumericalFailure("non-finite latent utility draw")
    return z


def _log_likelihood(eta: np.ndarray, sign: np.ndarray) -> float:
    return float(log_ndtr(sign * eta).sum())


def _draw_coefficients(
    rng: np.random.Generator, W: np.ndarray, z: np.ndarray, prior_scale: float
) -> np.ndarray:
    k = W.shape[1]
    A = W.T @ W + np.eye(k) / prior_scale**2
    L = cholesky(A, lower=True)
    mean = cho_solve((L, True), W.T @ z)
    # covariance is A^-1, so mean + L^-T xi has the right spread
    return mean + solve_triangular(L.T, rng.standard_normal(k), lower=False)


def rjmcmc_fit(
    X: np.ndarray,
    y: np.ndarray,
    prior_scale: float = 3.0,
    iterations: int = 5000,
    burn_in: int = 1000,
    seed: int = 0,
    flips_per_iteration: int = 1,
) -> list[RjSample]:
    """Sample (gamma, beta) jointly; deterministic for a fixed seed."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ValidationError("X must be 2-D with one response per row")
    if not np.isin(y, (0, 1)).all():
        raise ValidationError("response must be 0/1")
    if prior_scale <= 0.0:
        raise ValidationError("prior_scale must be positive")
    if burn_in < 0 or iterations <= burn_in:
        raise ValidationError("need iterations > burn_in >= 0")

    rng = np.random.default_rng(seed)
    n, n_candidates = X.shape
    sign = 2.0 * y - 1.0
    ones = np.ones((n, 1))

    included: list[int] = []
    beta = np.zeros(1)
    W = ones
    samples: list[RjSample] = []

    for iteration in range(iterations):
        z = _truncated_normal(rng, W @ beta, y)
        beta = _draw_coefficients(rng, W, z, prior_scale)

        for _ in range(flips_per_iteration):
            j = int(rng.integers(n_candidates))
            log_lik_old = _log_likelihood(W @ beta, sign)
            if j in included:
                pos = included.index(j)
                new_included = included[:pos] + included[pos + 1:]
                new_beta = np.delete(beta, pos + 1)
            else:
                pos = int(np.searchsorted(included, j))
                new_included = included[:pos] + [j] + included[pos:]
                new_beta = np.insert(beta, pos + 1, rng.normal(0.0, prior_scale))
            new_W = np.concatenate([ones, X[:, new_included]], axis=1)
            log_lik_new = _log_likelihood(new_W @ new_beta, sign)
            log_alpha = log_lik_new - log_lik_old
            if math.isnan(log_alpha):
                raise NumericalFailure(
                    f"non-finite acceptance ratio at iteration {iteration}, "
                    f"candidate {j}: {log_lik_old} -> {log_lik_new}"
                )
            if math.log(rng.uniform()) < log_alpha:
                included, beta, W = new_included, new_beta, new_W

        if iteration >= burn_in:
            gamma = [0] * n_candidates
            for idx in included:
                gamma[idx] = 1
            samples.append(RjSample(tuple(gamma), beta.copy()))
    return samples


# --- model averaging -----------------------------------------------------------

@dataclass(frozen=True)
class BmaSummary:
    """Visit-frequency estimates with naive Monte Carlo standard errors."""

    models: tuple[tuple[tuple[int, ...], float, float], ...]
    inclusion: tuple[tuple[float, float], ...]
    n_samples: int

    def top_mass(self, k: int) -> tuple[float, float]:
        mass = math.fsum(p for _, p, _ in self.models[:k])
        se = math.sqrt(max(0.0, mass * (1.0 - mass) / self.n_samples))
        return mass, se

    def as_text(self, columns: Sequence[str] | None = None, top: int = 10) -> str:
        lines = [f"samples: {self.n_samples}"]
        lines.append("model posterior (top {}):".format(min(top, len(self.models))))
        for gamma, p, se in self.models[:top]:
            bits = "".join(str(b) for b in gamma)
            lines.append(f"  {bits}  {p:.4f} (se {se:.4f})")
        lines.append("inclusion probabilities:")
        width = max((len(str(c)) for c in columns), default=4) if columns else 4
        for idx, (p, se) in enumerate(self.inclusion):
            label = str(columns[idx]) if columns else f"x{idx}"
            lines.append(f"  {label:<{width}}  {p:.4f} (se {se:.4f})")
        return "\n".join(lines)


def _binomial_se(p: float, n: int) -> float:
    return math.sqrt(max(0.0, p * (1.0 - p) / n))


def bma_summary(samples: Sequence[RjSample]) -> BmaSummary:
    """Model visit frequencies and per-candidate inclusion probabilities."""
    if not samples:
        raise ValidationError("no samples to summarize")
    n = len(samples)
    counts: dict[tuple[int, ...], int] = {}
    bit_totals = np.zeros(len(samples[0].gamma))
    for sample in samples:
        counts[sample.gamma] = counts.get(sample.gamma, 0) + 1
        bit_totals += sample.gamma
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    models = tuple(
        (gamma, count / n, _binomial_se(count / n, n)) for gamma, count in ranked
    )
    inclusion = tuple(
        (float(total / n), _binomial_se(float(total / n), n)) for total in bit_totals
    )
    return BmaSummary(models, inclusion, n)


def bma_predict(samples: Sequence[RjSample], x_new: np.ndarray) -> float:
    """Model-averaged P(bloom) for one standardized candidate row."""
    if not samples:
        raise ValidationError("no samples to average")
    x_new = np.asarray(x_new, dtype=np.float64)
    n_candidates = len(samples[0].gamma)
    if x_new.shape != (n_candidates,):
        raise DimensionMismatch(
            f"covariate row has shape {x_new.shape}, expected ({n_candidates},)"
        )
    total = 0.0
    for sample in samples:
        idx = [i for i, bit in enumerate(sample.gamma) if bit]
        eta = sample.beta[0] + float(x_new[idx] @ sample.beta[1:])
        total += float(ndtr(eta))
    return total / len(samples)
