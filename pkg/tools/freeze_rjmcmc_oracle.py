"""Freeze exact reference posteriors for the probit selection sampler.

Standalone on purpose: everything here is computed from first principles
(no imports from the package under test). For each candidate-subset model
of two fixed probit problems, the marginal likelihood

    m(y | gamma) = integral of prod_t Phi(s_t w_t' beta) N(beta; 0, s^2 I)

is computed two ways: adaptive Gauss-Hermite quadrature (mode-centered,
curvature-scaled) for models with <= 3 coefficients, and importance
sampling with a Student-t proposal at the Laplace approximation (1e6
draws) for larger models. Where both apply they must agree tightly, or
this script aborts. Model posteriors (uniform model prior) plus the
model-averaged predictive at fixed test points are written to
tests/data/rjmcmc_oracle.json.

Run from the repository root:  python3 tools/freeze_rjmcmc_oracle.py
"""

import itertools
import json
import math
import pathlib

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy.special import gammaln, log_ndtr, logsumexp

PRIOR_SCALE = 3.0
GH_NODES = 32
IS_DRAWS = 1_000_000
IS_CHUNK = 100_000
CROSSCHECK_DRAWS = 200_000
CROSSCHECK_TOL = 2e-3
T_DF = 7.0

OUT_PATH = pathlib.Path(__file__).resolve().parents[1] / "tests" / "data" / "rjmcmc_oracle.json"


def log_lik(eta, sign):
    """Probit log likelihood for latent index eta (last axis = rows)."""
    return log_ndtr(sign * eta).sum(axis=-1)


def log_prior(beta):
    d = beta.shape[-1]
    return (
        -0.5 * (beta**2).sum(axis=-1) / PRIOR_SCALE**2
        - 0.5 * d * math.log(2.0 * math.pi * PRIOR_SCALE**2)
    )


def newton_map(W, sign):
    """Posterior mode and Hessian of the log posterior (log-concave)."""
    n, d = W.shape
    beta = np.zeros(d)
    for _ in range(200):
        m = sign * (W @ beta)
        # inverse Mills ratio, stable far into the left tail
        log_phi = -0.5 * m**2 - 0.5 * math.log(2.0 * math.pi)
        r = np.exp(log_phi - log_ndtr(m))
        grad = W.T @ (sign * r) - beta / PRIOR_SCALE**2
        curv = r * (m + r)  # -d2/dm2 of log Phi(m), always in (0, 1)
        H = -(W.T * curv) @ W - np.eye(d) / PRIOR_SCALE**2
        step = np.linalg.solve(H, grad)
        objective = log_lik(W @ beta, sign) + log_prior(beta)
        scale = 1.0
        for _ in range(40):
            candidate = beta - scale * step
            if log_lik(W @ candidate, sign) + log_prior(candidate) >= objective:
                break
            scale *= 0.5
        new_beta = beta - scale * step
        if np.max(np.abs(new_beta - beta)) < 1e-12:
            beta = new_beta
            break
        beta = new_beta
    m = sign * (W @ beta)
    log_phi = -0.5 * m**2 - 0.5 * math.log(2.0 * math.pi)
    r = np.exp(log_phi - log_ndtr(m))
    curv = r * (m + r)
    H = -(W.T * curv) @ W - np.eye(W.shape[1]) / PRIOR_SCALE**2
    return beta, H


def gauss_hermite(W, sign, x_star=None):
    """(log m, predictive values) by mode-centered tensor quadrature."""
    d = W.shape[1]
    mode, H = newton_map(W, sign)
    L = np.linalg.cholesky(np.linalg.inv(-H))
    nodes, weights = hermgauss(GH_NODES)
    idx = np.array(list(itertools.product(*[range(GH_NODES)] * d)))  # (N, d)
    grids = nodes[idx]
    log_w = np.log(weights)[idx].sum(axis=1)
    beta = mode + math.sqrt(2.0) * grids @ L.T
    g = log_lik(beta @ W.T, sign) + log_prior(beta)
    # int exp(g) dbeta = sqrt(2)^d |L| * sum w * exp(g + u'u)
    log_terms = log_w + g + (grids**2).sum(axis=1)
    log_const = 0.5 * d * math.log(2.0) + float(np.log(np.diag(L)).sum())
    log_m = log_const + logsumexp(log_terms)
    preds = None
    if x_star is not None:
        shift = log_terms - log_terms.max()
        base = np.exp(shift)
        preds = []
        for w_row in x_star:
            phi = np.exp(log_ndtr(beta @ w_row))
            preds.append(float((base * phi).sum() / base.sum()))
    return float(log_m), preds


def laplace_is(W, sign, seed, n_draws, x_star=None):
    """(log m, predictive values) by importance sampling at the Laplace fit."""
    d = W.shape[1]
    mode, H = newton_map(W, sign)
    cov = np.linalg.inv(-H)
    L = np.linalg.cholesky(cov)
    rng = np.random.default_rng(seed)
    log_det = float(np.log(np.diag(L)).sum())
    log_t_const = (
        gammaln((T_DF + d) / 2.0)
        - gammaln(T_DF / 2.0)
        - 0.5 * d * math.log(T_DF * math.pi)
        - log_det
    )
    log_weights = []
    pred_num = [0.0] * (len(x_star) if x_star is not None else 0)
    all_chunks = []
    remaining = n_draws
    while remaining > 0:
        size = min(IS_CHUNK, remaining)
        remaining -= size
        normal = rng.standard_normal((size, d))
        chi = rng.chisquare(T_DF, size=size)
        t = normal * np.sqrt(T_DF / chi)[:, None]
        beta = mode + t @ L.T
        log_q = log_t_const - 0.5 * (T_DF + d) * np.log1p((t**2).sum(axis=1) / T_DF)
        lw = log_lik(beta @ W.T, sign) + log_prior(beta) - log_q
        log_weights.append(lw)
        if x_star is not None:
            all_chunks.append((lw, beta))
    log_weights = np.concatenate(log_weights)
    log_m = float(logsumexp(log_weights) - math.log(n_draws))
    preds = None
    if x_star is not None:
        top = log_weights.max()
        denom = float(np.exp(log_weights - top).sum())
        preds = []
        for j, w_row in enumerate(x_star):
            num = 0.0
            for lw, beta in all_chunks:
                num += float((np.exp(lw - top) * np.exp(log_ndtr(beta @ w_row))).sum())
            preds.append(num / denom)
    return log_m, preds


def model_table(X, y, x_star, seed_base):
    """Exact posterior over all candidate subsets, with GH/IS cross-checks."""
    n, k = X.shape
    sign = 2.0 * y - 1.0
    results = {}
    checks = []
    for bits in itertools.product((0, 1), repeat=k):
        idx = [i for i, b in enumerate(bits) if b]
        W = np.concatenate([np.ones((n, 1)), X[:, idx]], axis=1)
        d = W.shape[1]
        w_star = None
        if x_star is not None:
            w_star = np.concatenate(
                [np.ones((len(x_star), 1)), x_star[:, idx]], axis=1
            )
        seed = seed_base + int("".join(map(str, bits)), 2)
        if d <= 3:
            log_m, preds = gauss_hermite(W, sign, w_star)
            check, _ = laplace_is(W, sign, seed, CROSSCHECK_DRAWS)
            gap = abs(log_m - check)
            checks.append((bits, gap))
            if gap > CROSSCHECK_TOL:
                raise SystemExit(
                    f"quadrature and importance sampling disagree for {bits}: "
                    f"{log_m} vs {check}"
                )
        else:
            log_m, preds = laplace_is(W, sign, seed, IS_DRAWS, w_star)
        results[bits] = (log_m, preds)
    log_ms = np.array([results[b][0] for b in sorted(results)])
    total = logsumexp(log_ms)
    posterior = {}
    predictive = np.zeros(len(x_star)) if x_star is not None else None
    for bits in sorted(results):
        log_m, preds = results[bits]
        p = math.exp(log_m - total)
        posterior["".join(map(str, bits))] = p
        if x_star is not None:
            predictive += p * np.array(preds)
    worst = max(gap for _, gap in checks)
    return posterior, predictive, worst


def make_problem(n, k, coef, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, k))
    X = (X - X.mean(axis=0)) / X.std(axis=0)
    eta = X @ coef
    y = (eta + rng.normal(size=n) > 0).astype(int)
    return X, y


def main():
    # main problem: 5 candidates, 100 rows, two real effects
    coef5 = np.array([0.9, 0.0, -0.7, 0.0, 0.0])
    X5, y5 = make_problem(100, 5, coef5, seed=20240901)
    x_star = np.random.default_rng(20240902).normal(size=(10, 5))
    posterior5, predictive5, worst5 = model_table(X5, y5, x_star, seed_base=1000)

    # smoke problem: 2 candidates, 40 rows, mild effects (all 4 models visited)
    coef2 = np.array([0.3, -0.25])
    X2, y2 = make_problem(40, 2, coef2, seed=20240903)
    posterior2, _, worst2 = model_table(X2, y2, None, seed_base=5000)

    document = {
        "prior_scale": PRIOR_SCALE,
        "gh_nodes": GH_NODES,
        "is_draws": IS_DRAWS,
        "crosscheck_worst_gap": {"k5": worst5, "k2": worst2},
        "k5": {
            "X": X5.tolist(),
            "y": y5.tolist(),
            "model_posterior": posterior5,
            "test_points": x_star.tolist(),
            "predictive": predictive5.tolist(),
        },
        "k2": {
            "X": X2.tolist(),
            "y": y2.tolist(),
            "model_posterior": posterior2,
        },
    }
    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    OUT_PATH.write_text(json.dumps(document, indent=1))
    print(f"wrote {OUT_PATH}")
    print(f"worst quadrature/IS gap: k5={worst5:.2e}, k2={worst2:.2e}")
    top5 = sorted(posterior5.items(), key=lambda kv: -kv[1])[:4]
    print("k5 top models:", top5)
    top2 = sorted(posterior2.items(), key=lambda kv: -kv[1])
    print("k2 models:", top2)


if __name__ == "__main__":
    main()
