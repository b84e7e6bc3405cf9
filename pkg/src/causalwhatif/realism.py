"""Gaussian-mixture realism scoring: how common is a hypothetical profile?

A mixture is fitted to the standardized data with EM. The meter score for a
point is its posterior probability of belonging to its best-matching
component; an auxiliary typicality mode reports the percentile of the
point's mixture density among the training points, which stays informative
far away from all components where the max posterior saturates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .dataset import Dataset
from .errors import RealismError

if TYPE_CHECKING:  # pragma: no cover
    from .sem import FittedModel

__all__ = [
    "GmmModel",
    "RealismReading",
    "fit_gmm",
    "realism",
    "typicality",
    "realism_features",
    "fit_profile_gmm",
    "profile_feature_vector",
]

_COV_RIDGE = 1e-6
_DEGENERATE_WEIGHT = 1e-8

LABEL_RARE = "Rare"
LABEL_MODERATE = "Moderately Common"
LABEL_COMMON = "Common"


class _Degenerate(Exception):
    """Internal: a component collapsed during EM."""


@dataclass(frozen=True)
class GmmModel:
    weights: np.ndarray          # (K,)
    means: np.ndarray            # (K, d), standardized units
    covariances: np.ndarray      # (K, d, d)
    train_log_density: np.ndarray  # per training point, for typicality
    n_iter: int
    log_likelihood: float

    def __post_init__(self):
        for name in ("weights", "means", "covariances", "train_log_density"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if abs(self.weights.sum() - 1.0) > 1e-9:
            raise RealismError("mixture weights must sum to 1")

    @property
    def n_components(self) -> int:
        return len(self.weights)

    @property
    def n_features(self) -> int:
        return self.means.shape[1]


@dataclass(frozen=True)
class RealismReading:
    score: float       # posterior of the best component, in [0, 1]
    component: int
    label: str
    meter_position: float


def label_for_score(score: float) -> str:
    if score < 0.25:
        return LABEL_RARE
    if score < 0.75:
        return LABEL_MODERATE
    return LABEL_COMMON


def _log_gaussian(X: np.ndarray, mean: np.ndarray, cov: np.ndarray) -> np.ndarray:
    d = len(mean)
    chol = np.linalg.cholesky(cov)
    diff = X - mean
    solved = np.linalg.solve(chol, diff.T)
    return (
        -0.5 * np.sum(solved**2, axis=0)
        - np.sum(np.log(np.diag(chol)))
        - 0.5 * d * np.log(2.0 * np.pi)
    )


def _log_component_densities(g_weights, g_means, g_covs, X: np.ndarray) -> np.ndarray:
    """(n, K) matrix of log(phi_k) + log N(x | mu_k, Sigma_k)."""
    parts = [
        np.log(w) + _log_gaussian(X, mu, cov)
        for w, mu, cov in zip(g_weights, g_means, g_covs)
    ]
    return np.column_stack(parts)


def _logsumexp(a: np.ndarray, axis: int) -> np.ndarray:
    peak = np.max(a, axis=axis, keepdims=True)
    return (peak + np.log(np.sum(np.exp(a - peak), axis=axis, keepdims=True))).squeeze(axis)


def _kmeanspp_centers(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = [X[rng.integers(n)]]
    for _ in range(1, k):
        d2 = np.min(
            np.stack([np.sum((X - c) ** 2, axis=1) for c in centers]), axis=0
        )
        total = d2.sum()
        if total <= 0:
            centers.append(X[rng.integers(n)])
            continue
        probs = d2 / total
        centers.append(X[rng.choice(n, p=probs)])
    return np.array(centers)


def fit_gmm(d: Dataset, k: int = 3, seed: int = 0, max_iter: int = 200,
            tol: float = 1e-6) -> GmmModel:
    """EM fit of a k-component Gaussian mixture on standardized data.

    Seeding is k-means++-style and deterministic for a given seed. The
    log-likelihood is asserted nondecreasing every iteration; covariances
    get a small diagonal ridge. A degenerate component triggers one reseed
    before giving up.
    """
    if k < 1:
        raise RealismError(f"need k >= 1, got {k}")
    X = d.rows
    n, dim = X.shape
    if n < 10 * k:
        raise RealismError(f"need at least 10 rows per component (n={n}, k={k})")

    def run(seed_value: int) -> GmmModel:
        rng = np.random.default_rng(seed_value)
        means = _kmeanspp_centers(X, k, rng)
        base_cov = np.cov(X, rowvar=False, ddof=0)
        base_cov = np.atleast_2d(base_cov) + _COV_RIDGE * np.eye(dim)
        covs = np.repeat(base_cov[None, :, :], k, axis=0)
        weights = np.full(k, 1.0 / k)

        prev_ll = -np.inf
        ll = prev_ll
        it = 0
        for it in range(1, max_iter + 1):
            log_joint = _log_component_densities(weights, means, covs, X)
            log_norm = _logsumexp(log_joint, axis=1)
            ll = float(np.sum(log_norm))
            if np.isfinite(prev_ll):
                assert ll >= prev_ll - 1e-8 * max(1.0, abs(prev_ll)), (
                    f"EM log-likelihood decreased: {prev_ll} -> {ll}"
                )
            if np.isfinite(prev_ll) and ll - prev_ll < tol:
                break
            prev_ll = ll
            resp = np.exp(log_joint - log_norm[:, None])
            mass = resp.sum(axis=0)
            if np.any(mass / n < _DEGENERATE_WEIGHT):
                raise _Degenerate()
            weights = mass / n
            means = (resp.T @ X) / mass[:, None]
            for j in range(k):
                diff = X - means[j]
                cov = (resp[:, j][:, None] * diff).T @ diff / mass[j]
                covs[j] = cov + _COV_RIDGE * np.eye(dim)
        log_joint = _log_component_densities(weights, means, covs, X)
        train_log_density = _logsumexp(log_joint, axis=1)
        return GmmModel(
            weights=weights, means=means, covariances=covs,
            train_log_density=train_log_density, n_iter=it, log_likelihood=ll,
        )

    try:
        return run(seed)
    except _Degenerate:
        try:
            return run(seed + 1)
        except _Degenerate:
            raise RealismError(
                f"degenerate mixture component for k={k} (weight < {_DEGENERATE_WEIGHT})"
            ) from None


def posteriors(g: GmmModel, x: np.ndarray) -> np.ndarray:
    """Posterior component memberships of one point, log-sum-exp stabilized."""
    x = np.asarray(x, dtype=float).reshape(1, -1)
    if x.shape[1] != g.n_features:
        raise RealismError(f"point has {x.shape[1]} features, model has {g.n_features}")
    log_joint = _log_component_densities(g.weights, g.means, g.covariances, x)[0]
    log_norm = _logsumexp(log_joint[None, :], axis=1)[()]
    return np.exp(log_joint - log_norm)


def realism(g: GmmModel, x: np.ndarray) -> RealismReading:
    """Max-posterior realism score with its Rare / Moderately Common / Common label."""
    post = posteriors(g, x)
    component = int(np.argmax(post))
    score = float(post[component])
    return RealismReading(
        score=score,
        component=component,
        label=label_for_score(score),
        meter_position=score,
    )


def log_density(g: GmmModel, x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float).reshape(1, -1)
    log_joint = _log_component_densities(g.weights, g.means, g.covariances, x)
    return float(_logsumexp(log_joint, axis=1)[0])


def typicality(g: GmmModel, x: np.ndarray) -> float:
    """Fraction of training points whose mixture density is below that of x."""
    return float(np.mean(g.train_log_density < log_density(g, x)))


def realism_features(model: "FittedModel") -> list[str]:
    """Columns the realism mixture is fitted over: every node but the outcome.

    The outcome is computed, never chosen, so only the input configuration
    counts toward how common a profile is.
    """
    from .graph import topo_order

    return [v for v in topo_order(model.dag) if v != model.dag.outcome]


def fit_profile_gmm(d: Dataset, model: "FittedModel", k: int = 3, seed: int = 0,
                    max_iter: int = 200, tol: float = 1e-6) -> GmmModel:
    """Fit the realism mixture on the model's standardized feature columns."""
    cols = realism_features(model)
    standardized = np.column_stack([
        (d.column(c) - model.stats.for_column(c)[0]) / model.stats.for_column(c)[1]
        for c in cols
    ])
    return fit_gmm(Dataset(tuple(cols), standardized), k=k, seed=seed,
                   max_iter=max_iter, tol=tol)


def profile_feature_vector(model: "FittedModel", values: dict[str, float]) -> np.ndarray:
    """Standardized feature vector of a (fully predicted) profile value map."""
    return np.array([
        model.stats.to_standard(c, values[c]) for c in realism_features(model)
    ])
