"""Path-model parameterization and fit assessment for a causal DAG.

Each endogenous node is regressed on its parents over standardized data,
yielding standardized path coefficients and residual variances. The implied
correlation structure of that recursive system is compared to the sample
correlation matrix through maximum-likelihood fit indices.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dataset import ColumnStats, Dataset, Split, compute_stats, standardize
from .errors import FitError
from .graph import CausalDag, topo_order

__all__ = [
    "FittedModel",
    "FitReport",
    "AccuracyReport",
    "fit_paths",
    "implied_covariance",
    "fit_indices",
    "evaluate_accuracy",
    "fit_model",
]

_PSI_FLOOR = 1e-12


@dataclass(frozen=True)
class FitReport:
    """Discrepancy-based fit summary; indices are None when df <= 0 (saturated)."""

    chi_square: float
    df: int
    cfi: float | None
    gfi: float | None
    agfi: float | None
    rmsea: float | None
    n_used: int


@dataclass(frozen=True)
class AccuracyReport:
    """Held-out predictive accuracy of the outcome under the all-feature regime."""

    predicted: tuple[float, ...]
    actual: tuple[float, ...]
    rmse: float
    r_squared: float


@dataclass(frozen=True)
class FittedModel:
    dag: CausalDag
    beta: dict[tuple[str, str], float]
    residual_variance: dict[str, float]
    exo_corr: np.ndarray  # over dag.exogenous, in that order
    stats: ColumnStats
    fit: FitReport | None = None
    accuracy: AccuracyReport | None = None

    def __post_init__(self):
        edges = set(self.dag.directed_edges)
        if set(self.beta) != edges:
            missing = edges - set(self.beta)
            extra = set(self.beta) - edges
            raise FitError(f"beta keys do not match edges (missing {missing}, extra {extra})")
        if set(self.residual_variance) != set(self.dag.endogenous):
            raise FitError("residual variances must cover exactly the endogenous nodes")
        exo_corr = np.asarray(self.exo_corr, dtype=float)
        k = len(self.dag.exogenous)
        if exo_corr.shape != (k, k):
            raise FitError(f"exo_corr must be {k}x{k}")
        exo_corr.setflags(write=False)
        object.__setattr__(self, "exo_corr", exo_corr)

    def with_reports(self, fit: FitReport | None = None,
                     accuracy: AccuracyReport | None = None) -> "FittedModel":
        updated = self
        if fit is not None:
            updated = replace(updated, fit=fit)
        if accuracy is not None:
            updated = replace(updated, accuracy=accuracy)
        return updated


def fit_paths(d: Dataset, dag: CausalDag, stats: ColumnStats | None = None) -> FittedModel:
    """Estimate path coefficients by per-node OLS on standardized data.

    ``d`` must already be standardized (the estimation rows). Residual
    variance for each endogenous node is 1 - R^2, clamped into (0, 1].
    ``stats`` carries the original-unit standardization statistics; when
    omitted they are computed from ``d`` itself (useful when the data was
    generated in standardized units to begin with).
    """
    for v in dag.nodes:
        if v not in d.columns:
            raise FitError(f"dag node {v!r} is not a dataset column")
    max_indeg = max((len(dag.parents(v)) for v in dag.endogenous), default=0)
    if d.n <= max_indeg + 2:
        raise FitError(f"need more rows than parents + 2 (n={d.n}, max in-degree={max_indeg})")

    beta: dict[tuple[str, str], float] = {}
    psi: dict[str, float] = {}
    for v in dag.endogenous:
        parents = dag.parents(v)
        X = np.column_stack([d.column(p) for p in parents])
        y = d.column(v)
        coefs, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
        if rank < len(parents):
            raise FitError(f"parents of {v!r} are collinear (rank {rank} < {len(parents)})")
        for p, b in zip(parents, coefs):
            beta[(p, v)] = float(b)
        residuals = y - X @ coefs
        total = float(np.sum((y - y.mean()) ** 2))
        if total <= 0:
            raise FitError(f"node {v!r} has zero variance on the estimation rows")
        r2 = 1.0 - float(np.sum(residuals**2)) / total
        psi[v] = float(np.clip(1.0 - r2, _PSI_FLOOR, 1.0))

    exo = dag.exogenous
    if len(exo) > 1:
        exo_corr = np.corrcoef(np.column_stack([d.column(v) for v in exo]), rowvar=False)
        exo_corr = np.atleast_2d(exo_corr)
    else:
        exo_corr = np.eye(len(exo))
    return FittedModel(dag=dag, beta=beta, residual_variance=psi,
                       exo_corr=exo_corr, stats=stats or compute_stats(d))


def implied_covariance(m: FittedModel) -> tuple[np.ndarray, list[str]]:
    """Model-implied covariance Sigma = (I-B)^-1 Psi (I-B)^-T in topo order.

    B holds the path coefficients (strictly lower triangular in topological
    order); Psi carries the exogenous correlation block and the residual
    variances on the endogenous diagonal.
    """
    order = topo_order(m.dag)
    idx = {v: i for i, v in enumerate(order)}
    p = len(order)
    B = np.zeros((p, p))
    for (src, dst), b in m.beta.items():
        B[idx[dst], idx[src]] = b
    psi_mat = np.zeros((p, p))
    exo = m.dag.exogenous
    for a, va in enumerate(exo):
        for b_, vb in enumerate(exo):
            psi_mat[idx[va], idx[vb]] = m.exo_corr[a, b_]
    for v, value in m.residual_variance.items():
        psi_mat[idx[v], idx[v]] = value
    eye_minus_b = np.eye(p) - B
    inv = np.linalg.inv(eye_minus_b)  # always invertible: B is nilpotent on a DAG
    sigma = inv @ psi_mat @ inv.T
    return sigma, order


def _free_parameter_count(m: FittedModel) -> int:
    n_exo = len(m.dag.exogenous)
    return len(m.beta) + len(m.residual_variance) + n_exo * (n_exo - 1) // 2


def fit_indices(m: FittedModel, sample_corr: np.ndarray, n: int,
                order: list[str] | None = None) -> FitReport:
    """ML discrepancy against the sample correlation matrix, plus CFI/GFI/AGFI/RMSEA.

    ``sample_corr`` must be positive definite and ordered like ``order``
    (defaults to the model's topological order). Degrees of freedom follow
    the standardized-path accounting: one free parameter per path
    coefficient, per residual variance, and per exogenous correlation pair;
    variances of standardized variables are fixed.
    """
    sigma, topo = implied_covariance(m)
    order = order or topo
    if order != topo:
        perm = [topo.index(v) for v in order]
        sigma = sigma[np.ix_(perm, perm)]
    S = np.asarray(sample_corr, dtype=float)
    p = S.shape[0]
    if S.shape != (p, p) or p != len(order):
        raise FitError("sample matrix does not match model variables")
    eigvals = np.linalg.eigvalsh(S)
    if eigvals.min() <= 0:
        raise FitError("sample correlation matrix is not positive definite")

    sign_sigma, logdet_sigma = np.linalg.slogdet(sigma)
    sign_s, logdet_s = np.linalg.slogdet(S)
    if sign_sigma <= 0:
        raise FitError("implied covariance is not positive definite")
    f_ml = float(logdet_sigma - logdet_s) + float(np.trace(S @ np.linalg.inv(sigma))) - p
    f_ml = max(f_ml, 0.0)
    T = (n - 1) * f_ml

    df = p * (p + 1) // 2 - _free_parameter_count(m)
    if df <= 0:
        return FitReport(chi_square=T, df=df, cfi=None, gfi=None, agfi=None,
                         rmsea=None, n_used=n)

    # Baseline: mutually independent standardized variables (Sigma_b = I).
    f_baseline = -logdet_s
    T_baseline = (n - 1) * f_baseline
    df_baseline = p * (p + 1) // 2

    excess = max(T - df, 0.0)
    denom = max(T_baseline - df_baseline, T - df, 0.0)
    cfi = 1.0 if denom == 0 else float(np.clip(1.0 - excess / denom, 0.0, 1.0))

    ratio = np.linalg.inv(sigma) @ S
    dev = ratio - np.eye(p)
    gfi = 1.0 - float(np.trace(dev @ dev)) / float(np.trace(ratio @ ratio))
    agfi = 1.0 - (p * (p + 1) / (2.0 * df)) * (1.0 - gfi)
    rmsea = float(np.sqrt(excess / (df * (n - 1))))
    cfi, gfi, agfi, rmsea = float(cfi), float(gfi), float(agfi), float(rmsea)
    return FitReport(chi_square=T, df=df, cfi=cfi, gfi=gfi, agfi=agfi,
                     rmsea=rmsea, n_used=n)


def evaluate_accuracy(m: FittedModel, test_rows: Dataset) -> AccuracyReport:
    """Predict the outcome for held-out rows with every feature intervened.

    Each test row pins all non-outcome variables to its observed values, the
    engine propagates to the outcome, and predictions are compared against
    the recorded outcomes in original units.
    """
    from .engine import initial_profile, predict, set_value

    outcome = m.dag.outcome
    for v in m.dag.nodes:
        if v not in test_rows.columns:
            raise FitError(f"test data lacks column {v!r}")
    predicted = []
    actual = []
    for i in range(test_rows.n):
        profile = initial_profile(m, "A")
        for v in m.dag.nodes:
            if v == outcome:
                continue
            profile = set_value(m, profile, v, float(test_rows.column(v)[i]))
        predicted.append(predict(m, profile).outcome)
        actual.append(float(test_rows.column(outcome)[i]))
    predicted_arr = np.array(predicted)
    actual_arr = np.array(actual)
    rmse = float(np.sqrt(np.mean((predicted_arr - actual_arr) ** 2)))
    total = float(np.sum((actual_arr - actual_arr.mean()) ** 2))
    r_squared = 1.0 - float(np.sum((predicted_arr - actual_arr) ** 2)) / total if total > 0 else 1.0
    return AccuracyReport(
        predicted=tuple(predicted), actual=tuple(actual), rmse=rmse, r_squared=r_squared
    )


def fit_model(d: Dataset, dag: CausalDag, data_split: Split | None = None,
              stats_scope: str = "full") -> FittedModel:
    """Full pipeline: standardize, fit paths, fit indices, held-out accuracy.

    ``stats_scope`` picks whether standardization statistics come from the
    full sample (default) or the training rows only. Estimation and fit
    indices always use the training rows when a split is given.
    """
    if stats_scope not in ("full", "train"):
        raise ValueError(f"stats_scope must be 'full' or 'train', got {stats_scope!r}")
    train = d.take(data_split.train_indices) if data_split is not None else d
    stats = compute_stats(train if stats_scope == "train" else d)
    train_std = standardize(train, stats)
    model = fit_paths(train_std, dag, stats=stats)
    order = topo_order(dag)
    cols = [train_std.column_index(v) for v in order]
    sample_corr = np.atleast_2d(np.corrcoef(train_std.rows[:, cols], rowvar=False))
    report = fit_indices(model, sample_corr, train.n, order=order)
    model = model.with_reports(fit=report)
    if data_split is not None:
        model = model.with_reports(accuracy=evaluate_accuracy(m=model, test_rows=d.take(data_split.test_indices)))
    return model
