"""Regressors predicting classifier accuracy from structural features.

Ordinary least squares, epsilon-SVR with linear/RBF/polynomial kernels, and
a random forest, each evaluated over repeated shuffled 0.7 train/test splits
per feature set. OLS and SVR inputs are z-scored with train-split statistics;
forest splits are scale-invariant so the forest sees raw features.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.ensemble import RandomForestRegressor
from sklearn.exceptions import ConvergenceWarning
from sklearn.linear_model import LinearRegression
from sklearn.preprocessing import StandardScaler
from sklearn.svm import SVR

from .errors import FittingError, FormatError
from .experiment import ExperimentRecord
from .features import FEATURE_SETS
from .rng import make_rng

ESTIMATOR_TAGS = ("ols", "svm_lin", "svm_rbf", "svm_pol", "rf")

_SVR_MAX_ITER = 5_000_000
_SPLIT_STREAM = 0xE5717


@dataclass(frozen=True)
class SplitProtocol:
    """Repeated shuffled train/test splits with one seed per repetition."""

    train_ratio: float = 0.7
    repetitions: int = 20
    base_seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_ratio < 1.0:
            raise ValueError("train_ratio must be in (0,1)")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")

    @property
    def seeds(self) -> tuple[int, ...]:
        return tuple(self.base_seed + i for i in range(self.repetitions))


@dataclass(frozen=True)
class EstimatorReport:
    """Aggregated scores for one estimator on one feature set."""

    estimator: str
    feature_set: str
    target: str
    r2_scores: tuple[float, ...]
    r2_mean: float
    r2_std: float
    pearson_mean: float
    hyperparams: dict = field(default_factory=dict)
    importance_mean: dict | None = None
    importance_std: dict | None = None

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True, default=list)


def _check_matrix(X: np.ndarray, y: np.ndarray) -> None:
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise ValueError("features and targets must be finite")


def fit_ols(X: np.ndarray, y: np.ndarray) -> LinearRegression:
    """Least squares via SVD; rank-deficient input gets the min-norm fit."""
    X, y = np.asarray(X, dtype=np.float64), np.asarray(y, dtype=np.float64)
    if X.shape[0] < X.shape[1] + 1:
        raise ValueError("need at least one more row than columns")
    _check_matrix(X, y)
    return LinearRegression().fit(X, y)


def fit_svr(
    X: np.ndarray,
    y: np.ndarray,
    kernel: str = "rbf",
    C: float = 1.0,
    epsilon: float = 0.1,
    gamma: float | str = "scale",
    degree: int = 3,
) -> SVR:
    """Epsilon-insensitive SVR solved by SMO to KKT tolerance 1e-3.

    gamma="scale" resolves to 1/(n_features * train variance).
    """
    kernel = {"lin": "linear", "pol": "poly"}.get(kernel, kernel)
    if kernel not in ("linear", "rbf", "poly"):
        raise ValueError(f"unsupported kernel {kernel!r}")
    _check_matrix(np.asarray(X), np.asarray(y))
    model = SVR(
        kernel=kernel, C=C, epsilon=epsilon, gamma=gamma, degree=degree,
        tol=1e-3, max_iter=_SVR_MAX_ITER,
    )
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ConvergenceWarning)
        model.fit(X, y)
    if any(issubclass(w.category, ConvergenceWarning) for w in caught):
        raise FittingError(
            f"SVR ({kernel}) did not reach KKT tolerance 1e-3 within {_SVR_MAX_ITER} iterations"
        )
    return model


def fit_rf(
    X: np.ndarray,
    y: np.ndarray,
    n_trees: int = 100,
    max_features: int | None = None,
    min_leaf: int = 2,
    seed: int = 0,
    bootstrap: bool = True,
) -> RandomForestRegressor:
    """Bootstrap forest of variance-reduction trees, deterministic per seed.

    max_features defaults to one third of the columns, rounded up.
    """
    X = np.asarray(X, dtype=np.float64)
    _check_matrix(X, np.asarray(y))
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    if max_features is None:
        max_features = math.ceil(X.shape[1] / 3)
    model = RandomForestRegressor(
        n_estimators=n_trees,
        max_features=max_features,
        min_samples_leaf=min_leaf,
        bootstrap=bootstrap,
        random_state=seed,
        n_jobs=1,
    )
    return model.fit(X, y)


def feature_importance(forest: RandomForestRegressor) -> np.ndarray:
    """Impurity-reduction importances, normalized per tree, averaged."""
    return forest.feature_importances_


def r_squared(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """1 - SS_res/SS_tot with the held-out mean; 0 when SS_tot is zero."""
    ss_res = float(((y_true - y_pred) ** 2).sum())
    ss_tot = float(((y_true - y_true.mean()) ** 2).sum())
    if ss_tot == 0.0:
        return 0.0
    return 1.0 - ss_res / ss_tot


def pearson_r(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    if y_true.std() == 0.0 or y_pred.std() == 0.0:
        return 0.0
    return float(np.corrcoef(y_true, y_pred)[0, 1])


def design_matrix(
    records: list[ExperimentRecord], feature_set: str, target: str = "test"
) -> tuple[np.ndarray, np.ndarray]:
    """Usable records (finite accuracy) as X, y for one feature set."""
    if feature_set not in FEATURE_SETS:
        raise FormatError(
            f"unknown feature set {feature_set!r}; valid: {', '.join(FEATURE_SETS)}"
        )
    if target not in ("test", "val"):
        raise ValueError("target must be 'test' or 'val'")
    attr = f"{target}_accuracy"
    usable = [r for r in records if getattr(r, attr) is not None]
    names = FEATURE_SETS[feature_set]
    X = np.array([r.features.as_array(names) for r in usable], dtype=np.float64)
    y = np.array([getattr(r, attr) for r in usable], dtype=np.float64)
    return X, y


def _fit_predict(tag, X_tr, y_tr, X_te, seed):
    if tag == "ols":
        scaler = StandardScaler().fit(X_tr)
        model = fit_ols(scaler.transform(X_tr), y_tr)
        return model.predict(scaler.transform(X_te)), None
    if tag.startswith("svm_"):
        scaler = StandardScaler().fit(X_tr)
        model = fit_svr(scaler.transform(X_tr), y_tr, kernel=tag.removeprefix("svm_"))
        return model.predict(scaler.transform(X_te)), None
    if tag == "rf":
        model = fit_rf(X_tr, y_tr, seed=seed)
        return model.predict(X_te), feature_importance(model)
    raise ValueError(f"unknown estimator {tag!r}; valid: {', '.join(ESTIMATOR_TAGS)}")


def evaluate(
    records: list[ExperimentRecord],
    estimator: str,
    feature_set: str,
    protocol: SplitProtocol = SplitProtocol(),
    target: str = "test",
) -> EstimatorReport:
    """Score one estimator on one feature set over the split protocol."""
    X, y = design_matrix(records, feature_set, target)
    if X.shape[0] < 50:
        raise ValueError(f"need >= 50 usable records, have {X.shape[0]}")
    names = FEATURE_SETS[feature_set]
    r2s, pearsons, importances = [], [], []
    for seed in protocol.seeds:
        perm = make_rng(seed, _SPLIT_STREAM).permutation(X.shape[0])
        n_train = int(round(protocol.train_ratio * X.shape[0]))
        tr, te = perm[:n_train], perm[n_train:]
        y_pred, imp = _fit_predict(estimator, X[tr], y[tr], X[te], seed)
        r2s.append(r_squared(y[te], y_pred))
        pearsons.append(pearson_r(y[te], y_pred))
        if imp is not None:
            importances.append(imp)
    imp_mean = imp_std = None
    if importances:
        stack = np.vstack(importances)
        imp_mean = {n: float(v) for n, v in zip(names, stack.mean(axis=0))}
        imp_std = {n: float(v) for n, v in zip(names, stack.std(axis=0))}
    hyper = {"standardized": estimator != "rf"}
    if estimator.startswith("svm_"):
        hyper.update(C=1.0, epsilon=0.1, gamma="scale", degree=3, tol=1e-3)
    if estimator == "rf":
        hyper.update(
            n_trees=100, max_features=math.ceil(len(names) / 3),
            min_leaf=2, bootstrap=True,
        )
    r2_arr = np.array(r2s)
    return EstimatorReport(
        estimator=estimator,
        feature_set=feature_set,
        target=target,
        r2_scores=tuple(float(v) for v in r2s),
        r2_mean=float(r2_arr.mean()),
        r2_std=float(r2_arr.std()),
        pearson_mean=float(np.mean(pearsons)),
        hyperparams=hyper,
        importance_mean=imp_mean,
        importance_std=imp_std,
    )


def report_grid_csv(reports: list[EstimatorReport]) -> str:
    """Estimator-by-feature-set R^2 grid, then per-feature importance rows."""
    sets = sorted({r.feature_set for r in reports}, key=list(FEATURE_SETS).index)
    by_key = {(r.estimator, r.feature_set): r for r in reports}
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["model"] + sets)
    for tag in ESTIMATOR_TAGS:
        if not any(k[0] == tag for k in by_key):
            continue
        row = [tag]
        for s in sets:
            rep = by_key.get((tag, s))
            row.append(f"{rep.r2_mean:.4f}±{rep.r2_std:.4f}" if rep else "")
        writer.writerow(row)
    rf_reports = [r for r in reports if r.importance_mean]
    if rf_reports:
        writer.writerow(["rf_importance"] + sets)
        all_names = [n for n in FEATURE_SETS["omega"]]
        for name in all_names:
            if not any(name in r.importance_mean for r in rf_reports):
                continue
            row = [name]
            for s in sets:
                rep = by_key.get(("rf", s))
                if rep and rep.importance_mean and name in rep.importance_mean:
                    row.append(f"{rep.importance_mean[name]:.4f}±{rep.importance_std[name]:.4f}")
                else:
                    row.append("")
            writer.writerow(row)
    return buf.getvalue()
