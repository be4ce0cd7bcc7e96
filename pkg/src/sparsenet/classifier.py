"""Scikit-learn compatible wrapper around the graph-embedded classifier."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .dag import layered_dag
from .dataset import LabeledDataset, split
from .graph import Graph
from .network import TrainConfig, embed, forward, train_and_eval


class SparseNetClassifier(BaseEstimator, ClassifierMixin):
    """Classifier whose hidden connectivity is a graph's acyclic orientation.

    Fits with mini-batch SGD on softmax cross-entropy; composes with
    scikit-learn model selection utilities via get_params/set_params.

    Parameters
    ----------
    graph : Graph
        Undirected graph whose orientation defines the hidden wiring.
    sink_policy : str
        "all_sinks" wires every sink vertex to the output block,
        "last_layer_only" only the deepest layer.
    validation_fraction : float
        Share of the fit data held out to report `validation_score_`.
    """

    def __init__(
        self,
        graph: Graph | None = None,
        sink_policy: str = "all_sinks",
        epochs: int = 5,
        batch_size: int = 64,
        learning_rate: float = 0.01,
        momentum: float = 0.9,
        validation_fraction: float = 0.1,
        seed: int = 0,
    ):
        self.graph = graph
        self.sink_policy = sink_policy
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.validation_fraction = validation_fraction
        self.seed = seed

    def fit(self, X, y):
        if self.graph is None:
            raise ValueError("a graph is required to build the network")
        X, y = check_X_y(X, y, dtype=np.float32)
        self.classes_, y_idx = np.unique(y, return_inverse=True)
        d = layered_dag(self.graph)
        self.net_ = embed(
            d, X.shape[1], len(self.classes_), self.sink_policy, seed=self.seed
        )
        val_n = int(round(self.validation_fraction * X.shape[0]))
        ds = split(
            LabeledDataset(X, y_idx.astype(np.int64)),
            X.shape[0] - val_n,
            val_n,
            0,
            self.seed,
        )
        cfg = TrainConfig(
            epochs=self.epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            momentum=self.momentum,
            seed=self.seed,
        )
        result = train_and_eval(self.net_, ds, cfg)
        self.validation_score_ = result.val_accuracy
        self.loss_curve_ = list(result.losses)
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "net_")
        X = check_array(X, dtype=np.float32)
        return forward(self.net_, X)

    def predict(self, X):
        return self.classes_[self.decision_function(X).argmax(axis=1)]
