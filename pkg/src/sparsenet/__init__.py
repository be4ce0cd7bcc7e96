"""Random-graph sparse neural classifiers and structural accuracy prediction.

Pipeline: generate a random graph (Watts-Strogatz, Barabási-Albert, or
Erdős-Rényi), orient it into a layered DAG, embed it as a masked
feed-forward classifier, train on MNIST-style data, record 25 structural
properties next to the achieved accuracies, and fit regressors that predict
accuracy from structure alone.
"""

__version__ = "0.1.0"

from .classifier import SparseNetClassifier
from .dag import LayeredDag, layer_index, layered_dag, orient
from .dataset import LabeledDataset, load_idx, load_mnist, split, synthetic_digits
from .estimators import (
    EstimatorReport,
    SplitProtocol,
    evaluate,
    feature_importance,
    fit_ols,
    fit_rf,
    fit_svr,
)
from .experiment import ExperimentRecord, build_dataset, read_records, run_one
from .features import FEATURE_NAMES, FEATURE_SETS, FeatureVector, feature_vector
from .generators import GeneratorSpec, generate, generate_connected, sample_spec
from .graph import Graph, is_connected, read_edge_list, write_edge_list
from .network import SparseNet, TrainConfig, embed, forward, train_and_eval

__all__ = [
    "__version__",
    "EstimatorReport",
    "ExperimentRecord",
    "FEATURE_NAMES",
    "FEATURE_SETS",
    "FeatureVector",
    "GeneratorSpec",
    "Graph",
    "LabeledDataset",
    "LayeredDag",
    "SparseNet",
    "SparseNetClassifier",
    "SplitProtocol",
    "TrainConfig",
    "build_dataset",
    "embed",
    "evaluate",
    "feature_importance",
    "feature_vector",
    "fit_ols",
    "fit_rf",
    "fit_svr",
    "forward",
    "generate",
    "generate_connected",
    "is_connected",
    "layer_index",
    "layered_dag",
    "load_idx",
    "load_mnist",
    "orient",
    "read_edge_list",
    "read_records",
    "run_one",
    "sample_spec",
    "split",
    "synthetic_digits",
    "train_and_eval",
    "write_edge_list",
]
