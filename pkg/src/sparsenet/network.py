"""Sparse feed-forward classifiers built from layered DAGs.

Every DAG vertex becomes one hidden neuron. The input block fully connects
to the layer-0 vertices, each DAG arc carries exactly one trainable weight
(arcs may skip layers), and the output block fully connects to the chosen
output-attachment set: all sink vertices by default, or only the last layer.
The connectivity mask never changes during training.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .dag import LayeredDag
from .dataset import LabeledDataset, narrow
from .errors import EmbeddingError, TrainingDivergedError
from .rng import make_rng

SINK_POLICIES = ("all_sinks", "last_layer_only")

_INIT_STREAM = 0x1217
_SHUFFLE_STREAM = 0x5F0F


@dataclass(frozen=True)
class TrainConfig:
    """Training hyperparameters plus the split sizes they apply to."""

    epochs: int = 5
    batch_size: int = 64
    learning_rate: float = 0.01
    momentum: float = 0.9
    optimizer: str = "sgd"
    weight_init: str = "fan_in_uniform"
    seed: int = 0
    train_n: int | None = None
    val_n: int | None = None
    test_n: int | None = None

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.optimizer != "sgd":
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.weight_init != "fan_in_uniform":
            raise ValueError(f"unknown weight init {self.weight_init!r}")

    def digest(self) -> str:
        payload = json.dumps(self.__dict__, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:12]


@dataclass
class _LayerPlan:
    """Incoming-connection bookkeeping for one hidden layer >= 1."""

    verts: np.ndarray       # vertex ids in this layer
    arc_idx: np.ndarray     # positions into the arc weight vector
    src: np.ndarray         # arc source vertex ids
    dst_local: np.ndarray   # arc target positions within `verts`


@dataclass
class SparseNet:
    """Masked feed-forward classifier; weights mutate during training."""

    dag: LayeredDag
    input_dim: int
    output_dim: int
    sink_policy: str
    out_vertices: np.ndarray
    w_in: np.ndarray
    b_hidden: np.ndarray
    w_arc: np.ndarray
    w_out: np.ndarray
    b_out: np.ndarray
    activation: str = "relu"
    layer0: np.ndarray = field(default=None)
    hidden_plan: list[_LayerPlan] = field(default_factory=list)

    @property
    def dtype(self) -> np.dtype:
        return self.w_in.dtype

    @property
    def num_params(self) -> int:
        return self.w_in.size + self.b_hidden.size + self.w_arc.size + self.w_out.size + self.b_out.size

    def params(self) -> Iterator[tuple[str, np.ndarray]]:
        yield "w_in", self.w_in
        yield "b_hidden", self.b_hidden
        yield "w_arc", self.w_arc
        yield "w_out", self.w_out
        yield "b_out", self.b_out


def _build_plan(d: LayeredDag) -> list[_LayerPlan]:
    pos_in_layer = np.zeros(d.n, dtype=np.int64)
    for verts in d.layers:
        for j, v in enumerate(verts):
            pos_in_layer[v] = j
    by_layer: dict[int, list[tuple[int, int, int]]] = {}
    for i, (u, v) in enumerate(d.arcs):
        by_layer.setdefault(d.layer_of[v], []).append((i, u, pos_in_layer[v]))
    plan = []
    for l, verts in enumerate(d.layers[1:], start=1):
        entries = by_layer.get(l, [])
        plan.append(
            _LayerPlan(
                verts=np.array(verts, dtype=np.int64),
                arc_idx=np.array([e[0] for e in entries], dtype=np.int64),
                src=np.array([e[1] for e in entries], dtype=np.int64),
                dst_local=np.array([e[2] for e in entries], dtype=np.int64),
            )
        )
    return plan


def embed(
    d: LayeredDag,
    input_dim: int,
    output_dim: int,
    sink_policy: str = "all_sinks",
    seed: int = 0,
    dtype=np.float32,
) -> SparseNet:
    """Wire a layered DAG between a dense input and output block.

    Weights use a fan-in-scaled uniform init where fan-in counts only the
    masked-in connections of each neuron; biases start at zero.
    """
    if not d.is_layered:
        raise ValueError("DAG must be layered before embedding")
    if sink_policy not in SINK_POLICIES:
        raise ValueError(f"sink_policy must be one of {SINK_POLICIES}")
    layer0 = np.array(d.layers[0], dtype=np.int64)
    if layer0.size == 0:
        raise EmbeddingError("no layer-0 vertices to attach the input block to")
    out_vertices = np.array(
        d.sinks if sink_policy == "all_sinks" else d.layers[-1], dtype=np.int64
    )
    if out_vertices.size == 0:
        raise EmbeddingError("no output-attachment vertices")

    rng = make_rng(seed, _INIT_STREAM)

    def fan_in_uniform(shape, fan_in):
        bound = np.sqrt(6.0 / max(fan_in, 1))
        return rng.uniform(-bound, bound, size=shape)

    in_deg = np.zeros(d.n, dtype=np.int64)
    for _, v in d.arcs:
        in_deg[v] += 1
    w_arc = np.empty(len(d.arcs))
    for i, (_, v) in enumerate(d.arcs):
        w_arc[i] = fan_in_uniform((), in_deg[v])

    net = SparseNet(
        dag=d,
        input_dim=input_dim,
        output_dim=output_dim,
        sink_policy=sink_policy,
        out_vertices=out_vertices,
        w_in=fan_in_uniform((input_dim, layer0.size), input_dim).astype(dtype),
        b_hidden=np.zeros(d.n, dtype=dtype),
        w_arc=w_arc.astype(dtype),
        w_out=fan_in_uniform((out_vertices.size, output_dim), out_vertices.size).astype(dtype),
        b_out=np.zeros(output_dim, dtype=dtype),
        layer0=layer0,
        hidden_plan=_build_plan(d),
    )
    return net


def parameter_count(d: LayeredDag, input_dim: int, output_dim: int, sink_policy: str = "all_sinks") -> int:
    """Closed-form trainable-parameter count for an embedding."""
    n_out = len(d.sinks) if sink_policy == "all_sinks" else len(d.layers[-1])
    return input_dim * len(d.layers[0]) + len(d.arcs) + n_out * output_dim + d.n + output_dim


def _relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def _forward_full(net: SparseNet, X: np.ndarray):
    """Evaluate in ascending layer order; returns logits plus caches."""
    if X.shape[1] != net.input_dim:
        raise ValueError(f"input width {X.shape[1]} != expected {net.input_dim}")
    X = np.ascontiguousarray(X, dtype=net.dtype)
    acts = np.zeros((X.shape[0], net.dag.n), dtype=net.dtype)
    pres = []
    pre0 = X @ net.w_in + net.b_hidden[net.layer0]
    acts[:, net.layer0] = _relu(pre0)
    pres.append(pre0)
    for plan in net.hidden_plan:
        pre = np.zeros((X.shape[0], plan.verts.size), dtype=net.dtype)
        if plan.arc_idx.size:
            contrib = acts[:, plan.src] * net.w_arc[plan.arc_idx]
            np.add.at(pre.T, plan.dst_local, contrib.T)
        pre += net.b_hidden[plan.verts]
        acts[:, plan.verts] = _relu(pre)
        pres.append(pre)
    logits = acts[:, net.out_vertices] @ net.w_out + net.b_out
    return logits, acts, pres


def forward(net: SparseNet, X: np.ndarray) -> np.ndarray:
    """Output logits for a batch of input rows (softmax left to the loss)."""
    return _forward_full(net, X)[0]


def loss_and_gradients(net: SparseNet, X: np.ndarray, y: np.ndarray):
    """Mean softmax cross-entropy and exact gradients over the mask.

    Gradient arrays mirror the parameter arrays; no entry exists for an
    absent connection.
    """
    logits, acts, pres = _forward_full(net, X)
    b = X.shape[0]
    shifted = logits - logits.max(axis=1, keepdims=True)
    expz = np.exp(shifted)
    denom = expz.sum(axis=1, keepdims=True)
    loss = float((np.log(denom[:, 0]) - shifted[np.arange(b), y]).mean())

    dlogits = expz / denom
    dlogits[np.arange(b), y] -= 1.0
    dlogits /= b

    g_w_out = acts[:, net.out_vertices].T @ dlogits
    g_b_out = dlogits.sum(axis=0)
    d_acts = np.zeros_like(acts)
    d_acts[:, net.out_vertices] = dlogits @ net.w_out.T

    g_b_hidden = np.zeros_like(net.b_hidden)
    g_w_arc = np.zeros_like(net.w_arc)
    X32 = np.ascontiguousarray(X, dtype=net.dtype)
    for plan, pre in zip(reversed(net.hidden_plan), reversed(pres[1:])):
        dpre = d_acts[:, plan.verts] * (pre > 0)
        g_b_hidden[plan.verts] = dpre.sum(axis=0)
        if plan.arc_idx.size:
            dpre_arc = dpre[:, plan.dst_local]
            g_w_arc[plan.arc_idx] = np.einsum("bi,bi->i", acts[:, plan.src], dpre_arc)
            np.add.at(d_acts.T, plan.src, (net.w_arc[plan.arc_idx] * dpre_arc).T)
    dpre0 = d_acts[:, net.layer0] * (pres[0] > 0)
    g_b_hidden[net.layer0] = dpre0.sum(axis=0)
    g_w_in = X32.T @ dpre0

    grads = {
        "w_in": g_w_in,
        "b_hidden": g_b_hidden,
        "w_arc": g_w_arc,
        "w_out": g_w_out,
        "b_out": g_b_out,
    }
    return loss, grads


def accuracy(net: SparseNet, X: np.ndarray, y: np.ndarray, batch_size: int = 512) -> float:
    hits = 0
    for start in range(0, X.shape[0], batch_size):
        logits = forward(net, X[start : start + batch_size])
        hits += int((logits.argmax(axis=1) == y[start : start + batch_size]).sum())
    return hits / X.shape[0]


@dataclass(frozen=True)
class TrainResult:
    val_accuracy: float | None
    test_accuracy: float | None
    losses: tuple[float, ...]


def train_and_eval(net: SparseNet, data: LabeledDataset, cfg: TrainConfig) -> TrainResult:
    """Mini-batch SGD with momentum; deterministic for a fixed cfg.seed."""
    if cfg.train_n is not None:
        data = narrow(data, cfg.train_n, cfg.val_n or 0, cfg.test_n or 0, cfg.seed)
    elif not data.has_split:
        raise ValueError("dataset has no split and cfg does not define one")
    train_idx = data.train_idx
    rng = make_rng(cfg.seed, _SHUFFLE_STREAM)
    velocity = {name: np.zeros_like(p) for name, p in net.params()}
    losses = []
    for epoch in range(cfg.epochs):
        order = train_idx[rng.permutation(train_idx.size)]
        epoch_loss = 0.0
        batches = 0
        for start in range(0, order.size, cfg.batch_size):
            rows = order[start : start + cfg.batch_size]
            loss, grads = loss_and_gradients(net, data.images[rows], data.labels[rows])
            if not np.isfinite(loss):
                raise TrainingDivergedError(epoch)
            epoch_loss += loss
            batches += 1
            for name, p in net.params():
                v = velocity[name]
                v *= cfg.momentum
                v -= cfg.learning_rate * grads[name]
                p += v
        losses.append(epoch_loss / max(batches, 1))

    def _acc(idx):
        if idx is None or idx.size == 0:
            return None
        return accuracy(net, data.images[idx], data.labels[idx])

    return TrainResult(_acc(data.val_idx), _acc(data.test_idx), tuple(losses))


def save_net(net: SparseNet, path) -> None:
    """Versioned snapshot of mask + weights + config (npz container)."""
    meta = {
        "version": 1,
        "input_dim": net.input_dim,
        "output_dim": net.output_dim,
        "sink_policy": net.sink_policy,
        "activation": net.activation,
        "n": net.dag.n,
    }
    np.savez(
        path,
        meta=json.dumps(meta, sort_keys=True),
        arcs=np.array(net.dag.arcs, dtype=np.int64).reshape(-1, 2),
        w_in=net.w_in,
        b_hidden=net.b_hidden,
        w_arc=net.w_arc,
        w_out=net.w_out,
        b_out=net.b_out,
    )


def load_net(path) -> SparseNet:
    from .dag import layer_index

    with np.load(path, allow_pickle=False) as payload:
        meta = json.loads(str(payload["meta"]))
        if meta.get("version") != 1:
            raise ValueError(f"unsupported snapshot version {meta.get('version')!r}")
        arcs = tuple((int(u), int(v)) for u, v in payload["arcs"])
        d = layer_index(LayeredDag(meta["n"], arcs))
        net = embed(d, meta["input_dim"], meta["output_dim"], meta["sink_policy"])
        net.w_in = payload["w_in"]
        net.b_hidden = payload["b_hidden"]
        net.w_arc = payload["w_arc"]
        net.w_out = payload["w_out"]
        net.b_out = payload["b_out"]
    return net
