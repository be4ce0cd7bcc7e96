"""Pipeline orchestration: sample, generate, featurize, train, record.

Each record is a pure function of (base seed, graph id, training config,
dataset), so a worker pool yields byte-identical output to a serial run.
Records persist as JSON lines with a stable key order; CSV export carries
the 25 feature columns plus the two accuracy columns.
"""

from __future__ import annotations

import csv
import io
import json
import multiprocessing
import os
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .dag import layered_dag
from .dataset import LabeledDataset
from .errors import FormatError, SparsenetError, TrainingDivergedError
from .features import FEATURE_NAMES, FeatureVector, feature_vector
from .generators import GeneratorSpec, generate_connected, sample_spec
from .network import TrainConfig, embed, train_and_eval
from .rng import derive_seed, make_rng

_SPEC_FIELDS = ("kind", "n", "seed", "ws_k", "ws_p", "ba_m", "er_p")
_KIND_STREAM = 0x2D1B


@dataclass(frozen=True)
class ExperimentRecord:
    """One graph's provenance, structural features, and accuracies."""

    graph_id: int
    spec: GeneratorSpec
    features: FeatureVector
    sink_policy: str
    config_digest: str
    val_accuracy: float | None
    test_accuracy: float | None
    wall_time_s: float | None
    tool_version: str = __version__

    def to_json(self) -> str:
        row: dict = {"graph_id": self.graph_id}
        row.update(self.spec.flatten())
        row.update(self.features.to_dict())
        row["sink_policy"] = self.sink_policy
        row["config_digest"] = self.config_digest
        row["val_accuracy"] = self.val_accuracy
        row["test_accuracy"] = self.test_accuracy
        row["wall_time_s"] = self.wall_time_s
        row["tool_version"] = self.tool_version
        return json.dumps(row)

    @classmethod
    def from_json(cls, line: str) -> "ExperimentRecord":
        try:
            row = json.loads(line)
            spec = GeneratorSpec(**{k: row[k] for k in _SPEC_FIELDS})
            features = FeatureVector(**{k: row[k] for k in FEATURE_NAMES})
            return cls(
                graph_id=row["graph_id"],
                spec=spec,
                features=features,
                sink_policy=row["sink_policy"],
                config_digest=row["config_digest"],
                val_accuracy=row["val_accuracy"],
                test_accuracy=row["test_accuracy"],
                wall_time_s=row.get("wall_time_s"),
                tool_version=row.get("tool_version", "unknown"),
            )
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise FormatError(f"bad experiment record: {exc}") from None


def run_one(
    spec: GeneratorSpec,
    data: LabeledDataset,
    cfg: TrainConfig,
    sink_policy: str = "all_sinks",
    graph_id: int = 0,
    max_retries: int = 100,
    record_timing: bool = False,
) -> ExperimentRecord:
    """Full pipeline for one graph; deterministic per (spec.seed, cfg.seed)."""
    started = time.perf_counter()
    try:
        g = generate_connected(spec, max_retries)
        d = layered_dag(g)
        fv = feature_vector(g, d)
        net = embed(
            d,
            data.images.shape[1],
            int(data.labels.max()) + 1,
            sink_policy,
            seed=derive_seed(spec.seed, cfg.seed),
        )
        try:
            result = train_and_eval(net, data, cfg)
            val_acc, test_acc = result.val_accuracy, result.test_accuracy
        except TrainingDivergedError:
            val_acc, test_acc = None, None
    except SparsenetError as exc:
        raise type(exc)(f"graph {graph_id}: {exc}") from exc
    wall = time.perf_counter() - started if record_timing else None
    return ExperimentRecord(
        graph_id=graph_id,
        spec=spec,
        features=fv,
        sink_policy=sink_policy,
        config_digest=cfg.digest(),
        val_accuracy=val_acc,
        test_accuracy=test_acc,
        wall_time_s=wall,
    )


def plan_specs(
    count: int, mix: dict[str, float], base_seed: int, n_range: tuple[int, int]
) -> list[GeneratorSpec]:
    """Sample one generator spec per graph id, mixing kinds by weight."""
    kinds = sorted(mix)
    weights = np.array([mix[k] for k in kinds], dtype=np.float64)
    if (weights < 0).any() or weights.sum() <= 0:
        raise ValueError(f"invalid generator mix {mix}")
    weights = weights / weights.sum()
    specs = []
    for gid in range(count):
        rng = make_rng(base_seed, gid, _KIND_STREAM)
        kind = kinds[int(rng.choice(len(kinds), p=weights))]
        specs.append(sample_spec(derive_seed(base_seed, gid), kind, n_range))
    return specs


# Worker context shared via fork so the dataset is not re-pickled per job.
_CTX: dict = {}


def _run_job(args) -> ExperimentRecord:
    gid, spec = args
    return run_one(
        spec,
        _CTX["data"],
        _CTX["cfg"],
        sink_policy=_CTX["sink_policy"],
        graph_id=gid,
        max_retries=_CTX["max_retries"],
        record_timing=_CTX["record_timing"],
    )


def build_dataset(
    count: int,
    mix: dict[str, float],
    data: LabeledDataset,
    cfg: TrainConfig,
    out_path: str,
    workers: int = 1,
    n_range: tuple[int, int] = (50, 500),
    sink_policy: str = "all_sinks",
    base_seed: int = 0,
    keep_partial: bool = False,
    record_timing: bool = False,
    max_retries: int = 100,
) -> list[ExperimentRecord]:
    """Run `count` independent pipelines and persist records by graph id."""
    if count < 1:
        raise ValueError("count must be >= 1")
    specs = plan_specs(count, mix, base_seed, n_range)
    jobs = list(enumerate(specs))
    _CTX.update(
        data=data,
        cfg=cfg,
        sink_policy=sink_policy,
        max_retries=max_retries,
        record_timing=record_timing,
    )
    records: list[ExperimentRecord] = []
    try:
        with open(out_path, "w") as fh:
            if workers > 1:
                with multiprocessing.get_context("fork").Pool(workers) as pool:
                    for rec in pool.imap(_run_job, jobs):
                        records.append(rec)
                        fh.write(rec.to_json() + "\n")
            else:
                for job in jobs:
                    rec = _run_job(job)
                    records.append(rec)
                    fh.write(rec.to_json() + "\n")
    except Exception:
        if not keep_partial and os.path.exists(out_path):
            os.remove(out_path)
        raise
    finally:
        _CTX.clear()
    return records


def read_records(path: str) -> list[ExperimentRecord]:
    with open(path) as fh:
        return [ExperimentRecord.from_json(line) for line in fh if line.strip()]


def records_to_csv(records: list[ExperimentRecord]) -> str:
    """Feature columns in fixed order plus the two accuracy columns."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(FEATURE_NAMES) + ["val_accuracy", "test_accuracy"])
    for rec in records:
        row = [getattr(rec.features, name) for name in FEATURE_NAMES]
        row += [rec.val_accuracy, rec.test_accuracy]
        writer.writerow(row)
    return buf.getvalue()


def summarize(records: list[ExperimentRecord]) -> list[tuple[str, float, float, float, float]]:
    """Per-property (min, mean, max, std) rows in feature order,
    with the two accuracy rows appended; diverged records count separately.
    """
    rows = []
    for name in FEATURE_NAMES:
        vals = np.array([float(getattr(r.features, name)) for r in records])
        rows.append((name, float(vals.min()), float(vals.mean()), float(vals.max()), float(vals.std())))
    for name in ("val_accuracy", "test_accuracy"):
        vals = np.array([getattr(r, name) for r in records if getattr(r, name) is not None])
        if vals.size:
            rows.append((name, float(vals.min()), float(vals.mean()), float(vals.max()), float(vals.std())))
    return rows


def diverged_count(records: list[ExperimentRecord]) -> int:
    return sum(1 for r in records if r.test_accuracy is None)
