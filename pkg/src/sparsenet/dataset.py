"""Labeled image datasets: IDX ingestion, synthetic fallback, splits.

Pixels are scaled to [0,1] and flattened to 784-dim rows. The synthetic
dataset stands in for MNIST when the IDX files are not available: each digit
class owns a few random prototype images, and samples are noisy copies, so
the classes are linearly separable in the full pixel space but not along any
single direction.
"""

from __future__ import annotations

import gzip
import os
import struct
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import FormatError
from .rng import make_rng

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801

MNIST_DIR_ENV = "SPARSENET_MNIST_DIR"

_SPLIT_STREAM = 0x5DA7A


@dataclass(frozen=True)
class LabeledDataset:
    """Images (N x 784, float in [0,1]), integer labels, optional split."""

    images: np.ndarray
    labels: np.ndarray
    train_idx: np.ndarray | None = None
    val_idx: np.ndarray | None = None
    test_idx: np.ndarray | None = None

    def __post_init__(self):
        if self.images.shape[0] != self.labels.shape[0]:
            raise ValueError("images and labels disagree on sample count")

    @property
    def n(self) -> int:
        return self.images.shape[0]

    @property
    def has_split(self) -> bool:
        return self.train_idx is not None


def _read_bytes(f, count: int, offset: int, what: str) -> bytes:
    data = f.read(count)
    if len(data) != count:
        raise FormatError(f"truncated {what} at byte offset {offset}: wanted {count}, got {len(data)}")
    return data


def _open_idx(path: str | Path):
    f = open(path, "rb")
    head = f.read(2)
    f.seek(0)
    if head == b"\x1f\x8b":
        f.close()
        return gzip.open(path, "rb")
    return f


def _read_idx(path: str | Path, magic: int, ndim: int, what: str):
    with _open_idx(path) as f:
        offset = 0
        got = struct.unpack(">I", _read_bytes(f, 4, offset, what))[0]
        if got != magic:
            raise FormatError(
                f"bad magic in {what} at byte offset 0: expected {magic:#010x}, got {got:#010x}"
            )
        offset = 4
        dims = []
        for _ in range(ndim):
            dims.append(struct.unpack(">I", _read_bytes(f, 4, offset, what))[0])
            offset += 4
        count = int(np.prod(dims))
        payload = _read_bytes(f, count, offset, what)
        return dims, np.frombuffer(payload, dtype=np.uint8)


def load_idx(images_path: str | Path, labels_path: str | Path) -> LabeledDataset:
    """Parse an IDX image/label file pair into a dataset (no split)."""
    (n_img, rows, cols), pixels = _read_idx(images_path, IMAGES_MAGIC, 3, "image file")
    (n_lab,), labels = _read_idx(labels_path, LABELS_MAGIC, 1, "label file")
    if n_img != n_lab:
        raise FormatError(f"count mismatch: {n_img} images vs {n_lab} labels")
    images = pixels.reshape(n_img, rows * cols).astype(np.float32) / 255.0
    return LabeledDataset(images, labels.astype(np.int64))


def _find(directory: Path, stem: str) -> Path:
    for name in (stem, stem + ".gz"):
        p = directory / name
        if p.exists():
            return p
    raise FileNotFoundError(f"{stem}[.gz] not found in {directory}")


def load_mnist(directory: str | Path, val_n: int = 5000, seed: int = 0) -> LabeledDataset:
    """Load the four standard MNIST IDX files and attach a default split.

    Validation is carved from the official training file with a seeded
    shuffle; the official test images form the test split.
    """
    directory = Path(directory)
    train = load_idx(
        _find(directory, "train-images-idx3-ubyte"),
        _find(directory, "train-labels-idx1-ubyte"),
    )
    test = load_idx(
        _find(directory, "t10k-images-idx3-ubyte"),
        _find(directory, "t10k-labels-idx1-ubyte"),
    )
    images = np.concatenate([train.images, test.images])
    labels = np.concatenate([train.labels, test.labels])
    perm = make_rng(seed, _SPLIT_STREAM).permutation(train.n)
    return LabeledDataset(
        images,
        labels,
        train_idx=np.sort(perm[val_n:]),
        val_idx=np.sort(perm[:val_n]),
        test_idx=np.arange(train.n, train.n + test.n),
    )


def resolve_mnist_dir(explicit: str | None = None) -> str | None:
    """CLI helper: --mnist-dir wins, then the environment variable."""
    return explicit or os.environ.get(MNIST_DIR_ENV)


def synthetic_digits(n: int, seed: int, prototypes_per_class: int = 3, noise: float = 0.3) -> LabeledDataset:
    """Deterministic MNIST stand-in with 10 balanced classes (no split)."""
    if n < 10:
        raise ValueError("need at least 10 samples to cover all classes")
    rng = make_rng(seed, 0xD161)
    protos = rng.random((10, prototypes_per_class, 784))
    labels = np.arange(n, dtype=np.int64) % 10
    rng.shuffle(labels)
    which = rng.integers(0, prototypes_per_class, size=n)
    images = protos[labels, which] + noise * rng.standard_normal((n, 784))
    images = np.clip(images, 0.0, 1.0).astype(np.float32)
    return LabeledDataset(images, labels)


def split(ds: LabeledDataset, train_n: int, val_n: int, test_n: int, seed: int) -> LabeledDataset:
    """Seeded shuffle of all rows, then contiguous disjoint assignment."""
    total = train_n + val_n + test_n
    if min(train_n, val_n, test_n) < 0:
        raise ValueError("split sizes must be nonnegative")
    if total > ds.n:
        raise ValueError(f"split sizes {total} exceed dataset size {ds.n}")
    perm = make_rng(seed, _SPLIT_STREAM).permutation(ds.n)
    return replace(
        ds,
        train_idx=perm[:train_n],
        val_idx=perm[train_n : train_n + val_n],
        test_idx=perm[train_n + val_n : total],
    )


def narrow(ds: LabeledDataset, train_n: int, val_n: int, test_n: int, seed: int) -> LabeledDataset:
    """Take a smaller split, respecting existing pools when present.

    With no prior split this behaves like :func:`split`; otherwise each
    subset is drawn from its own pool so e.g. official test images never
    leak into training.
    """
    if not ds.has_split:
        return split(ds, train_n, val_n, test_n, seed)
    rng = make_rng(seed, _SPLIT_STREAM)
    picks = []
    for pool, k, name in (
        (ds.train_idx, train_n, "train"),
        (ds.val_idx, val_n, "val"),
        (ds.test_idx, test_n, "test"),
    ):
        if k > len(pool):
            raise ValueError(f"{name} pool holds {len(pool)} rows, requested {k}")
        picks.append(pool[rng.permutation(len(pool))[:k]])
    return replace(ds, train_idx=picks[0], val_idx=picks[1], test_idx=picks[2])
