"""Labeled-batch ingestion: IDX files and a synthetic blob dataset.

IDX is the big-endian binary container used by the MNIST distribution
(magic 0x00000803 for images, 0x00000801 for labels). The synthetic
blobs are the hermetic stand-in so nothing in the test suite ever needs
a download: class c lives at 0.8 * e_c with isotropic Gaussian noise,
clipped into [0,1].
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .rng import SplitMix64, derive_seed, normal_array

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801


class IdxFormatError(ValueError):
    """The file is not a well-formed IDX image/label container."""


class DataError(ValueError):
    """Batch construction arguments violate an invariant."""


@dataclass(frozen=True)
class LabeledBatch:
    """Image rows in [0,1] paired with one-hot label rows."""

    images: np.ndarray  # [m, d]
    labels: np.ndarray  # [m, n]

    def __post_init__(self):
        x = np.ascontiguousarray(self.images, dtype=np.float64)
        y = np.ascontiguousarray(self.labels, dtype=np.float64)
        if x.ndim != 2 or y.ndim != 2:
            raise DataError("images and labels must be rank-2")
        if x.shape[0] != y.shape[0]:
            raise DataError(f"{x.shape[0]} images vs {y.shape[0]} labels")
        if x.shape[0] < 1:
            raise DataError("batch must contain at least one example")
        if x.min() < 0.0 or x.max() > 1.0:
            raise DataError("image values must lie in [0,1]")
        if not (np.isin(y, (0.0, 1.0)).all() and (y.sum(axis=1) == 1.0).all()):
            raise DataError("labels must be one-hot rows")
        object.__setattr__(self, "images", x)
        object.__setattr__(self, "labels", y)

    @property
    def size(self) -> int:
        return self.images.shape[0]

    def take(self, m: int) -> "LabeledBatch":
        """First min(m, size) rows."""
        m = min(m, self.size)
        return LabeledBatch(self.images[:m], self.labels[:m])


@dataclass(frozen=True)
class Dataset:
    train: LabeledBatch
    test: LabeledBatch
    n_classes: int
    dim: int

    def __post_init__(self):
        for split in (self.train, self.test):
            if split.images.shape[1] != self.dim or split.labels.shape[1] != self.n_classes:
                raise DataError("splits disagree with declared dim/n_classes")


def _read_header(data: bytes, path: str, magic: int, n_dims: int) -> tuple:
    header = 4 * (1 + n_dims)
    if len(data) < header:
        raise IdxFormatError(f"{path}: truncated header")
    fields = struct.unpack(f">{1 + n_dims}i", data[:header])
    if fields[0] != magic:
        raise IdxFormatError(f"{path}: wrong magic 0x{fields[0]:08x}, expected 0x{magic:08x}")
    return fields[1:], data[header:]


def load_idx_images(path) -> np.ndarray:
    """Image matrix [m, rows*cols] scaled into [0,1] from an IDX file."""
    with open(path, "rb") as f:
        data = f.read()
    (m, rows, cols), body = _read_header(data, str(path), IMAGE_MAGIC, 3)
    if min(m, rows, cols) < 0 or m * rows * cols > 1 << 40:
        raise IdxFormatError(f"{path}: implausible dimensions {m}x{rows}x{cols}")
    if len(body) < m * rows * cols:
        raise IdxFormatError(f"{path}: truncated, expected {m * rows * cols} pixels, got {len(body)}")
    pixels = np.frombuffer(body[: m * rows * cols], dtype=np.uint8)
    return pixels.reshape(m, rows * cols).astype(np.float64) / 255.0


def load_idx_labels(path, n_classes: int) -> np.ndarray:
    """One-hot label matrix [m, n_classes] from an IDX label file."""
    with open(path, "rb") as f:
        data = f.read()
    (m,), body = _read_header(data, str(path), LABEL_MAGIC, 1)
    if m < 0:
        raise IdxFormatError(f"{path}: negative item count")
    if len(body) < m:
        raise IdxFormatError(f"{path}: truncated, expected {m} labels, got {len(body)}")
    raw = np.frombuffer(body[:m], dtype=np.uint8)
    if raw.size and int(raw.max()) >= n_classes:
        raise IdxFormatError(f"{path}: label {int(raw.max())} out of range for {n_classes} classes")
    onehot = np.zeros((m, n_classes), dtype=np.float64)
    onehot[np.arange(m), raw] = 1.0
    return onehot


def load_idx_batch(images_path, labels_path, n_classes: int) -> LabeledBatch:
    """Load a paired image/label file couple into one batch."""
    images = load_idx_images(images_path)
    labels = load_idx_labels(labels_path, n_classes)
    if images.shape[0] != labels.shape[0]:
        raise IdxFormatError(
            f"pairing error: {images.shape[0]} images vs {labels.shape[0]} labels"
        )
    return LabeledBatch(images, labels)


def split_80_20(images: np.ndarray, labels: np.ndarray) -> tuple:
    """Round-robin 80/20 split: every fifth row goes to the test side."""
    idx = np.arange(images.shape[0])
    test_mask = idx % 5 == 4
    train = LabeledBatch(images[~test_mask], labels[~test_mask])
    test = LabeledBatch(images[test_mask], labels[test_mask])
    return train, test


def synthetic_blobs(n_classes: int, dim: int, m_per_class: int, seed: int, spread: float = 0.15) -> Dataset:
    """Deterministic Gaussian blob classes on the unit-vector corners.

    Class c is centered at 0.8*e_c; isotropic noise of scale `spread` is
    added and values are clipped to [0,1]. Rows are generated class by
    class, then split 80/20 by round-robin.
    """
    if n_classes < 2:
        raise DataError("need at least 2 classes")
    if dim < n_classes:
        raise DataError("dim must be at least n_classes")
    if m_per_class < 1:
        raise DataError("m_per_class must be positive")
    total = n_classes * m_per_class
    images = spread * normal_array(derive_seed(seed, "blobs"), total * dim).reshape(total, dim)
    labels = np.zeros((total, n_classes), dtype=np.float64)
    for c in range(n_classes):
        rows = slice(c * m_per_class, (c + 1) * m_per_class)
        images[rows, c] += 0.8
        labels[rows, c] = 1.0
    images = np.clip(images, 0.0, 1.0)
    train, test = split_80_20(images, labels)
    return Dataset(train=train, test=test, n_classes=n_classes, dim=dim)


def batch_iter(batch: LabeledBatch, batch_size: int, seed: int):
    """Endless deterministic minibatch stream.

    Each epoch reshuffles with the seeded stream; a final partial batch
    is dropped so every yielded batch has exactly `batch_size` rows.
    """
    if batch_size > batch.size:
        raise DataError(f"batch_size {batch_size} exceeds dataset size {batch.size}")
    stream = SplitMix64(derive_seed(seed, "shuffle"))
    while True:
        perm = stream.permutation(batch.size)
        for start in range(0, batch.size - batch_size + 1, batch_size):
            rows = perm[start : start + batch_size]
            yield LabeledBatch(batch.images[rows], batch.labels[rows])
