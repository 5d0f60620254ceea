import struct

import numpy as np
import pytest

from graphforge import (
    DataError,
    IdxFormatError,
    LabeledBatch,
    batch_iter,
    load_idx_batch,
    load_idx_images,
    load_idx_labels,
    synthetic_blobs,
)
from graphforge.rng import SplitMix64


def write_idx_images(path, images_u8):
    """Test-side IDX writer (independent of the loader)."""
    m, rows, cols = images_u8.shape
    with open(path, "wb") as f:
        f.write(struct.pack(">iiii", 0x00000803, m, rows, cols))
        f.write(images_u8.astype(np.uint8).tobytes())


def write_idx_labels(path, labels_u8):
    with open(path, "wb") as f:
        f.write(struct.pack(">ii", 0x00000801, len(labels_u8)))
        f.write(bytes(int(v) for v in labels_u8))


class TestIdxImages:
    def test_handcrafted_two_by_two(self, tmp_path):
        p = tmp_path / "imgs.idx"
        data = np.array([[[0, 255], [0, 255]], [[255, 0], [255, 0]]], dtype=np.uint8)
        write_idx_images(p, data)
        out = load_idx_images(p)
        assert out.shape == (2, 4)
        assert out[0] == pytest.approx([0, 1, 0, 1])
        assert out[1] == pytest.approx([1, 0, 1, 0])

    def test_wrong_magic(self, tmp_path):
        p = tmp_path / "bad.idx"
        p.write_bytes(struct.pack(">iiii", 0x00000801, 1, 2, 2) + bytes(4))
        with pytest.raises(IdxFormatError, match="magic"):
            load_idx_images(p)

    def test_truncated(self, tmp_path):
        p = tmp_path / "short.idx"
        p.write_bytes(struct.pack(">iiii", 0x00000803, 2, 2, 2) + bytes(3))
        with pytest.raises(IdxFormatError, match="truncated"):
            load_idx_images(p)

    def test_roundtrip_random(self, tmp_path):
        stream = SplitMix64(5)
        for i in range(5):
            m, r, c = stream.next_below(4) + 1, stream.next_below(5) + 1, stream.next_below(5) + 1
            raw = np.array(
                [stream.next_below(256) for _ in range(m * r * c)], dtype=np.uint8
            ).reshape(m, r, c)
            p = tmp_path / f"rt{i}.idx"
            write_idx_images(p, raw)
            out = load_idx_images(p)
            assert np.array_equal(out, raw.reshape(m, r * c) / 255.0)


class TestIdxLabels:
    def test_one_hot(self, tmp_path):
        p = tmp_path / "labels.idx"
        write_idx_labels(p, [3])
        out = load_idx_labels(p, 10)
        assert out.shape == (1, 10)
        assert out[0, 3] == 1.0 and out.sum() == 1.0

    def test_out_of_range(self, tmp_path):
        p = tmp_path / "labels.idx"
        write_idx_labels(p, [10])
        with pytest.raises(IdxFormatError, match="out of range"):
            load_idx_labels(p, 10)

    def test_pairing_error(self, tmp_path):
        imgs = tmp_path / "i.idx"
        labs = tmp_path / "l.idx"
        write_idx_images(imgs, np.zeros((2, 2, 2), dtype=np.uint8))
        write_idx_labels(labs, [1, 2, 3])
        with pytest.raises(IdxFormatError, match="pairing"):
            load_idx_batch(imgs, labs, 10)


class TestLabeledBatch:
    def test_rejects_values_outside_unit_interval(self):
        with pytest.raises(DataError):
            LabeledBatch(np.array([[1.5]]), np.array([[1.0]]))

    def test_rejects_non_one_hot(self):
        with pytest.raises(DataError):
            LabeledBatch(np.array([[0.5]]), np.array([[0.5]]))

    def test_rejects_size_mismatch(self):
        with pytest.raises(DataError):
            LabeledBatch(np.zeros((2, 3)), np.eye(3))


class TestSyntheticBlobs:
    def test_spread_zero_is_exact_corners(self):
        ds = synthetic_blobs(3, 5, 10, seed=1, spread=0.0)
        for split in (ds.train, ds.test):
            hot = split.labels.argmax(axis=1)
            expected = np.zeros((split.size, 5))
            expected[np.arange(split.size), hot] = 0.8
            assert np.array_equal(split.images, expected)

    def test_deterministic(self):
        a = synthetic_blobs(4, 8, 25, seed=7)
        b = synthetic_blobs(4, 8, 25, seed=7)
        assert np.array_equal(a.train.images, b.train.images)
        assert np.array_equal(a.test.labels, b.test.labels)

    def test_split_is_80_20(self):
        ds = synthetic_blobs(2, 4, 50, seed=0)
        assert ds.train.size == 80 and ds.test.size == 20

    def test_invariants_hold(self):
        ds = synthetic_blobs(5, 16, 40, seed=3, spread=0.6)
        for split in (ds.train, ds.test):
            assert split.images.min() >= 0.0 and split.images.max() <= 1.0
            assert (split.labels.sum(axis=1) == 1.0).all()

    def test_rejects_bad_args(self):
        with pytest.raises(DataError):
            synthetic_blobs(1, 4, 10, seed=0)
        with pytest.raises(DataError):
            synthetic_blobs(4, 3, 10, seed=0)


class TestBatchIter:
    def test_full_batch_is_permutation(self):
        ds = synthetic_blobs(2, 4, 10, seed=2)
        it = batch_iter(ds.train, ds.train.size, seed=0)
        batch = next(it)
        order = np.lexsort(batch.images.T)
        base = np.lexsort(ds.train.images.T)
        assert np.array_equal(batch.images[order], ds.train.images[base])

    def test_same_seed_same_sequence(self):
        ds = synthetic_blobs(2, 4, 10, seed=2)
        a = batch_iter(ds.train, 4, seed=9)
        b = batch_iter(ds.train, 4, seed=9)
        for _ in range(7):
            assert np.array_equal(next(a).images, next(b).images)

    def test_epoch_union_covers_dataset_when_divisible(self):
        ds = synthetic_blobs(2, 4, 10, seed=2)  # train size 16
        it = batch_iter(ds.train, 4, seed=1)
        rows = np.concatenate([next(it).images for _ in range(4)])
        assert np.array_equal(np.sort(rows, axis=0), np.sort(ds.train.images, axis=0))

    def test_batch_size_too_large(self):
        ds = synthetic_blobs(2, 4, 5, seed=2)
        with pytest.raises(DataError):
            next(batch_iter(ds.train, ds.train.size + 1, seed=0))

    def test_partial_batch_dropped(self):
        ds = synthetic_blobs(2, 4, 10, seed=2)  # train size 16
        it = batch_iter(ds.train, 5, seed=0)
        for _ in range(9):  # 3 per epoch, never a short batch
            assert next(it).size == 5
