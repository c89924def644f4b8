"""Associative memory: block partitions, inference oracles, persistence."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hdtcam.am import (
    AssociativeMemory,
    BlockConfig,
    blocked_distance_matrix,
    blocked_distances_true,
    infer_blocked,
    infer_ideal,
    load_model,
    save_model,
    train,
)
from hdtcam.core import hamming, random_hypervector
from hdtcam.errors import DimensionMismatchError, FormatError, InvalidStateError


def _random_am(rng, classes=4, dimension=64):
    rows = np.stack([random_hypervector(dimension, rng) for _ in range(classes)])
    return AssociativeMemory([f"c{i}" for i in range(classes)], rows)


# ---------------------------------------------------------------------------
# BlockConfig


def test_block_config_non_dividing_partition():
    cfg = BlockConfig(dimension=10, block_size=3, precision=2)
    assert cfg.num_blocks == 4
    assert cfg.block_starts.tolist() == [0, 3, 6, 9]
    assert cfg.block_sizes.tolist() == [3, 3, 3, 1]
    assert cfg.block_caps.tolist() == [2, 2, 2, 1]  # last block: min(P, size)


def test_block_config_validation():
    with pytest.raises(ValueError):
        BlockConfig(dimension=0, block_size=4, precision=2)
    with pytest.raises(ValueError):
        BlockConfig(dimension=8, block_size=1, precision=1)
    with pytest.raises(ValueError):
        BlockConfig(dimension=8, block_size=4, precision=5)
    with pytest.raises(ValueError):
        BlockConfig(dimension=8, block_size=4, precision=0)


@settings(max_examples=100)
@given(st.integers(2, 25), st.integers(2, 400), st.integers(0, 2**31))
def test_partition_identity_property(block_size, dimension, seed):
    """With P=N the clamped block sum equals the full Hamming distance."""
    rng = np.random.default_rng(seed)
    a = random_hypervector(dimension, rng)
    b = random_hypervector(dimension, rng)
    cfg = BlockConfig(dimension, block_size, block_size)
    assert int(blocked_distances_true(a, b, cfg).sum()) == hamming(a, b)


def test_blocked_distances_clamped_at_caps(rng):
    a = np.zeros(12, dtype=np.uint8)
    b = np.ones(12, dtype=np.uint8)
    cfg = BlockConfig(12, 4, 2)
    assert blocked_distances_true(a, b, cfg).tolist() == [2, 2, 2]


def test_blocked_totals_monotone_in_precision(rng):
    """Lower precision clamps more, so totals can only shrink."""
    am = _random_am(rng, classes=3, dimension=100)
    q = random_hypervector(100, rng)
    prev = None
    for p in range(1, 8):
        cfg = BlockConfig(100, 7, p)
        total = blocked_distance_matrix(q, am, cfg)[0].sum()
        if prev is not None:
            assert total >= prev
        prev = total


def test_blocked_matrix_agrees_with_single(rng):
    am = _random_am(rng, classes=5, dimension=33)
    queries = np.stack([random_hypervector(33, rng) for _ in range(7)])
    cfg = BlockConfig(33, 4, 3)
    mat = blocked_distance_matrix(queries, am, cfg)
    for i in range(7):
        for c in range(5):
            single = blocked_distances_true(queries[i], am.class_matrix[c], cfg)
            assert np.array_equal(mat[i, c], single)


# ---------------------------------------------------------------------------
# Inference


def test_infer_ideal_matches_brute_force(rng):
    am = _random_am(rng, classes=6, dimension=80)
    for _ in range(20):
        q = random_hypervector(80, rng)
        dists = [hamming(q, am.class_matrix[c]) for c in range(6)]
        label, dist = infer_ideal(q, am)
        assert dist == min(dists)
        assert label == am.labels[int(np.argmin(dists))]


def test_infer_ideal_tie_break_first_stored():
    v = np.array([0, 0, 0, 0], dtype=np.uint8)
    am = AssociativeMemory(["first", "second"], np.stack([v, v]))
    label, dist = infer_ideal(np.array([1, 0, 0, 0], dtype=np.uint8), am)
    assert label == "first" and dist == 1


def test_infer_blocked_full_precision_equals_ideal(rng):
    am = _random_am(rng, classes=4, dimension=50)
    cfg = BlockConfig(50, 7, 7)
    for _ in range(20):
        q = random_hypervector(50, rng)
        assert infer_blocked(q, am, cfg)[0] == infer_ideal(q, am)[0]


def test_infer_dimension_mismatch(rng):
    am = _random_am(rng, dimension=16)
    with pytest.raises(DimensionMismatchError):
        infer_ideal(np.zeros(8, dtype=np.uint8), am)


def test_infer_empty_memory():
    am = AssociativeMemory([], np.zeros((0, 8), dtype=np.uint8))
    with pytest.raises(InvalidStateError):
        infer_ideal(np.zeros(8, dtype=np.uint8), am)


# ---------------------------------------------------------------------------
# Training


def test_train_bundles_each_class(rng):
    vs = {"a": [random_hypervector(32, rng) for _ in range(3)],
          "b": [random_hypervector(32, rng) for _ in range(5)]}
    am = train(vs)
    assert am.labels == ["a", "b"]
    from hdtcam.core import bundle

    assert np.array_equal(am.class_vector("a"), bundle(vs["a"]))
    assert np.array_equal(am.class_vector("b"), bundle(vs["b"]))


def test_train_rejects_empty():
    with pytest.raises(ValueError):
        train({})
    with pytest.raises(ValueError):
        train({"a": []})


def test_duplicate_labels_rejected():
    with pytest.raises(ValueError):
        AssociativeMemory(["x", "x"], np.zeros((2, 4), dtype=np.uint8))


# ---------------------------------------------------------------------------
# Persistence


def test_model_round_trip(tmp_path, rng):
    am = _random_am(rng, classes=5, dimension=777)
    path = tmp_path / "model.json"
    save_model(path, am, seed_metadata={"seed": 3})
    got, meta = load_model(path)
    assert got.labels == am.labels
    assert np.array_equal(got.class_matrix, am.class_matrix)
    assert meta == {"seed": 3}


def test_model_save_is_deterministic(tmp_path, rng):
    am = _random_am(rng)
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save_model(p1, am)
    save_model(p2, am)
    assert p1.read_bytes() == p2.read_bytes()


def test_model_version_check(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"version": 99, "dimension": 4, "classes": []}')
    with pytest.raises(FormatError, match="version"):
        load_model(path)
