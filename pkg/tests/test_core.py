"""Hypervector algebra: algebraic laws as property tests plus edge cases."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hdtcam.core import (
    BundleAccumulator,
    as_hypervector,
    bind,
    bundle,
    hamming,
    majority_from_counts,
    normalized_hamming,
    permute,
    random_hypervector,
)
from hdtcam.errors import DimensionMismatchError, InvalidStateError


def hv_strategy(dimension):
    return st.lists(
        st.integers(0, 1), min_size=dimension, max_size=dimension
    ).map(lambda bits: np.array(bits, dtype=np.uint8))


dims = st.integers(min_value=1, max_value=64)


@st.composite
def hv_pair(draw):
    d = draw(dims)
    return draw(hv_strategy(d)), draw(hv_strategy(d))


@st.composite
def hv_triple(draw):
    d = draw(dims)
    return tuple(draw(hv_strategy(d)) for _ in range(3))


@given(hv_pair())
def test_bind_commutative(pair):
    a, b = pair
    assert np.array_equal(bind(a, b), bind(b, a))


@given(hv_triple())
def test_bind_associative(triple):
    a, b, c = triple
    assert np.array_equal(bind(bind(a, b), c), bind(a, bind(b, c)))


@given(hv_pair())
def test_bind_self_inverse(pair):
    a, b = pair
    assert np.array_equal(bind(bind(a, b), b), a)


@given(hv_strategy(16))
def test_bind_identity_is_zero_vector(a):
    zero = np.zeros(16, dtype=np.uint8)
    assert np.array_equal(bind(a, zero), a)


@given(hv_pair(), st.integers(0, 200))
def test_permute_distributes_over_bind(pair, k):
    a, b = pair
    assert np.array_equal(permute(bind(a, b), k), bind(permute(a, k), permute(b, k)))


@given(hv_strategy(12), st.integers(0, 5))
def test_permute_preserves_popcount_and_inverts(a, k):
    p = permute(a, k)
    assert p.sum() == a.sum()
    assert np.array_equal(permute(p, (12 - k % 12) % 12), a)


def test_permute_moves_bits_forward():
    v = np.array([1, 0, 0, 0], dtype=np.uint8)
    assert np.array_equal(permute(v, 1), [0, 1, 0, 0])
    assert np.array_equal(permute(v, 4), v)


def test_permute_rejects_negative_shift():
    with pytest.raises(ValueError):
        permute(np.zeros(4, dtype=np.uint8), -1)


@given(hv_pair())
def test_hamming_brute_force_oracle(pair):
    a, b = pair
    expected = sum(1 for x, y in zip(a.tolist(), b.tolist()) if x != y)
    assert hamming(a, b) == expected


@given(hv_pair())
def test_hamming_symmetric_and_zero_iff_equal(pair):
    a, b = pair
    assert hamming(a, b) == hamming(b, a)
    assert (hamming(a, b) == 0) == np.array_equal(a, b)


@given(hv_triple())
def test_hamming_triangle_inequality(triple):
    a, b, c = triple
    assert hamming(a, c) <= hamming(a, b) + hamming(b, c)


@given(hv_pair())
def test_normalized_hamming_in_unit_interval(pair):
    a, b = pair
    x = normalized_hamming(a, b)
    assert 0.0 <= x <= 1.0
    assert x == hamming(a, b) / a.shape[-1]


def test_hamming_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        hamming(np.zeros(4, dtype=np.uint8), np.zeros(5, dtype=np.uint8))


@settings(max_examples=40)
@given(st.integers(1, 9).filter(lambda n: n % 2 == 1), st.integers(0, 1000))
def test_bundle_streaming_equals_batch(count, seed):
    rng = np.random.default_rng(seed)
    vectors = [random_hypervector(32, rng) for _ in range(count)]
    acc = BundleAccumulator(32)
    for v in vectors:
        acc.add(v)
    assert np.array_equal(acc.finalize(), bundle(vectors))


def test_bundle_even_count_tie_break_reproducible():
    rng = np.random.default_rng(7)
    vectors = [random_hypervector(64, rng) for _ in range(4)]
    out1 = bundle(vectors, np.random.default_rng(99))
    out2 = bundle(vectors, np.random.default_rng(99))
    assert np.array_equal(out1, out2)


def test_bundle_even_count_without_tie_rng_raises():
    a = np.array([0, 1], dtype=np.uint8)
    b = np.array([1, 0], dtype=np.uint8)
    with pytest.raises(ValueError, match="tie_rng"):
        bundle([a, b])


@given(st.integers(1, 7).filter(lambda n: n % 2 == 1))
def test_bundle_of_identical_vectors_is_identity(count):
    v = np.array([1, 0, 1, 1, 0], dtype=np.uint8)
    assert np.array_equal(bundle([v] * count), v)


def test_bundle_majority_oracle():
    vs = [
        np.array([1, 1, 0, 0], dtype=np.uint8),
        np.array([1, 0, 1, 0], dtype=np.uint8),
        np.array([1, 1, 1, 0], dtype=np.uint8),
    ]
    assert np.array_equal(bundle(vs), [1, 1, 1, 0])


def test_add_counts_matches_individual_adds(rng):
    vectors = [random_hypervector(16, rng) for _ in range(5)]
    a = BundleAccumulator(16)
    for v in vectors:
        a.add(v)
    b = BundleAccumulator(16)
    b.add_counts(np.sum(vectors, axis=0), len(vectors))
    assert np.array_equal(a.finalize(), b.finalize())


def test_empty_accumulator_raises():
    with pytest.raises(InvalidStateError):
        BundleAccumulator(8).finalize()


def test_bundle_empty_list_raises():
    with pytest.raises(ValueError):
        bundle([])


def test_majority_from_counts_threshold():
    counts = np.array([0, 1, 2, 3])
    assert np.array_equal(majority_from_counts(counts, 3), [0, 0, 1, 1])


def test_random_hypervector_deterministic_and_balanced():
    a = random_hypervector(10000, np.random.default_rng(3))
    b = random_hypervector(10000, np.random.default_rng(3))
    assert np.array_equal(a, b)
    assert a.dtype == np.uint8
    assert 0.45 < a.mean() < 0.55


def test_as_hypervector_validation():
    assert np.array_equal(as_hypervector([1, 0, 1]), [1, 0, 1])
    with pytest.raises(ValueError):
        as_hypervector([0, 2])
    with pytest.raises(ValueError):
        as_hypervector([])
    with pytest.raises(ValueError):
        as_hypervector([[0, 1], [1, 0]])
