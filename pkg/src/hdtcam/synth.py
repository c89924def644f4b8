"""Deterministic synthetic benchmark data.

The language benchmark draws text from per-language first-order Markov
chains. Languages come in pairs: every pair shares a common parent chain,
so pair members are mutually confusable while different pairs stay far
apart, which yields a realistic mix of easy and borderline queries.
Query lengths are log-uniform, so short, hard queries are well
represented. The image benchmark perturbs per-class pixel prototypes with
flip noise in MNIST geometry. Both are fully determined by their seeds,
which keeps every experiment replayable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import am as am_mod
from .encoders import ALPHABET, ItemMemory, encode_images, encode_text_ngram


def _paired_markov_chains(num_languages, base_divergence, pair_divergence, rng):
    """Cumulative transition matrices; languages 2i and 2i+1 share a parent."""
    k = len(ALPHABET)
    base = rng.dirichlet(np.full(k, 0.3), size=k)
    chains = []
    for _ in range((num_languages + 1) // 2):
        parent = base * np.exp(base_divergence * rng.standard_normal((k, k)))
        parent /= parent.sum(axis=1, keepdims=True)
        for _ in range(2):
            t = parent * np.exp(pair_divergence * rng.standard_normal((k, k)))
            t /= t.sum(axis=1, keepdims=True)
            chains.append(np.cumsum(t, axis=1))
    return chains[:num_languages]


def _sample_text(cum_chain: np.ndarray, length: int, rng: np.random.Generator) -> str:
    u = rng.random(length)
    out = np.empty(length, dtype=np.intp)
    state = rng.integers(0, cum_chain.shape[0])
    for i in range(length):
        state = min(int(np.searchsorted(cum_chain[state], u[i])), cum_chain.shape[0] - 1)
        out[i] = state
    return "".join(ALPHABET[i] for i in out)


@dataclass
class LanguageBenchmark:
    train_texts: dict  # label -> str
    queries: list      # list of (text, label)
    seed: int


def make_language_benchmark(
    num_languages: int = 8,
    train_chars: int = 100_000,
    queries_per_language: int = 200,
    query_chars: tuple = (20, 120),
    base_divergence: float = 2.0,
    pair_divergence: float = 0.9,
    seed: int = 0,
) -> LanguageBenchmark:
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x1a]))
    chains = _paired_markov_chains(num_languages, base_divergence, pair_divergence, rng)
    labels = [f"lang{i:02d}" for i in range(num_languages)]
    train = {
        label: _sample_text(chains[i], train_chars, rng)
        for i, label in enumerate(labels)
    }
    queries = []
    lo, hi = query_chars
    for i, label in enumerate(labels):
        lengths = np.exp(
            rng.uniform(np.log(lo), np.log(hi), size=queries_per_language)
        ).astype(int)
        for length in lengths:
            queries.append((_sample_text(chains[i], int(length), rng), label))
    return LanguageBenchmark(train_texts=train, queries=queries, seed=seed)


def encode_language_benchmark(
    bench: LanguageBenchmark,
    dimension: int,
    ngram: int = 4,
    item_seed: int = 42,
    tie_seed: int = 7,
):
    """Train an associative memory and encode all queries.

    Returns (AssociativeMemory, query matrix, query labels).
    """
    im = ItemMemory.for_alphabet(dimension, item_seed)
    tie = np.random.default_rng(np.random.SeedSequence([tie_seed, dimension]))
    classes = {
        label: [encode_text_ngram(text, ngram, im, tie)]
        for label, text in bench.train_texts.items()
    }
    memory = am_mod.train(classes, tie)
    queries = np.stack(
        [encode_text_ngram(text, ngram, im, tie) for text, _ in bench.queries]
    )
    labels = [label for _, label in bench.queries]
    return memory, queries, labels


@dataclass
class ImageBenchmark:
    train_images: np.ndarray
    train_labels: np.ndarray
    test_images: np.ndarray
    test_labels: np.ndarray
    seed: int


def make_image_benchmark(
    num_classes: int = 10,
    train_per_class: int = 500,
    test_per_class: int = 100,
    side: int = 28,
    white_fraction: float = 0.25,
    flip_prob: float = 0.06,
    seed: int = 0,
) -> ImageBenchmark:
    """Grayscale benchmark in MNIST geometry: noisy copies of class prototypes."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x1d]))
    protos = rng.random((num_classes, side, side)) < white_fraction

    def draw(per_class):
        images = np.empty((num_classes * per_class, side, side), dtype=np.uint8)
        labels = np.empty(num_classes * per_class, dtype=np.uint8)
        i = 0
        for c in range(num_classes):
            flips = rng.random((per_class, side, side)) < flip_prob
            bits = np.logical_xor(protos[c][None, :, :], flips)
            images[i:i + per_class] = np.where(bits, 255, 0).astype(np.uint8)
            labels[i:i + per_class] = c
            i += per_class
        return images, labels

    train_images, train_labels = draw(train_per_class)
    test_images, test_labels = draw(test_per_class)
    return ImageBenchmark(train_images, train_labels, test_images, test_labels, seed)


def encode_image_benchmark(
    bench: ImageBenchmark,
    dimension: int,
    threshold: int = 128,
    item_seed: int = 43,
    tie_seed: int = 8,
):
    """Train an associative memory on the image benchmark and encode test queries."""
    side = bench.train_images.shape[1]
    im = ItemMemory.for_positions(dimension, side * side, item_seed)
    train_hv = encode_images(bench.train_images, threshold, im, seed=tie_seed)
    tie = np.random.default_rng(np.random.SeedSequence([tie_seed, dimension]))
    classes = {}
    for c in np.unique(bench.train_labels):
        classes[str(int(c))] = [hv for hv, l in zip(train_hv, bench.train_labels) if l == c]
    memory = am_mod.train(classes, tie)
    queries = encode_images(bench.test_images, threshold, im, seed=tie_seed + 1)
    labels = [str(int(c)) for c in bench.test_labels]
    return memory, queries, labels
