"""Associative memory: class storage, ideal and blocked inference, persistence.

Blocked inference is the software view of a TCAM array: the hypervector is
partitioned into contiguous blocks of N cells, each block reports its local
Hamming distance clamped at the precision P, and the per-class total is the
sum of the reported block distances.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .core import bundle
from .errors import DimensionMismatchError, FormatError, InvalidStateError

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class BlockConfig:
    """Partition of a D-bit vector into TCAM blocks of size N with precision P.

    The final block may be smaller when N does not divide D; its effective
    precision is min(P, its size).
    """

    dimension: int
    block_size: int
    precision: int

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        if self.block_size < 2:
            raise ValueError(f"block size must be >= 2, got {self.block_size}")
        if not 1 <= self.precision <= self.block_size:
            raise ValueError(
                f"precision must be in [1, {self.block_size}], got {self.precision}"
            )

    @property
    def num_blocks(self) -> int:
        return -(-self.dimension // self.block_size)

    @property
    def block_starts(self) -> np.ndarray:
        return np.arange(0, self.dimension, self.block_size)

    @property
    def block_sizes(self) -> np.ndarray:
        sizes = np.full(self.num_blocks, self.block_size, dtype=np.int64)
        sizes[-1] = self.dimension - (self.num_blocks - 1) * self.block_size
        return sizes

    @property
    def block_caps(self) -> np.ndarray:
        """Effective precision per block: min(P, block size)."""
        return np.minimum(self.precision, self.block_sizes)


class AssociativeMemory:
    """Ordered store of labeled class hypervectors."""

    def __init__(self, labels, class_matrix: np.ndarray):
        labels = list(labels)
        class_matrix = np.asarray(class_matrix, dtype=np.uint8)
        if len(labels) != class_matrix.shape[0]:
            raise ValueError("one label per class vector required")
        if len(set(labels)) != len(labels):
            raise ValueError("class labels must be unique")
        self.labels = labels
        self.class_matrix = class_matrix

    @property
    def dimension(self) -> int:
        return self.class_matrix.shape[1]

    def __len__(self):
        return len(self.labels)

    def class_vector(self, label: str) -> np.ndarray:
        return self.class_matrix[self.labels.index(label)]


def train(labeled_sets: dict, tie_rng: np.random.Generator | None = None) -> AssociativeMemory:
    """One-shot training: bundle each class's hypervectors into a class vector."""
    if not labeled_sets:
        raise ValueError("no classes to train on")
    labels = list(labeled_sets.keys())
    rows = []
    dimension = None
    for label in labels:
        vectors = list(labeled_sets[label])
        if not vectors:
            raise ValueError(f"class {label!r} has no training vectors")
        if dimension is None:
            dimension = vectors[0].shape[-1]
        rows.append(bundle(vectors, tie_rng))
    return AssociativeMemory(labels, np.stack(rows))


def infer_ideal(query: np.ndarray, am: AssociativeMemory):
    """Full-Hamming argmin; ties broken by earliest stored class."""
    if len(am) == 0:
        raise InvalidStateError("associative memory holds no classes")
    if query.shape[-1] != am.dimension:
        raise DimensionMismatchError(
            f"dimension mismatch: query {query.shape[-1]} vs memory {am.dimension}"
        )
    dists = np.count_nonzero(am.class_matrix != query, axis=1)
    best = int(np.argmin(dists))
    return am.labels[best], int(dists[best])


def blocked_distances_true(query: np.ndarray, class_vector: np.ndarray, cfg: BlockConfig) -> np.ndarray:
    """Per-block Hamming distances clamped at each block's effective precision."""
    if query.shape[-1] != cfg.dimension or class_vector.shape[-1] != cfg.dimension:
        raise DimensionMismatchError(
            f"operands must have dimension {cfg.dimension}"
        )
    diff = (query != class_vector).astype(np.int64)
    per_block = np.add.reduceat(diff, cfg.block_starts)
    return np.minimum(per_block, cfg.block_caps)


def blocked_distance_matrix(queries: np.ndarray, am: AssociativeMemory, cfg: BlockConfig) -> np.ndarray:
    """Clamped block distances for a batch: shape (queries, classes, blocks)."""
    queries = np.atleast_2d(queries)
    if queries.shape[1] != am.dimension or cfg.dimension != am.dimension:
        raise DimensionMismatchError("queries, memory and block config must agree on dimension")
    diff = queries[:, None, :] != am.class_matrix[None, :, :]
    per_block = np.add.reduceat(diff.astype(np.int64), cfg.block_starts, axis=2)
    return np.minimum(per_block, cfg.block_caps)


def infer_blocked(
    query: np.ndarray,
    am: AssociativeMemory,
    cfg: BlockConfig,
    hw=None,
    rng: np.random.Generator | None = None,
):
    """Blocked inference; with a hardware model, block reports are sampled.

    ``hw`` is anything with ``report_distances(true, rng)`` mapping an int
    array of clamped true distances to reported distances (see hwmodel).
    """
    if len(am) == 0:
        raise InvalidStateError("associative memory holds no classes")
    reported = blocked_distance_matrix(query, am, cfg)[0]
    if hw is not None:
        reported = hw.report_distances(reported, rng)
    totals = reported.sum(axis=1)
    best = int(np.argmin(totals))
    return am.labels[best], int(totals[best])


def _bits_to_hex(bits: np.ndarray) -> str:
    return np.packbits(bits, bitorder="little").tobytes().hex()


def _hex_to_bits(hexstr: str, dimension: int) -> np.ndarray:
    raw = np.frombuffer(bytes.fromhex(hexstr), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:dimension]


def save_model(path, am: AssociativeMemory, seed_metadata: dict | None = None) -> None:
    """Write a versioned JSON model container; bits hex-packed little-index-first."""
    doc = {
        "version": MODEL_FORMAT_VERSION,
        "dimension": am.dimension,
        "seed_metadata": seed_metadata or {},
        "classes": [
            {"label": label, "bits": _bits_to_hex(row)}
            for label, row in zip(am.labels, am.class_matrix)
        ],
    }
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=1, sort_keys=True)
        f.write("\n")
    os.replace(tmp, path)


def load_model(path):
    """Load a model container; returns (AssociativeMemory, seed_metadata)."""
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    if doc.get("version") != MODEL_FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported model version {doc.get('version')!r}")
    dimension = int(doc["dimension"])
    labels, rows = [], []
    for entry in doc["classes"]:
        labels.append(entry["label"])
        rows.append(_hex_to_bits(entry["bits"], dimension))
    return AssociativeMemory(labels, np.stack(rows)), doc.get("seed_metadata", {})
