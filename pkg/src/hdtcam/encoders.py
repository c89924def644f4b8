"""Dataset encoders: text n-grams, binarized images, IDX and CSV ingestion."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .core import BundleAccumulator, majority_from_counts, random_hypervector
from .errors import DegenerateInputError, DimensionMismatchError, FormatError

ALPHABET = "abcdefghijklmnopqrstuvwxyz "

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801


class ItemMemory:
    """Fixed random hypervectors for atomic symbols (letters or pixel positions).

    Entries are generated from a single seeded stream in symbol order, so the
    same (dimension, seed, symbols) always reproduces every entry bit-for-bit.
    """

    def __init__(self, dimension: int, symbols, seed: int):
        if dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {dimension}")
        self.dimension = dimension
        self.seed = seed
        self.symbols = list(symbols)
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        self._matrix = rng.integers(
            0, 2, size=(len(self.symbols), dimension), dtype=np.uint8
        )
        self._index = {s: i for i, s in enumerate(self.symbols)}

    @classmethod
    def for_alphabet(cls, dimension: int, seed: int) -> "ItemMemory":
        """26 letters plus space."""
        return cls(dimension, ALPHABET, seed)

    @classmethod
    def for_positions(cls, dimension: int, count: int, seed: int) -> "ItemMemory":
        """One entry per pixel index 0..count-1, row-major from top-left."""
        return cls(dimension, range(count), seed)

    def __len__(self):
        return len(self.symbols)

    def __contains__(self, symbol):
        return symbol in self._index

    def __getitem__(self, symbol) -> np.ndarray:
        try:
            return self._matrix[self._index[symbol]]
        except KeyError:
            raise ValueError(f"symbol {symbol!r} not present in item memory") from None

    @property
    def matrix(self) -> np.ndarray:
        """(num_symbols, dimension) uint8 view of all entries in symbol order."""
        return self._matrix


@dataclass
class LabeledSet:
    """Hypervectors paired with class labels, all sharing one dimension."""

    dimension: int
    items: list = field(default_factory=list)  # list of (np.ndarray, str)

    def add(self, hv: np.ndarray, label: str) -> None:
        if hv.shape[-1] != self.dimension:
            raise DimensionMismatchError(
                f"dimension mismatch: set {self.dimension} vs vector {hv.shape[-1]}"
            )
        if not label:
            raise ValueError("labels must be non-empty")
        self.items.append((hv, label))

    def __len__(self):
        return len(self.items)

    def by_label(self) -> dict:
        grouped: dict[str, list] = {}
        for hv, label in self.items:
            grouped.setdefault(label, []).append(hv)
        return grouped


def normalize_text(text: str) -> str:
    """Lowercase, drop anything outside a-z and space, collapse whitespace runs."""
    kept = []
    prev_space = True
    for ch in text.lower():
        if ch.isspace():
            ch = " "
        if ch in ALPHABET:
            if ch == " ":
                if prev_space:
                    continue
                prev_space = True
            else:
                prev_space = False
            kept.append(ch)
    out = "".join(kept)
    return out.rstrip(" ")


def encode_text_ngram(
    text: str,
    n: int,
    im: ItemMemory,
    tie_rng: np.random.Generator | None = None,
    *,
    pre_normalized: bool = False,
) -> np.ndarray:
    """Encode text as the majority bundle of all length-n sliding windows.

    Each window contributes the XOR of the j-th letter's vector rotated by j
    positions (j = 0..n-1). Default n for language recognition is 4.
    """
    if n < 1:
        raise ValueError(f"n-gram size must be >= 1, got {n}")
    if not pre_normalized:
        text = normalize_text(text)
    if len(text) < n:
        raise ValueError(
            f"text has only {len(text)} usable characters, need at least {n}"
        )
    try:
        idx = np.array([im._index[c] for c in text], dtype=np.intp)
    except KeyError as exc:
        raise ValueError(f"symbol {exc.args[0]!r} not present in item memory") from None

    d = im.dimension
    # Item matrix pre-rotated once per window offset; window j picks row idx[i+j].
    rotated = [np.roll(im.matrix, j, axis=1) for j in range(n)]
    num_windows = len(text) - n + 1
    counts = np.zeros(d, dtype=np.int64)
    chunk = max(1, 4_000_000 // d)
    for start in range(0, num_windows, chunk):
        stop = min(start + chunk, num_windows)
        window = rotated[0][idx[start:stop]]
        for j in range(1, n):
            window ^= rotated[j][idx[start + j : stop + j]]
        counts += window.sum(axis=0, dtype=np.int64)
    return majority_from_counts(counts, num_windows, tie_rng)


def encode_image(
    pixels: np.ndarray,
    threshold: int,
    position_im: ItemMemory,
    tie_rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Bundle the position hypervectors of all pixels at or above ``threshold``."""
    flat = np.asarray(pixels).ravel()
    if flat.size != len(position_im):
        raise DimensionMismatchError(
            f"image has {flat.size} pixels but item memory holds {len(position_im)} positions"
        )
    white = np.flatnonzero(flat >= threshold)
    if white.size == 0:
        raise DegenerateInputError("image has no pixels above threshold, nothing to bundle")
    counts = position_im.matrix[white].sum(axis=0, dtype=np.int64)
    return majority_from_counts(counts, int(white.size), tie_rng)


def encode_images(
    images: np.ndarray,
    threshold: int,
    position_im: ItemMemory,
    seed: int,
) -> np.ndarray:
    """Vectorized ``encode_image`` over a stack of images.

    Image i uses the i-th child of ``SeedSequence(seed)`` for tie-breaking,
    so single-image encoding with the matching child stream agrees exactly.
    """
    images = np.asarray(images)
    num = images.shape[0]
    flat = images.reshape(num, -1)
    if flat.shape[1] != len(position_im):
        raise DimensionMismatchError(
            f"images have {flat.shape[1]} pixels but item memory holds {len(position_im)} positions"
        )
    white = (flat >= threshold).astype(np.float32)
    totals = white.sum(axis=1).astype(np.int64)
    if np.any(totals == 0):
        bad = int(np.flatnonzero(totals == 0)[0])
        raise DegenerateInputError(f"image {bad} has no pixels above threshold")
    children = np.random.SeedSequence(seed).spawn(num)
    pos = position_im.matrix.astype(np.float32)
    out = np.empty((num, position_im.dimension), dtype=np.uint8)
    chunk = max(1, 50_000_000 // (4 * position_im.dimension))
    for start in range(0, num, chunk):
        stop = min(start + chunk, num)
        counts = np.rint(white[start:stop] @ pos).astype(np.int64)
        for i in range(start, stop):
            out[i] = majority_from_counts(
                counts[i - start], int(totals[i]), np.random.default_rng(children[i])
            )
    return out


def _read_exact(f, count: int, path: str):
    data = f.read(count)
    if len(data) != count:
        raise FormatError(
            f"{path}: truncated file, expected {count} more bytes",
            location=f"offset {f.tell() - len(data)}",
        )
    return data


def load_mnist(images_path, labels_path):
    """Parse IDX image/label files into (images, labels) numpy arrays.

    Images come back as (count, rows, cols) uint8, labels as (count,) uint8.
    """
    with open(images_path, "rb") as f:
        magic, count, rows, cols = struct.unpack(">IIII", _read_exact(f, 16, str(images_path)))
        if magic != IDX_IMAGE_MAGIC:
            raise FormatError(
                f"{images_path}: bad image magic 0x{magic:08x}, expected 0x{IDX_IMAGE_MAGIC:08x}",
                location="offset 0",
            )
        raw = _read_exact(f, count * rows * cols, str(images_path))
        if f.read(1):
            raise FormatError(f"{images_path}: trailing bytes after pixel data",
                              location=f"offset {16 + count * rows * cols}")
    images = np.frombuffer(raw, dtype=np.uint8).reshape(count, rows, cols)

    with open(labels_path, "rb") as f:
        magic, label_count = struct.unpack(">II", _read_exact(f, 8, str(labels_path)))
        if magic != IDX_LABEL_MAGIC:
            raise FormatError(
                f"{labels_path}: bad label magic 0x{magic:08x}, expected 0x{IDX_LABEL_MAGIC:08x}",
                location="offset 0",
            )
        labels = np.frombuffer(_read_exact(f, label_count, str(labels_path)), dtype=np.uint8)
    if label_count != count:
        raise FormatError(
            f"{labels_path}: {label_count} labels for {count} images",
            location="offset 4",
        )
    return images, labels


def save_mnist(images_path, labels_path, images: np.ndarray, labels: np.ndarray) -> None:
    """Write (count, rows, cols) images and labels in IDX format."""
    images = np.asarray(images, dtype=np.uint8)
    labels = np.asarray(labels, dtype=np.uint8)
    count, rows, cols = images.shape
    with open(images_path, "wb") as f:
        f.write(struct.pack(">IIII", IDX_IMAGE_MAGIC, count, rows, cols))
        f.write(images.tobytes())
    with open(labels_path, "wb") as f:
        f.write(struct.pack(">II", IDX_LABEL_MAGIC, labels.shape[0]))
        f.write(labels.tobytes())


def load_hypervector_csv(path) -> LabeledSet:
    """Read ``label,bitstring`` rows into a LabeledSet. Header row optional."""
    rows = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            if "," not in line:
                raise FormatError(f"{path}: expected 'label,bitstring'", location=f"row {lineno}")
            label, bits = line.split(",", 1)
            label, bits = label.strip(), bits.strip()
            if lineno == 1 and label.lower() == "label":
                continue
            if not bits or set(bits) - {"0", "1"}:
                raise FormatError(
                    f"{path}: bitstring must be non-empty over {{0,1}}", location=f"row {lineno}"
                )
            rows.append((lineno, label, bits))
    if not rows:
        raise ValueError(f"{path}: no hypervector rows found")
    dimension = len(rows[0][2])
    out = LabeledSet(dimension=dimension)
    for lineno, label, bits in rows:
        if len(bits) != dimension:
            raise FormatError(
                f"{path}: ragged bitstring length {len(bits)}, expected {dimension}",
                location=f"row {lineno}",
            )
        out.add((np.frombuffer(bits.encode(), dtype=np.uint8) - ord("0")).astype(np.uint8), label)
    return out


def save_hypervector_csv(path, labeled: LabeledSet) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("label,bits\n")
        for hv, label in labeled.items:
            f.write(f"{label},{''.join('1' if b else '0' for b in hv)}\n")


def binarize_and_average_class(vectors, tie_rng=None) -> np.ndarray:
    """Thresholded average of binary vectors; identical to majority bundling."""
    from .core import bundle

    return bundle(vectors, tie_rng)
