"""Behavioral TCAM hardware model.

A block's match line discharges faster the more cells mismatch, so the
operation latency encodes the block's Hamming distance. Device variation
spreads the latency of each distance into a distribution; a reported
distance is whichever nominal latency's midpoint interval the sampled
latency falls into. Latencies shorter than the lowest midpoint saturate at
the precision P, latencies beyond the sensing timeout read as a full match.

Latency distributions are modeled as Gaussians per distance. The shipped
default tables are calibrated approximations: sigma values are fitted so
the resulting per-distance error envelopes match the published behavior
(max ~39 % for SRAM at 0.7 V with both 0.5 V and 1.0 V lower, max ~78 %
for Fe-FinFET with errors shrinking as voltage rises). Measured tables can
be loaded from JSON instead.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError

TECH_SRAM = "sram"
TECH_FEFET = "fefinfet"
TECHNOLOGIES = (TECH_SRAM, TECH_FEFET)

VOLTAGE_GRID = (0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
MAX_PRECISION = 7

DEFAULT_BLOCK_SIZES = (2, 3, 4, 5, 6, 7, 8, 10, 12, 15, 20, 25)

# Nominal one-miss latency in ns for a 15-bit block, per technology and voltage.
_T1_NS = {
    TECH_SRAM: {0.5: 0.160, 0.6: 0.145, 0.7: 0.130, 0.8: 0.118, 0.9: 0.108, 1.0: 0.100},
    TECH_FEFET: {0.5: 5.0, 0.6: 3.2, 0.7: 2.0, 0.8: 1.2, 0.9: 0.6, 1.0: 0.160},
}

# Calibration targets: max per-distance misread probability of the default
# tables at each voltage. SRAM is non-monotonic with its worst point at
# 0.7 V; Fe-FinFET improves steadily with voltage and stays above SRAM.
_MAX_ERROR_TARGET = {
    TECH_SRAM: {0.5: 0.30, 0.6: 0.345, 0.7: 0.39, 0.8: 0.20, 0.9: 0.10, 1.0: 0.004},
    TECH_FEFET: {0.5: 0.78, 0.6: 0.70, 0.7: 0.62, 0.8: 0.54, 0.9: 0.46, 1.0: 0.38},
}

# Energy anchors: a 15-bit SRAM block comparison costs 0.73 fJ at 0.5 V and
# 4.53 fJ at 1.0 V; other voltages follow a geometric interpolation between
# the anchors. Fe-FinFET is 19 % more expensive at 0.5 V and on par above.
_SRAM_E15_05V_FJ = 0.73
_SRAM_E15_10V_FJ = 4.53
_FEFET_ENERGY_FACTOR = {0.5: 1.19, 0.6: 1.10, 0.7: 1.0, 0.8: 1.0, 0.9: 1.0, 1.0: 1.0}
_PERIPHERY_WEIGHT_FJ = 6.0  # shared sense-amp share in the linear-in-N energy shape


@dataclass(frozen=True)
class CellFigures:
    """Figures of merit for a single TCAM cell."""

    transistors: int
    mismatch_energy_fj: float
    latency_ns: float
    relative_area: float

    def __post_init__(self):
        if min(self.transistors, self.mismatch_energy_fj, self.latency_ns, self.relative_area) <= 0:
            raise ValueError("cell figures must all be positive")


CELL_FIGURES = {
    TECH_SRAM: CellFigures(transistors=16, mismatch_energy_fj=1.15, latency_ns=0.099, relative_area=1.0),
    TECH_FEFET: CellFigures(transistors=2, mismatch_energy_fj=1.24, latency_ns=0.305, relative_area=0.13),
}


@dataclass(frozen=True)
class LatencyModel:
    """Gaussian latency distributions per Hamming distance for one block type.

    ``mu_ns[h-1]`` / ``sigma_ns[h-1]`` describe distance h in 1..P. Nominal
    latencies strictly decrease with distance; anything slower than
    ``match_timeout_ns`` reads as a full match (distance 0).
    """

    technology: str
    voltage: float
    block_size: int
    precision: int
    mu_ns: np.ndarray
    sigma_ns: np.ndarray
    match_timeout_ns: float

    def __post_init__(self):
        mu = np.asarray(self.mu_ns, dtype=float)
        sigma = np.asarray(self.sigma_ns, dtype=float)
        object.__setattr__(self, "mu_ns", mu)
        object.__setattr__(self, "sigma_ns", sigma)
        if not 1 <= self.precision <= self.block_size:
            raise ConfigError(
                f"precision must be in [1, {self.block_size}], got {self.precision}"
            )
        if mu.shape != (self.precision,) or sigma.shape != (self.precision,):
            raise ConfigError(
                f"mu/sigma must list exactly {self.precision} distances"
            )
        if np.any(np.diff(mu) >= 0):
            raise ConfigError("mu must be strictly decreasing in the Hamming distance")
        if np.any(sigma <= 0):
            raise ConfigError("sigma must be strictly positive")
        if self.match_timeout_ns <= mu[0]:
            raise ConfigError("match_timeout must exceed the one-miss latency")

    @property
    def thresholds_ns(self) -> np.ndarray:
        """Ascending decision boundaries: P-1 midpoints plus the match timeout.

        A latency t maps to the reported distance P - searchsorted(thresholds, t).
        """
        mids = (self.mu_ns[:-1] + self.mu_ns[1:]) / 2.0
        return np.concatenate([mids[::-1], [self.match_timeout_ns]])

    def with_precision(self, precision: int) -> "LatencyModel":
        """Restrict the decision rule to a lower precision (same physics)."""
        if precision == self.precision:
            return self
        if precision > self.precision:
            raise ConfigError(
                f"cannot raise precision beyond the table's {self.precision}"
            )
        return LatencyModel(
            self.technology,
            self.voltage,
            self.block_size,
            precision,
            self.mu_ns[:precision],
            self.sigma_ns[:precision],
            self.match_timeout_ns,
        )

    def sample_latencies(self, true_h: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Latency draws for an int array of true (clamped) distances.

        Distance 0 never discharges the match line, so its latency is the
        sensing timeout.
        """
        true_h = np.asarray(true_h)
        mu_full = np.concatenate([[self.match_timeout_ns], self.mu_ns])
        sigma_full = np.concatenate([[0.0], self.sigma_ns])
        t = rng.normal(mu_full[true_h], sigma_full[true_h])
        return t

    def report_from_latency(self, t: np.ndarray) -> np.ndarray:
        rep = self.precision - np.searchsorted(self.thresholds_ns, t)
        return rep

    def report_distances(self, true_h: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Sampled reported distances for an int array of true distances."""
        true_h = np.asarray(true_h)
        t = self.sample_latencies(true_h, rng)
        rep = self.report_from_latency(t)
        rep[true_h == 0] = 0
        return rep


def sample_reported_distance(true_h: int, lm: LatencyModel, rng: np.random.Generator) -> int:
    """Reported distance for a single block with true (clamped) distance."""
    if not 0 <= true_h <= lm.precision:
        raise ValueError(f"true distance must be in [0, {lm.precision}], got {true_h}")
    return int(lm.report_distances(np.array([true_h]), rng)[0])


def _norm_cdf(x):
    return 0.5 * (1.0 + np.vectorize(math.erf)(x / math.sqrt(2.0)))


def confusion_from_latency(lm: LatencyModel) -> np.ndarray:
    """Analytic (P+1)x(P+1) matrix of P(reported j | true i) under the midpoint rule."""
    p = lm.precision
    cm = np.zeros((p + 1, p + 1))
    cm[0, 0] = 1.0  # a perfect match never discharges the line
    thresholds = lm.thresholds_ns  # ascending, length P
    for i in range(1, p + 1):
        mu, sigma = lm.mu_ns[i - 1], lm.sigma_ns[i - 1]
        cdf = _norm_cdf((thresholds - mu) / sigma)
        edges = np.concatenate([[0.0], cdf, [1.0]])
        mass = np.diff(edges)  # index k: latency bin k, reported P-k (last bin: 0)
        for k in range(p + 1):
            cm[i, p - k if k < p else 0] += mass[k]
    return cm


def error_probability(cm: np.ndarray, h: int) -> float:
    """Probability that a true distance h is misreported: 1 - p[h][h]."""
    return float(1.0 - cm[h, h])


def max_error_probability(cm: np.ndarray) -> float:
    return float(np.max(1.0 - np.diag(cm)))


def replica_vote(true_h: int, lm: LatencyModel, replicas: int, rng: np.random.Generator) -> int:
    """Median of ``replicas`` independent reported distances (replicas odd)."""
    if replicas < 1 or replicas % 2 == 0:
        raise ValueError(f"replica count must be odd and >= 1, got {replicas}")
    draws = lm.report_distances(np.full(replicas, true_h), rng)
    return int(np.median(draws))


@dataclass(frozen=True)
class ReplicaModel:
    """Hardware model decorating a latency model with median-of-replicas voting."""

    latency: LatencyModel
    replicas: int

    def __post_init__(self):
        if self.replicas < 1 or self.replicas % 2 == 0:
            raise ValueError(f"replica count must be odd and >= 1, got {self.replicas}")

    def report_distances(self, true_h: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        true_h = np.asarray(true_h)
        if self.replicas == 1:
            return self.latency.report_distances(true_h, rng)
        draws = np.stack(
            [self.latency.report_distances(true_h, rng) for _ in range(self.replicas)]
        )
        return np.median(draws, axis=0).astype(np.int64)


@dataclass(frozen=True)
class RramShiftModel:
    """Deterministic +1-bit shift of every block distance, clamped at P.

    Models a reduced-voltage RRAM crossbar where every crossbar misreports
    by exactly one bit; because the shift applies to all blocks of all
    classes alike it cancels out of the argmin unless a block saturates.
    """

    precision: int

    def report_distances(self, true_h: np.ndarray, rng=None) -> np.ndarray:
        return np.minimum(np.asarray(true_h) + 1, self.precision)


def rram_shift_model(precision: int) -> RramShiftModel:
    return RramShiftModel(precision)


# ---------------------------------------------------------------------------
# Energy and area


def block_energy(energy_fj: np.ndarray, h: int) -> float:
    """Energy in fJ of one block comparison that reported distance h."""
    energy_fj = np.asarray(energy_fj, dtype=float)
    if not 0 <= h < energy_fj.shape[0]:
        raise ConfigError(f"no energy entry for distance {h}")
    return float(energy_fj[h])


def query_energy_pj(energy_fj: np.ndarray, reported: np.ndarray) -> float:
    """Total energy in pJ of one query: sum of e(h) over all class/block comparisons."""
    energy_fj = np.asarray(energy_fj, dtype=float)
    return float(energy_fj[np.asarray(reported)].sum() / 1000.0)


def default_block_energy_fj(technology: str, voltage: float, block_size: int) -> float:
    """Flat per-comparison energy of the default tables, in fJ."""
    _check_tech_voltage(technology, voltage)
    ratio = _SRAM_E15_10V_FJ / _SRAM_E15_05V_FJ
    scale = _SRAM_E15_05V_FJ * ratio ** ((voltage - 0.5) / 0.5)
    if technology == TECH_FEFET:
        scale *= _FEFET_ENERGY_FACTOR[round(voltage, 2)]
    ec = CELL_FIGURES[technology].mismatch_energy_fj
    shape = (_PERIPHERY_WEIGHT_FJ + block_size * ec) / (_PERIPHERY_WEIGHT_FJ + 15 * ec)
    return scale * shape


def area_capacity(budget: float, cf: CellFigures) -> int:
    """Largest dimension (cell count) that fits in an area budget."""
    if budget < 0:
        raise ValueError(f"area budget must be non-negative, got {budget}")
    return int(budget // cf.relative_area)


# ---------------------------------------------------------------------------
# Default table generation


def _check_tech_voltage(technology: str, voltage: float) -> None:
    if technology not in TECHNOLOGIES:
        raise ConfigError(f"unknown technology {technology!r}, expected one of {TECHNOLOGIES}")
    if round(voltage, 2) not in VOLTAGE_GRID:
        raise ConfigError(
            f"voltage {voltage} V not on the supported grid {VOLTAGE_GRID}; "
            "supply a measured table for other operating points"
        )


def _build_latency_model(technology, voltage, block_size, precision, spread) -> LatencyModel:
    t1 = _T1_NS[technology][round(voltage, 2)] * (0.7 + 0.3 * block_size / 15.0)
    if precision >= 2:
        # Geometric gap shrink: each extra miss roughly halves the latency gap.
        q = 0.5
        span = 0.5 * t1
        g1 = span * (1 - q) / (1 - q ** (precision - 1))
        gaps = g1 * q ** np.arange(precision - 1)
        mu = t1 - np.concatenate([[0.0], np.cumsum(gaps)])
        local = np.concatenate([gaps, [gaps[-1] * q]])
    else:
        mu = np.array([t1])
        local = np.array([0.25 * t1])
    # Wider spread at higher distances; ``spread`` is the calibrated scale.
    sigma = spread * local * (1.0 + 0.08 * np.arange(precision))
    timeout = t1 + max(4.0 * float(sigma[0]), 0.5 * float(local[0]))
    return LatencyModel(technology, round(voltage, 2), block_size, precision, mu, sigma, timeout)


@lru_cache(maxsize=None)
def _calibrated_spread(technology: str, voltage: float, block_size: int, precision: int) -> float:
    target = _MAX_ERROR_TARGET[technology][round(voltage, 2)]
    lo, hi = 1e-8, 50.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        lm = _build_latency_model(technology, voltage, block_size, precision, mid)
        if max_error_probability(confusion_from_latency(lm)) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class HwEntry:
    """One (technology, voltage, block size) operating point."""

    latency: LatencyModel
    energy_fj: np.ndarray  # e(h) for h in 0..P
    temperature_c: float | None = None


def default_entry(technology: str, voltage: float, block_size: int) -> HwEntry:
    """Calibrated default tables for one operating point (precision min(7, N))."""
    _check_tech_voltage(technology, voltage)
    if not 2 <= block_size <= 25:
        raise ConfigError(f"default tables cover block sizes 2..25, got {block_size}")
    precision = min(MAX_PRECISION, block_size)
    spread = _calibrated_spread(technology, round(voltage, 2), block_size, precision)
    lm = _build_latency_model(technology, voltage, block_size, precision, spread)
    e = default_block_energy_fj(technology, voltage, block_size)
    return HwEntry(latency=lm, energy_fj=np.full(precision + 1, e))


class Catalog:
    """Lookup of hardware entries keyed by (technology, voltage, block size)."""

    def __init__(self, entries=()):
        self._entries: dict[tuple, HwEntry] = {}
        for entry in entries:
            self.add(entry)

    @staticmethod
    def _key(technology, voltage, block_size):
        return (technology, round(float(voltage), 2), int(block_size))

    def add(self, entry: HwEntry) -> None:
        lm = entry.latency
        self._entries[self._key(lm.technology, lm.voltage, lm.block_size)] = entry

    def get(self, technology, voltage, block_size) -> HwEntry:
        key = self._key(technology, voltage, block_size)
        try:
            return self._entries[key]
        except KeyError:
            raise ConfigError(
                f"hardware catalog has no entry for technology={key[0]} "
                f"voltage_V={key[1]} block_size={key[2]}"
            ) from None

    def __contains__(self, key):
        return self._key(*key) in self._entries

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries.values())

    @property
    def keys(self):
        return sorted(self._entries.keys())


def default_catalog(block_sizes=DEFAULT_BLOCK_SIZES) -> Catalog:
    """The shipped approximate tables for both technologies on the voltage grid."""
    cat = Catalog()
    for tech in TECHNOLOGIES:
        for v in VOLTAGE_GRID:
            for n in block_sizes:
                cat.add(default_entry(tech, v, n))
    return cat


# ---------------------------------------------------------------------------
# Table file I/O


def _entry_to_doc(entry: HwEntry) -> dict:
    lm = entry.latency
    doc = {
        "technology": lm.technology,
        "voltage_V": lm.voltage,
        "block_size": lm.block_size,
        "precision": lm.precision,
        "mu_ns": [float(x) for x in lm.mu_ns],
        "sigma_ns": [float(x) for x in lm.sigma_ns],
        "match_timeout_ns": float(lm.match_timeout_ns),
        "energy_fJ": [float(x) for x in entry.energy_fj],
    }
    if entry.temperature_c is not None:
        doc["temperature_C"] = entry.temperature_c
    return doc


def _entry_from_doc(doc: dict, where: str) -> HwEntry:
    required = ["technology", "voltage_V", "block_size", "precision",
                "mu_ns", "sigma_ns", "match_timeout_ns", "energy_fJ"]
    for key in required:
        if key not in doc:
            raise ConfigError(f"{where}: missing key {key!r}")
    tech = doc["technology"]
    _check_tech_voltage(tech, float(doc["voltage_V"]))
    try:
        lm = LatencyModel(
            tech,
            round(float(doc["voltage_V"]), 2),
            int(doc["block_size"]),
            int(doc["precision"]),
            np.asarray(doc["mu_ns"], dtype=float),
            np.asarray(doc["sigma_ns"], dtype=float),
            float(doc["match_timeout_ns"]),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: malformed number ({exc})") from exc
    except ConfigError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    energy = doc["energy_fJ"]
    if np.isscalar(energy):
        energy_fj = np.full(lm.precision + 1, float(energy))
    else:
        energy_fj = np.asarray(energy, dtype=float)
        if energy_fj.shape != (lm.precision + 1,):
            raise ConfigError(
                f"{where}: energy_fJ must be a scalar or list of length precision+1"
            )
    if np.any(energy_fj <= 0):
        raise ConfigError(f"{where}: energy_fJ entries must be positive")
    temp = doc.get("temperature_C")
    return HwEntry(latency=lm, energy_fj=energy_fj,
                   temperature_c=None if temp is None else float(temp))


def load_hw_tables(path) -> Catalog:
    """Load and validate a JSON hardware table catalog."""
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    tables = doc["tables"] if isinstance(doc, dict) else doc
    if not isinstance(tables, list) or not tables:
        raise ConfigError(f"{path}: expected a non-empty array of table objects")
    cat = Catalog()
    for i, entry_doc in enumerate(tables):
        cat.add(_entry_from_doc(entry_doc, f"{path}: tables[{i}]"))
    return cat


def save_hw_tables(path, catalog: Catalog) -> None:
    docs = [_entry_to_doc(catalog.get(*key)) for key in catalog.keys]
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        json.dump({"tables": docs}, f, indent=1, sort_keys=True)
        f.write("\n")
    os.replace(tmp, path)
