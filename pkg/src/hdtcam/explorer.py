"""Design-space sweep, noisy accuracy evaluation, and Pareto-front extraction."""

from __future__ import annotations

import hashlib
import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .am import AssociativeMemory, BlockConfig
from .errors import ConfigError, DimensionMismatchError, NoFeasiblePointError
from .hwmodel import Catalog, HwEntry, LatencyModel

NO_LOSS_EPSILON = 5e-4  # noise floor of HDC accuracy fluctuations

_CHUNK_ELEMS = 4_000_000  # bound on queries*classes*blocks per sampling chunk

CSV_COLUMNS = (
    "technology,voltage_V,block_size,precision,dimension,replicas,trials,"
    "accuracy_mean,accuracy_std,accuracy_loss,energy_pJ,latency_ns,pareto"
)


@dataclass(frozen=True)
class SweepSpace:
    """Cross product of swept configuration axes."""

    technologies: tuple = ("sram",)
    voltages: tuple = (0.5, 0.7, 1.0)
    block_sizes: tuple = (7, 15)
    precisions: tuple = (7,)
    dimensions: tuple = (10000,)
    replicas: tuple = (1,)
    trials: int = 10
    seed: int = 0

    def __post_init__(self):
        for name in ("technologies", "voltages", "block_sizes", "precisions",
                     "dimensions", "replicas"):
            value = tuple(getattr(self, name))
            object.__setattr__(self, name, value)
            if not value:
                raise ValueError(f"sweep axis {name!r} must be non-empty")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if any(r < 1 or r % 2 == 0 for r in self.replicas):
            raise ValueError("replica counts must be odd")
        if not any(p <= n for n in self.block_sizes for p in self.precisions):
            raise ValueError("no (block_size, precision) pair satisfies P <= N")

    def configurations(self):
        """Valid configuration tuples in canonical order (P > N pairs skipped)."""
        for tech, v, n, p, d, r in itertools.product(
            self.technologies, self.voltages, self.block_sizes,
            self.precisions, self.dimensions, self.replicas,
        ):
            if p <= n:
                yield (tech, float(v), int(n), int(p), int(d), int(r))


@dataclass
class DesignPoint:
    """One swept configuration with its measured metrics."""

    technology: str
    voltage: float
    block_size: int
    precision: int
    dimension: int
    replicas: int
    trials: int
    accuracy_mean: float
    accuracy_std: float
    accuracy_loss: float
    energy_pj: float
    latency_ns: float
    pareto: bool = False

    @property
    def config_key(self):
        return (self.technology, round(self.voltage, 2), self.block_size,
                self.precision, self.dimension, self.replicas)


def derive_point_seed(master_seed: int, config_key) -> int:
    """Stable per-configuration seed, independent of sweep iteration order."""
    text = f"{master_seed}|" + "|".join(str(x) for x in config_key)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


def ideal_accuracy(am: AssociativeMemory, queries: np.ndarray, labels) -> float:
    """Noise-free full-Hamming accuracy; the loss baseline at this dimension."""
    preds = predict_ideal(am, queries)
    return float(np.mean([p == t for p, t in zip(preds, labels)]))


def predict_ideal(am: AssociativeMemory, queries: np.ndarray):
    queries = np.atleast_2d(queries)
    preds = []
    chunk = max(1, _CHUNK_ELEMS // (len(am) * am.dimension))
    for start in range(0, queries.shape[0], chunk):
        block = queries[start:start + chunk]
        dists = (block[:, None, :] != am.class_matrix[None, :, :]).sum(axis=2)
        for row in np.argmin(dists, axis=1):
            preds.append(am.labels[int(row)])
    return preds


def _true_block_distances(am, queries, cfg) -> np.ndarray:
    """Clamped per-block distances, shape (Q, C, B), int16."""
    starts = cfg.block_starts
    caps = cfg.block_caps
    out = np.empty((queries.shape[0], len(am), cfg.num_blocks), dtype=np.int16)
    chunk = max(1, _CHUNK_ELEMS // (len(am) * cfg.dimension))
    for s in range(0, queries.shape[0], chunk):
        block = queries[s:s + chunk]
        diff = (block[:, None, :] != am.class_matrix[None, :, :]).astype(np.int16)
        per_block = np.add.reduceat(diff, starts, axis=2)
        out[s:s + chunk] = np.minimum(per_block, caps.astype(np.int16))
    return out


def _sample_reports(lm: LatencyModel, true_h: np.ndarray, replicas: int,
                    rng: np.random.Generator):
    """Sampled reported distances plus per-query worst-case latency.

    Blocks, classes and replica arrays all operate in parallel, so the query
    latency is the max sampled latency across all of them.
    """
    mu_full = np.concatenate([[lm.match_timeout_ns], lm.mu_ns])
    sigma_full = np.concatenate([[0.0], lm.sigma_ns])
    thresholds = lm.thresholds_ns
    p = lm.precision

    def one_draw():
        t = rng.normal(mu_full[true_h], sigma_full[true_h])
        rep = (p - np.searchsorted(thresholds, t)).astype(np.int16)
        rep[true_h == 0] = 0
        return t, rep

    if replicas == 1:
        t, rep = one_draw()
        latency = t.reshape(t.shape[0], -1).max(axis=1)
        return rep, latency
    draws = []
    latency = np.zeros(true_h.shape[0])
    for _ in range(replicas):
        t, rep = one_draw()
        draws.append(rep)
        latency = np.maximum(latency, t.reshape(t.shape[0], -1).max(axis=1))
    reported = np.median(np.stack(draws), axis=0).astype(np.int16)
    return reported, latency


def evaluate(
    am: AssociativeMemory,
    queries: np.ndarray,
    labels,
    cfg: BlockConfig,
    hw: HwEntry | None = None,
    replicas: int = 1,
    trials: int = 10,
    seed: int = 0,
    baseline_accuracy: float | None = None,
    technology: str = "",
    voltage: float = 0.0,
) -> DesignPoint:
    """Run blocked inference over the test set ``trials`` times and aggregate."""
    queries = np.atleast_2d(np.asarray(queries, dtype=np.uint8))
    if queries.shape[1] != am.dimension or cfg.dimension != am.dimension:
        raise DimensionMismatchError(
            "associative memory, queries and block config must agree on dimension"
        )
    labels = list(labels)
    label_idx = np.array([am.labels.index(l) for l in labels])
    true = _true_block_distances(am, queries, cfg)

    lm = None
    shift_model = None
    if hw is not None:
        if isinstance(hw, HwEntry):
            lm = hw.latency
        elif isinstance(hw, LatencyModel):
            lm = hw
        else:
            shift_model = hw  # deterministic report-mapping model (e.g. RRAM shift)
        if lm is not None:
            if cfg.precision > lm.precision:
                raise ConfigError(
                    f"block config precision {cfg.precision} exceeds the "
                    f"hardware table's maximum of {lm.precision}"
                )
            lm = lm.with_precision(cfg.precision)

    num_q = queries.shape[0]
    seeds = np.random.SeedSequence(seed).spawn(trials)
    accuracies = []
    energies = []
    latencies = []
    chunk = max(1, _CHUNK_ELEMS // max(1, len(am) * cfg.num_blocks))
    energy_fj = hw.energy_fj if isinstance(hw, HwEntry) else None
    for trial in range(trials):
        rng = np.random.default_rng(seeds[trial])
        correct = 0
        energy_pj = 0.0
        latency_sum = 0.0
        for s in range(0, num_q, chunk):
            t_chunk = true[s:s + chunk]
            if lm is not None:
                reported, lat = _sample_reports(lm, t_chunk, replicas, rng)
                latency_sum += float(lat.sum())
            elif shift_model is not None:
                reported = shift_model.report_distances(t_chunk)
            else:
                reported = t_chunk
            totals = reported.sum(axis=2, dtype=np.int64)
            preds = np.argmin(totals, axis=1)
            correct += int(np.count_nonzero(preds == label_idx[s:s + chunk]))
            if energy_fj is not None:
                energy_pj += float(energy_fj[reported].sum() / 1000.0)
        accuracies.append(correct / num_q)
        energies.append(energy_pj / num_q)
        latencies.append(latency_sum / num_q)
        if lm is None and shift_model is None:
            # Deterministic reports: further trials would repeat identically.
            accuracies = accuracies * trials
            energies = energies * trials
            latencies = latencies * trials
            break

    acc_mean = float(np.mean(accuracies))
    acc_std = float(np.std(accuracies))
    if baseline_accuracy is None:
        baseline_accuracy = ideal_accuracy(am, queries, labels)
    return DesignPoint(
        technology=technology,
        voltage=voltage,
        block_size=cfg.block_size,
        precision=cfg.precision,
        dimension=cfg.dimension,
        replicas=replicas,
        trials=trials,
        accuracy_mean=acc_mean,
        accuracy_std=acc_std,
        accuracy_loss=float(baseline_accuracy - acc_mean),
        energy_pj=float(np.mean(energies)),
        latency_ns=float(np.mean(latencies)),
    )


def sweep(space: SweepSpace, datasets: dict, catalog: Catalog, jobs: int = 1,
          skip_keys=(), progress=None) -> list:
    """Evaluate the full configuration cross product.

    ``datasets`` maps dimension -> (AssociativeMemory, queries, labels).
    Fails fast if the catalog misses any requested operating point. Results
    are deterministic for a fixed seed and independent of evaluation order.
    """
    configs = list(space.configurations())
    for tech, v, n, _p, d, _r in configs:
        if d not in datasets:
            raise ConfigError(f"no dataset supplied for dimension {d}")
        catalog.get(tech, v, n)  # raises ConfigError on a gap
    baselines = {
        d: ideal_accuracy(am, q, l) for d, (am, q, l) in datasets.items()
        if any(c[4] == d for c in configs)
    }
    skip = set(skip_keys)
    todo = [c for c in configs if c not in skip]

    def run(config):
        tech, v, n, p, d, r = config
        am, queries, labels = datasets[d]
        point = evaluate(
            am, queries, labels,
            BlockConfig(dimension=d, block_size=n, precision=p),
            hw=catalog.get(tech, v, n),
            replicas=r,
            trials=space.trials,
            seed=derive_point_seed(space.seed, config),
            baseline_accuracy=baselines[d],
            technology=tech,
            voltage=v,
        )
        if progress is not None:
            progress(point)
        return point

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            points = list(pool.map(run, todo))
    else:
        points = [run(c) for c in todo]
    return points


def pareto_front(points) -> list:
    """Non-dominated subset under minimize(energy, accuracy_loss).

    Equal-coordinate duplicates are all retained.
    """
    points = list(points)
    if not points:
        raise ValueError("cannot take the Pareto front of an empty point set")
    order = sorted(range(len(points)),
                   key=lambda i: (points[i].energy_pj, points[i].accuracy_loss))
    front = []
    best_cheaper = float("inf")  # min loss among strictly cheaper points
    i = 0
    while i < len(order):
        j = i
        energy = points[order[i]].energy_pj
        while j < len(order) and points[order[j]].energy_pj == energy:
            j += 1
        group = [points[order[k]] for k in range(i, j)]
        group_min = min(p.accuracy_loss for p in group)
        if group_min < best_cheaper:
            front.extend(p for p in group if p.accuracy_loss == group_min)
        best_cheaper = min(best_cheaper, group_min)
        i = j
    return front


def flag_pareto(points) -> list:
    """Return points with their ``pareto`` flag set from the front membership."""
    front_ids = {id(p) for p in pareto_front(points)}
    return [replace(p, pareto=id(p) in front_ids) for p in points]


def energy_savings(points, acceptable_loss: float, eps: float = NO_LOSS_EPSILON) -> float:
    """Energy ratio of voltage overscaling: cheapest ~lossless point at the
    nominal (highest) voltage vs the cheapest point inside the loss budget.

    Anchoring at the nominal voltage keeps the reference stable: reduced
    voltage points whose measured loss fluctuates around zero never count
    as the lossless baseline they are being compared against.
    """
    points = list(points)
    if not points:
        raise ValueError("empty point set")
    within_budget = [p for p in points if p.accuracy_loss <= acceptable_loss]
    if not within_budget:
        raise NoFeasiblePointError(
            f"no design point has accuracy loss <= {acceptable_loss}"
        )
    nominal = max(p.voltage for p in points)
    lossless = [p for p in points
                if p.voltage == nominal and p.accuracy_loss <= eps]
    if not lossless:
        raise NoFeasiblePointError(
            f"no design point at the nominal voltage {nominal} V has accuracy "
            f"loss <= the {eps} no-loss threshold"
        )
    anchor = min(p.energy_pj for p in lossless)
    budget = min(p.energy_pj for p in within_budget)
    return anchor / budget


def precision_sweep_report(am, queries, labels, block_sizes, precisions,
                           baseline_accuracy=None):
    """Noise-free accuracy loss per (N, P) pair vs the full-Hamming baseline.

    Returns a list of (block_size, precision, accuracy, loss) rows.
    """
    queries = np.atleast_2d(np.asarray(queries, dtype=np.uint8))
    labels = list(labels)
    if baseline_accuracy is None:
        baseline_accuracy = ideal_accuracy(am, queries, labels)
    label_idx = np.array([am.labels.index(l) for l in labels])
    rows = []
    for n in block_sizes:
        cfg_full = BlockConfig(dimension=am.dimension, block_size=n, precision=n)
        unclamped = _true_block_distances(am, queries, cfg_full)
        for p in precisions:
            if p > n:
                continue
            caps = np.minimum(p, cfg_full.block_sizes).astype(np.int16)
            totals = np.minimum(unclamped, caps).sum(axis=2, dtype=np.int64)
            preds = np.argmin(totals, axis=1)
            acc = float(np.mean(preds == label_idx))
            rows.append((int(n), int(p), acc, float(baseline_accuracy - acc)))
    return rows


# ---------------------------------------------------------------------------
# Result serialization


def _point_row(p: DesignPoint) -> str:
    return (
        f"{p.technology},{p.voltage:g},{p.block_size},{p.precision},{p.dimension},"
        f"{p.replicas},{p.trials},{p.accuracy_mean:.6f},{p.accuracy_std:.6f},"
        f"{p.accuracy_loss:.6f},{p.energy_pj:.6f},{p.latency_ns:.6f},{int(p.pareto)}"
    )


def write_results_csv(points, f, metadata_lines=()) -> None:
    for line in metadata_lines:
        f.write(f"# {line}\n")
    f.write(CSV_COLUMNS + "\n")
    for p in sorted(points, key=lambda p: p.config_key):
        f.write(_point_row(p) + "\n")


def point_to_dict(p: DesignPoint) -> dict:
    return {
        "technology": p.technology,
        "voltage_V": p.voltage,
        "block_size": p.block_size,
        "precision": p.precision,
        "dimension": p.dimension,
        "replicas": p.replicas,
        "trials": p.trials,
        "accuracy_mean": p.accuracy_mean,
        "accuracy_std": p.accuracy_std,
        "accuracy_loss": p.accuracy_loss,
        "energy_pJ": p.energy_pj,
        "latency_ns": p.latency_ns,
        "pareto": bool(p.pareto),
    }


def point_from_dict(doc: dict) -> DesignPoint:
    return DesignPoint(
        technology=doc["technology"],
        voltage=float(doc["voltage_V"]),
        block_size=int(doc["block_size"]),
        precision=int(doc["precision"]),
        dimension=int(doc["dimension"]),
        replicas=int(doc["replicas"]),
        trials=int(doc["trials"]),
        accuracy_mean=float(doc["accuracy_mean"]),
        accuracy_std=float(doc["accuracy_std"]),
        accuracy_loss=float(doc["accuracy_loss"]),
        energy_pj=float(doc["energy_pJ"]),
        latency_ns=float(doc["latency_ns"]),
        pareto=bool(doc.get("pareto", False)),
    )


def write_results_json(points, f, metadata=None) -> None:
    doc = {
        "metadata": metadata or {},
        "points": [point_to_dict(p) for p in sorted(points, key=lambda p: p.config_key)],
    }
    json.dump(doc, f, indent=1, sort_keys=True)
    f.write("\n")
