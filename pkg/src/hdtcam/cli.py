"""Command-line front end: ingestion, training, evaluation, sweeps, reports.

Configuration comes from an optional JSON file (--config) plus command-line
flags; flags win. Every emitted artifact records the tool version, the
master seed and a hash of the effective configuration. With --deterministic
the timestamp line is suppressed so reruns are byte-identical. All outputs
are written to a temp file and renamed into place on success.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import sys
import time

import numpy as np

from . import __version__
from . import am as am_mod
from . import encoders, explorer, hwmodel
from .am import BlockConfig
from .errors import (
    ConfigError,
    DegenerateInputError,
    DimensionMismatchError,
    FormatError,
    HdtcamError,
    InvalidStateError,
    NoFeasiblePointError,
)

DEFAULT_ITEM_SEED = {"language": 42, "mnist": 43, "csv": 0}
DEFAULT_TIE_SEED = {"language": 7, "mnist": 8, "csv": 0}


def _error_code(exc: Exception) -> str:
    for cls, code in (
        (FormatError, "E-FORMAT"),
        (ConfigError, "E-CONFIG"),
        (DimensionMismatchError, "E-DIMENSION"),
        (DegenerateInputError, "E-DEGENERATE"),
        (NoFeasiblePointError, "E-INFEASIBLE"),
        (InvalidStateError, "E-STATE"),
        (FileNotFoundError, "E-IO"),
        (OSError, "E-IO"),
        (json.JSONDecodeError, "E-FORMAT"),
        (HdtcamError, "E-USAGE"),
        (ValueError, "E-USAGE"),
    ):
        if isinstance(exc, cls):
            return code
    return "E-INTERNAL"


def _atomic_write_text(path, text: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        f.write(text)
    os.replace(tmp, path)


def _config_hash(doc: dict) -> str:
    blob = json.dumps(doc, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _metadata_lines(doc: dict, seed: int, deterministic: bool) -> list:
    lines = [
        f"tool=hdtcam {__version__}",
        f"seed={seed}",
        f"config_hash={_config_hash(doc)}",
    ]
    if not deterministic:
        lines.append(f"generated={time.strftime('%Y-%m-%dT%H:%M:%S')}")
    return lines


def _load_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return doc


def _effective_config(args, flag_names) -> dict:
    """Config file values overridden by any explicitly given flags."""
    doc = _load_json(args.config) if getattr(args, "config", None) else {}
    for name in flag_names:
        value = getattr(args, name, None)
        if value is not None:
            doc[name] = value
    return doc


# ---------------------------------------------------------------------------
# Dataset ingestion


def _read_language_train(train_dir: str) -> dict:
    """Directory of <label>.txt corpus files -> {label: text}."""
    if not os.path.isdir(train_dir):
        raise ConfigError(f"training corpus directory not found: {train_dir}")
    texts = {}
    for name in sorted(os.listdir(train_dir)):
        if name.endswith(".txt"):
            with open(os.path.join(train_dir, name), "r", encoding="utf-8") as f:
                texts[name[:-4]] = f.read()
    if not texts:
        raise ConfigError(f"no .txt corpus files in {train_dir}")
    return texts


def _read_language_queries(path: str) -> list:
    """CSV of label,text rows -> [(text, label)]. Text may contain commas."""
    queries = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if "," not in line:
                raise FormatError(f"{path}: expected 'label,text'", location=f"row {lineno}")
            label, text = line.split(",", 1)
            if lineno == 1 and label.strip().lower() == "label":
                continue
            queries.append((text, label.strip()))
    if not queries:
        raise ConfigError(f"{path}: no query rows found")
    return queries


def _language_memory(cfg: dict, dimension: int):
    texts = _read_language_train(cfg["train_dir"])
    ngram = int(cfg.get("ngram", 4))
    im = encoders.ItemMemory.for_alphabet(dimension, int(cfg.get("item_seed", 42)))
    tie = np.random.default_rng(
        np.random.SeedSequence([int(cfg.get("tie_seed", 7)), dimension])
    )
    classes = {
        label: [encoders.encode_text_ngram(text, ngram, im, tie)]
        for label, text in texts.items()
    }
    return am_mod.train(classes, tie), im, tie


def _language_queries(cfg: dict, im, tie):
    ngram = int(cfg.get("ngram", 4))
    pairs = _read_language_queries(cfg["queries"])
    queries = np.stack(
        [encoders.encode_text_ngram(text, ngram, im, tie) for text, _ in pairs]
    )
    return queries, [label for _, label in pairs]


def _mnist_memory(cfg: dict, dimension: int):
    images, labels = encoders.load_mnist(cfg["train_images"], cfg["train_labels"])
    threshold = int(cfg.get("threshold", 128))
    side2 = images.shape[1] * images.shape[2]
    im = encoders.ItemMemory.for_positions(dimension, side2, int(cfg.get("item_seed", 43)))
    tie_seed = int(cfg.get("tie_seed", 8))
    train_hv = encoders.encode_images(images, threshold, im, seed=tie_seed)
    tie = np.random.default_rng(np.random.SeedSequence([tie_seed, dimension]))
    classes = {}
    for c in np.unique(labels):
        classes[str(int(c))] = [hv for hv, l in zip(train_hv, labels) if l == c]
    return am_mod.train(classes, tie), im, tie


def _mnist_queries(cfg: dict, im, _tie):
    images, labels = encoders.load_mnist(cfg["test_images"], cfg["test_labels"])
    threshold = int(cfg.get("threshold", 128))
    queries = encoders.encode_images(images, threshold, im, seed=int(cfg.get("tie_seed", 8)) + 1)
    return queries, [str(int(c)) for c in labels]


def _csv_memory(cfg: dict, dimension: int):
    labeled = encoders.load_hypervector_csv(cfg["train_csv"])
    if labeled.dimension != dimension:
        raise DimensionMismatchError(
            f"csv vectors have dimension {labeled.dimension}, requested {dimension}"
        )
    tie = np.random.default_rng(np.random.SeedSequence([int(cfg.get("tie_seed", 0)), dimension]))
    return am_mod.train(labeled.by_label(), tie), None, tie


def _csv_queries(cfg: dict, _im, _tie):
    labeled = encoders.load_hypervector_csv(cfg["test_csv"])
    queries = np.stack([hv for hv, _ in labeled.items])
    return queries, [label for _, label in labeled.items]


_TASKS = {
    "language": (_language_memory, _language_queries),
    "mnist": (_mnist_memory, _mnist_queries),
    "csv": (_csv_memory, _csv_queries),
}


def _build_dataset(cfg: dict, dimension: int):
    task = cfg.get("task")
    if task not in _TASKS:
        raise ConfigError(f"task must be one of {sorted(_TASKS)}, got {task!r}")
    build_memory, build_queries = _TASKS[task]
    memory, im, tie = build_memory(cfg, dimension)
    queries, labels = build_queries(cfg, im, tie)
    return memory, queries, labels


def _load_catalog(cfg: dict) -> hwmodel.Catalog:
    path = cfg.get("hw_tables")
    return hwmodel.load_hw_tables(path) if path else hwmodel.default_catalog()


# ---------------------------------------------------------------------------
# Subcommands


def cmd_train(args) -> int:
    cfg = _effective_config(
        args, ["task", "train_dir", "train_images", "train_labels", "train_csv",
               "dimension", "ngram", "threshold", "item_seed", "tie_seed", "seed"]
    )
    task = cfg.get("task")
    if task not in _TASKS:
        raise ConfigError(f"task must be one of {sorted(_TASKS)}, got {task!r}")
    cfg.setdefault("item_seed", DEFAULT_ITEM_SEED[task])
    cfg.setdefault("tie_seed", DEFAULT_TIE_SEED[task])
    dimension = int(cfg.get("dimension", 10000))
    if dimension < 1:
        raise ConfigError(f"dimension must be >= 1, got {dimension}")
    started = time.perf_counter()
    memory, _im, _tie = _TASKS[task][0](cfg, dimension)
    elapsed = time.perf_counter() - started
    meta = {
        "tool": f"hdtcam {__version__}",
        "task": task,
        "seed": int(cfg.get("seed", 0)),
        "item_seed": int(cfg["item_seed"]),
        "tie_seed": int(cfg["tie_seed"]),
        "config_hash": _config_hash(cfg),
    }
    am_mod.save_model(args.output, memory, seed_metadata=meta)
    print(f"trained {len(memory)} classes at dimension {memory.dimension} "
          f"in {elapsed:.2f} s -> {args.output}")
    return 0


def cmd_eval(args) -> int:
    cfg = _effective_config(
        args, ["task", "queries", "test_images", "test_labels", "test_csv",
               "ngram", "threshold", "item_seed", "tie_seed", "hw_tables",
               "technology", "voltage", "block_size", "precision",
               "replicas", "trials", "seed"]
    )
    memory, meta = am_mod.load_model(args.model)
    task = cfg.get("task") or meta.get("task")
    if task not in _TASKS:
        raise ConfigError(f"task must be one of {sorted(_TASKS)}, got {task!r}")
    cfg.setdefault("item_seed", meta.get("item_seed", DEFAULT_ITEM_SEED[task]))
    cfg.setdefault("tie_seed", meta.get("tie_seed", DEFAULT_TIE_SEED[task]))
    if task == "language":
        im = encoders.ItemMemory.for_alphabet(memory.dimension, int(cfg["item_seed"]))
    elif task == "mnist":
        images, _ = encoders.load_mnist(cfg["test_images"], cfg["test_labels"])
        im = encoders.ItemMemory.for_positions(
            memory.dimension, images.shape[1] * images.shape[2], int(cfg["item_seed"])
        )
    else:
        im = None
    tie = np.random.default_rng(
        np.random.SeedSequence([int(cfg["tie_seed"]), memory.dimension])
    )
    queries, labels = _TASKS[task][1](cfg, im, tie)
    if queries.shape[1] != memory.dimension:
        raise DimensionMismatchError(
            f"queries have dimension {queries.shape[1]}, model has {memory.dimension}"
        )

    technology = cfg.get("technology")
    seed = int(cfg.get("seed", 0))
    if technology:
        voltage = float(cfg.get("voltage", 0.7))
        block_size = int(cfg.get("block_size", 15))
        entry = _load_catalog(cfg).get(technology, voltage, block_size)
        precision = int(cfg.get("precision", entry.latency.precision))
        point = explorer.evaluate(
            memory, queries, labels,
            BlockConfig(memory.dimension, block_size, precision),
            hw=entry,
            replicas=int(cfg.get("replicas", 1)),
            trials=int(cfg.get("trials", 10)),
            seed=seed,
            technology=technology,
            voltage=voltage,
        )
        print(f"accuracy {point.accuracy_mean:.4f} ± {point.accuracy_std:.4f} "
              f"(loss {100 * point.accuracy_loss:.3f} % vs ideal), "
              f"energy {point.energy_pj:.3f} pJ/query, "
              f"latency {point.latency_ns:.3f} ns/query")
    else:
        block_size = cfg.get("block_size")
        if block_size is not None:
            precision = int(cfg.get("precision", min(block_size, 7)))
            point = explorer.evaluate(
                memory, queries, labels,
                BlockConfig(memory.dimension, int(block_size), precision),
                hw=None, trials=1, seed=seed,
            )
        else:
            acc = explorer.ideal_accuracy(memory, queries, labels)
            point = explorer.DesignPoint(
                technology="", voltage=0.0, block_size=memory.dimension,
                precision=memory.dimension, dimension=memory.dimension,
                replicas=1, trials=1, accuracy_mean=acc, accuracy_std=0.0,
                accuracy_loss=0.0, energy_pj=0.0, latency_ns=0.0,
            )
        print(f"accuracy {point.accuracy_mean:.4f} over {len(labels)} queries")
    if args.output:
        lines = _metadata_lines(cfg, seed, args.deterministic)
        buf = io.StringIO()
        explorer.write_results_csv([point], buf, metadata_lines=lines)
        _atomic_write_text(args.output, buf.getvalue())
        print(f"wrote {args.output}")
    return 0


def _pareto_path(output: str) -> str:
    root, ext = os.path.splitext(output)
    return f"{root}_pareto{ext or '.csv'}"


def cmd_sweep(args) -> int:
    cfg = _effective_config(
        args, ["task", "train_dir", "queries", "train_images", "train_labels",
               "test_images", "test_labels", "train_csv", "test_csv",
               "ngram", "threshold", "item_seed", "tie_seed", "hw_tables",
               "technologies", "voltages", "block_sizes", "precisions",
               "dimensions", "replicas", "trials", "seed", "jobs"]
    )
    task = cfg.get("task")
    if task not in _TASKS:
        raise ConfigError(f"task must be one of {sorted(_TASKS)}, got {task!r}")
    cfg.setdefault("item_seed", DEFAULT_ITEM_SEED[task])
    cfg.setdefault("tie_seed", DEFAULT_TIE_SEED[task])
    seed = int(cfg.get("seed", 0))
    space = explorer.SweepSpace(
        technologies=tuple(cfg.get("technologies", ("sram",))),
        voltages=tuple(float(v) for v in cfg.get("voltages", (0.5, 0.7, 1.0))),
        block_sizes=tuple(int(n) for n in cfg.get("block_sizes", (7, 15))),
        precisions=tuple(int(p) for p in cfg.get("precisions", (7,))),
        dimensions=tuple(int(d) for d in cfg.get("dimensions", (10000,))),
        replicas=tuple(int(r) for r in cfg.get("replicas", (1,))),
        trials=int(cfg.get("trials", 10)),
        seed=seed,
    )
    catalog = _load_catalog(cfg)
    datasets = {d: _build_dataset(cfg, d) for d in space.dimensions}

    partial_path = f"{args.output}.partial.jsonl"
    done = []
    if os.path.exists(partial_path):
        with open(partial_path, "r", encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    done.append(explorer.point_from_dict(json.loads(line)))
        print(f"resuming: {len(done)} points already evaluated")
    done_keys = {p.config_key for p in done}
    skip = [c for c in space.configurations()
            if (c[0], round(c[1], 2), c[2], c[3], c[4], c[5]) in done_keys]

    partial = open(partial_path, "a", encoding="utf-8")
    total = len(list(space.configurations()))

    def progress(point):
        partial.write(json.dumps(explorer.point_to_dict(point), sort_keys=True) + "\n")
        partial.flush()
        print(f"[sweep] {point.technology} "
              f"{point.voltage:g} V N={point.block_size} P={point.precision} "
              f"D={point.dimension} r={point.replicas}: "
              f"loss {100 * point.accuracy_loss:.3f} %, {point.energy_pj:.2f} pJ")

    try:
        points = done + explorer.sweep(
            space, datasets, catalog,
            jobs=int(cfg.get("jobs") or 1),
            skip_keys=skip, progress=progress,
        )
    finally:
        partial.close()

    points = explorer.flag_pareto(points)
    lines = _metadata_lines(cfg, seed, args.deterministic)
    buf = io.StringIO()
    explorer.write_results_csv(points, buf, metadata_lines=lines)
    _atomic_write_text(args.output, buf.getvalue())
    front = [p for p in points if p.pareto]
    buf = io.StringIO()
    explorer.write_results_csv(front, buf, metadata_lines=lines)
    _atomic_write_text(_pareto_path(args.output), buf.getvalue())
    os.remove(partial_path)
    print(f"swept {total} configurations; {len(front)} on the Pareto front")
    print(f"wrote {args.output} and {_pareto_path(args.output)}")
    return 0


def _read_results_csv(path) -> tuple:
    """Parse a results CSV back into (points, metadata lines)."""
    points, meta = [], []
    header = explorer.CSV_COLUMNS.split(",")
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                meta.append(line[1:].strip())
                continue
            fields = line.split(",")
            if fields == header:
                continue
            if len(fields) != len(header):
                raise FormatError(
                    f"{path}: expected {len(header)} columns, got {len(fields)}",
                    location=f"row {lineno}",
                )
            doc = dict(zip(header, fields))
            doc["pareto"] = doc["pareto"] == "1"
            points.append(explorer.point_from_dict(doc))
    if not points:
        raise FormatError(f"{path}: no result rows found")
    return points, meta


def cmd_pareto(args) -> int:
    points, meta = _read_results_csv(args.input)
    points = explorer.flag_pareto(points)
    front = [p for p in points if p.pareto]
    buf = io.StringIO()
    explorer.write_results_csv(front, buf, metadata_lines=meta)
    _atomic_write_text(args.output, buf.getvalue())
    print(f"{len(front)} of {len(points)} points on the Pareto front -> {args.output}")
    return 0


def _select_entries(catalog, args):
    entries = list(catalog)
    if args.technology:
        entries = [e for e in entries if e.latency.technology == args.technology]
    if args.voltage is not None:
        entries = [e for e in entries if abs(e.latency.voltage - args.voltage) < 1e-9]
    if args.block_size is not None:
        entries = [e for e in entries if e.latency.block_size == args.block_size]
    if not entries:
        raise ConfigError("no hardware table entries match the given filters")
    return sorted(entries, key=lambda e: (e.latency.technology, e.latency.voltage,
                                          e.latency.block_size))


def cmd_hwmodel(args) -> int:
    catalog = (hwmodel.load_hw_tables(args.tables) if args.tables
               else hwmodel.default_catalog())
    entries = _select_entries(catalog, args)
    out = []
    if args.action == "validate":
        # Structural invariants are enforced on construction; re-check the
        # distributional ones here and report per entry.
        for e in entries:
            cm = hwmodel.confusion_from_latency(e.latency)
            row_err = float(np.abs(cm.sum(axis=1) - 1.0).max())
            if row_err > 1e-9:
                raise ConfigError(
                    f"tables[{e.latency.technology}/{e.latency.voltage}/"
                    f"{e.latency.block_size}]: confusion rows sum to 1±{row_err:.2e}"
                )
        out.append(f"ok: {len(entries)} table entries pass all invariants")
    elif args.action == "confusion":
        for e in entries:
            lm = e.latency
            out.append(f"# {lm.technology} {lm.voltage:g} V N={lm.block_size} "
                       f"P={lm.precision}")
            cm = hwmodel.confusion_from_latency(lm)
            for row in cm:
                out.append(",".join(f"{x:.6f}" for x in row))
    else:  # errorprob
        out.append("technology,voltage_V,block_size,distance,error_probability")
        for e in entries:
            lm = e.latency
            cm = hwmodel.confusion_from_latency(lm)
            for h in range(lm.precision + 1):
                out.append(f"{lm.technology},{lm.voltage:g},{lm.block_size},"
                           f"{h},{hwmodel.error_probability(cm, h):.6f}")
    text = "\n".join(out) + "\n"
    if args.output:
        _atomic_write_text(args.output, text)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_export(args) -> int:
    if args.what == "hw-tables":
        catalog = (hwmodel.load_hw_tables(args.tables) if args.tables
                   else hwmodel.default_catalog())
        hwmodel.save_hw_tables(args.output, catalog)
        print(f"wrote {len(catalog)} table entries -> {args.output}")
    elif args.what == "model-csv":
        if not args.model:
            raise ConfigError("export model-csv requires --model")
        memory, _meta = am_mod.load_model(args.model)
        labeled = encoders.LabeledSet(dimension=memory.dimension)
        for label, row in zip(memory.labels, memory.class_matrix):
            labeled.add(row, label)
        encoders.save_hypervector_csv(args.output, labeled)
        print(f"wrote {len(memory)} class vectors -> {args.output}")
    else:
        raise ConfigError(f"unknown export target {args.what!r}")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


def _int_list(text):
    return [int(x) for x in text.split(",") if x]


def _float_list(text):
    return [float(x) for x in text.split(",") if x]


def _str_list(text):
    return [x for x in text.split(",") if x]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hdtcam",
        description="TCAM-based hyperdimensional computing simulator and "
                    "design-space explorer",
    )
    parser.add_argument("--version", action="version", version=f"hdtcam {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
        p.add_argument("--deterministic", action="store_true",
                       help="suppress timestamps so reruns are byte-identical")

    def add_data_flags(p, train=True, test=True):
        p.add_argument("--task", choices=sorted(_TASKS))
        if train:
            p.add_argument("--train-dir", dest="train_dir",
                           help="language: directory of <label>.txt corpora")
            p.add_argument("--train-images", dest="train_images", help="mnist: IDX images")
            p.add_argument("--train-labels", dest="train_labels", help="mnist: IDX labels")
            p.add_argument("--train-csv", dest="train_csv", help="csv: label,bits rows")
        if test:
            p.add_argument("--queries", help="language: CSV of label,text query rows")
            p.add_argument("--test-images", dest="test_images", help="mnist: IDX images")
            p.add_argument("--test-labels", dest="test_labels", help="mnist: IDX labels")
            p.add_argument("--test-csv", dest="test_csv", help="csv: label,bits rows")
        p.add_argument("--ngram", type=int, default=None)
        p.add_argument("--threshold", type=int, default=None)
        p.add_argument("--item-seed", dest="item_seed", type=int, default=None)
        p.add_argument("--tie-seed", dest="tie_seed", type=int, default=None)

    p = sub.add_parser("train", help="encode a training set and persist the model")
    add_common(p)
    add_data_flags(p, test=False)
    p.add_argument("--dimension", type=int, default=None)
    p.add_argument("--output", required=True, help="model JSON path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model, optionally under a hardware model")
    add_common(p)
    add_data_flags(p, train=False)
    p.add_argument("--model", required=True)
    p.add_argument("--hw-tables", dest="hw_tables", help="JSON tables (default: built-in)")
    p.add_argument("--technology", choices=hwmodel.TECHNOLOGIES)
    p.add_argument("--voltage", type=float, default=None)
    p.add_argument("--block-size", dest="block_size", type=int, default=None)
    p.add_argument("--precision", type=int, default=None)
    p.add_argument("--replicas", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--output", help="optional results CSV")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="evaluate the full design-space cross product")
    add_common(p)
    add_data_flags(p)
    p.add_argument("--hw-tables", dest="hw_tables")
    p.add_argument("--technologies", type=_str_list, default=None)
    p.add_argument("--voltages", type=_float_list, default=None)
    p.add_argument("--block-sizes", dest="block_sizes", type=_int_list, default=None)
    p.add_argument("--precisions", type=_int_list, default=None)
    p.add_argument("--dimensions", type=_int_list, default=None)
    p.add_argument("--replicas", type=_int_list, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None, help="parallel evaluations")
    p.add_argument("--output", required=True, help="results CSV path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("pareto", help="extract the Pareto front from a results CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("hwmodel", help="inspect or validate hardware tables")
    p.add_argument("action", choices=("validate", "confusion", "errorprob"))
    p.add_argument("--tables", help="JSON tables (default: built-in)")
    p.add_argument("--technology", choices=hwmodel.TECHNOLOGIES)
    p.add_argument("--voltage", type=float, default=None)
    p.add_argument("--block-size", dest="block_size", type=int, default=None)
    p.add_argument("--output")
    p.set_defaults(func=cmd_hwmodel)

    p = sub.add_parser("export", help="export hardware tables or model vectors")
    p.add_argument("what", choices=("hw-tables", "model-csv"))
    p.add_argument("--tables", help="source tables for hw-tables (default: built-in)")
    p.add_argument("--model", help="source model for model-csv")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # single-line machine-parseable failure
        print(f"error: {_error_code(exc)}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
