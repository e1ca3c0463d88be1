"""Command-line interface.

Commands: ``synth`` (labeled synthetic series), ``train`` (decompose a CSV
series and score it), ``eval`` (PR/ROC AUC from a scores+labels CSV),
``explain`` (explainability scan of a decomposition's clean series),
``sweep`` (random hyperparameter search reporting the median result), and
``replay`` (re-run a recorded manifest).

Every producing run writes a manifest next to its outputs with the fully
resolved configuration and seed, so replaying it reproduces the outputs
byte for byte. Exit codes: 0 success, 2 usage/config error, 3 numerical
failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .data import (
    SynthConfig,
    generate_synthetic,
    load_csv,
    load_decomposition,
    save_csv,
    save_decomposition,
    save_model,
    znormalize,
)
from .decompose import (
    RaeConfig,
    RdaeConfig,
    TRAIN_METHODS,
    outlier_scores,
    train,
)
from .errors import (
    ConfigError,
    EvaluationError,
    FormatError,
    InputError,
    IntegrityError,
    NumericalError,
    ParameterError,
    ParseError,
    RobustAEError,
    UpgradeError,
)
from .explain import DEFAULT_NMAX, es_prm, es_ssa
from .metrics import evaluate
from .nn import AutoencoderConfig

OUT_DIR_ENV = "ROBUSTAE_OUT_DIR"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

_USAGE_ERRORS = (
    ConfigError,
    ParameterError,
    InputError,
    EvaluationError,
    ParseError,
    FormatError,
)
_IO_ERRORS = (OSError, IntegrityError, UpgradeError)


def _default_out_dir(value: str | None) -> Path:
    if value:
        return Path(value)
    return Path(os.environ.get(OUT_DIR_ENV, "."))


def _read_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top-level JSON object expected")
    return doc


def _build_ae_config(doc: dict | None) -> AutoencoderConfig | None:
    if doc is None:
        return None
    try:
        doc = dict(doc)
        doc["layer_dims"] = tuple(doc["layer_dims"])
        return AutoencoderConfig(**doc)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad network config: {exc}") from None


def _build_train_config(method: str, doc: dict, seed: int | None):
    doc = dict(doc)
    if seed is not None:
        doc["seed"] = seed
    try:
        if method in ("rae", "nrae"):
            doc["ae"] = _build_ae_config(doc.get("ae"))
            return RaeConfig(**doc)
        for key in ("f1", "inner_ae", "f2"):
            doc[key] = _build_ae_config(doc.get(key))
        return RdaeConfig(**doc)
    except TypeError as exc:
        raise ConfigError(f"bad {method} config: {exc}") from None


def _config_snapshot(cfg) -> dict:
    # asdict resolves nested network configs; tuples become lists in JSON
    return asdict(cfg)


def _write_manifest(
    path: Path, command: str, config: dict, seed: int, inputs: dict, outputs: dict, started: float
) -> None:
    doc = {
        "command": command,
        "config": config,
        "seed": seed,
        "inputs": inputs,
        "outputs": outputs,
        "duration_seconds": time.time() - started,
        "library_version": __version__,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_loss_trace(path: Path, trace) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "loss"])
        for i, loss in enumerate(trace, start=1):
            writer.writerow([str(i), repr(float(loss))])


def _write_scores(path: Path, scores, labels) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = ["t", "score"] + (["label"] if labels is not None else [])
        writer.writerow(header)
        for i, s in enumerate(scores):
            row = [str(i), repr(float(s))]
            if labels is not None:
                row.append("1" if labels[i] else "0")
            writer.writerow(row)


def _read_scores_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        try:
            score_col = header.index("score")
            label_col = header.index("label")
        except ValueError:
            raise FormatError(f"{path}: needs 'score' and 'label' columns") from None
        scores, labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                scores.append(float(row[score_col]))
                labels.append(int(row[label_col]) == 1)
            except (ValueError, IndexError) as exc:
                raise ParseError(f"{path}:{lineno}: bad row ({exc})") from None
    return np.array(scores), np.array(labels)


# ---------------------------------------------------------------------------
# command implementations (also used by replay)


def _run_synth(config: dict, out_csv: Path, seed: int | None) -> dict:
    started = time.time()
    try:
        cfg_doc = dict(config)
        if seed is not None:
            cfg_doc["seed"] = seed
        cfg = SynthConfig(**{k: tuple(v) if isinstance(v, list) else v for k, v in cfg_doc.items()})
    except TypeError as exc:
        raise ConfigError(f"bad synth config: {exc}") from None
    ts = generate_synthetic(cfg)
    out_csv.parent.mkdir(parents=True, exist_ok=True)
    save_csv(ts, out_csv)
    manifest = out_csv.with_name(out_csv.name + ".manifest.json")
    _write_manifest(
        manifest,
        "synth",
        asdict(cfg),
        cfg.seed,
        {},
        {"csv": out_csv.name},
        started,
    )
    return {"csv": str(out_csv), "manifest": str(manifest)}


def _run_train(
    method: str,
    input_csv: Path,
    config: dict,
    out_dir: Path,
    seed: int | None,
    verbose: bool,
) -> dict:
    started = time.time()
    if method not in TRAIN_METHODS:
        raise ConfigError(f"method must be one of {TRAIN_METHODS}, got {method!r}")
    ts = load_csv(input_csv)
    cfg_key = "rae" if method in ("rae", "nrae") else "rdae"
    cfg = _build_train_config(cfg_key, config, seed)
    decomposition = train(ts, method, cfg, verbose=verbose)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {}
    dec_path = out_dir / "decomposition.csv"
    save_decomposition(decomposition, dec_path)
    files["decomposition"] = dec_path.name
    scores = outlier_scores(decomposition)
    scores_path = out_dir / "scores.csv"
    _write_scores(scores_path, scores, ts.labels)
    files["scores"] = scores_path.name
    trace_path = out_dir / "loss_trace.csv"
    _write_loss_trace(trace_path, decomposition.loss_trace)
    files["loss_trace"] = trace_path.name
    for role, model in decomposition.models.items():
        name = "model.json" if role == "ae" else f"model_{role}.json"
        save_model(model, out_dir / name)
        files[f"model:{role}"] = name
    _write_manifest(
        out_dir / "manifest.json",
        "train",
        {"method": method, "train": _config_snapshot(cfg)},
        cfg.seed,
        {"csv": str(input_csv)},
        files,
        started,
    )
    if verbose:
        c1, c2 = decomposition.final_residuals
        sys.stderr.write(
            f"[train] method={method} iterations={decomposition.iterations_run} "
            f"cond1={c1:.3e} cond2={c2:.3e}\n"
        )
    return {"out_dir": str(out_dir), **files}


def _run_eval(scores_csv: Path, out_file: Path | None) -> dict:
    started = time.time()
    scores, labels = _read_scores_csv(scores_csv)
    result = evaluate(scores, labels)
    doc = {
        "pr_auc": result.pr_auc,
        "roc_auc": result.roc_auc,
        "n_positives": result.n_positives,
        "n_negatives": result.n_negatives,
    }
    if out_file is not None:
        out_file.parent.mkdir(parents=True, exist_ok=True)
        with open(out_file, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        _write_manifest(
            out_file.with_name(out_file.name + ".manifest.json"),
            "eval",
            {},
            0,
            {"csv": str(scores_csv)},
            {"json": out_file.name},
            started,
        )
    return doc


def _run_explain(
    decomposition_csv: Path,
    method: str,
    gamma: float,
    n_max: int,
    window_len: int | None,
    normalize: bool,
    out_file: Path | None,
) -> dict:
    if method not in ("prm", "ssa"):
        raise ConfigError(f"explain method must be 'prm' or 'ssa', got {method!r}")
    clean, _, _ = load_decomposition(decomposition_csv)
    if normalize:
        clean, _ = znormalize(clean)
    started = time.time()
    if method == "prm":
        result = es_prm(clean, gamma, n_max)
    else:
        result = es_ssa(clean, gamma, n_max, window_len)
    doc = result.to_dict()
    if out_file is not None:
        out_file.parent.mkdir(parents=True, exist_ok=True)
        with open(out_file, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        _write_manifest(
            out_file.with_name(out_file.name + ".manifest.json"),
            "explain",
            {
                "method": method,
                "gamma": gamma,
                "n_max": n_max,
                "window_len": window_len,
                "normalize": normalize,
            },
            0,
            {"csv": str(decomposition_csv)},
            {"json": out_file.name},
            started,
        )
    return doc


def _dims_from_shape(depth: int, width: int, input_dim: int) -> tuple[int, ...]:
    bottleneck = max(2, min(width // 4, input_dim - 1))
    if depth <= 1:
        return (bottleneck,)
    half = depth // 2
    return tuple([width] * half + [bottleneck] + [width] * half)


def _sampled_config(method: str, base: dict, pick: dict, input_dims: int, seed: int) -> tuple:
    doc = dict(base)
    doc["seed"] = seed
    depth = pick.get("depth")
    width = pick.get("width")
    if method in ("rae", "nrae"):
        if "lam" in pick:
            doc["lam"] = pick["lam"]
        if "window_len" in pick:
            doc["window_len"] = pick["window_len"]
        if depth is not None and width is not None:
            w = doc.get("window_len", RaeConfig.window_len)
            input_dim = w * input_dims
            doc["ae"] = {
                "input_dim": input_dim,
                "layer_dims": list(_dims_from_shape(depth, width, input_dim)),
                "seed": seed,
            }
        return _build_train_config("rae", doc, None), doc
    if "lam" in pick:
        doc["lam1"] = pick["lam"]
        doc["lam2"] = pick["lam"]
    for key in ("lagged_window", "window_len"):
        if key in pick:
            doc[key] = pick[key]
    if depth is not None and width is not None:
        w = doc.get("window_len", RdaeConfig.window_len)
        input_dim = w * input_dims
        doc["f2"] = {
            "input_dim": input_dim,
            "layer_dims": list(_dims_from_shape(depth, width, input_dim)),
            "seed": seed,
        }
    return _build_train_config("rdae", doc, None), doc


def _run_sweep(
    input_csv: Path, config: dict, n_random: int, out_csv: Path, seed: int | None
) -> dict:
    started = time.time()
    if n_random < 1:
        raise ConfigError(f"n_random must be >= 1, got {n_random}")
    method = config.get("method", "rae")
    if method not in TRAIN_METHODS:
        raise ConfigError(f"sweep method must be one of {TRAIN_METHODS}")
    grid = config.get("grid")
    if not isinstance(grid, dict) or not grid:
        raise ConfigError("sweep config needs a nonempty 'grid' object")
    base = dict(config.get("base", {}))
    master_seed = seed if seed is not None else int(config.get("seed", 0))
    ts = load_csv(input_csv)
    if ts.labels is None:
        raise InputError(f"{input_csv}: sweep needs a labeled series")
    rng = np.random.default_rng(master_seed)
    run_seeds = [int(s) for s in rng.integers(0, 2**63 - 1, size=n_random)]
    grid_keys = sorted(grid)
    rows = []
    for i in range(n_random):
        pick = {k: grid[k][int(rng.integers(0, len(grid[k])))] for k in grid_keys}
        row = {"index": i, "params": json.dumps(pick, sort_keys=True)}
        try:
            cfg, _ = _sampled_config(method, base, pick, ts.dims, run_seeds[i])
            decomposition = train(ts, method, cfg)
            result = evaluate(outlier_scores(decomposition), ts.labels)
            row.update(pr_auc=result.pr_auc, roc_auc=result.roc_auc, status="ok")
        except (RobustAEError, ValueError) as exc:
            row.update(pr_auc="", roc_auc="", status=f"failed: {exc}")
        rows.append(row)
    ok_rows = sorted(
        (r for r in rows if r["status"] == "ok"), key=lambda r: r["pr_auc"]
    )
    median_row = ok_rows[(len(ok_rows) - 1) // 2] if ok_rows else None
    out_csv.parent.mkdir(parents=True, exist_ok=True)
    with open(out_csv, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "params", "pr_auc", "roc_auc", "status", "is_median"])
        for r in rows:
            writer.writerow(
                [
                    str(r["index"]),
                    r["params"],
                    repr(r["pr_auc"]) if isinstance(r["pr_auc"], float) else "",
                    repr(r["roc_auc"]) if isinstance(r["roc_auc"], float) else "",
                    r["status"],
                    "1" if r is median_row else "0",
                ]
            )
    manifest = out_csv.with_name(out_csv.name + ".manifest.json")
    _write_manifest(
        manifest,
        "sweep",
        {"method": method, "base": base, "grid": grid, "n_random": n_random},
        master_seed,
        {"csv": str(input_csv)},
        {"table": out_csv.name},
        started,
    )
    summary = {
        "table": str(out_csv),
        "n_ok": len(ok_rows),
        "n_failed": len(rows) - len(ok_rows),
    }
    if median_row is not None:
        summary["median"] = {
            "params": json.loads(median_row["params"]),
            "pr_auc": median_row["pr_auc"],
            "roc_auc": median_row["roc_auc"],
        }
    return summary


def _run_replay(manifest_path: Path, out_dir: Path, verbose: bool) -> dict:
    with open(manifest_path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{manifest_path}: invalid JSON ({exc})") from None
    command = doc.get("command")
    config = doc.get("config", {})
    seed = doc.get("seed")
    inputs = doc.get("inputs", {})
    outputs = doc.get("outputs", {})
    if command == "synth":
        out_csv = out_dir / outputs.get("csv", "synthetic.csv")
        return _run_synth(config, out_csv, seed)
    if command == "train":
        return _run_train(
            config["method"],
            Path(inputs["csv"]),
            config["train"],
            out_dir,
            seed,
            verbose,
        )
    if command == "sweep":
        return _run_sweep(
            Path(inputs["csv"]),
            {
                "method": config["method"],
                "base": config["base"],
                "grid": config["grid"],
                "seed": seed,
            },
            int(config["n_random"]),
            out_dir / outputs.get("table", "sweep.csv"),
            seed,
        )
    if command == "eval":
        return _run_eval(Path(inputs["csv"]), out_dir / outputs.get("json", "eval.json"))
    if command == "explain":
        return _run_explain(
            Path(inputs["csv"]),
            config["method"],
            float(config["gamma"]),
            int(config["n_max"]),
            config.get("window_len"),
            bool(config.get("normalize", False)),
            out_dir / outputs.get("json", "explain.json"),
        )
    raise ConfigError(f"manifest command {command!r} cannot be replayed")


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robustae",
        description="Robust series decomposition, outlier scoring, and explainability.",
    )
    parser.add_argument("--version", action="version", version=f"robustae {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--verbose", action="store_true", help="per-iteration diagnostics")
        p.add_argument(
            "--out-dir",
            default=None,
            help=f"output directory (default ${OUT_DIR_ENV} or '.')",
        )

    p = sub.add_parser("synth", help="generate a labeled synthetic series")
    p.add_argument("--config", required=True, help="SynthConfig JSON")
    p.add_argument("--out", default="synthetic.csv", help="output CSV (under --out-dir)")
    common(p)

    p = sub.add_parser("train", help="decompose a series and score outliers")
    p.add_argument("--method", required=True, help="one of " + ", ".join(TRAIN_METHODS))
    p.add_argument("--input", required=True, help="input series CSV")
    p.add_argument("--config", required=True, help="trainer config JSON")
    common(p)

    p = sub.add_parser("eval", help="PR/ROC AUC from a scores CSV with labels")
    p.add_argument("--input", required=True, help="CSV with 'score' and 'label' columns")
    p.add_argument("--out", default=None, help="optional JSON output file")
    common(p)

    p = sub.add_parser("explain", help="explainability scan of a clean series")
    p.add_argument("--input", required=True, help="decomposition CSV")
    p.add_argument("--method", required=True, choices=["prm", "ssa"])
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--nmax", type=int, default=DEFAULT_NMAX)
    p.add_argument("--window", type=int, default=None, help="lagged window for ssa")
    p.add_argument("--normalize", action="store_true", help="z-normalize the clean series first")
    p.add_argument("--out", default=None, help="optional JSON output file")
    common(p)

    p = sub.add_parser("sweep", help="random hyperparameter search, median result")
    p.add_argument("--input", required=True, help="labeled series CSV")
    p.add_argument("--config", required=True, help="sweep config JSON (method/base/grid)")
    p.add_argument("--n-random", type=int, required=True)
    p.add_argument("--out", default="sweep.csv", help="results table CSV (under --out-dir)")
    common(p)

    p = sub.add_parser("replay", help="re-run a recorded manifest")
    p.add_argument("--manifest", required=True)
    common(p)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors already
        return int(exc.code) if exc.code else 0
    out_dir = _default_out_dir(args.out_dir)
    try:
        if args.command == "synth":
            result = _run_synth(_read_json(args.config), out_dir / args.out, args.seed)
        elif args.command == "train":
            result = _run_train(
                args.method,
                Path(args.input),
                _read_json(args.config),
                out_dir,
                args.seed,
                args.verbose,
            )
        elif args.command == "eval":
            result = _run_eval(Path(args.input), Path(args.out) if args.out else None)
        elif args.command == "explain":
            result = _run_explain(
                Path(args.input),
                args.method,
                args.gamma,
                args.nmax,
                args.window,
                args.normalize,
                Path(args.out) if args.out else None,
            )
        elif args.command == "sweep":
            result = _run_sweep(
                Path(args.input),
                _read_json(args.config),
                args.n_random,
                out_dir / args.out,
                args.seed,
            )
        elif args.command == "replay":
            result = _run_replay(Path(args.manifest), out_dir, args.verbose)
        else:  # pragma: no cover - argparse enforces the choices
            return EXIT_USAGE
    except _USAGE_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except NumericalError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except _IO_ERRORS as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return EXIT_IO
    print(json.dumps(result, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
