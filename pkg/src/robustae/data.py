"""Data handling: CSV ingestion, z-normalization, synthetic benchmark
series, and model/decomposition persistence.

CSV schema: header ``t,dim_0,...,dim_{D-1}[,label]``, rows ordered by t,
label in {0,1}. Floats are serialized as shortest-roundtrip decimals so a
write/read roundtrip is bit-exact. Model files are JSON with a sha256
checksum over the payload.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import (
    ConfigError,
    FormatError,
    IntegrityError,
    InputError,
    ParseError,
    UpgradeError,
)
from .hankel import TimeSeries
from .linalg import make_rng
from .nn import AutoencoderConfig, AutoencoderModel

__all__ = [
    "NormalizationStats",
    "SynthConfig",
    "load_csv",
    "save_csv",
    "znormalize",
    "denormalize",
    "generate_synthetic",
    "save_model",
    "load_model",
    "save_decomposition",
    "load_decomposition",
]

MODEL_FORMAT_VERSION = 1


def _fmt(x: float) -> str:
    """Shortest decimal string that roundtrips to the same float64."""
    return repr(float(x))


@dataclass(frozen=True)
class NormalizationStats:
    """Per-dimension mean/std used to z-normalize a series.

    Constant dimensions get std clamped to 1 and are flagged.
    """

    mean: np.ndarray
    std: np.ndarray
    clamped: np.ndarray

    @property
    def any_clamped(self) -> bool:
        return bool(np.any(self.clamped))


def znormalize(ts: TimeSeries) -> tuple[TimeSeries, NormalizationStats]:
    """Per-dimension zero mean, unit sample variance."""
    if ts.length < 2:
        raise InputError("z-normalization needs at least 2 observations")
    mean = ts.values.mean(axis=0)
    std = ts.values.std(axis=0, ddof=1)
    clamped = std <= 0.0
    std = np.where(clamped, 1.0, std)
    out = (ts.values - mean) / std
    return TimeSeries(out, labels=ts.labels), NormalizationStats(mean, std, clamped)


def denormalize(ts: TimeSeries, stats: NormalizationStats) -> TimeSeries:
    """Inverse of :func:`znormalize`."""
    return TimeSeries(ts.values * stats.std + stats.mean, labels=ts.labels)


# ---------------------------------------------------------------------------
# CSV ingestion / emission


def load_csv(path) -> TimeSeries:
    """Read a series from the documented CSV schema."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if not header or header[0] != "t":
            raise FormatError(f"{path}: first column must be 't', got {header[:1]}")
        has_label = header[-1] == "label"
        dim_cols = header[1:-1] if has_label else header[1:]
        if not dim_cols:
            raise FormatError(f"{path}: no data columns found")
        for d, name in enumerate(dim_cols):
            if name != f"dim_{d}":
                raise FormatError(
                    f"{path}: expected column 'dim_{d}', got {name!r}"
                )
        rows = []
        labels = []
        prev_t = None
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}"
                )
            try:
                t = float(row[0])
                vals = [float(v) for v in row[1 : 1 + len(dim_cols)]]
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: non-numeric value ({exc})") from None
            if prev_t is not None and t <= prev_t:
                raise FormatError(f"{path}:{lineno}: t not strictly increasing")
            prev_t = t
            if has_label:
                lab = row[-1].strip()
                if lab not in ("0", "1"):
                    raise ParseError(f"{path}:{lineno}: label must be 0 or 1, got {lab!r}")
                labels.append(lab == "1")
            rows.append(vals)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return TimeSeries(np.array(rows), labels=np.array(labels) if has_label else None)


def save_csv(ts: TimeSeries, path) -> None:
    """Write a series in the documented CSV schema."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        cols = ["t"] + [f"dim_{d}" for d in range(ts.dims)]
        if ts.labels is not None:
            cols.append("label")
        writer.writerow(cols)
        for i in range(ts.length):
            row = [str(i)] + [_fmt(v) for v in ts.values[i]]
            if ts.labels is not None:
                row.append("1" if ts.labels[i] else "0")
            writer.writerow(row)


# ---------------------------------------------------------------------------
# Synthetic benchmark series


@dataclass(frozen=True)
class SynthConfig:
    """Recipe for a labeled synthetic series with injected outliers.

    ``outlier_magnitude`` is expressed in units of the clean series'
    standard deviation. Point outliers are isolated spikes; collective
    outliers are level-shifted runs of ``collective_run_length``.
    """

    kind: str = "sinusoid_mix"
    length: int = 2000
    dims: int = 1
    outlier_ratio: float = 0.05
    outlier_magnitude: float = 5.0
    outlier_kind: str = "point"
    collective_run_length: int = 10
    ar_coefficients: tuple[float, ...] = (0.6,)
    frequencies: tuple[float, ...] = (0.02,)
    amplitudes: tuple[float, ...] = (1.0,)
    noise_std: float = 0.05
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "ar_coefficients", tuple(self.ar_coefficients))
        object.__setattr__(self, "frequencies", tuple(self.frequencies))
        object.__setattr__(self, "amplitudes", tuple(self.amplitudes))
        if self.kind not in ("ar_process", "sinusoid_mix"):
            raise ConfigError(f"unknown kind {self.kind!r}")
        if self.outlier_kind not in ("point", "collective"):
            raise ConfigError(f"unknown outlier_kind {self.outlier_kind!r}")
        if self.length < 2 or self.dims < 1:
            raise ConfigError("length must be >= 2 and dims >= 1")
        if not 0.0 < self.outlier_ratio < 1.0:
            raise ConfigError(f"outlier_ratio must be in (0,1), got {self.outlier_ratio}")
        if int(self.outlier_ratio * self.length) < 1:
            raise ConfigError("outlier_ratio * length must be at least 1")
        if self.outlier_magnitude < 0:
            raise ConfigError("outlier_magnitude must be nonnegative")
        if self.noise_std < 0:
            raise ConfigError("noise_std must be nonnegative")
        if self.kind == "ar_process":
            _check_stationary(self.ar_coefficients)
        if self.kind == "sinusoid_mix" and len(self.frequencies) != len(self.amplitudes):
            raise ConfigError("frequencies and amplitudes must have equal length")


def _check_stationary(coeffs: tuple[float, ...]) -> None:
    if not coeffs:
        raise ConfigError("ar_coefficients must be nonempty")
    # roots of 1 - a1 z - ... - ap z^p must lie outside the unit circle
    poly = [-c for c in reversed(coeffs)] + [1.0]
    roots = np.roots(poly)
    if np.any(np.abs(roots) <= 1.0 + 1e-12):
        raise ConfigError(
            f"AR coefficients {coeffs} do not define a stationary process"
        )


def _base_signal(cfg: SynthConfig, rng: np.random.Generator) -> np.ndarray:
    c, d = cfg.length, cfg.dims
    if cfg.kind == "ar_process":
        p = len(cfg.ar_coefficients)
        burn = 200 + 10 * p
        shocks = rng.standard_normal((burn + c, d)) * cfg.noise_std
        x = np.zeros((burn + c, d))
        a = np.array(cfg.ar_coefficients)
        for t in range(p, burn + c):
            x[t] = a @ x[t - p : t][::-1] + shocks[t]
        return x[burn:]
    t = np.arange(c)[:, None]
    base = np.zeros((c, d))
    for freq, amp in zip(cfg.frequencies, cfg.amplitudes):
        phase = rng.uniform(0.0, 2.0 * math.pi, size=d)
        base += amp * np.sin(2.0 * math.pi * freq * t + phase)
    base += rng.standard_normal((c, d)) * cfg.noise_std
    return base


def _outlier_positions(cfg: SynthConfig, rng: np.random.Generator) -> np.ndarray:
    c = cfg.length
    budget = int(cfg.outlier_ratio * c)
    if cfg.outlier_kind == "point":
        return np.sort(rng.choice(c, size=budget, replace=False))
    run = max(1, min(cfg.collective_run_length, budget))
    taken = np.zeros(c, dtype=bool)
    positions: list[int] = []
    remaining = budget
    attempts = 0
    while remaining > 0 and attempts < 10_000:
        attempts += 1
        length = min(run, remaining)
        start = int(rng.integers(0, c - length + 1))
        block = range(start, start + length)
        if any(taken[i] for i in block):
            continue
        for i in block:
            taken[i] = True
            positions.append(i)
        remaining -= length
    if remaining > 0:
        # dense fallback: fill from the free slots left to right
        free = np.nonzero(~taken)[0][:remaining]
        positions.extend(int(i) for i in free)
    return np.sort(np.array(positions, dtype=int))


def generate_synthetic(cfg: SynthConfig) -> TimeSeries:
    """Labeled series: clean base plus exactly floor(ratio*length) outliers.

    Deterministic per seed; the injected positions and signs are drawn even
    when the magnitude is zero, so runs differing only in magnitude share
    the same base and labels.
    """
    rng = make_rng(cfg.seed)
    base = _base_signal(cfg, rng)
    positions = _outlier_positions(cfg, rng)
    signs = np.where(rng.random((positions.size, cfg.dims)) < 0.5, -1.0, 1.0)
    sigma = base.std(axis=0, ddof=1)
    sigma = np.where(sigma <= 0, 1.0, sigma)
    values = base.copy()
    if cfg.outlier_kind == "collective":
        # one shared sign per run so the run reads as a level shift
        run_sign = None
        prev = None
        for i, pos in enumerate(positions):
            if prev is None or pos != prev + 1:
                run_sign = signs[i]
            values[pos] += run_sign * cfg.outlier_magnitude * sigma
            prev = pos
    else:
        values[positions] += signs * cfg.outlier_magnitude * sigma
    labels = np.zeros(cfg.length, dtype=bool)
    labels[positions] = True
    return TimeSeries(values, labels=labels)


# ---------------------------------------------------------------------------
# Persistence


def _model_payload(model: AutoencoderModel) -> dict:
    return {
        "config": asdict(model.config),
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
    }


def _checksum(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def save_model(model: AutoencoderModel, path) -> None:
    """Write a model as versioned, checksummed JSON."""
    payload = _model_payload(model)
    doc = {
        "version": MODEL_FORMAT_VERSION,
        "config": payload["config"],
        "weights": payload["weights"],
        "biases": payload["biases"],
        "checksum": _checksum(payload),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True)


def load_model(path) -> AutoencoderModel:
    """Read a model back; verifies version and checksum before building."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON ({exc})") from None
    version = doc.get("version")
    if version != MODEL_FORMAT_VERSION:
        raise UpgradeError(
            f"{path}: format version {version} unsupported "
            f"(this build reads version {MODEL_FORMAT_VERSION})"
        )
    payload = {k: doc.get(k) for k in ("config", "weights", "biases")}
    if _checksum(payload) != doc.get("checksum"):
        raise IntegrityError(f"{path}: checksum mismatch")
    cfg_dict = dict(payload["config"])
    cfg_dict["layer_dims"] = tuple(cfg_dict["layer_dims"])
    config = AutoencoderConfig(**cfg_dict)
    weights = [np.array(w, dtype=np.float64) for w in payload["weights"]]
    biases = [np.array(b, dtype=np.float64) for b in payload["biases"]]
    return AutoencoderModel(config, weights=weights, biases=biases)


def save_decomposition(decomposition, path) -> None:
    """Write clean/outlier series plus per-observation scores as CSV."""
    from .decompose import outlier_scores  # local import to avoid a cycle

    clean = decomposition.clean
    outlier = decomposition.outlier
    scores = outlier_scores(decomposition)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = (
            ["t"]
            + [f"clean_{d}" for d in range(clean.dims)]
            + [f"outlier_{d}" for d in range(outlier.dims)]
            + ["score"]
        )
        writer.writerow(header)
        for i in range(clean.length):
            row = (
                [str(i)]
                + [_fmt(v) for v in clean.values[i]]
                + [_fmt(v) for v in outlier.values[i]]
                + [_fmt(scores[i])]
            )
            writer.writerow(row)


def load_decomposition(path) -> tuple[TimeSeries, TimeSeries, np.ndarray]:
    """Read back (clean, outlier, scores) from a decomposition CSV."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        clean_cols = [i for i, h in enumerate(header) if h.startswith("clean_")]
        outlier_cols = [i for i, h in enumerate(header) if h.startswith("outlier_")]
        if header[:1] != ["t"] or not clean_cols or not outlier_cols or header[-1] != "score":
            raise FormatError(f"{path}: not a decomposition file")
        clean_rows, outlier_rows, scores = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                clean_rows.append([float(row[i]) for i in clean_cols])
                outlier_rows.append([float(row[i]) for i in outlier_cols])
                scores.append(float(row[-1]))
            except (ValueError, IndexError) as exc:
                raise ParseError(f"{path}:{lineno}: bad row ({exc})") from None
    return (
        TimeSeries(np.array(clean_rows)),
        TimeSeries(np.array(outlier_rows)),
        np.array(scores),
    )
