"""Robust decomposition trainers and outlier scoring.

Each trainer splits a series T into clean + outlier parts under the
constraint T = clean + outlier, alternating between gradient refits of a
reconstruction network on the outlier-subtracted view and an l1 proximal
shrinkage of the residual:

* ``train_rae``: a single windowed autoencoder on the series view.
* ``train_rdae``: a dual scheme: an inner autoencoder decomposes the
  lagged-matrix view (after a learned smoothing transform), Hankelization
  maps the matrix split back to series form, and an outer windowed network
  refines the series split. An enclosing loop feeds the refined outlier
  part back into the lagged view until its norm stabilizes.
* ``train_nonrobust``: the same architectures with the shrinkage and
  alternation removed (reconstruction-error baselines).
* ``ablation_variant``: the dual scheme with the smoothing transform
  and/or the series-view refinement replaced by identity.

Inputs are z-normalized internally; outputs are returned in the original
units with the normalization stats attached.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

import numpy as np

from .data import NormalizationStats, denormalize, znormalize
from .errors import InputError, NumericalError, ParameterError
from .hankel import (
    LaggedMatrix,
    TimeSeries,
    default_window_len,
    embed_lagged,
    hankelize,
    matrix_to_series,
)
from .linalg import frobenius_norm, rmse
from .nn import AutoencoderConfig, AutoencoderModel, default_layer_dims
from .prox import soft_threshold

__all__ = [
    "RaeConfig",
    "RdaeConfig",
    "Decomposition",
    "train_rae",
    "train_rdae",
    "train_nonrobust",
    "ablation_variant",
    "train",
    "outlier_scores",
    "TRAIN_METHODS",
]


@dataclass(frozen=True)
class RaeConfig:
    """Hyperparameters of the single-autoencoder trainer.

    ``lam`` weights the l1 sparsity of the outlier part; ``window_len`` and
    ``stride`` control how the series is sliced into flat windows for the
    fully-connected network. ``ae`` may be left None to derive a default
    network shape from the window size.
    """

    lam: float = 5e-2
    epsilon: float = 1e-5
    max_outer_iters: int = 200
    window_len: int = 32
    stride: int = 1
    seed: int = 0
    ae: AutoencoderConfig | None = None

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError(f"lam must be positive, got {self.lam}")
        if not self.epsilon > 0:
            raise ParameterError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_outer_iters < 1:
            raise ParameterError("max_outer_iters must be >= 1")
        if self.window_len < 2:
            raise ParameterError(f"window_len must be >= 2, got {self.window_len}")
        if not 1 <= self.stride <= self.window_len:
            raise ParameterError(
                f"stride must lie in [1, {self.window_len}], got {self.stride}"
            )


@dataclass(frozen=True)
class RdaeConfig:
    """Hyperparameters of the dual-autoencoder trainer.

    ``lagged_window`` is the lagged-matrix window length B (defaults to
    round((ln C)^2), clamped into (1, C/2)); ``lam1``/``lam2`` weight the
    matrix-view and series-view sparsity. The three networks may be left
    None to derive default shapes.
    """

    lagged_window: int | None = None
    lam1: float = 5e-2
    lam2: float = 5e-2
    epsilon: float = 1e-5
    max_outer_iters: int = 200
    max_while_iters: int = 10
    window_len: int = 32
    stride: int = 1
    seed: int = 0
    f1: AutoencoderConfig | None = None
    inner_ae: AutoencoderConfig | None = None
    f2: AutoencoderConfig | None = None

    def __post_init__(self):
        if not self.lam1 > 0 or not self.lam2 > 0:
            raise ParameterError("lam1 and lam2 must be positive")
        if not self.epsilon > 0:
            raise ParameterError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_outer_iters < 1 or self.max_while_iters < 1:
            raise ParameterError("iteration caps must be >= 1")
        if self.lagged_window is not None and self.lagged_window < 2:
            raise ParameterError(
                f"lagged_window must be >= 2, got {self.lagged_window}"
            )
        if self.window_len < 2:
            raise ParameterError(f"window_len must be >= 2, got {self.window_len}")
        if not 1 <= self.stride <= self.window_len:
            raise ParameterError(
                f"stride must lie in [1, {self.window_len}], got {self.stride}"
            )


@dataclass
class Decomposition:
    """Result of a trainer run: T = clean + outlier in the input's units.

    ``final_residuals`` holds (condition1, condition2) evaluated on the
    returned pair: the relative constraint violation and the relative
    change against the previous iterate. ``loss_trace`` records the
    network reconstruction RMSE once per alternation step. ``models``
    carries the trained networks by role for persistence.
    """

    clean: TimeSeries
    outlier: TimeSeries
    iterations_run: int
    final_residuals: tuple[float, float]
    loss_trace: list[float] = field(default_factory=list)
    normalization: NormalizationStats | None = None
    models: dict[str, AutoencoderModel] = field(default_factory=dict)


def outlier_scores(d: Decomposition) -> np.ndarray:
    """Per-observation score: squared l2 norm of the outlier-series row."""
    v = d.outlier.values
    return np.sum(v * v, axis=1)


# ---------------------------------------------------------------------------
# windowed view of a series for the fully-connected networks


class _SeriesWindower:
    """Slice a (C, D) series into flat (n, w*D) windows and fold back.

    Overlapping window reconstructions are averaged per timestep.
    """

    def __init__(self, length: int, dims: int, window_len: int, stride: int):
        if length <= window_len:
            raise InputError(
                f"series length {length} must exceed window length {window_len}"
            )
        starts = list(range(0, length - window_len + 1, stride))
        if starts[-1] != length - window_len:
            starts.append(length - window_len)
        self.length = length
        self.dims = dims
        self.window_len = window_len
        self.idx = np.asarray(starts)[:, None] + np.arange(window_len)[None, :]
        counts = np.zeros(length)
        np.add.at(counts, self.idx.ravel(), 1.0)
        self.counts = counts[:, None]
        self.input_dim = window_len * dims

    def batch(self, values: np.ndarray) -> np.ndarray:
        return values[self.idx].reshape(self.idx.shape[0], self.input_dim)

    def fold(self, outputs: np.ndarray) -> np.ndarray:
        acc = np.zeros((self.length, self.dims))
        np.add.at(acc, self.idx.ravel(), outputs.reshape(-1, self.dims))
        return acc / self.counts


def _column_batch(planes: np.ndarray) -> np.ndarray:
    """(D, B, K) lagged planes -> (K, B*D) window-column samples."""
    d, b, k = planes.shape
    return np.ascontiguousarray(planes.transpose(2, 1, 0).reshape(k, b * d))


def _batch_to_planes(batch: np.ndarray, dims: int, window_len: int) -> np.ndarray:
    k = batch.shape[0]
    return np.ascontiguousarray(
        batch.reshape(k, window_len, dims).transpose(2, 1, 0)
    )


def _child_seeds(seed: int, n: int) -> list[int]:
    ss = np.random.SeedSequence(seed)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in ss.spawn(n)]


def _resolve_ae(
    user_cfg: AutoencoderConfig | None, input_dim: int, seed: int, thin: bool = False
) -> AutoencoderConfig:
    if user_cfg is not None:
        if user_cfg.input_dim != input_dim:
            raise ParameterError(
                f"network input_dim {user_cfg.input_dim} does not match "
                f"expected width {input_dim}"
            )
        return user_cfg
    if thin:
        # single mildly narrowed hidden layer: smoothing, not compression
        dims = (max(2, round(0.75 * input_dim)),)
    else:
        dims = default_layer_dims(input_dim)
    return AutoencoderConfig(input_dim=input_dim, layer_dims=dims, seed=seed)


def _guarded_train(model: AutoencoderModel, batch, target, context: str) -> None:
    try:
        model.train(batch, target)
    except NumericalError as exc:
        raise NumericalError(f"{context}: {exc}") from exc


def _log(verbose: bool, tag: str, it: int, loss: float, c1: float, c2: float) -> None:
    if verbose:
        sys.stderr.write(
            f"[{tag}] iter={it} loss={loss:.6f} cond1={c1:.3e} cond2={c2:.3e}\n"
        )


def _zero_decomposition(ts: TimeSeries, stats: NormalizationStats) -> Decomposition:
    zeros = np.zeros_like(ts.values)
    clean = denormalize(TimeSeries(zeros.copy()), stats)
    outlier = TimeSeries(np.zeros_like(ts.values))
    return Decomposition(clean, outlier, 0, (0.0, 0.0), [], stats)


def _finish(
    values: np.ndarray,
    t_s: np.ndarray,
    t_norm: float,
    t_star: np.ndarray,
    iterations: int,
    trace: list[float],
    stats: NormalizationStats,
    models: dict[str, AutoencoderModel],
) -> Decomposition:
    # the loop's own constraint-enforcement step, applied once at exit so
    # the returned pair satisfies T = clean + outlier
    t_l = values - t_s
    cond1 = frobenius_norm(values - t_l - t_s) / t_norm
    cond2 = frobenius_norm(t_star - t_l - t_s) / t_norm
    clean = denormalize(TimeSeries(t_l), stats)
    outlier = TimeSeries(t_s * stats.std)
    return Decomposition(clean, outlier, iterations, (cond1, cond2), trace, stats, models)


# ---------------------------------------------------------------------------
# trainers


def train_rae(ts: TimeSeries, cfg: RaeConfig, verbose: bool = False) -> Decomposition:
    """Alternate autoencoder refits with l1 shrinkage on the series view.

    Per iteration: subtract the current outlier part, refit and apply the
    autoencoder, take the residual, shrink it, then stop once the
    constraint violation or the iterate change drops below epsilon.
    """
    norm_ts, stats = znormalize(ts)
    values = norm_ts.values
    c, d = values.shape
    t_norm = frobenius_norm(values)
    if t_norm == 0.0:
        return _zero_decomposition(ts, stats)
    windower = _SeriesWindower(c, d, cfg.window_len, cfg.stride)
    ae_cfg = _resolve_ae(cfg.ae, windower.input_dim, _child_seeds(cfg.seed, 1)[0])
    model = AutoencoderModel(ae_cfg)
    t_s = np.zeros_like(values)
    t_star = values.copy()
    trace: list[float] = []
    iterations = 0
    for it in range(1, cfg.max_outer_iters + 1):
        iterations = it
        t_l = values - t_s
        batch = windower.batch(t_l)
        _guarded_train(model, batch, batch, f"outer iteration {it}")
        recon = windower.fold(model.forward(batch))
        trace.append(rmse(t_l, recon))
        t_l = recon
        t_s = soft_threshold(values - t_l, cfg.lam)
        if not np.all(np.isfinite(t_s)):
            raise NumericalError(f"non-finite iterate at outer iteration {it}")
        cond1 = frobenius_norm(values - t_l - t_s) / t_norm
        cond2 = frobenius_norm(t_star - t_l - t_s) / t_norm
        t_star = t_l + t_s
        _log(verbose, "rae", it, trace[-1], cond1, cond2)
        if cond1 < cfg.epsilon or cond2 < cfg.epsilon:
            break
    return _finish(values, t_s, t_norm, t_star, iterations, trace, stats, {"ae": model})


def _resolve_lagged_window(cfg: RdaeConfig, length: int) -> int:
    b = cfg.lagged_window
    if b is None:
        return default_window_len(length)
    if not 1 < b < length / 2:
        raise ParameterError(
            f"lagged_window must lie in (1, {length / 2:g}), got {b}"
        )
    return b


def _train_rdae_impl(
    ts: TimeSeries,
    cfg: RdaeConfig,
    use_f1: bool,
    use_f2: bool,
    verbose: bool,
) -> Decomposition:
    norm_ts, stats = znormalize(ts)
    values = norm_ts.values
    c, d = values.shape
    b = _resolve_lagged_window(cfg, c)
    t_norm = frobenius_norm(values)
    if t_norm == 0.0:
        return _zero_decomposition(ts, stats)
    k = c - b + 1
    col_dim = b * d
    seeds = _child_seeds(cfg.seed, 3)
    f1_model = (
        AutoencoderModel(_resolve_ae(cfg.f1, col_dim, seeds[0], thin=True))
        if use_f1
        else None
    )
    inner_model = AutoencoderModel(_resolve_ae(cfg.inner_ae, col_dim, seeds[1]))
    windower = f2_model = None
    if use_f2:
        windower = _SeriesWindower(c, d, cfg.window_len, cfg.stride)
        f2_model = AutoencoderModel(_resolve_ae(cfg.f2, windower.input_dim, seeds[2]))

    s_planes = np.zeros((d, b, k))
    t_s = np.zeros_like(values)
    trace: list[float] = []
    prev_outlier_norm: float | None = None
    while_iters = 0
    t_star = values.copy()
    for wit in range(1, cfg.max_while_iters + 1):
        while_iters = wit
        t_l = values - t_s
        lagged = embed_lagged(TimeSeries(t_l), b)
        m_batch = _column_batch(lagged.planes)
        if use_f1:
            _guarded_train(f1_model, m_batch, m_batch, f"while iteration {wit} (smoothing)")
            mhat_batch = f1_model.forward(m_batch)
        else:
            mhat_batch = m_batch
        mhat = _batch_to_planes(mhat_batch, d, b)
        mhat_norm = frobenius_norm(mhat)
        if mhat_norm == 0.0:
            l_planes = np.zeros_like(mhat)
            s_planes = np.zeros_like(mhat)
        else:
            mhat_star = mhat.copy()
            for iit in range(1, cfg.max_outer_iters + 1):
                l_planes = mhat - s_planes
                l_batch = _column_batch(l_planes)
                _guarded_train(
                    inner_model, l_batch, l_batch, f"while {wit}, matrix iteration {iit}"
                )
                recon_batch = inner_model.forward(l_batch)
                l_planes = _batch_to_planes(recon_batch, d, b)
                s_planes = soft_threshold(mhat - l_planes, cfg.lam1)
                inner_loss = rmse(l_batch, recon_batch)
                if not use_f2:
                    trace.append(inner_loss)
                cond1 = frobenius_norm(mhat - l_planes - s_planes) / mhat_norm
                cond2 = frobenius_norm(mhat_star - l_planes - s_planes) / mhat_norm
                mhat_star = l_planes + s_planes
                _log(verbose, "rdae/matrix", iit, inner_loss, cond1, cond2)
                if cond1 < cfg.epsilon or cond2 < cfg.epsilon:
                    break
        t_l = matrix_to_series(hankelize(LaggedMatrix(l_planes))).values
        t_s = matrix_to_series(hankelize(LaggedMatrix(s_planes))).values
        if use_f2:
            t_star = values.copy()
            for oit in range(1, cfg.max_outer_iters + 1):
                t_l = values - t_s
                batch = windower.batch(t_l)
                _guarded_train(f2_model, batch, batch, f"while {wit}, series iteration {oit}")
                recon = windower.fold(f2_model.forward(batch))
                trace.append(rmse(t_l, recon))
                t_l = recon
                t_s = soft_threshold(values - t_l, cfg.lam2)
                cond1 = frobenius_norm(values - t_l - t_s) / t_norm
                cond2 = frobenius_norm(t_star - t_l - t_s) / t_norm
                t_star = t_l + t_s
                _log(verbose, "rdae/series", oit, trace[-1], cond1, cond2)
                if cond1 < cfg.epsilon or cond2 < cfg.epsilon:
                    break
        else:
            t_star = t_l + t_s
        if not np.all(np.isfinite(t_s)):
            raise NumericalError(f"non-finite iterate at while iteration {wit}")
        outlier_norm = frobenius_norm(t_s)
        if prev_outlier_norm is not None:
            change = abs(outlier_norm - prev_outlier_norm) / max(prev_outlier_norm, 1e-12)
            if change < cfg.epsilon or (outlier_norm == 0.0 and prev_outlier_norm == 0.0):
                break
        prev_outlier_norm = outlier_norm
    models = {"inner_ae": inner_model}
    if f1_model is not None:
        models["f1"] = f1_model
    if f2_model is not None:
        models["f2"] = f2_model
    return _finish(values, t_s, t_norm, t_star, while_iters, trace, stats, models)


def train_rdae(ts: TimeSeries, cfg: RdaeConfig, verbose: bool = False) -> Decomposition:
    """Dual-view trainer: lagged-matrix decomposition coupled to the series
    view through Hankelization, each view alternating refits with shrinkage."""
    return _train_rdae_impl(ts, cfg, use_f1=True, use_f2=True, verbose=verbose)


def ablation_variant(
    ts: TimeSeries, cfg: RdaeConfig, drop: str, verbose: bool = False
) -> Decomposition:
    """Dual-view trainer with named parts replaced by identity.

    drop='f1' skips the learned smoothing of the lagged matrix; drop='f2'
    skips the series-view refinement (the matrix decomposition alone drives
    the result and lam2 is unused); drop='f1f2' skips both.
    """
    flags = {"f1": (False, True), "f2": (True, False), "f1f2": (False, False)}
    if drop not in flags:
        raise ParameterError(f"drop must be one of f1, f2, f1f2, got {drop!r}")
    use_f1, use_f2 = flags[drop]
    return _train_rdae_impl(ts, cfg, use_f1=use_f1, use_f2=use_f2, verbose=verbose)


def _train_nrae(ts: TimeSeries, cfg: RaeConfig, verbose: bool) -> Decomposition:
    norm_ts, stats = znormalize(ts)
    values = norm_ts.values
    c, d = values.shape
    t_norm = frobenius_norm(values)
    if t_norm == 0.0:
        return _zero_decomposition(ts, stats)
    windower = _SeriesWindower(c, d, cfg.window_len, cfg.stride)
    model = AutoencoderModel(
        _resolve_ae(cfg.ae, windower.input_dim, _child_seeds(cfg.seed, 1)[0])
    )
    batch = windower.batch(values)
    prev_recon = None
    trace: list[float] = []
    recon = np.zeros_like(values)
    iterations = 0
    for it in range(1, cfg.max_outer_iters + 1):
        iterations = it
        _guarded_train(model, batch, batch, f"epoch {it}")
        recon = windower.fold(model.forward(batch))
        trace.append(rmse(values, recon))
        change = (
            frobenius_norm(recon - prev_recon) / t_norm
            if prev_recon is not None
            else np.inf
        )
        _log(verbose, "nrae", it, trace[-1], 0.0, change)
        prev_recon = recon
        if change < cfg.epsilon:
            break
    t_l = recon
    t_s = values - t_l
    clean = denormalize(TimeSeries(t_l), stats)
    outlier = TimeSeries(t_s * stats.std)
    return Decomposition(clean, outlier, iterations, (0.0, 0.0), trace, stats, {"ae": model})


def _train_nrdae(ts: TimeSeries, cfg: RdaeConfig, verbose: bool) -> Decomposition:
    norm_ts, stats = znormalize(ts)
    values = norm_ts.values
    c, d = values.shape
    b = _resolve_lagged_window(cfg, c)
    t_norm = frobenius_norm(values)
    if t_norm == 0.0:
        return _zero_decomposition(ts, stats)
    col_dim = b * d
    seeds = _child_seeds(cfg.seed, 3)
    f1_model = AutoencoderModel(_resolve_ae(cfg.f1, col_dim, seeds[0], thin=True))
    inner_model = AutoencoderModel(_resolve_ae(cfg.inner_ae, col_dim, seeds[1]))
    windower = _SeriesWindower(c, d, cfg.window_len, cfg.stride)
    f2_model = AutoencoderModel(_resolve_ae(cfg.f2, windower.input_dim, seeds[2]))

    lagged = embed_lagged(TimeSeries(values), b)
    m_batch = _column_batch(lagged.planes)
    m_norm = frobenius_norm(m_batch)
    # every stage trains until its reconstruction stabilizes, under a cap
    # matching the robust variant's nested loops
    epoch_cap = cfg.max_while_iters * cfg.max_outer_iters
    prev = None
    mhat_batch = m_batch
    for it in range(1, epoch_cap + 1):
        _guarded_train(f1_model, m_batch, m_batch, f"smoothing epoch {it}")
        mhat_batch = f1_model.forward(m_batch)
        change = (
            frobenius_norm(mhat_batch - prev) / max(m_norm, 1e-12)
            if prev is not None
            else np.inf
        )
        prev = mhat_batch
        if change < cfg.epsilon:
            break
    mhat_norm = frobenius_norm(mhat_batch)
    prev = None
    l_batch = np.zeros_like(mhat_batch)
    for it in range(1, epoch_cap + 1):
        _guarded_train(inner_model, mhat_batch, mhat_batch, f"matrix epoch {it}")
        l_batch = inner_model.forward(mhat_batch)
        change = (
            frobenius_norm(l_batch - prev) / max(mhat_norm, 1e-12)
            if prev is not None
            else np.inf
        )
        prev = l_batch
        if change < cfg.epsilon:
            break
    l_planes = _batch_to_planes(l_batch, d, b)
    inner_series = matrix_to_series(hankelize(LaggedMatrix(l_planes))).values

    batch = windower.batch(inner_series)
    prev_recon = None
    trace: list[float] = []
    recon = np.zeros_like(values)
    iterations = 0
    for it in range(1, epoch_cap + 1):
        iterations = it
        _guarded_train(f2_model, batch, batch, f"series epoch {it}")
        recon = windower.fold(f2_model.forward(batch))
        trace.append(rmse(inner_series, recon))
        change = (
            frobenius_norm(recon - prev_recon) / t_norm
            if prev_recon is not None
            else np.inf
        )
        _log(verbose, "nrdae", it, trace[-1], 0.0, change)
        prev_recon = recon
        if change < cfg.epsilon:
            break
    t_l = recon
    t_s = values - t_l
    clean = denormalize(TimeSeries(t_l), stats)
    outlier = TimeSeries(t_s * stats.std)
    return Decomposition(
        clean,
        outlier,
        iterations,
        (0.0, 0.0),
        trace,
        stats,
        {"f1": f1_model, "inner_ae": inner_model, "f2": f2_model},
    )


def train_nonrobust(
    ts: TimeSeries, cfg, variant: str, verbose: bool = False
) -> Decomposition:
    """Reconstruction-error baselines without shrinkage or alternation.

    'n-rae': a plain windowed autoencoder reconstructs the series; clean is
    the reconstruction and outlier the residual. 'n-rdae': a plain
    autoencoder reconstructs the (smoothed) lagged matrix, the result maps
    back to a series, and a second network reconstructs that series.
    """
    key = variant.lower().replace("_", "-")
    if key in ("n-rae", "nrae"):
        if not isinstance(cfg, RaeConfig):
            raise ParameterError("n-rae requires a RaeConfig")
        return _train_nrae(ts, cfg, verbose)
    if key in ("n-rdae", "nrdae"):
        if not isinstance(cfg, RdaeConfig):
            raise ParameterError("n-rdae requires an RdaeConfig")
        return _train_nrdae(ts, cfg, verbose)
    raise ParameterError(f"unknown non-robust variant {variant!r}")


TRAIN_METHODS = ("rae", "rdae", "nrae", "nrdae", "rdae-f1", "rdae-f2", "rdae-f1f2")


def train(ts: TimeSeries, method: str, cfg, verbose: bool = False) -> Decomposition:
    """Dispatch by method name (see TRAIN_METHODS)."""
    method = method.lower()
    if method == "rae":
        return train_rae(ts, cfg, verbose)
    if method == "rdae":
        return train_rdae(ts, cfg, verbose)
    if method in ("nrae", "n-rae", "nrdae", "n-rdae"):
        return train_nonrobust(ts, cfg, method, verbose)
    if method.startswith("rdae-"):
        return ablation_variant(ts, cfg, method.removeprefix("rdae-"), verbose)
    raise ParameterError(f"unknown method {method!r}; expected one of {TRAIN_METHODS}")
