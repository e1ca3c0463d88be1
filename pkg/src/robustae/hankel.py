"""Time series carrier type and the lagged-matrix (Hankel) view.

A series of length C embeds into a B x K sliding-window matrix per
dimension (K = C - B + 1), whose anti-diagonals all read the same
observation. ``hankelize`` projects an arbitrary matrix back onto that
structure by anti-diagonal averaging, and ``matrix_to_series`` inverts the
embedding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DimensionError, InputError, ParameterError

__all__ = [
    "TimeSeries",
    "LaggedMatrix",
    "embed_lagged",
    "hankelize",
    "matrix_to_series",
    "default_window_len",
]


@dataclass
class TimeSeries:
    """A C x D sequence of real-valued observations.

    ``labels``, when present, are ground-truth outlier flags used only for
    evaluation, never for training.
    """

    values: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2:
            raise DimensionError(f"TimeSeries values must be 1-D or 2-D, got {v.ndim}-D")
        if not np.all(np.isfinite(v)):
            raise InputError("TimeSeries values must be finite")
        self.values = v
        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=bool)
            if lab.shape != (v.shape[0],):
                raise DimensionError(
                    f"labels length {lab.shape} does not match series length {v.shape[0]}"
                )
            self.labels = lab

    @property
    def length(self) -> int:
        return self.values.shape[0]

    @property
    def dims(self) -> int:
        return self.values.shape[1]


@dataclass
class LaggedMatrix:
    """Per-dimension B x K sliding-window planes of a series, shape (D, B, K)."""

    planes: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.planes, dtype=np.float64)
        if p.ndim == 2:
            p = p[None, :, :]
        if p.ndim != 3:
            raise DimensionError(f"LaggedMatrix planes must be 2-D or 3-D, got {p.ndim}-D")
        self.planes = p

    @property
    def window_len(self) -> int:
        return self.planes.shape[1]

    @property
    def n_windows(self) -> int:
        return self.planes.shape[2]

    @property
    def dims(self) -> int:
        return self.planes.shape[0]

    @property
    def series_len(self) -> int:
        return self.window_len + self.n_windows - 1


def default_window_len(length: int, exponent: float = 2.0) -> int:
    """Default window length (ln C)**exponent, rounded and clamped to (1, C/2)."""
    if length < 5:
        raise ParameterError(f"series length {length} too short for a lagged view")
    b = int(round(math.log(length) ** exponent))
    upper = (length - 1) // 2 if length % 2 == 1 else length // 2 - 1
    return min(max(b, 2), max(upper, 2))


def embed_lagged(ts: TimeSeries, window_len: int) -> LaggedMatrix:
    """Embed a series into its lagged matrix with window length B.

    Column j of dimension d holds observations j..j+B-1, so K = C - B + 1
    columns and the Hankel property holds exactly.
    """
    c = ts.length
    if not 1 < window_len <= c:
        raise ParameterError(
            f"window length must lie in (1, {c}], got {window_len}"
        )
    # sliding_window_view over (C, D) gives (K, D, B); reorder to (D, B, K)
    win = np.lib.stride_tricks.sliding_window_view(ts.values, window_len, axis=0)
    return LaggedMatrix(np.ascontiguousarray(win.transpose(1, 2, 0)))


def _antidiag_index(b: int, k: int) -> np.ndarray:
    return np.add.outer(np.arange(b), np.arange(k))


def _antidiag_counts(b: int, k: int) -> np.ndarray:
    a = np.arange(b + k - 1)
    return np.minimum(np.minimum(a + 1, b + k - 1 - a), min(b, k))


def hankelize(m: LaggedMatrix | np.ndarray) -> LaggedMatrix:
    """Project onto Hankel structure by replacing each anti-diagonal by its mean.

    Exactly idempotent, linear, and the Frobenius-nearest Hankel matrix to
    the input.
    """
    lm = m if isinstance(m, LaggedMatrix) else LaggedMatrix(m)
    d, b, k = lm.planes.shape
    idx = _antidiag_index(b, k)
    counts = _antidiag_counts(b, k)
    rows = np.minimum(np.arange(b + k - 1), b - 1)
    cols = np.arange(b + k - 1) - rows
    out = np.empty_like(lm.planes)
    for di in range(d):
        plane = lm.planes[di]
        rep = plane[rows, cols]
        if np.array_equal(plane, rep[idx]):
            # already Hankel: return it unchanged, which makes the
            # projection exactly idempotent
            out[di] = plane
            continue
        sums = np.bincount(idx.ravel(), weights=plane.ravel(), minlength=b + k - 1)
        out[di] = (sums / counts)[idx]
    return LaggedMatrix(out)


def matrix_to_series(
    h: LaggedMatrix | np.ndarray, tol: float = 1e-9
) -> TimeSeries:
    """Invert the lagged embedding: read each anti-diagonal's shared value.

    The input must satisfy the Hankel property within ``tol``; entries are
    read, not averaged, so the embed -> invert roundtrip is bit-exact.
    """
    lm = h if isinstance(h, LaggedMatrix) else LaggedMatrix(h)
    d, b, k = lm.planes.shape
    idx = _antidiag_index(b, k)
    scale = max(1.0, float(np.max(np.abs(lm.planes))) if lm.planes.size else 1.0)
    # representative entry per anti-diagonal: first row where it appears
    rows = np.minimum(np.arange(b + k - 1), b - 1)
    cols = np.arange(b + k - 1) - rows
    values = np.empty((b + k - 1, d))
    for di in range(d):
        plane = lm.planes[di]
        rep = plane[rows, cols]
        dev = np.max(np.abs(plane - rep[idx]))
        if dev > tol * scale:
            raise ContractError(
                f"input is not Hankel: anti-diagonal deviation {dev:.3e}"
            )
        values[:, di] = rep
    return TimeSeries(values)
