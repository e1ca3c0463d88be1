"""Post-hoc explainability scores for a clean series.

Both scores ask how simple a description suffices to reproduce the series
within an RMSE threshold gamma: the minimal polynomial degree
(``es_prm``) or the minimal number of leading singular-spectrum
components (``es_ssa``). Smaller scores mean a simpler, easier-to-read
clean series.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .hankel import TimeSeries, default_window_len, embed_lagged, hankelize, LaggedMatrix, matrix_to_series
from .linalg import least_squares, rmse, svd

__all__ = [
    "ExplainabilityResult",
    "fit_polynomial",
    "es_prm",
    "ssa_decompose",
    "es_ssa",
]

DEFAULT_NMAX = 9


@dataclass(frozen=True)
class ExplainabilityResult:
    """Outcome of one explainability scan.

    ``score`` is the smallest order whose fit RMSE drops below ``gamma``,
    or None when no order up to ``n_max`` achieves that.
    ``rmse_by_order`` lists (order, rmse) pairs for the whole scan.
    """

    method: str
    gamma: float
    score: int | None
    rmse_by_order: tuple[tuple[int, float], ...]
    n_max: int

    @property
    def explainable(self) -> bool:
        return self.score is not None

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "gamma": self.gamma,
            "score": self.score,
            "explainable": self.explainable,
            "rmse_by_order": [[n, r] for n, r in self.rmse_by_order],
            "n_max": self.n_max,
        }


def fit_polynomial(ts: TimeSeries, degree: int) -> tuple[TimeSeries, float]:
    """Least-squares fit of a degree-N polynomial over time in [0, 1].

    Each dimension is fitted independently; the returned RMSE pools the
    squared errors over all C*D entries.
    """
    if degree < 0:
        raise ParameterError(f"degree must be >= 0, got {degree}")
    c = ts.length
    if c <= degree:
        raise ParameterError(f"series length {c} must exceed degree {degree}")
    t = np.linspace(0.0, 1.0, c) if c > 1 else np.zeros(1)
    design = np.vander(t, degree + 1, increasing=True)
    coeffs = least_squares(design, ts.values)
    fitted = design @ coeffs
    return TimeSeries(fitted), rmse(fitted, ts.values)


def es_prm(
    clean: TimeSeries, gamma: float, n_max: int = DEFAULT_NMAX
) -> ExplainabilityResult:
    """Minimal polynomial degree fitting the series within gamma.

    Degrees 1..n_max are scanned in order; the degree-0 (constant) RMSE is
    reported in the curve but does not count as a score.
    """
    if not gamma > 0:
        raise ParameterError(f"gamma must be positive, got {gamma}")
    if n_max < 1:
        raise ParameterError(f"n_max must be >= 1, got {n_max}")
    curve = []
    score = None
    for degree in range(0, n_max + 1):
        _, err = fit_polynomial(clean, degree)
        curve.append((degree, err))
        if score is None and degree >= 1 and err < gamma:
            score = degree
    return ExplainabilityResult("prm", float(gamma), score, tuple(curve), n_max)


def _ssa_plane_components(plane: np.ndarray) -> list[tuple[float, np.ndarray]]:
    """Rank-1 pieces of one B x K plane, Hankelized back to 1-D series."""
    u, s, v = svd(plane)
    out = []
    for i in range(s.size):
        rank1 = np.outer(u[:, i] * s[i], v[:, i])
        series = matrix_to_series(hankelize(LaggedMatrix(rank1)))
        out.append((float(s[i]), series.values[:, 0]))
    return out


def ssa_decompose(
    ts: TimeSeries, window_len: int | None = None
) -> list[TimeSeries]:
    """Singular-spectrum components ordered by decreasing singular value.

    Per dimension, the series embeds into its lagged matrix, each singular
    triple becomes a rank-1 matrix, and anti-diagonal averaging maps it
    back to series form. For multivariate input each component lives in a
    single dimension (zero elsewhere) and the ordering is global across
    dimensions. Components sum to the input.
    """
    b = window_len if window_len is not None else default_window_len(ts.length)
    lagged = embed_lagged(ts, b)
    tagged: list[tuple[float, int, np.ndarray]] = []
    for dim in range(ts.dims):
        for sigma, comp in _ssa_plane_components(lagged.planes[dim]):
            tagged.append((sigma, dim, comp))
    tagged.sort(key=lambda item: -item[0])
    components = []
    for _, dim, comp in tagged:
        values = np.zeros_like(ts.values)
        values[:, dim] = comp
        components.append(TimeSeries(values))
    return components


def es_ssa(
    clean: TimeSeries,
    gamma: float,
    n_max: int = DEFAULT_NMAX,
    window_len: int | None = None,
) -> ExplainabilityResult:
    """Minimal number of leading spectrum components fitting within gamma."""
    if not gamma > 0:
        raise ParameterError(f"gamma must be positive, got {gamma}")
    if n_max < 1:
        raise ParameterError(f"n_max must be >= 1, got {n_max}")
    components = ssa_decompose(clean, window_len)
    curve = []
    score = None
    partial = np.zeros_like(clean.values)
    for n, comp in enumerate(components[:n_max], start=1):
        partial += comp.values
        err = rmse(partial, clean.values)
        curve.append((n, err))
        if score is None and err < gamma:
            score = n
    return ExplainabilityResult("ssa", float(gamma), score, tuple(curve), n_max)
