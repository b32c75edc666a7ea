"""Cumulative degree distributions and least-squares tail fits.

Both models are fitted as straight lines in log space with every support
point weighted equally:

* exponential ``P(K >= k) = a * exp(-rate * k)``: ``ln P`` against ``k``
* power law ``P(K >= k) = a * k ** -exponent``: ``ln P`` against ``ln k``
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import FitError

__all__ = ["CumulativeDegreeDistribution", "FitResult", "Classification",
           "cumulative_distribution", "fit", "classify", "MODELS"]

log = logging.getLogger(__name__)

MODELS = ("exponential", "power_law")


@dataclass(frozen=True)
class CumulativeDegreeDistribution:
    k: np.ndarray
    survival: np.ndarray


@dataclass(frozen=True)
class FitResult:
    model: str
    amplitude: float
    rate_or_exponent: float
    sse: float
    r_squared: float
    low_confidence: bool = False


def cumulative_distribution(g):
    """Empirical ``P(K >= k)`` for every integer ``k`` from min to max degree.

    Isolated nodes are left out of the degree sequence.
    """
    if g.n < 2 or g.m == 0:
        raise FitError("degree distribution needs at least 2 nodes and one edge")
    deg = g.degrees
    isolated = int(np.sum(deg == 0))
    if isolated:
        log.info("excluding %d isolated nodes from the degree sequence", isolated)
    deg = np.sort(deg[deg > 0])
    k = np.arange(deg[0], deg[-1] + 1)
    survival = 1.0 - np.searchsorted(deg, k, side="left") / len(deg)
    return CumulativeDegreeDistribution(k, survival)


def _design(model, k):
    x = np.log(k) if model == "power_law" else np.asarray(k, dtype=float)
    return np.column_stack([np.ones(len(k)), x])


def fit(dist, model):
    """Least-squares fit of one model to a cumulative distribution.

    ``sse`` and ``r_squared`` are measured on ``ln P``. Fits on fewer than
    three support points are flagged ``low_confidence``.
    """
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}, got {model!r}")
    k = np.asarray(dist.k, dtype=float)
    y = np.log(np.asarray(dist.survival, dtype=float))
    if len(k) < 2:
        raise FitError(f"need at least 2 support points, got {len(k)}")
    X = _design(model, k)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    sse = float(resid @ resid)
    sst = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - sse / sst if sst > 0 else (1.0 if sse == 0 else 0.0)
    return FitResult(model, float(np.exp(coef[0])), float(-coef[1]), sse, r2, len(k) < 3)


@dataclass(frozen=True)
class Classification:
    model: str  # "exponential", "power_law" or "inconclusive"
    exponential: FitResult = None
    power_law: FitResult = None


def classify(g, tie=1e-9):
    """Pick the model with the higher ``r_squared``.

    Returns ``"inconclusive"`` when the fits tie within ``tie`` or the degree
    sequence has too few distinct values to fit.
    """
    dist = cumulative_distribution(g)
    try:
        ex = fit(dist, "exponential")
        pl = fit(dist, "power_law")
    except FitError:
        return Classification("inconclusive")
    if abs(ex.r_squared - pl.r_squared) < tie:
        return Classification("inconclusive", ex, pl)
    best = "exponential" if ex.r_squared > pl.r_squared else "power_law"
    return Classification(best, ex, pl)
