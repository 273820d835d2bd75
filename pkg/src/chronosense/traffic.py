"""AR(p) traffic prediction and occupancy profiles."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateModelError, InputError
from .numerics import levinson_durbin


@dataclass(frozen=True)
class BandSeries:
    band_id: str
    counts: tuple[int, ...]
    unit: str = "period"


@dataclass(frozen=True)
class TrafficHistory:
    bands: tuple[BandSeries, ...]

    def __post_init__(self):
        if not self.bands:
            raise InputError("traffic history has no bands")
        ids = [b.band_id for b in self.bands]
        if len(set(ids)) != len(ids):
            raise InputError("band ids must be unique")
        lengths = {len(b.counts) for b in self.bands}
        if len(lengths) != 1:
            raise InputError(f"ragged series: lengths {sorted(lengths)}")
        if lengths.pop() < 2:
            raise InputError("each band needs at least 2 observations")
        for b in self.bands:
            if any(c < 0 for c in b.counts):
                raise InputError(f"negative count in band {b.band_id!r}")

    @property
    def band_ids(self) -> tuple[str, ...]:
        return tuple(b.band_id for b in self.bands)


@dataclass(frozen=True)
class ARModel:
    """Fitted AR(p) model.

    ``coefficients`` follow the forward regression
    ``x(n+p) = a_1 x(n) + ... + a_p x(n+p-1) + w(n+p)``, so ``a_1`` weighs
    the oldest of the last ``p`` samples and ``a_p`` the newest.
    """

    order: int
    coefficients: tuple[float, ...]
    mean: float
    innovation_variance: float
    degenerate: bool = False

    @property
    def lag_coefficients(self) -> tuple[float, ...]:
        """Coefficients indexed by lag (lag 1 first)."""
        return tuple(reversed(self.coefficients))


def autocorrelation(counts: Sequence[float], max_lag: int) -> np.ndarray:
    """Biased (divide-by-N) autocorrelation of the mean-removed series."""
    x = np.asarray(counts, dtype=float)
    x = x - x.mean()
    n = len(x)
    return np.array([np.dot(x[: n - k], x[k:]) / n for k in range(max_lag + 1)])


def fit_ar(counts: Sequence[int], order: int = 2) -> ARModel:
    if order < 1:
        raise InputError(f"AR order must be >= 1, got {order}")
    if len(counts) < 10 * order:
        raise InputError(f"need at least {10 * order} samples for AR({order}), got {len(counts)}")
    mean = float(np.mean(counts))
    r = autocorrelation(counts, order)
    if r[0] <= 1e-12 * max(1.0, mean * mean):
        return ARModel(order, (0.0,) * order, mean, 0.0, degenerate=True)
    try:
        phi, err = levinson_durbin(r)
    except DegenerateModelError:
        return ARModel(order, (0.0,) * order, mean, 0.0, degenerate=True)
    return ARModel(order, tuple(reversed(phi)), mean, max(err, 0.0))


def predict_next(model: ARModel, counts: Sequence[float]) -> float:
    """One-step prediction, clamped at zero."""
    if model.degenerate:
        return max(model.mean, 0.0)
    p = model.order
    if len(counts) < p:
        raise InputError(f"series of length {len(counts)} shorter than AR order {p}")
    tail = [float(v) - model.mean for v in counts[len(counts) - p:]]
    value = model.mean + sum(a * x for a, x in zip(model.coefficients, tail))
    return max(value, 0.0)


@dataclass(frozen=True)
class OccupancyProfile:
    band_ids: tuple[str, ...]
    q: tuple[float, ...]
    n_raw: tuple[float, ...]
    # permutation[j] is the band index holding the j-th smallest probability
    permutation: tuple[int, ...] = field(default=())
    p_sorted: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if not self.permutation:
            perm = tuple(sorted(range(len(self.q)), key=lambda i: (self.q[i], self.band_ids[i])))
            object.__setattr__(self, "permutation", perm)
        if not self.p_sorted:
            object.__setattr__(self, "p_sorted", tuple(self.q[i] for i in self.permutation))

    @property
    def size(self) -> int:
        return len(self.q)

    def descending(self) -> tuple[float, ...]:
        """Probabilities from most to least occupied; the weights that pair
        with ascending sensing times."""
        return tuple(reversed(self.p_sorted))


def occupancy_profile(predictions: Sequence[float], smoothing: float = 1.0,
                      band_ids: Sequence[str] | None = None) -> OccupancyProfile:
    """Normalize predicted counts (plus add-k smoothing) into a pmf."""
    n = [float(v) for v in predictions]
    if len(n) < 2:
        raise InputError("need at least 2 bands")
    if any(v < 0 for v in n):
        raise InputError("predictions must be non-negative")
    if smoothing < 0:
        raise InputError("smoothing must be non-negative")
    if band_ids is None:
        band_ids = [f"band{i + 1}" for i in range(len(n))]
    if len(band_ids) != len(n):
        raise InputError("band_ids and predictions differ in length")
    shifted = [v + smoothing for v in n]
    total = sum(shifted)
    if total <= 0.0:
        raise InputError("all predictions are zero; profile undefined without smoothing")
    if any(v == 0.0 for v in shifted):
        raise InputError("zero-probability band; use smoothing > 0")
    q = tuple(v / total for v in shifted)
    return OccupancyProfile(band_ids=tuple(band_ids), q=q, n_raw=tuple(n))


def profile_from_history(history: TrafficHistory, order: int = 2,
                         smoothing: float = 1.0) -> tuple[OccupancyProfile, list[ARModel]]:
    models = [fit_ar(b.counts, order) for b in history.bands]
    preds = [predict_next(m, b.counts) for m, b in zip(models, history.bands)]
    return occupancy_profile(preds, smoothing, history.band_ids), models


def synthesize_history(band_count: int, length: int = 40, seed: int = 0,
                       base: float = 50.0, spread: float = 0.0) -> TrafficHistory:
    """AR(1) packet-count traces for tests and demos.

    Band ``i`` fluctuates around ``base * (1 + spread * i)``.
    """
    rng = np.random.default_rng(seed)
    bands = []
    for i in range(band_count):
        level = base * (1.0 + spread * i)
        x, series = 0.0, []
        for _ in range(length):
            x = 0.5 * x + rng.normal(0.0, 0.1 * level)
            series.append(max(int(round(level + x)), 0))
        bands.append(BandSeries(f"b{i + 1:02d}", tuple(series)))
    return TrafficHistory(tuple(bands))
