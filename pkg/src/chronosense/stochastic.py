"""Moments of the sensing-time random variable Z and solution selection.

Z takes the j-th sensing time with the j-th probability. The closed-form
moment functions (``ap_moments`` and friends) require ascending-sorted
probabilities; the fixed-point solvers accept any weight order, because the
planner pairs ascending times with descending occupancy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import (
    DegenerateModelError,
    InputError,
    NoFixedPointError,
    NoRootsError,
    NumericalError,
    UnsortedProbabilitiesError,
)
from .numerics import Polynomial, real_roots
from .schemes import AGP, AP, GP, AllocationScheme, Explicit, expand_scheme


@dataclass(frozen=True)
class MomentSummary:
    mean: float
    second: float
    variance: float


@dataclass(frozen=True)
class SortedProbWeights:
    mu: float
    alpha: float

    @property
    def spread(self) -> float:
        """alpha - mu**2, the variance of the position index."""
        return self.alpha - self.mu * self.mu


def _check_pmf(probs: Sequence[float]) -> tuple[float, ...]:
    p = tuple(float(v) for v in probs)
    if not p:
        raise InputError("empty probability vector")
    if any(v < 0.0 for v in p):
        raise InputError("negative probability")
    if abs(math.fsum(p) - 1.0) > DEFAULT_TOLERANCES.pmf_sum:
        raise InputError(f"probabilities sum to {math.fsum(p)}, not 1")
    return p


def _require_sorted(probs: Sequence[float]) -> tuple[float, ...]:
    p = _check_pmf(probs)
    if any(a > b for a, b in zip(p, p[1:])):
        raise UnsortedProbabilitiesError("probabilities must be sorted ascending")
    return p


def _raw_moments(times: Sequence[float], p: Sequence[float]) -> MomentSummary:
    mean = math.fsum(t * w for t, w in zip(times, p))
    second = math.fsum(t * t * w for t, w in zip(times, p))
    var = math.fsum(w * (t - mean) ** 2 for t, w in zip(times, p))
    return MomentSummary(mean, second, var)


def moments(times: Sequence[float], probs: Sequence[float]) -> MomentSummary:
    """Mean, second moment and variance of Z by direct summation."""
    if len(times) != len(probs):
        raise InputError(f"{len(times)} times but {len(probs)} probabilities")
    return _raw_moments(times, _check_pmf(probs))


def sorted_weights(probs: Sequence[float]) -> SortedProbWeights:
    p = _require_sorted(probs)
    mu = math.fsum(j * w for j, w in enumerate(p))
    alpha = math.fsum(j * j * w for j, w in enumerate(p))
    return SortedProbWeights(mu, alpha)


def ap_moments(t1: float, d: float, probs: Sequence[float]) -> MomentSummary:
    w = sorted_weights(probs)
    mean = t1 + w.mu * d
    second = t1 * t1 + w.alpha * d * d + 2.0 * t1 * d * w.mu
    return MomentSummary(mean, second, w.spread * d * d)


def _power_sum(p: Sequence[float], x: float, index_power: int = 0) -> float:
    # sum_j j**index_power * x**j * p_j with j counted from 0
    return math.fsum((j ** index_power) * (x ** j) * w for j, w in enumerate(p))


def gp_moments(t1: float, d: float, probs: Sequence[float]) -> MomentSummary:
    p = _require_sorted(probs)
    f_d = _power_sum(p, d)
    f_d2 = _power_sum(p, d * d)
    return MomentSummary(t1 * f_d, t1 * t1 * f_d2, t1 * t1 * (f_d2 - f_d * f_d))


def agp_moments(t1: float, d: float, r: float, probs: Sequence[float]) -> MomentSummary:
    p = _require_sorted(probs)
    f1 = _power_sum(p, r)
    f2 = _power_sum(p, r, 1)
    f3 = _power_sum(p, r * r)
    f4 = _power_sum(p, r * r, 2)
    f5 = _power_sum(p, r * r, 1)
    mean = t1 * f1 + d * f2
    second = t1 * t1 * f3 + d * d * f4 + 2.0 * t1 * d * f5
    return MomentSummary(mean, second, second - mean * mean)


# --------------------------------------------------------------------------
# E[Z] = Var[Z] fixed points
# --------------------------------------------------------------------------

def _weights(probs: Sequence[float]) -> tuple[SortedProbWeights, tuple[float, ...]]:
    p = _check_pmf(probs)
    mu = math.fsum(j * w for j, w in enumerate(p))
    alpha = math.fsum(j * j * w for j, w in enumerate(p))
    return SortedProbWeights(mu, alpha), p


def ap_fixed_point(t1: float, probs: Sequence[float]) -> float:
    """Positive d with E[Z] = Var[Z] for AP times ``t1 + j d``.

    Solves ``(alpha - mu^2) d^2 - mu d - t1 = 0``; the product of the roots
    is ``-t1 / (alpha - mu^2) < 0`` so exactly one root is positive.
    """
    w, _ = _weights(probs)
    a = w.spread
    if a <= 1e-15:
        raise DegenerateModelError("alpha - mu^2 is zero; E[Z] = Var[Z] has no unique root")
    if t1 <= 0:
        raise InputError("t1 must be positive")
    disc = w.mu * w.mu + 4.0 * a * t1
    d = (w.mu + math.sqrt(disc)) / (2.0 * a)
    mean, var = t1 + w.mu * d, a * d * d
    if abs(mean - var) > 1e-9 * max(1.0, mean):
        raise NumericalError(f"AP fixed point residual {abs(mean - var):.3g}")
    return d


def gp_fixed_point_polynomial(t1: float, probs: Sequence[float]) -> Polynomial:
    """``t1 f(d^2) - t1 f(d)^2 - f(d)`` with ``f(d) = sum_j p_j d^(j-1)``."""
    f = Polynomial(_check_pmf(probs))
    return t1 * f.substitute_square() - t1 * (f * f) - f


def _smallest_feasible(roots: Sequence[float], upper: float = math.inf) -> float | None:
    feasible = [x for x in roots if 1.0 < x <= upper]
    return min(feasible) if feasible else None


def gp_fixed_point(t1: float, probs: Sequence[float]) -> float:
    """Smallest ratio d > 1 at which GP times satisfy E[Z] = Var[Z]."""
    if len(probs) < 2:
        raise InputError("need at least 2 bands")
    p = _check_pmf(probs)
    poly = gp_fixed_point_polynomial(t1, p)
    try:
        roots = real_roots(poly)
    except NoRootsError as exc:
        raise NoFixedPointError(str(exc)) from exc
    d = _smallest_feasible(roots)
    if d is None:
        raise NoFixedPointError(f"no real root > 1 among {roots}")
    m = _raw_moments([t1 * d ** j for j in range(len(p))], p)
    if abs(m.mean - m.variance) > 1e-6 * max(1.0, m.mean):
        raise NumericalError(f"GP fixed point residual {abs(m.mean - m.variance):.3g}")
    return d


def agp_gap_polynomial(t1: float, probs: Sequence[float], r: float | None = None) -> Polynomial:
    """E[Z] - Var[Z] as a polynomial in d for AGP times ``(t1 + j d) r^j``;
    ``r=None`` ties the ratio to the difference."""
    p = _check_pmf(probs)
    x = Polynomial((0.0, 1.0))
    mean, second = Polynomial((0.0,)), Polynomial((0.0,))
    for j, w in enumerate(p):
        ratio = Polynomial((1.0,))
        for _ in range(j):
            ratio = ratio * (x if r is None else r)
        term = (t1 + j * x) * ratio
        mean = mean + w * term
        second = second + w * (term * term)
    return mean - (second - mean * mean)


def agp_fixed_point(t1: float, probs: Sequence[float], d_max: float = math.inf) -> float:
    """Smallest d in (1, d_max] at which AGP times ``(t1 + j d) d^j`` satisfy
    E[Z] = Var[Z]."""
    if len(probs) < 2:
        raise InputError("need at least 2 bands")
    p = _check_pmf(probs)
    gap = agp_gap_polynomial(t1, p)
    try:
        roots = real_roots(gap)
    except NoRootsError as exc:
        raise NoFixedPointError("E[Z] - Var[Z] is constant in d") from exc
    d = _smallest_feasible(roots, d_max)
    if d is None:
        raise NoFixedPointError(f"no sign change of E[Z] - Var[Z] in (1, {d_max}]")
    m = _raw_moments([(t1 + j * d) * d ** j for j in range(len(p))], p)
    if abs(m.mean - m.variance) > 1e-6 * max(1.0, m.mean):
        raise NumericalError(f"AGP fixed point residual {abs(m.mean - m.variance):.3g}")
    return d


# --------------------------------------------------------------------------
# Pareto front and selection
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ParetoPoint:
    scheme: AllocationScheme | None
    mean: float
    variance: float


def pareto_front(points: Sequence[ParetoPoint]) -> list[ParetoPoint]:
    """Points not dominated in (mean, variance), sorted by mean.

    A point is dominated when another has mean and variance both no larger
    and at least one strictly smaller. Identical points do not dominate each
    other and are all kept.
    """
    order = sorted(range(len(points)), key=lambda i: (points[i].mean, points[i].variance, i))
    front = []
    best_var, best_mean = math.inf, math.inf
    for i in order:
        pt = points[i]
        dominated = best_var < pt.variance or (best_var == pt.variance and best_mean < pt.mean)
        if not dominated:
            front.append(pt)
        if pt.variance < best_var:
            best_var, best_mean = pt.variance, pt.mean
    return front


class Policy(str, Enum):
    MIN_MIN = "min-min"
    PARETO = "pareto"
    FIXED_POINT = "fixed-point"
    MAX_T1 = "max-t1"


def _fixed_point_for(scheme: AllocationScheme, probs: Sequence[float]) -> float:
    if isinstance(scheme, AP):
        return ap_fixed_point(scheme.t1, probs)
    if isinstance(scheme, GP):
        return gp_fixed_point(scheme.t1, probs)
    if isinstance(scheme, AGP):
        return agp_fixed_point(scheme.t1, probs)
    raise TypeError("explicit schemes have no fixed-point ratio")


def trim_extremes(solutions: Sequence[AllocationScheme],
                  cutoffs: tuple[float, float]) -> list[AllocationScheme]:
    """Drop parametric solutions whose t1 or d falls outside the given
    percentile band. Returns the input unchanged if nothing would survive."""
    lo, hi = cutoffs
    params = [s for s in solutions if not isinstance(s, Explicit)]
    if len(params) < 3:
        return list(solutions)
    t1s = np.array([s.t1 for s in params], dtype=float)
    ds = np.array([s.d for s in params], dtype=float)
    t_lo, t_hi = np.percentile(t1s, [lo, hi])
    d_lo, d_hi = np.percentile(ds, [lo, hi])
    kept = [s for s in params if t_lo <= s.t1 <= t_hi and d_lo <= s.d <= d_hi]
    return kept or list(solutions)


def select_solution(solutions: Sequence[AllocationScheme], probs: Sequence[float],
                    policy: Policy | str = Policy.MIN_MIN,
                    trim: tuple[float, float] | None = None) -> AllocationScheme:
    """Pick one scheme from a candidate family.

    ``probs`` weigh the ascending time positions. Policies:

    * ``min-min``: smallest (t1, d); explicit candidates by (mean, variance).
    * ``pareto``: each candidate's own E=Var fixed point is rounded to an
      integer and the candidate whose d is closest wins (ties: smaller t1).
      Explicit candidates: the Pareto-front member with smallest |E - Var|.
    * ``fixed-point``: smallest |E[Z] - Var[Z]| over all candidates.
    * ``max-t1``: largest t1 (ties: smaller d).
    """
    if not solutions:
        raise InputError("no solutions to select from")
    policy = Policy(policy)
    cands = list(solutions)
    if trim is not None:
        cands = trim_extremes(cands, trim)
    m = len(probs)
    scored = [(s, moments(expand_scheme(s, m), probs)) for s in cands]

    def gap(item):
        return abs(item[1].mean - item[1].variance)

    explicit = [s for s in cands if isinstance(s, Explicit)]
    if policy is Policy.FIXED_POINT:
        return min(scored, key=lambda it: (gap(it), it[1].mean))[0]
    if explicit:
        if policy is Policy.MAX_T1:
            raise InputError("max-t1 applies to parametric families only")
        if policy is Policy.MIN_MIN:
            return min(scored, key=lambda it: (it[1].mean, it[1].variance))[0]
        pts = [ParetoPoint(s, ms.mean, ms.variance) for s, ms in scored]
        front = pareto_front(pts)
        return min(front, key=lambda pt: (abs(pt.mean - pt.variance), pt.mean)).scheme

    if policy is Policy.MIN_MIN:
        return min(cands, key=lambda s: (s.t1, s.d))
    if policy is Policy.MAX_T1:
        return min(cands, key=lambda s: (-s.t1, s.d))

    best, best_key = None, None
    for s in cands:
        try:
            target = round(_fixed_point_for(s, probs))
        except (NoFixedPointError, DegenerateModelError, InputError):
            continue
        key = (abs(s.d - target), s.t1)
        if best_key is None or key < best_key:
            best, best_key = s, key
    if best is None:
        raise NoFixedPointError("no candidate admits an E[Z] = Var[Z] fixed point")
    return best
