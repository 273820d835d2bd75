"""The variance matrix G = diag(p) - p p^T, with Var[Z] = T^T G T.

G is symmetric positive semidefinite, every row sums to zero and the
all-ones vector spans its null space when all p_i > 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import InputError, NumericalError
from .numerics import EigenSummary, Polynomial, faddeev_leverrier, sym_eigen


@dataclass(frozen=True, eq=False)
class VarianceMatrix:
    probs: tuple[float, ...]
    G: np.ndarray

    @property
    def size(self) -> int:
        return len(self.probs)

    @cached_property
    def trace(self) -> float:
        return float(np.trace(self.G))

    @cached_property
    def charpoly(self) -> Polynomial:
        return faddeev_leverrier(self.G)

    @cached_property
    def eigen(self) -> EigenSummary:
        return sym_eigen(self.G)

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigen.eigenvalues)))


def build_g(probs: Sequence[float]) -> VarianceMatrix:
    p = np.asarray([float(v) for v in probs])
    if p.ndim != 1 or p.size == 0:
        raise InputError("probabilities must be a non-empty vector")
    if np.any(p <= 0.0):
        raise InputError("all probabilities must be positive")
    if abs(math.fsum(p) - 1.0) > DEFAULT_TOLERANCES.pmf_sum:
        raise InputError(f"probabilities sum to {math.fsum(p)}, not 1")
    g = np.diag(p) - np.outer(p, p)
    return VarianceMatrix(tuple(p.tolist()), g)


def g_trace(vm: VarianceMatrix) -> float:
    """1 - sum p_i^2 (one minus the order-2 Tsallis sum)."""
    return 1.0 - math.fsum(v * v for v in vm.probs)


@dataclass(frozen=True)
class DeterminantCheck:
    det: float
    rank_one_det: float  # det(I - F) with F = D^{-1} C C^T, via 1 + trace(-F)


def g_det(vm: VarianceMatrix) -> DeterminantCheck:
    n = vm.size
    det = ((-1) ** n) * vm.charpoly.coeffs[0]
    if abs(det) > DEFAULT_TOLERANCES.det_zero:
        raise NumericalError(f"det(G) = {det:.3g} is not zero")
    p = np.asarray(vm.probs)
    f = np.outer(np.ones(n), p)
    return DeterminantCheck(det=det, rank_one_det=1.0 + float(np.trace(-f)))


def spectral_bounds(vm: VarianceMatrix) -> tuple[float, float]:
    """(min_j, max_j) of the absolute row sums 2 p_j (1 - p_j).

    Only the upper value is a guaranteed bound on the spectral radius
    (Gershgorin); the lower value is a diagnostic and fails for e.g. the
    uniform pmf on three bands.
    """
    row = [2.0 * v * (1.0 - v) for v in vm.probs]
    return min(row), max(row)


def uniformize(vm: VarianceMatrix) -> np.ndarray:
    """Row-stochastic P = I - G / theta, theta the largest diagonal of G."""
    theta = float(np.max(np.diag(vm.G)))
    if theta <= 0.0:
        raise InputError("theta = 0: single-band matrix cannot be uniformized")
    return np.eye(vm.size) - vm.G / theta


def chat_power(probs: Sequence[float], m: int) -> tuple[float, np.ndarray]:
    """(C C^T)^m = alpha^(m-1) C C^T with alpha = sum p_i^2."""
    if m < 1:
        raise InputError("power must be >= 1")
    c = np.asarray([float(v) for v in probs])
    alpha = float(np.dot(c, c))
    scale = alpha ** (m - 1)
    return scale, scale * np.outer(c, c)


def g_power(vm: VarianceMatrix, n: int) -> np.ndarray:
    """G^n by repeated multiplication. D and C C^T do not commute, so there
    is no binomial shortcut."""
    if n < 1:
        raise InputError("power must be >= 1")
    out = vm.G.copy()
    for _ in range(n - 1):
        out = out @ vm.G
    return out


def variance_form(vm: VarianceMatrix, times: Sequence[float]) -> tuple[float, float]:
    """(Var = T^T G T, J = Var - C^T T)."""
    t = np.asarray([float(v) for v in times])
    if t.shape != (vm.size,):
        raise InputError(f"{t.size} times for {vm.size} bands")
    var = float(t @ vm.G @ t)
    return var, var - float(np.dot(vm.probs, t))


@dataclass(frozen=True, eq=False)
class RayleighExtremes:
    second_smallest: float
    vector: np.ndarray
    largest: float
    largest_vector: np.ndarray


def min_nonzero_variance(vm: VarianceMatrix) -> RayleighExtremes:
    """Smallest non-trivial and largest T^T G T on the unit sphere."""
    if vm.size < 2:
        raise InputError("need at least 2 bands")
    eig = vm.eigen
    return RayleighExtremes(
        second_smallest=float(eig.eigenvalues[1]),
        vector=eig.eigenvectors[:, 1].copy(),
        largest=float(eig.eigenvalues[-1]),
        largest_vector=eig.eigenvectors[:, -1].copy(),
    )


def summary(vm: VarianceMatrix) -> dict:
    """Spectral digest used in reports."""
    lo, hi = spectral_bounds(vm)
    out = {
        "trace": g_trace(vm),
        "eigenvalues": [float(v) for v in vm.eigen.eigenvalues],
        "charpoly": list(vm.charpoly.coeffs),
        "spectral_radius": vm.spectral_radius,
        "row_sum_bounds": [lo, hi],
        "lower_bound_holds": vm.spectral_radius >= lo,
    }
    if vm.size >= 2:
        det = g_det(vm)
        out["determinant"] = det.det
        out["rank_one_determinant"] = det.rank_one_det
        out["second_smallest_eigenvalue"] = min_nonzero_variance(vm).second_smallest
    return out
