"""Numerical kernels: Toeplitz solves, real polynomial roots, symmetric
eigendecomposition and characteristic polynomials.

Everything here is a pure function of its inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    AsymmetricMatrixError,
    DegenerateModelError,
    InputError,
    NoRootsError,
)


# --------------------------------------------------------------------------
# Yule-Walker / Levinson-Durbin
# --------------------------------------------------------------------------

def levinson_durbin(autocorr: Sequence[float],
                    tol: Tolerances = DEFAULT_TOLERANCES) -> tuple[tuple[float, ...], float]:
    """Solve the Yule-Walker system by Levinson-Durbin recursion.

    Returns ``(phi, err)`` where ``phi[k-1]`` multiplies lag ``k`` and
    ``err`` is the final prediction-error power (``r[0]`` times the product
    of ``1 - kappa_k**2``).
    """
    r = [float(v) for v in autocorr]
    if len(r) < 2:
        raise InputError("autocorrelation needs at least r[0] and r[1]")
    if not r[0] > 0.0:
        raise InputError(f"r[0] must be positive, got {r[0]}")
    p = len(r) - 1

    idx = np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
    toeplitz = np.asarray(r[:p])[idx]
    cond = np.linalg.cond(toeplitz)
    if not np.isfinite(cond) or cond > tol.toeplitz_cond:
        raise DegenerateModelError(f"Toeplitz system ill-conditioned (cond={cond:.3g})")

    phi: list[float] = []
    err = r[0]
    for k in range(1, p + 1):
        acc = r[k] - sum(phi[j] * r[k - 1 - j] for j in range(k - 1))
        kappa = acc / err
        phi = [phi[j] - kappa * phi[k - 2 - j] for j in range(k - 1)] + [kappa]
        err *= 1.0 - kappa * kappa
        if err <= 0.0:
            raise DegenerateModelError("non-positive prediction error in Levinson recursion")
    return tuple(phi), err


def solve_yule_walker(autocorr: Sequence[float],
                      tol: Tolerances = DEFAULT_TOLERANCES) -> tuple[float, ...]:
    """AR coefficients (lag order) solving ``R a = r[1..p]``."""
    return levinson_durbin(autocorr, tol)[0]


# --------------------------------------------------------------------------
# Polynomials
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Polynomial:
    """Real polynomial, ``coeffs[k]`` multiplies ``x**k``."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        c = [float(v) for v in self.coeffs]
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
        if not c:
            c = [0.0]
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial(tuple(k * c for k, c in enumerate(self.coeffs))[1:] or (0.0,))

    def monic(self) -> "Polynomial":
        lead = self.coeffs[-1]
        return Polynomial(tuple(c / lead for c in self.coeffs))

    def substitute_square(self) -> "Polynomial":
        """p(x**2)."""
        out = [0.0] * (2 * self.degree + 1)
        for k, c in enumerate(self.coeffs):
            out[2 * k] = c
        return Polynomial(tuple(out))

    def _coerce(self, other) -> "Polynomial":
        return other if isinstance(other, Polynomial) else Polynomial((float(other),))

    def __add__(self, other) -> "Polynomial":
        o = self._coerce(other)
        n = max(len(self.coeffs), len(o.coeffs))
        a = self.coeffs + (0.0,) * (n - len(self.coeffs))
        b = o.coeffs + (0.0,) * (n - len(o.coeffs))
        return Polynomial(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        o = self._coerce(other)
        out = [0.0] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(o.coeffs):
                out[i + j] += a * b
        return Polynomial(tuple(out))

    __rmul__ = __mul__


def _residual_bound(poly: Polynomial, tol: float) -> float:
    return tol * (1.0 + max(abs(c) for c in poly.coeffs))


def _bisect(poly: Polynomial, a: float, b: float, fa: float) -> float:
    for _ in range(400):
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        fm = poly(m)
        if fm == 0.0:
            return m
        if (fm < 0.0) == (fa < 0.0):
            a, fa = m, fm
        else:
            b = m
    return a if abs(poly(a)) <= abs(poly(b)) else b


def _polish(poly: Polynomial, x: float, lo: float, hi: float) -> float:
    dp = poly.derivative()
    best, best_val = x, abs(poly(x))
    for _ in range(6):
        slope = dp(x)
        if slope == 0.0:
            break
        x = x - poly(x) / slope
        if not lo <= x <= hi:
            break
        val = abs(poly(x))
        if val < best_val:
            best, best_val = x, val
    return best


def _isolate(poly: Polynomial, tol: float) -> list[float]:
    n = poly.degree
    if n == 0:
        return []
    if n == 1:
        return [-poly.coeffs[0] / poly.coeffs[1]]

    lead = poly.coeffs[-1]
    bound = 1.0 + max(abs(c / lead) for c in poly.coeffs[:-1])
    crit = [c for c in _isolate(poly.derivative(), tol) if -bound < c < bound]
    knots = [-bound] + sorted(crit) + [bound]
    limit = _residual_bound(poly, tol)

    # each monotone piece holds at most one crossing, so these are distinct
    crossings: list[float] = []
    for a, b in zip(knots[:-1], knots[1:]):
        fa, fb = poly(a), poly(b)
        if fa == 0.0 or fb == 0.0:
            continue
        if (fa < 0.0) != (fb < 0.0):
            x = _bisect(poly, a, b, fa)
            crossings.append(_polish(poly, x, a, b))

    # touching (even-multiplicity) roots never produce a sign change
    touching = [
        c for c in crit
        if abs(poly(c)) <= limit
        and not any(abs(c - x) <= 1e-9 * (1.0 + abs(c)) for x in crossings)
    ]
    return sorted(crossings + touching)


def real_roots(poly: Polynomial | Sequence[float],
               tol: float = DEFAULT_TOLERANCES.root_residual) -> tuple[float, ...]:
    """Real roots of ``poly`` in ascending order.

    Roots of the derivative split the Cauchy interval into monotone pieces;
    each piece holding a sign change is bisected and Newton-polished.
    Critical points whose value is within ``tol * (1 + max|coeff|)`` are
    reported as touching roots. Complex roots are not returned, see
    :func:`nonreal_root_count`.
    """
    if not isinstance(poly, Polynomial):
        poly = Polynomial(tuple(poly))
    if poly.degree < 1:
        raise NoRootsError("polynomial of degree 0 has no roots")
    return tuple(_isolate(poly.monic(), tol))


def nonreal_root_count(poly: Polynomial | Sequence[float],
                       tol: float = DEFAULT_TOLERANCES.root_residual) -> int:
    """Number of non-real roots (with multiplicity), inferred from the
    real roots and their multiplicities."""
    if not isinstance(poly, Polynomial):
        poly = Polynomial(tuple(poly))
    monic = poly.monic()
    counted = 0
    for x in real_roots(monic, tol):
        mult, q = 1, monic.derivative()
        while q.degree >= 1 and abs(q(x)) <= _residual_bound(q, math.sqrt(tol)):
            mult += 1
            q = q.derivative()
        counted += mult
    return max(poly.degree - counted, 0)


# --------------------------------------------------------------------------
# Symmetric eigenproblem
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EigenSummary:
    """Ascending eigenvalues with matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def check_symmetric(matrix, tol: float = DEFAULT_TOLERANCES.symmetry) -> np.ndarray:
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError(f"expected a square matrix, got shape {a.shape}")
    if a.size and np.max(np.abs(a - a.T)) > tol:
        raise AsymmetricMatrixError("matrix is not symmetric within tolerance")
    return a


def sym_eigen(matrix, tol: Tolerances = DEFAULT_TOLERANCES) -> EigenSummary:
    """Cyclic Jacobi eigendecomposition of a real symmetric matrix."""
    a = check_symmetric(matrix, tol.symmetry)
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    threshold = tol.jacobi_offdiag * max(1.0, float(np.linalg.norm(a)))

    for _ in range(tol.jacobi_max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(diff) + 1e100 * abs(apq) == abs(diff):
                    # theta**2 would overflow; t ~ 1 / (2 theta)
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq

    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return EigenSummary(eigenvalues=w[order], eigenvectors=v[:, order])


def faddeev_leverrier(matrix) -> Polynomial:
    """Monic characteristic polynomial det(lambda I - A)."""
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        raise InputError("matrix has dimension 0")
    coeffs = [0.0] * (n + 1)
    coeffs[n] = 1.0
    m = np.zeros_like(a)
    eye = np.eye(n)
    for k in range(1, n + 1):
        m = a @ m + coeffs[n - k + 1] * eye
        coeffs[n - k] = -float(np.trace(a @ m)) / k
    return Polynomial(tuple(coeffs))
