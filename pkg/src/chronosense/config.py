"""Numerical tolerances and limits shared across modules."""
from __future__ import annotations

import os
from dataclasses import dataclass

MAX_ENUM_ENV = "CHRONOSENSE_MAX_ENUM"


@dataclass(frozen=True)
class Tolerances:
    symmetry: float = 1e-12
    jacobi_offdiag: float = 1e-12
    jacobi_max_sweeps: int = 100
    root_residual: float = 1e-9
    toeplitz_cond: float = 1e12
    pmf_sum: float = 1e-9
    det_zero: float = 1e-10


DEFAULT_TOLERANCES = Tolerances()

DEFAULT_MAX_ENUM = 10**6


def max_enumeration() -> int:
    """Enumeration cap, overridable through ``CHRONOSENSE_MAX_ENUM``."""
    raw = os.environ.get(MAX_ENUM_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_MAX_ENUM
    value = int(raw)
    if value < 0:
        raise ValueError(f"{MAX_ENUM_ENV} must be non-negative, got {value}")
    return value
