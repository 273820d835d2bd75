"""Parametric descriptions of sensing-time sequences."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import InputError


@dataclass(frozen=True)
class AP:
    t1: int
    d: int
    kind = "ap"

    def params(self) -> dict:
        return {"t1": self.t1, "d": self.d}


@dataclass(frozen=True)
class GP:
    t1: int
    d: int
    kind = "gp"

    def params(self) -> dict:
        return {"t1": self.t1, "d": self.d}


@dataclass(frozen=True)
class AGP:
    t1: int
    d: int
    r: int
    kind = "agp"

    def params(self) -> dict:
        return {"t1": self.t1, "d": self.d, "r": self.r}


@dataclass(frozen=True)
class Explicit:
    times: tuple[int, ...]
    kind = "explicit"

    def params(self) -> dict:
        return {"times": list(self.times)}


AllocationScheme = Union[AP, GP, AGP, Explicit]


def expand_scheme(scheme: AllocationScheme, m: int) -> tuple[int, ...]:
    """The ``m`` sensing times described by ``scheme``, ascending position order."""
    if isinstance(scheme, Explicit):
        if len(scheme.times) != m:
            raise InputError(f"explicit scheme has {len(scheme.times)} times, expected {m}")
        return tuple(scheme.times)
    if min(scheme.params().values()) < 0:
        raise InputError(f"negative parameter in {scheme}")
    if isinstance(scheme, AP):
        return tuple(scheme.t1 + j * scheme.d for j in range(m))
    if isinstance(scheme, GP):
        return tuple(scheme.t1 * scheme.d ** j for j in range(m))
    if isinstance(scheme, AGP):
        return tuple((scheme.t1 + j * scheme.d) * scheme.r ** j for j in range(m))
    raise TypeError(f"unknown scheme {scheme!r}")
