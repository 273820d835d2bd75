"""Integer sensing-time allocations that exhaust a budget L."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .config import max_enumeration
from .errors import EnumerationBoundError, InfeasibleError, InputError
from .schemes import AGP, AP, GP, AllocationScheme, Explicit, expand_scheme
from .stochastic import moments
from .traffic import OccupancyProfile

__all__ = [
    "AP", "GP", "AGP", "Explicit", "AllocationScheme", "expand_scheme",
    "Constraints", "DiophantineSolution", "SensingAllocation",
    "extended_gcd", "solve_linear_diophantine", "ap_solutions", "gp_solutions",
    "agp_solutions", "greedy_allocation", "enumerate_partitions", "iter_partitions",
    "assign_times",
]


def extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y == g == gcd(a, b) >= 0``."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


@dataclass(frozen=True)
class DiophantineSolution:
    """All integer solutions of ``a x + b y = c``:
    ``x = x0 + t (b/g)``, ``y = y0 - t (a/g)``."""

    a: int
    b: int
    c: int
    gcd: int
    x0: int
    y0: int

    @property
    def step_x(self) -> int:
        return self.b // self.gcd

    @property
    def step_y(self) -> int:
        return self.a // self.gcd

    def at(self, t: int) -> tuple[int, int]:
        return self.x0 + t * self.step_x, self.y0 - t * self.step_y

    def t_range(self, min_x: int | None = None, min_y: int | None = None) -> tuple[float, float]:
        """Inclusive t-interval on which ``x >= min_x`` and ``y >= min_y``.

        Bounds may be infinite; ``lo > hi`` means no feasible t.
        """
        lo, hi = -math.inf, math.inf
        for base, step, floor_ in ((self.x0, self.step_x, min_x), (self.y0, -self.step_y, min_y)):
            if floor_ is None:
                continue
            # base + t*step >= floor_
            need = floor_ - base
            if step > 0:
                lo = max(lo, _ceil_div(need, step))
            elif step < 0:
                hi = min(hi, need // step)
            elif base < floor_:
                return 1, 0
        return lo, hi

    def solutions(self, min_x: int | None = None, min_y: int | None = None) -> list[tuple[int, int]]:
        lo, hi = self.t_range(min_x, min_y)
        if math.isinf(lo) or math.isinf(hi):
            raise InputError("solution set is unbounded under these constraints")
        return [self.at(t) for t in range(int(lo), int(hi) + 1)]


def solve_linear_diophantine(a: int, b: int, c: int) -> DiophantineSolution | None:
    """Integer solutions of ``a x + b y = c``, or ``None`` if ``gcd(a, b)``
    does not divide ``c``. The particular solution has ``x0`` reduced to
    the smallest non-negative residue modulo ``|b/g|``."""
    if a == 0 and b == 0:
        raise InputError("a and b cannot both be zero")
    g, x, y = extended_gcd(a, b)
    if c % g:
        return None
    k = c // g
    x0, y0 = x * k, y * k
    step_x, step_y = b // g, a // g
    if step_x:
        t = -(x0 // abs(step_x)) * (1 if step_x > 0 else -1)
        x0, y0 = x0 + t * step_x, y0 - t * step_y
    return DiophantineSolution(a, b, c, g, x0, y0)


@dataclass(frozen=True)
class Constraints:
    """Lower bounds on the first time and the progression step.

    ``min_d=None`` picks the family default: 1 for AP and AGP, 2 for GP.
    """

    min_t1: int = 1
    min_d: int | None = None
    max_d: int | None = None
    max_enum: int | None = None
    powers_of_two: bool = False

    def __post_init__(self):
        for name in ("min_t1", "min_d", "max_d", "max_enum"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise InputError(f"{name} must be non-negative")

    def d_floor(self, family: str) -> int:
        if self.min_d is not None:
            return self.min_d
        return 2 if family == "gp" else 1

    def enum_cap(self) -> int:
        return self.max_enum if self.max_enum is not None else max_enumeration()


DEFAULT_CONSTRAINTS = Constraints()


def ap_solutions(m: int, budget: int, constraints: Constraints = DEFAULT_CONSTRAINTS) -> list[AllocationScheme]:
    """All AP(t1, d) with ``2 m t1 + m (m-1) d = 2 L`` under the constraints."""
    if m < 1:
        raise InputError("need at least one band")
    if m == 1:
        return [Explicit((budget,))] if budget >= constraints.min_t1 else []
    sol = solve_linear_diophantine(2 * m, m * (m - 1), 2 * budget)
    if sol is None:
        return []
    lo, hi = sol.t_range(constraints.min_t1, constraints.d_floor("ap"))
    out = []
    for t in range(int(lo), int(hi) + 1):
        t1, d = sol.at(t)
        if constraints.max_d is not None and d > constraints.max_d:
            continue
        out.append(AP(t1, d))
    return sorted(out, key=lambda s: (s.t1, s.d))


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def gp_solutions(m: int, budget: int, constraints: Constraints = DEFAULT_CONSTRAINTS) -> list[AllocationScheme]:
    """All GP(t1, d) with ``t1 (1 + d + ... + d^(m-1)) = L``."""
    if m < 2:
        raise InputError("GP allocation needs at least 2 bands")
    d = max(constraints.d_floor("gp"), 1)
    t1_min = max(constraints.min_t1, 1)
    out = []
    while constraints.max_d is None or d <= constraints.max_d:
        geom = sum(d ** j for j in range(m))
        if t1_min * geom > budget:
            break
        if budget % geom == 0 and (not constraints.powers_of_two or _is_power_of_two(d)):
            out.append(GP(budget // geom, d))
        d += 1
    return sorted(out, key=lambda s: (s.t1, s.d))


def agp_solutions(m: int, budget: int, constraints: Constraints = DEFAULT_CONSTRAINTS,
                  ratio: int | None = None) -> list[AllocationScheme]:
    """All AGP(t1, d, r) with ``sum_j (t1 + j d) r^j = L``.

    ``ratio=None`` ties r to d; otherwise r is held fixed at ``ratio``.
    """
    if m < 2:
        raise InputError("AGP allocation needs at least 2 bands")
    if ratio is not None and ratio < 1:
        raise InputError("ratio must be >= 1")
    d = constraints.d_floor("agp")
    t1_min = constraints.min_t1
    out = []
    while constraints.max_d is None or d <= constraints.max_d:
        r = d if ratio is None else ratio
        if r < 1:
            d += 1
            continue
        base = sum(r ** j for j in range(m))
        slope = sum(j * r ** j for j in range(m))
        rest = budget - d * slope
        if rest < t1_min * base:
            break
        if rest % base == 0:
            out.append(AGP(rest // base, d, r))
        d += 1
    return sorted(out, key=lambda s: (s.t1, s.d))


def greedy_allocation(m: int, budget: int, t_min: int = 0, d: int = 0) -> Explicit:
    """First m-1 slots ``t_min, t_min + d, ...``; the last slot takes the rest."""
    if m < 1:
        raise InputError("need at least one band")
    if t_min < 0 or d < 0:
        raise InputError("t_min and d must be non-negative")
    head = [t_min + k * d for k in range(m - 1)]
    last = budget - sum(head)
    if last < t_min:
        raise InfeasibleError(f"budget {budget} leaves {last} < t_min={t_min} for the last band")
    return Explicit(tuple(head) + (last,))


def iter_partitions(m: int, budget: int, s: int = 0) -> Iterator[tuple[int, ...]]:
    """Strictly increasing m-tuples with entries > s summing to ``budget``,
    in lexicographic order."""
    if m < 1:
        raise InputError("need at least one band")

    def rec(k: int, remaining: int, floor_: int) -> Iterator[tuple[int, ...]]:
        if k == 1:
            if remaining > floor_:
                yield (remaining,)
            return
        first = floor_ + 1
        # the k-1 parts after `first` are at least first+1 .. first+k-1
        while first * k + k * (k - 1) // 2 <= remaining:
            for tail in rec(k - 1, remaining - first, first):
                yield (first,) + tail
            first += 1

    yield from rec(m, budget, s)


def enumerate_partitions(m: int, budget: int, s: int = 0, max_count: int | None = None) -> list[tuple[int, ...]]:
    cap = max_enumeration() if max_count is None else max_count
    out = []
    for part in iter_partitions(m, budget, s):
        if len(out) >= cap:
            raise EnumerationBoundError(f"more than {cap} partitions of {budget} into {m} parts")
        out.append(part)
    return out


@dataclass(frozen=True)
class SensingAllocation:
    times: dict[str, int]
    budget: int
    scheme: AllocationScheme | None
    mean: float
    variance: float
    ordered_probs: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if sum(self.times.values()) != self.budget:
            raise InputError("allocation does not exhaust the budget")


def assign_times(profile: OccupancyProfile, times: Sequence[int],
                 scheme: AllocationScheme | None = None) -> SensingAllocation:
    """Give the k-th most occupied band the k-th smallest time.

    Equal probabilities are ordered by band id.
    """
    times = list(times)
    if len(times) != profile.size:
        raise InputError(f"{len(times)} times for {profile.size} bands")
    if any(a > b for a, b in zip(times, times[1:])):
        raise InputError("times must be ascending")
    order = sorted(range(profile.size), key=lambda i: (-profile.q[i], profile.band_ids[i]))
    by_band = {profile.band_ids[i]: t for i, t in zip(order, times)}
    weights = tuple(profile.q[i] for i in order)
    mom = moments(times, weights)
    return SensingAllocation(
        times={b: by_band[b] for b in profile.band_ids},
        budget=sum(times),
        scheme=scheme,
        mean=mom.mean,
        variance=mom.variance,
        ordered_probs=weights,
    )
