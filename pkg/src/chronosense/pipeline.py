"""End-to-end planning: traces -> occupancy profile -> candidates -> choice."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import varmatrix
from .allocation import (
    Constraints,
    SensingAllocation,
    agp_solutions,
    ap_solutions,
    assign_times,
    enumerate_partitions,
    extended_gcd,
    gp_solutions,
    greedy_allocation,
)
from .coding import entropy, huffman_lengths, kraft_sum, mean_length, scale_to_budget
from .errors import ChronosenseError, InfeasibleError, InputError
from .schemes import AllocationScheme, Explicit, expand_scheme
from .stochastic import ParetoPoint, Policy, pareto_front, select_solution
from .traffic import BandSeries, OccupancyProfile, TrafficHistory, profile_from_history

STRATEGIES = ("ap", "gp", "agp", "huffman", "greedy", "enumerate")
PARAMETRIC = ("ap", "gp", "agp")
CSV_HEADER = ["band_id", "t", "count"]


def load_traces(path: str | Path) -> TrafficHistory:
    """Read a ``band_id,t,count`` CSV into a TrafficHistory."""
    rows: dict[str, dict[int, int]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != CSV_HEADER:
            raise InputError(f"{path}: expected header {','.join(CSV_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise InputError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            band, t_raw, c_raw = (c.strip() for c in row)
            if not band:
                raise InputError(f"{path}:{lineno}: empty band_id")
            try:
                t, count = int(t_raw), int(c_raw)
            except ValueError:
                raise InputError(f"{path}:{lineno}: t and count must be integers") from None
            if count < 0:
                raise InputError(f"{path}:{lineno}: negative count {count}")
            series = rows.setdefault(band, {})
            if t in series:
                raise InputError(f"{path}:{lineno}: duplicate entry for band {band!r} at t={t}")
            series[t] = count
    if not rows:
        raise InputError(f"{path}: no data rows")
    lengths = {b: len(s) for b, s in rows.items()}
    if len(set(lengths.values())) != 1:
        detail = ", ".join(f"{b}={n}" for b, n in lengths.items())
        raise InputError(f"{path}: ragged series ({detail})")
    bands = tuple(
        BandSeries(b, tuple(s[t] for t in sorted(s))) for b, s in rows.items()
    )
    return TrafficHistory(bands)


def write_traces(history: TrafficHistory, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for band in history.bands:
            for t, c in enumerate(band.counts):
                writer.writerow([band.band_id, t, c])


@dataclass(frozen=True)
class PlanConfig:
    budget: int
    strategy: str = "ap"
    policy: str = "min-min"
    ar_order: int = 2
    smoothing: float = 1.0
    constraints: Constraints = field(default_factory=Constraints)
    bands: int | None = None
    seed: int = 0
    include_matrix: bool = False
    trim: tuple[float, float] | None = None

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise InputError(f"unknown strategy {self.strategy!r}; choose from {STRATEGIES}")
        try:
            policy = Policy(self.policy)
        except ValueError:
            raise InputError(f"unknown policy {self.policy!r}") from None
        if policy is Policy.MAX_T1 and self.strategy not in PARAMETRIC:
            raise InputError("policy max-t1 needs a parametric strategy (ap, gp, agp)")
        if self.budget < 1:
            raise InputError("budget must be positive")
        if self.bands is not None and self.budget < self.bands:
            raise InputError(f"budget {self.budget} smaller than band count {self.bands}")


@dataclass
class Candidate:
    scheme: AllocationScheme
    times: tuple[int, ...]
    mean: float
    variance: float


@dataclass
class PlanReport:
    profile: OccupancyProfile
    candidates: list[Candidate]
    chosen: SensingAllocation | None
    pareto_front: list[Candidate]
    diagnostics: dict
    error_reason: str | None = None


def _infeasibility_reason(strategy: str, m: int, budget: int, cons: Constraints) -> str:
    if strategy == "ap":
        g = extended_gcd(2 * m, m * (m - 1))[0]
        if (2 * budget) % g:
            return (f"gcd(2M, M(M-1)) = gcd({2 * m}, {m * (m - 1)}) = {g} "
                    f"does not divide 2L = {2 * budget}")
        return (f"no AP (t1, d) with t1 >= {cons.min_t1} and d >= {cons.d_floor('ap')} "
                f"sums to L = {budget}")
    if strategy == "gp":
        return (f"no ratio d >= {cons.d_floor('gp')} whose geometric sum over {m} bands "
                f"divides L = {budget} with t1 >= {cons.min_t1}")
    if strategy == "agp":
        return f"no AGP (t1, d) with t1 >= {cons.min_t1}, d >= {cons.d_floor('agp')} sums to L = {budget}"
    if strategy == "enumerate":
        return (f"no strictly increasing {m}-tuple with parts > {cons.min_t1 - 1} "
                f"sums to L = {budget}")
    return f"strategy {strategy} produced no allocation for L = {budget}"


def _generate(config: PlanConfig, profile: OccupancyProfile) -> list[AllocationScheme]:
    m, budget, cons = profile.size, config.budget, config.constraints
    if config.strategy == "ap":
        return ap_solutions(m, budget, cons)
    if config.strategy == "gp":
        return gp_solutions(m, budget, cons)
    if config.strategy == "agp":
        return agp_solutions(m, budget, cons)
    if config.strategy == "huffman":
        times = scale_to_budget(huffman_lengths(profile.q), budget)
        return [Explicit(tuple(sorted(times)))]
    if config.strategy == "greedy":
        gap = cons.min_d if cons.min_d is not None else 0
        return [greedy_allocation(m, budget, cons.min_t1, gap)]
    parts = enumerate_partitions(m, budget, cons.min_t1 - 1, cons.enum_cap())
    return [Explicit(p) for p in parts]


def plan(config: PlanConfig, history: TrafficHistory) -> PlanReport:
    """Predict occupancy, generate candidate allocations, score and choose.

    An empty candidate set is not an exception: the report carries
    ``error_reason`` and ``chosen`` is None.
    """
    profile, models = profile_from_history(history, config.ar_order, config.smoothing)
    m = profile.size
    if config.bands is not None and config.bands != m:
        raise InputError(f"config expects {config.bands} bands, traces have {m}")
    if config.budget < m:
        raise InputError(f"budget {config.budget} smaller than band count {m}")

    weights = profile.descending()
    error_reason = None
    try:
        schemes = _generate(config, profile)
    except InfeasibleError as exc:
        schemes, error_reason = [], str(exc)
    if not schemes and error_reason is None:
        error_reason = _infeasibility_reason(config.strategy, m, config.budget, config.constraints)

    candidates = []
    for s in schemes:
        times = expand_scheme(s, m)
        alloc = assign_times(profile, times, s)
        candidates.append(Candidate(s, times, alloc.mean, alloc.variance))

    points = [ParetoPoint(i, c.mean, c.variance) for i, c in enumerate(candidates)]
    front = [candidates[pt.scheme] for pt in pareto_front(points)]

    chosen = None
    if schemes:
        best = select_solution(schemes, weights, config.policy, config.trim)
        chosen = assign_times(profile, expand_scheme(best, m), best)

    diagnostics = {
        "budget": config.budget,
        "bands": m,
        "strategy": config.strategy,
        "policy": Policy(config.policy).value,
        "ar_order": config.ar_order,
        "smoothing": config.smoothing,
        "degenerate_bands": [b for b, mod in zip(profile.band_ids, models) if mod.degenerate],
        "entropy_bits": entropy(profile.q),
        "huffman_mean_length": mean_length(huffman_lengths(profile.q), profile.q),
    }
    if chosen is not None:
        ks = kraft_sum(chosen.times.values())
        diagnostics["kraft_sum"] = ks
        diagnostics["kraft_satisfied"] = ks <= 1.0
        diagnostics["entropy_bound_holds"] = chosen.mean >= diagnostics["entropy_bits"]
    if config.include_matrix:
        diagnostics["matrix"] = varmatrix.summary(varmatrix.build_g(profile.q))

    return PlanReport(profile, candidates, chosen, front, diagnostics, error_reason)


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------

def _num(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    x = float(x)
    if not math.isfinite(x):
        return str(x)
    v = float(f"{x:.12g}")
    return 0.0 if v == 0.0 else v


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return _num(obj.item())
    return _num(obj)


def _scheme_dict(s: AllocationScheme | None) -> dict | None:
    if s is None:
        return None
    return {"kind": s.kind, **s.params()}


def _candidate_dict(c: Candidate) -> dict:
    return {"scheme": _scheme_dict(c.scheme), "times": list(c.times),
            "mean": c.mean, "variance": c.variance}


def report_dict(report: PlanReport) -> dict:
    prof = report.profile
    chosen = None
    if report.chosen is not None:
        chosen = {
            "scheme": _scheme_dict(report.chosen.scheme),
            "times": report.chosen.times,
            "budget": report.chosen.budget,
            "mean": report.chosen.mean,
            "variance": report.chosen.variance,
        }
    out = {
        "profile": {
            "band_ids": list(prof.band_ids),
            "predicted_counts": list(prof.n_raw),
            "q": list(prof.q),
            "p_sorted": list(prof.p_sorted),
            "permutation": list(prof.permutation),
        },
        "candidates": [_candidate_dict(c) for c in report.candidates],
        "chosen": chosen,
        "pareto_front": [_candidate_dict(c) for c in report.pareto_front],
        "diagnostics": report.diagnostics,
        "error_reason": report.error_reason,
    }
    return _clean(out)


def _table(report: PlanReport) -> str:
    prof = report.profile
    lines = [f"{'band':<12}{'predicted':>12}{'q':>12}{'time':>8}"]
    times = report.chosen.times if report.chosen else {}
    for b, n, q in zip(prof.band_ids, prof.n_raw, prof.q):
        t = times.get(b, "-")
        lines.append(f"{b:<12}{n:>12.3f}{q:>12.6f}{t!s:>8}")
    if report.chosen is not None:
        c = report.chosen
        lines.append(f"{'TOTAL':<12}{sum(prof.n_raw):>12.3f}{sum(prof.q):>12.6f}{c.budget:>8}"
                     f"  mean={c.mean:.6g} var={c.variance:.6g} scheme={_scheme_dict(c.scheme)}")
    else:
        lines.append(f"{'TOTAL':<12}{sum(prof.n_raw):>12.3f}{sum(prof.q):>12.6f}{'-':>8}"
                     f"  infeasible: {report.error_reason}")
    return "\n".join(lines) + "\n"


def emit_report(report: PlanReport, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report_dict(report), indent=2) + "\n"
    if fmt == "table":
        return _table(report)
    raise InputError(f"unknown format {fmt!r}")


def dump_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2) + "\n"


__all__ = [
    "ChronosenseError", "PlanConfig", "PlanReport", "Candidate", "load_traces", "write_traces",
    "plan", "emit_report", "report_dict", "dump_json", "STRATEGIES",
]
