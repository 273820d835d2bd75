"""Command-line interface: ``chronosense {plan,predict,analyze-matrix,enumerate}``."""
from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import varmatrix
from .allocation import Constraints, enumerate_partitions
from .errors import ChronosenseError, InfeasibleError, InputError, NumericalError
from .pipeline import STRATEGIES, PlanConfig, dump_json, emit_report, load_traces, plan
from .stochastic import ParetoPoint, Policy, moments, pareto_front
from .traffic import TrafficHistory, profile_from_history, synthesize_history

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_NUMERIC = 0, 2, 3, 4


def _history(args) -> TrafficHistory:
    if args.synthetic is not None:
        return synthesize_history(args.synthetic, seed=args.seed)
    if args.traces is None:
        raise InputError("give a traces CSV or --synthetic N")
    return load_traces(args.traces)


def _probs(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"cannot parse probabilities {text!r}") from None


def _add_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("traces", nargs="?", help="CSV with header band_id,t,count")
    p.add_argument("--synthetic", type=int, metavar="M",
                   help="use M synthetic AR(1) bands instead of a CSV")
    p.add_argument("--seed", type=int, default=0, help="seed for --synthetic data")
    p.add_argument("--ar-order", type=int, default=2)
    p.add_argument("--smoothing", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chronosense",
                                     description="Traffic-aware spectrum sensing-time planner")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="allocate a sensing-time budget across bands")
    _add_source(p)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--bands", type=int, help="expected band count (validated)")
    p.add_argument("--strategy", choices=STRATEGIES, default="ap")
    p.add_argument("--policy", choices=[x.value for x in Policy], default="min-min")
    p.add_argument("--min-t1", type=int, default=1)
    p.add_argument("--min-d", type=int)
    p.add_argument("--max-d", type=int)
    p.add_argument("--pow2", action="store_true", help="GP ratios restricted to powers of two")
    p.add_argument("--trim", type=float, nargs=2, metavar=("LO", "HI"),
                   help="drop solutions with t1 or d outside these percentiles")
    p.add_argument("--matrix", action="store_true", help="attach variance-matrix summary")
    p.add_argument("--format", choices=("json", "table"), default="json")

    p = sub.add_parser("predict", help="fit AR models and print the occupancy profile")
    _add_source(p)

    p = sub.add_parser("analyze-matrix", help="spectral summary of G = diag(p) - p p^T")
    p.add_argument("--probs", help="comma-separated pmf")
    _add_source(p)

    p = sub.add_parser("enumerate", help="list increasing partitions of the budget")
    p.add_argument("--bands", type=int, required=True)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--min-time", type=int, default=0, help="every part must exceed this")
    p.add_argument("--probs", help="weights for ascending parts; adds moments and Pareto front")
    p.add_argument("--max-count", type=int)
    return parser


def _cmd_plan(args) -> tuple[str, int]:
    cons = Constraints(min_t1=args.min_t1, min_d=args.min_d, max_d=args.max_d,
                       powers_of_two=args.pow2)
    config = PlanConfig(
        budget=args.budget, strategy=args.strategy, policy=args.policy,
        ar_order=args.ar_order, smoothing=args.smoothing, constraints=cons,
        bands=args.bands, seed=args.seed, include_matrix=args.matrix,
        trim=tuple(args.trim) if args.trim else None,
    )
    report = plan(config, _history(args))
    code = EXIT_OK if report.chosen is not None else EXIT_INFEASIBLE
    return emit_report(report, args.format), code


def _cmd_predict(args) -> tuple[str, int]:
    history = _history(args)
    profile, models = profile_from_history(history, args.ar_order, args.smoothing)
    out = {
        "bands": [
            {"band_id": b, "coefficients": list(m.coefficients), "mean": m.mean,
             "innovation_variance": m.innovation_variance, "degenerate": m.degenerate,
             "predicted": n, "q": q}
            for b, m, n, q in zip(profile.band_ids, models, profile.n_raw, profile.q)
        ],
        "p_sorted": list(profile.p_sorted),
        "permutation": list(profile.permutation),
    }
    return dump_json(out), EXIT_OK


def _cmd_matrix(args) -> tuple[str, int]:
    if args.probs:
        probs = _probs(args.probs)
    else:
        probs = profile_from_history(_history(args), args.ar_order, args.smoothing)[0].q
    vm = varmatrix.build_g(probs)
    out = {"probs": list(vm.probs), "G": vm.G.tolist(), **varmatrix.summary(vm)}
    if vm.size >= 2:
        out["uniformized"] = varmatrix.uniformize(vm).tolist()
    return dump_json(out), EXIT_OK


def _cmd_enumerate(args) -> tuple[str, int]:
    parts = enumerate_partitions(args.bands, args.budget, args.min_time, args.max_count)
    out: dict = {"bands": args.bands, "budget": args.budget, "count": len(parts)}
    if args.probs:
        probs = _probs(args.probs)
        scored = [ParetoPoint(p, *_mv(moments(p, probs))) for p in parts]
        out["partitions"] = [{"times": list(pt.scheme), "mean": pt.mean, "variance": pt.variance}
                             for pt in scored]
        out["pareto_front"] = [{"times": list(pt.scheme), "mean": pt.mean, "variance": pt.variance}
                               for pt in pareto_front(scored)]
    else:
        out["partitions"] = [list(p) for p in parts]
    return dump_json(out), EXIT_OK if parts else EXIT_INFEASIBLE


def _mv(m) -> tuple[float, float]:
    return m.mean, m.variance


COMMANDS = {"plan": _cmd_plan, "predict": _cmd_predict,
            "analyze-matrix": _cmd_matrix, "enumerate": _cmd_enumerate}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text, code = COMMANDS[args.command](args)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ChronosenseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
