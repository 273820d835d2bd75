"""Regenerate frozen golden values from the independent oracles.

Run from the repository root: ``python3 tests/tools/make_goldens.py``.
"""
import json
import sys
from pathlib import Path

TESTS = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(TESTS))

from oracles import bisect_root, direct_moments  # noqa: E402


def agp_gap(t1, probs, d):
    times = [(t1 + j * d) * d ** j for j in range(len(probs))]
    mean, _, var = direct_moments(times, probs)
    return mean - var


def agp_golden(t1, probs, hi=100.0, steps=99000):
    f = lambda d: agp_gap(t1, probs, d)
    xs = [1.0 + (hi - 1.0) * k / steps for k in range(1, steps + 1)]
    for a, b in zip(xs, xs[1:]):
        if f(a) * f(b) < 0:
            return bisect_root(f, a, b)
    raise RuntimeError("no sign change")


def main():
    cases = [
        {"t1": 1, "probs": [0.2, 0.3, 0.5]},
        {"t1": 1, "probs": [0.5, 0.5]},
    ]
    for case in cases:
        case["d_star"] = agp_golden(case["t1"], case["probs"])
    out = TESTS / "data" / "agp_fixed_point_golden.json"
    out.write_text(json.dumps({"cases": cases}, indent=2) + "\n")
    print(out.read_text())


if __name__ == "__main__":
    main()
