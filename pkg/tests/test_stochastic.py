import itertools
import json
import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from chronosense.allocation import AGP, AP, GP, Explicit, ap_solutions, enumerate_partitions, expand_scheme
from chronosense.errors import (
    DegenerateModelError,
    InputError,
    NoFixedPointError,
    UnsortedProbabilitiesError,
)
from chronosense.stochastic import (
    ParetoPoint,
    Policy,
    agp_fixed_point,
    agp_moments,
    ap_fixed_point,
    ap_moments,
    gp_fixed_point,
    gp_fixed_point_polynomial,
    gp_moments,
    moments,
    pareto_front,
    select_solution,
    sorted_weights,
    trim_extremes,
)
from oracles import bisect_root, direct_moments, exact_moments


@st.composite
def sorted_pmf(draw, min_size=2, max_size=8):
    w = draw(st.lists(st.floats(0.01, 1.0), min_size=min_size, max_size=max_size))
    total = sum(w)
    return sorted(v / total for v in w)


def close(summary, exact, rel=1e-12):
    mean, second, var = (float(v) for v in exact)
    scale = max(1.0, abs(second))
    assert abs(summary.mean - mean) <= rel * max(1.0, abs(mean))
    assert abs(summary.second - second) <= rel * scale
    assert abs(summary.variance - var) <= rel * scale


class TestMoments:
    def test_examples(self):
        m = moments((1, 3, 5), (0.2, 0.3, 0.5))
        assert (m.mean, m.second, m.variance) == pytest.approx((3.6, 15.4, 2.44))
        m = moments((4, 4, 4), (0.2, 0.3, 0.5))
        assert m.mean == pytest.approx(4.0) and m.variance == pytest.approx(0.0, abs=1e-12)
        m = moments((7,), (1.0,))
        assert (m.mean, m.variance) == (7.0, 0.0)

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            moments((1, 2), (1.0,))

    def test_not_a_pmf(self):
        with pytest.raises(InputError):
            moments((1, 2), (0.5, 0.6))

    def test_sorted_weights(self):
        w = sorted_weights((0.2, 0.3, 0.5))
        assert (w.mu, w.alpha) == pytest.approx((1.3, 2.3))
        assert w.spread == pytest.approx(0.61)

    def test_sorted_weights_unsorted(self):
        with pytest.raises(UnsortedProbabilitiesError):
            sorted_weights((0.5, 0.3, 0.2))


class TestClosedForms:
    def test_ap_examples(self):
        m = ap_moments(1, 2, (0.2, 0.3, 0.5))
        assert (m.mean, m.variance) == pytest.approx((3.6, 2.44))
        m = ap_moments(5, 0, (0.2, 0.3, 0.5))
        assert (m.mean, m.variance) == pytest.approx((5.0, 0.0))
        m = ap_moments(2, 1, (0.5, 0.5))
        assert (m.mean, m.variance) == pytest.approx((2.5, 0.25))

    def test_gp_examples(self):
        m = gp_moments(1, 2, (0.2, 0.3, 0.5))
        assert (m.mean, m.variance) == pytest.approx((2.8, 1.56))
        m = gp_moments(3, 1, (0.2, 0.3, 0.5))
        assert (m.mean, m.variance) == pytest.approx((3.0, 0.0), abs=1e-12)
        m = gp_moments(2, 2, (0.5, 0.5))
        assert (m.mean, m.variance) == pytest.approx((3.0, 1.0))

    def test_agp_examples(self):
        m = agp_moments(1, 2, 2, (0.2, 0.3, 0.5))
        assert (m.mean, m.second, m.variance) == pytest.approx((12.0, 211.0, 67.0))
        p = (0.1, 0.2, 0.3, 0.4)
        a, b = agp_moments(3, 2, 1, p), ap_moments(3, 2, p)
        assert (a.mean, a.variance) == pytest.approx((b.mean, b.variance))
        a, b = agp_moments(3, 0, 2, p), gp_moments(3, 2, p)
        assert (a.mean, a.variance) == pytest.approx((b.mean, b.variance))

    @pytest.mark.parametrize("fn, args", [
        (ap_moments, (1, 2)), (gp_moments, (1, 2)), (agp_moments, (1, 2, 2)),
    ])
    def test_unsorted_rejected(self, fn, args):
        with pytest.raises(UnsortedProbabilitiesError):
            fn(*args, (0.5, 0.3, 0.2))

    @settings(max_examples=300)
    @given(st.integers(0, 20), st.integers(0, 20), sorted_pmf())
    def test_ap_matches_oracle(self, t1, d, p):
        close(ap_moments(t1, d, p), exact_moments(expand_scheme(AP(t1, d), len(p)), p))

    @settings(max_examples=300)
    @given(st.integers(0, 20), st.integers(1, 20), sorted_pmf())
    def test_gp_matches_oracle(self, t1, d, p):
        close(gp_moments(t1, d, p), exact_moments(expand_scheme(GP(t1, d), len(p)), p))

    @settings(max_examples=300)
    @given(st.integers(0, 20), st.integers(0, 20), st.integers(1, 20), sorted_pmf())
    def test_agp_matches_oracle(self, t1, d, r, p):
        close(agp_moments(t1, d, r, p), exact_moments(expand_scheme(AGP(t1, d, r), len(p)), p))

    @settings(max_examples=200)
    @given(st.lists(st.integers(0, 1000), min_size=1, max_size=10), st.data())
    def test_variance_non_negative(self, times, data):
        w = data.draw(st.lists(st.floats(0.01, 1.0), min_size=len(times), max_size=len(times)))
        p = [v / sum(w) for v in w]
        m = moments(times, p)
        assert m.variance >= -1e-12 * max(1.0, m.second)
        assert m.second >= m.mean ** 2 - 1e-12 * max(1.0, m.second)


class TestAPFixedPoint:
    def test_examples(self):
        assert ap_fixed_point(1, (0.2, 0.3, 0.5)) == pytest.approx((1.3 + math.sqrt(1.69 + 2.44)) / 1.22, abs=1e-12)
        assert ap_fixed_point(1, (0.2, 0.3, 0.5)) == pytest.approx(2.7314, abs=1e-4)
        assert ap_fixed_point(1, (0.5, 0.5)) == pytest.approx((0.5 + math.sqrt(1.25)) / 0.5, abs=1e-12)
        assert ap_fixed_point(1, (0.5, 0.5)) == pytest.approx(3.23607, abs=1e-5)

    def test_degenerate(self):
        with pytest.raises(DegenerateModelError):
            ap_fixed_point(1, (0.0, 1.0))

    @settings(max_examples=300)
    @given(st.floats(0.1, 50.0), sorted_pmf())
    def test_discriminant_and_unique_positive_root(self, t1, p):
        w = sorted_weights(p)
        a = w.spread
        assume(a > 1e-6)
        disc = w.mu ** 2 + 4 * a * t1
        assert disc > 0
        roots = ((w.mu - math.sqrt(disc)) / (2 * a), (w.mu + math.sqrt(disc)) / (2 * a))
        assert sum(r > 0 for r in roots) == 1
        d = ap_fixed_point(t1, p)
        m = ap_moments(t1, d, p)
        assert abs(m.mean - m.variance) <= 1e-9 * max(1.0, m.mean)
        f = lambda x: a * x * x - w.mu * x - t1
        assert d == pytest.approx(bisect_root(f, 0.0, 10 * d + 10), rel=1e-9)

    @settings(max_examples=200)
    @given(st.integers(0, 30), sorted_pmf())
    def test_mean_and_variance_increase_with_d(self, t1, p):
        assume(sorted_weights(p).spread > 1e-9 and sorted_weights(p).mu > 1e-9)
        prev = ap_moments(t1, 1, p)
        for d in range(2, 12):
            cur = ap_moments(t1, d, p)
            assert cur.mean > prev.mean
            assert cur.variance > prev.variance
            prev = cur


class TestGPFixedPoint:
    def test_printed_quartic(self):
        poly = gp_fixed_point_polynomial(1, (0.5, 0.3, 0.2))
        assert poly.coeffs == pytest.approx((-0.25, -0.6, -0.19, -0.12, 0.16), abs=1e-12)
        d = gp_fixed_point(1, (0.5, 0.3, 0.2))
        oracle = bisect_root(lambda x: 0.16 * x**4 - 0.12 * x**3 - 0.19 * x**2 - 0.6 * x - 0.25, 1.5, 3.0)
        assert d == pytest.approx(oracle, abs=1e-9)
        assert d == pytest.approx(2.205, abs=0.01)

    def test_ascending_probs(self):
        p = (0.2, 0.3, 0.5)
        d = gp_fixed_point(1, p)
        assert abs(gp_fixed_point_polynomial(1, p)(d)) < 1e-9
        m = gp_moments(1, d, p)
        assert abs(m.mean - m.variance) <= 1e-6 * max(1.0, m.mean)

    def test_two_bands_closed_form(self):
        # f(d) = (1 + d)/2, f(d^2) = (1 + d^2)/2: E - Var = 0 reduces to d^2 - 4d - 1 = 0
        assert gp_fixed_point_polynomial(1, (0.5, 0.5)).coeffs == pytest.approx((-0.25, -1.0, 0.25))
        assert gp_fixed_point(1, (0.5, 0.5)) == pytest.approx(2 + math.sqrt(5), abs=1e-9)

    def test_single_band(self):
        with pytest.raises(InputError):
            gp_fixed_point(1, (1.0,))

    def test_no_root_above_one(self):
        # all mass on t1 makes Var identically 0 while E = t1
        with pytest.raises(NoFixedPointError):
            gp_fixed_point(1, (1.0, 0.0))


@pytest.fixture(scope="module")
def golden():
    from conftest import DATA

    return json.loads((DATA / "agp_fixed_point_golden.json").read_text())["cases"]


class TestAGPFixedPoint:
    def test_golden(self, golden):
        for case in golden:
            d = agp_fixed_point(case["t1"], case["probs"])
            assert d == pytest.approx(case["d_star"], abs=1e-9)
            m = agp_moments(case["t1"], d, d, case["probs"])
            assert abs(m.mean - m.variance) < 1e-6

    def test_two_bands_is_golden_ratio(self):
        # times (1, (1 + d) d): E = Var gives d^2 + d = 2 + sqrt(5), solved by the golden ratio
        d = agp_fixed_point(1, (0.5, 0.5))
        assert d == pytest.approx((1 + math.sqrt(5)) / 2, abs=1e-9)
        m = agp_moments(1, d, d, (0.5, 0.5))
        assert abs(m.mean - m.variance) < 1e-9

    def test_concentrated_mass(self):
        p = (1 - 1e-3, 1e-3)
        d = agp_fixed_point(1, p)
        m = moments(expand_scheme(AGP(1, d, d), 2), p)
        assert abs(m.mean - m.variance) <= 1e-6 * max(1.0, m.mean)

    def test_bracket_too_small(self):
        with pytest.raises(NoFixedPointError):
            agp_fixed_point(1, (0.2, 0.3, 0.5), d_max=1.1)


class TestPareto:
    def test_dominance(self):
        pts = [ParetoPoint(None, 3, 2), ParetoPoint(None, 2, 3), ParetoPoint(None, 4, 4)]
        assert [(p.mean, p.variance) for p in pareto_front(pts)] == [(2, 3), (3, 2)]

    def test_single(self):
        pt = ParetoPoint(None, 1.0, 1.0)
        assert pareto_front([pt]) == [pt]

    def test_partitions_of_nine(self):
        p = (0.5, 0.3, 0.2)
        pts = [ParetoPoint(Explicit(t), *direct_moments(t, p)[::2]) for t in enumerate_partitions(3, 9)]
        front = pareto_front(pts)
        assert [(round(f.mean, 9), round(f.variance, 9)) for f in front] == [(2.3, 3.61), (2.4, 2.44), (2.7, 0.61)]

    @settings(max_examples=300)
    @given(st.lists(st.tuples(st.integers(0, 12), st.integers(0, 12)), max_size=25))
    def test_exhaustive_dominance(self, raw):
        pts = [ParetoPoint(None, float(a), float(b)) for a, b in raw]
        front = pareto_front(pts)

        def dominates(x, y):
            return x.mean <= y.mean and x.variance <= y.variance and (x.mean < y.mean or x.variance < y.variance)

        for x, y in itertools.permutations(front, 2):
            assert not dominates(x, y)
        kept = {id(f) for f in front}
        for q in pts:
            if id(q) not in kept:
                assert any(dominates(f, q) for f in front)
            else:
                assert not any(dominates(o, q) for o in pts)
        assert [f.mean for f in front] == sorted(f.mean for f in front)


class TestSelect:
    def test_min_min_m15(self):
        family = ap_solutions(15, 900)
        assert select_solution(family, [1 / 15] * 15, Policy.MIN_MIN) == AP(4, 8)

    def test_single(self):
        assert select_solution([GP(2, 3)], (0.5, 0.5), "pareto") == GP(2, 3)

    def test_empty(self):
        with pytest.raises(InputError):
            select_solution([], (1.0,), "min-min")

    def test_gp_pareto_rounds_fixed_point(self):
        p = (0.5, 0.3, 0.2)
        assert round(gp_fixed_point(1, p)) == 2
        assert select_solution([GP(1, 2), GP(3, 3)], p, Policy.PARETO) == GP(1, 2)

    def test_ap_pareto(self):
        p = (0.2, 0.3, 0.5)
        target = round(ap_fixed_point(4, p))
        family = [AP(4, d) for d in range(1, 8)]
        assert select_solution(family, p, "pareto") == AP(4, target)

    def test_max_t1(self):
        assert select_solution(ap_solutions(15, 900), [1 / 15] * 15, "max-t1") == AP(53, 1)

    def test_max_t1_rejects_explicit(self):
        with pytest.raises(InputError):
            select_solution([Explicit((1, 2))], (0.5, 0.5), "max-t1")

    def test_fixed_point_policy(self):
        p = (0.5, 0.3, 0.2)
        chosen = select_solution([Explicit(t) for t in enumerate_partitions(3, 9)], p, "fixed-point")
        gaps = {t: abs(direct_moments(t, p)[0] - direct_moments(t, p)[2]) for t in enumerate_partitions(3, 9)}
        assert chosen.times == min(gaps, key=gaps.get)

    def test_explicit_min_min(self):
        p = (0.5, 0.3, 0.2)
        chosen = select_solution([Explicit(t) for t in enumerate_partitions(3, 9)], p, "min-min")
        assert chosen.times == (1, 2, 6)

    def test_trim(self):
        family = ap_solutions(15, 900)
        trimmed = trim_extremes(family, (20, 80))
        assert AP(4, 8) not in trimmed and AP(53, 1) not in trimmed
        assert select_solution(family, [1 / 15] * 15, "min-min", trim=(20, 80)) == min(trimmed, key=lambda s: (s.t1, s.d))
