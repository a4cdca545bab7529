"""Filtration dimensions, the two degree routes, convergence, suite."""

from fractions import Fraction as F
from random import Random

import pytest

from greentree import (
    PLF,
    CurveModel,
    InfeasibleError,
    RDivisor,
    arakelov_deg,
    arakelov_deg_plus,
    canonical_metrised,
    filtration_dim,
    filtration_profile,
    hs_convergence_run,
    inequality_suite,
    make_metrised,
    pairing,
    phi_star_sum,
    vol,
    vol_chi,
)
from greentree.curve import h0_dim
from greentree.hilbert_samuel import splitting_condition_holds
from greentree.positivity import deg_dgt
from greentree.randgen import GeneratorParams, random_curve, random_psh

from oracles import monomial_log_norms

CURVE = CurveModel.of(0, {"p0": 1, "pinf": 1})
HALF_DIP = PLF.from_vertices([(0, 0), (1, F(-1, 2))])


def w1():
    return make_metrised(
        CURVE, 0, {"pinf": (F(1), PLF.constant(0)), "p0": (F(0), HALF_DIP)}
    )


class TestFiltration:
    def test_worked_dims_at_level_two(self):
        g = w1()
        assert filtration_dim(g, 2, F(-3, 2)) == 3
        assert filtration_dim(g, 2, F(-1)) == 3
        assert filtration_dim(g, 2, F(-1, 2)) == 2
        assert filtration_dim(g, 2, F(0)) == 2
        assert filtration_dim(g, 2, F(1, 100)) == 0

    def test_unconstrained_for_very_negative_thresholds(self):
        g = w1()
        for n in (1, 3, 10):
            assert filtration_dim(g, n, F(-10 * n)) == h0_dim(
                g.divisor().scale(n), CURVE
            ) == n + 1

    def test_monomial_norm_oracle(self):
        g = w1()
        for n in (1, 2, 3, 5):
            norms = monomial_log_norms(g, 1, n)
            profile = filtration_profile(g, n)
            for t in sorted(set(norms)) + [F(-50), F(1)]:
                assert profile.dim_at(t) == sum(1 for v in norms if v >= t)
            assert arakelov_deg(g, n) == sum(norms)

    def test_decreasing_in_t(self):
        g = w1().shift(F(2, 3))
        dims = [filtration_dim(g, 4, F(k, 6)) for k in range(-30, 12)]
        assert dims == sorted(dims, reverse=True)

    def test_scaled_limit_approaches_profile(self):
        g = w1()
        t = F(-1, 4)
        target = deg_dgt(g, t)  # 3/4
        n = 240
        dim = filtration_dim(g, n, n * t)
        assert abs(F(dim, n) - target) <= F(2, n)

    def test_requires_integral_divisor(self):
        g = make_metrised(CURVE, 0, {"pinf": (F(1, 2), PLF.constant(0))})
        with pytest.raises(InfeasibleError):
            filtration_dim(g, 3, F(0))

    def test_requires_genus_zero(self):
        elliptic = CurveModel.of(1, {"o": 1})
        g = make_metrised(elliptic, 0, {"o": (F(1), PLF.constant(0))})
        with pytest.raises(InfeasibleError):
            arakelov_deg(g, 2)


class TestArakelovDeg:
    def test_worked_small_level(self):
        assert arakelov_deg(w1(), 2) == -1

    def test_canonical_vanishes(self):
        g = canonical_metrised(CURVE, RDivisor.of({"pinf": 3}))
        for n in (1, 2, 7):
            assert arakelov_deg(g, n) == 0

    def test_worked_level_hundred(self):
        assert arakelov_deg(w1(), 100) == -1275

    def test_translation_identity(self):
        g = w1()
        rng = Random(101)
        for n in (1, 2, 5, 9):
            c = F(rng.randint(-6, 6), 2)
            dim = h0_dim(g.divisor().scale(n), CURVE)
            assert arakelov_deg(g.shift(c), n) == arakelov_deg(g, n) + n * c * dim

    def test_plus_part(self):
        assert arakelov_deg_plus(w1(), 7) == 0
        lifted = w1().shift(1)
        for n in (2, 6, 20):
            dp = arakelov_deg_plus(lifted, n)
            assert dp > 0
            assert dp >= arakelov_deg(lifted, n)
        ratios = [arakelov_deg_plus(lifted, n) / F(n * n, 2) for n in (40, 80, 160)]
        target = vol(lifted)
        gaps = [abs(r - target) for r in ratios]
        assert gaps == sorted(gaps, reverse=True)


class TestPhiStarSum:
    def test_matches_stieltjes_on_worked_instance(self):
        g = w1()
        for n in (1, 2, 3, 10, 100):
            assert phi_star_sum(g, n) == arakelov_deg(g, n)

    def test_zero_without_bounded_parts(self):
        g = canonical_metrised(CURVE, RDivisor.of({"pinf": 2}))
        for n in (1, 5):
            assert phi_star_sum(g, n) == 0

    def test_named_precondition_failures(self):
        with pytest.raises(InfeasibleError, match="root value"):
            phi_star_sum(w1().shift(1), 3)
        kink = PLF.from_vertices([(0, 0), (1, 1)])
        bad = make_metrised(
            CURVE, 0, {"pinf": (F(1), PLF.constant(0)), "p0": (F(0), kink)}
        )
        with pytest.raises(InfeasibleError, match="convex"):
            phi_star_sum(bad, 3)
        steep = make_metrised(
            CURVE, 0, {"pinf": (F(1), PLF.constant(0)), "p0": (F(0), HALF_DIP.scale(3))}
        )
        with pytest.raises(InfeasibleError, match="mu_inf"):
            phi_star_sum(steep, 3)
        frac_div = make_metrised(CURVE, 0, {"pinf": (F(1, 2), PLF.constant(0))})
        with pytest.raises(InfeasibleError, match="integral"):
            phi_star_sum(frac_div, 3)

    def test_agreement_under_margin_and_bound_without(self):
        rng = Random(103)
        params = GeneratorParams(max_points=4, max_breakpoints=3, coeff_bound=2, max_denominator=4)
        agree = 0
        for _ in range(12):
            curve = random_curve(rng, params)
            g = random_psh(
                rng, curve, params,
                integral_divisor=True, base_zero=True,
                positive_degree=True, exact_degree_margin=True,
            )
            assert splitting_condition_holds(g, 40)
            for n in (1, 2, 3, 11, 40):
                assert phi_star_sum(g, n) == arakelov_deg(g, n)
                agree += 1
        assert agree == 60
        # without the margin the transform sum can only undershoot
        for _ in range(12):
            curve = random_curve(rng, params)
            g = random_psh(rng, curve, params, integral_divisor=True, base_zero=True)
            if g.deg() <= 0:
                continue
            for n in (1, 2, 3, 7):
                assert phi_star_sum(g, n) <= arakelov_deg(g, n)


class TestConvergence:
    def test_worked_run(self):
        report = hs_convergence_run(w1(), [10, 20, 50, 100, 200])
        assert report.target_pairing == report.target_vol_chi == F(-1, 4)
        ratios = {row.n: row.ratio for row in report.rows}
        assert ratios[100] == F(-51, 200)
        gaps = [row.gap for row in report.rows]
        assert gaps == sorted(gaps, reverse=True)
        assert gaps[-1] == F(1, 400)

    def test_canonical_is_flat(self):
        g = canonical_metrised(CURVE, RDivisor.of({"pinf": 1}))
        report = hs_convergence_run(g, [3, 6])
        assert all(row.ratio == 0 for row in report.rows)
        assert report.target_vol_chi == 0

    def test_translation_shifts_target(self):
        g = w1()
        c = F(3, 2)
        r0 = hs_convergence_run(g, [8, 16])
        r1 = hs_convergence_run(g.shift(c), [8, 16])
        assert r1.target_vol_chi == r0.target_vol_chi + 2 * c * g.deg()

    def test_preconditions(self):
        steep = make_metrised(
            CURVE, 0, {"pinf": (F(1), PLF.constant(0)), "p0": (F(0), HALF_DIP.scale(3))}
        )
        with pytest.raises(InfeasibleError):
            hs_convergence_run(steep, [4])
        zero_deg = canonical_metrised(CURVE, RDivisor.of({"p0": 1, "pinf": -1}))
        with pytest.raises(InfeasibleError):
            hs_convergence_run(zero_deg, [4])


class TestInequalitySuite:
    def test_no_violations_and_deterministic(self):
        r1 = inequality_suite(421, 120)
        r2 = inequality_suite(421, 120)
        assert r1.total_violations == 0
        assert {k: v.checked for k, v in r1.checks.items()} == {
            k: v.checked for k, v in r2.checks.items()
        }
        assert all(c.checked > 0 for name, c in r1.checks.items() if name != "cauchy_schwarz")

    def test_equal_instances_hit_hodge_equality(self):
        g = w1().shift(1)
        p = pairing(g, g)
        lhs = (p + 2 * p + p) / (2 * g.deg())
        rhs = p / g.deg() + p / g.deg()
        assert lhs == rhs

    def test_different_seeds_differ(self):
        r1 = inequality_suite(1, 30)
        r2 = inequality_suite(2, 30)
        v1 = [c.checked for c in r1.checks.values()]
        v2 = [c.checked for c in r2.checks.values()]
        assert r1.seed != r2.seed
        assert v1 and v2


def test_vol_chi_consistency_between_modules():
    rng = Random(107)
    params = GeneratorParams(max_points=3, max_breakpoints=2, coeff_bound=3, max_denominator=2)
    for _ in range(6):
        curve = random_curve(rng, params)
        g = random_psh(
            rng, curve, params, integral_divisor=True, positive_degree=True
        )
        n = 160
        ratio = arakelov_deg(g, n) / F(n * n, 2)
        assert abs(ratio - vol_chi(g)) <= F(len(curve.points) * 40, n)
