"""Metrised divisors: construction, pairing, infimum slopes, envelopes."""

from fractions import Fraction as F
from random import Random

import pytest

from greentree import (
    INF,
    NEG_INF,
    PLF,
    CurveModel,
    InfeasibleError,
    RDivisor,
    SectionDivisor,
    canonical_metrised,
    convex_envelope_green,
    green_eval,
    height,
    is_psh,
    lin_comb_metrised,
    make_metrised,
    mu_ess,
    mu_inf_point,
    mu_inf_total,
    pairing,
    principal_metrised,
    psh_envelope,
    section_log_norm,
)
from greentree.randgen import GeneratorParams, random_curve, random_metrised, random_psh

CURVE = CurveModel.of(0, {"p0": 1, "pinf": 1})
HALF_DIP = PLF.from_vertices([(0, 0), (1, F(-1, 2))])


def w1():
    return make_metrised(
        CURVE, 0, {"pinf": (F(1), PLF.constant(0)), "p0": (F(0), HALF_DIP)}
    )


class TestConstruction:
    def test_zero_divisor(self):
        g = make_metrised(CURVE, 0, {})
        assert g.divisor() == RDivisor.zero()
        assert g.support == ()

    def test_unnormalised_bounded_part_rejected(self):
        with pytest.raises(InfeasibleError):
            make_metrised(CURVE, 0, {"p0": (F(0), PLF.constant(1))})
        with pytest.raises(InfeasibleError):
            make_metrised(CURVE, 0, {"p0": (F(0), PLF.linear(0, 1))})

    def test_unknown_point_rejected(self):
        with pytest.raises(InfeasibleError):
            make_metrised(CURVE, 0, {"elsewhere": (F(1), PLF.constant(0))})

    def test_worked_instance(self):
        g = w1()
        assert g.divisor() == RDivisor.of({"pinf": 1})
        assert g.deg() == 1

    def test_trivial_edges_dropped(self):
        g = make_metrised(CURVE, 2, {"p0": (F(0), PLF.constant(0))})
        assert g.support == ()


class TestVectorSpace:
    def test_self_sum_doubles(self):
        g = w1()
        assert g + g == g.scale(2)

    def test_curve_mismatch_rejected(self):
        other = CurveModel.of(0, {"p0": 1, "pinf": 2})
        h = make_metrised(other, 0, {"pinf": (F(1), PLF.constant(0))})
        with pytest.raises(InfeasibleError):
            lin_comb_metrised(1, w1(), 1, h)
        with pytest.raises(InfeasibleError):
            pairing(w1(), h)

    def test_difference_is_constant(self):
        g = w1()
        assert g - g == make_metrised(CURVE, 0, {})

    def test_pointwise_on_random_pairs(self):
        rng = Random(5)
        params = GeneratorParams(max_points=4)
        for _ in range(25):
            curve = random_curve(rng, params)
            g1 = random_metrised(rng, curve, params)
            g2 = random_metrised(rng, curve, params)
            a, b = F(3, 2), F(-2, 3)
            h = lin_comb_metrised(a, g1, b, g2)
            for x in set(g1.support) | set(g2.support):
                for t in (F(0), F(1, 3), F(2), F(17, 2)):
                    assert green_eval(h, x, t) == a * green_eval(g1, x, t) + b * green_eval(g2, x, t)


class TestPrincipal:
    def test_slopes_installed(self):
        s = SectionDivisor(RDivisor.of({"p0": 1, "pinf": -1}), CURVE)
        g = principal_metrised(s)
        assert g.base_value == 0
        assert g.edge("p0").mu == 1 and g.edge("pinf").mu == -1
        assert g.edge("p0").phi == PLF.constant(0)

    def test_pairing_with_principal_vanishes(self):
        rng = Random(9)
        params = GeneratorParams(max_points=3)
        for _ in range(25):
            curve = random_curve(rng, params)
            g = random_metrised(rng, curve, params)
            pts = curve.points
            s = SectionDivisor(
                RDivisor.of({pts[0]: curve.weight(pts[1]), pts[1]: -curve.weight(pts[0])}),
                curve,
            )
            assert pairing(g, principal_metrised(s)) == 0

    def test_nonprincipal_rejected(self):
        with pytest.raises(InfeasibleError):
            SectionDivisor(RDivisor.of({"pinf": 1}), CURVE)

    def test_zero_divisor_gives_zero(self):
        s = SectionDivisor(RDivisor.zero(), CURVE)
        assert principal_metrised(s) == make_metrised(CURVE, 0, {})


class TestEval:
    def test_worked_value(self):
        assert green_eval(w1(), "p0", 1) == F(-1, 2)

    def test_root_value_shared(self):
        g = w1().shift(F(7, 3))
        for x in ("p0", "pinf"):
            assert green_eval(g, x, 0) == F(7, 3)

    def test_leaf_with_positive_slope(self):
        assert green_eval(w1(), "pinf", INF) == INF


class TestPairing:
    def test_canonical_self_pairing_zero(self):
        g = canonical_metrised(CURVE, RDivisor.of({"pinf": 1}))
        assert pairing(g, g) == 0

    def test_worked_self_pairing(self):
        assert pairing(w1(), w1()) == F(-1, 4)

    def test_symmetric_bilinear(self):
        rng = Random(21)
        params = GeneratorParams(max_points=4)
        for _ in range(25):
            curve = random_curve(rng, params)
            g1, g2, g3 = (random_metrised(rng, curve, params) for _ in range(3))
            assert pairing(g1, g2) == pairing(g2, g1)
            a, b = F(-5, 2), F(1, 3)
            assert pairing(lin_comb_metrised(a, g1, b, g2), g3) == a * pairing(g1, g3) + b * pairing(g2, g3)


class TestMuInf:
    def test_worked_per_point(self):
        g = w1()
        assert mu_inf_point(g, "p0") == F(-1, 2)
        assert mu_inf_point(g, "pinf") == 1
        assert mu_inf_total(g) == F(1, 2)

    def test_canonical_edges(self):
        g = canonical_metrised(CURVE, RDivisor.of({"pinf": 2, "p0": -1}))
        assert mu_inf_point(g, "pinf") == 2
        assert mu_inf_point(g, "p0") == -1
        assert mu_inf_total(g) == 1

    def test_off_support_sign(self):
        up = w1().shift(1)
        down = w1().shift(-1)
        assert mu_inf_point(up, "p0") != NEG_INF
        assert mu_inf_total(down) == NEG_INF

    def test_convex_initial_slope_relation(self):
        rng = Random(25)
        params = GeneratorParams(max_points=4)
        for _ in range(30):
            curve = random_curve(rng, params)
            g = random_psh(rng, curve, params)
            shifted = g.shift(-g.base_value)
            for x, e in g.edges:
                first = e.phi.slopes[0] if e.phi.breakpoints else F(0)
                assert mu_inf_point(shifted, x) == e.mu + first

    def test_bounded_by_slope(self):
        rng = Random(27)
        params = GeneratorParams(max_points=4)
        for _ in range(30):
            curve = random_curve(rng, params)
            g = random_metrised(rng, curve, params)
            for x, e in g.edges:
                assert mu_inf_point(g, x) <= e.mu

    def test_canonical_shift_translates(self):
        rng = Random(29)
        params = GeneratorParams(max_points=4)
        for _ in range(25):
            curve = random_curve(rng, params)
            g = random_metrised(rng, curve, params)
            if mu_inf_total(g) == NEG_INF:
                continue
            d = RDivisor.of({curve.points[0]: F(5, 2)})
            shifted = g + canonical_metrised(curve, d)
            from greentree.curve import degree

            assert mu_inf_total(shifted) == mu_inf_total(g) + degree(d, curve)


class TestSectionNorm:
    def test_unit_section_on_worked_instance(self):
        s = SectionDivisor(RDivisor.zero(), CURVE)
        assert section_log_norm(w1(), s) == F(-1, 2)

    def test_canonical_norm_is_zero(self):
        g = canonical_metrised(CURVE, RDivisor.of({"pinf": 1}))
        s = SectionDivisor(RDivisor.of({"p0": 1, "pinf": -1}), CURVE)
        assert section_log_norm(g, s) == 0

    def test_infeasible_rejected(self):
        s = SectionDivisor(RDivisor.of({"p0": -1, "pinf": 1}), CURVE)
        with pytest.raises(InfeasibleError):
            section_log_norm(w1(), s)

    def test_translation(self):
        s = SectionDivisor(RDivisor.zero(), CURVE)
        assert section_log_norm(w1().shift(3), s) == section_log_norm(w1(), s) + 3

    def test_log_superadditive_under_products(self):
        # product sections pick up at least the sum of the two bounds
        rng = Random(33)
        params = GeneratorParams(max_points=3)
        for _ in range(25):
            curve = random_curve(rng, params)
            g1 = random_metrised(rng, curve, params, positive_degree=True)
            g2 = random_metrised(rng, curve, params, positive_degree=True)
            pts = curve.points
            s1 = SectionDivisor(
                RDivisor.of({pts[0]: curve.weight(pts[1]), pts[1]: -curve.weight(pts[0])}), curve
            )
            s2 = SectionDivisor(
                RDivisor.of({pts[0]: -curve.weight(pts[1]), pts[1]: curve.weight(pts[0])}), curve
            )
            if not (s1.feasible_for(g1.divisor()) and s2.feasible_for(g2.divisor())):
                continue
            both = SectionDivisor(s1.div + s2.div, curve)
            assert section_log_norm(g1 + g2, both) >= section_log_norm(g1, s1) + section_log_norm(g2, s2)


class TestConvexStructure:
    def test_envelope_fixes_convex(self):
        assert convex_envelope_green(w1()) == w1()

    def test_concave_kink_edge_flattens(self):
        kink = PLF.from_vertices([(0, 0), (1, 1)])
        g = make_metrised(CURVE, 0, {"p0": (F(0), kink), "pinf": (F(1), PLF.constant(0))})
        env = convex_envelope_green(g)
        assert env.edge("p0").phi == PLF.constant(0)
        assert env.base_value == g.base_value
        assert env.divisor() == g.divisor()

    def test_envelope_dominated_and_exact(self):
        rng = Random(35)
        params = GeneratorParams(max_points=4)
        for _ in range(25):
            curve = random_curve(rng, params)
            g = random_metrised(rng, curve, params)
            env = convex_envelope_green(g)
            assert env.base_value == g.base_value
            assert env.divisor() == g.divisor()
            for x in g.support:
                for t in (F(0), F(1, 2), F(3), F(20)):
                    assert green_eval(env, x, t) <= green_eval(g, x, t)

    def test_is_psh_worked(self):
        assert is_psh(w1())
        g3 = make_metrised(
            CURVE, 0, {"pinf": (F(1), PLF.constant(0)), "p0": (F(0), HALF_DIP.scale(3))}
        )
        assert not is_psh(g3)

    def test_is_psh_canonical(self):
        g = canonical_metrised(CURVE, RDivisor.of({"pinf": 2}))
        assert is_psh(g)

    def test_is_psh_needs_sections(self):
        g = canonical_metrised(CURVE, RDivisor.of({"pinf": -1}))
        with pytest.raises(InfeasibleError):
            is_psh(g)

    def test_psh_envelope_fixed_point(self):
        assert psh_envelope(w1()) == w1()
        g = canonical_metrised(CURVE, RDivisor.of({"pinf": 1}))
        assert psh_envelope(g) == g

    def test_psh_envelope_guard(self):
        g3 = make_metrised(
            CURVE, 0, {"pinf": (F(1), PLF.constant(0)), "p0": (F(0), HALF_DIP.scale(3))}
        )
        with pytest.raises(InfeasibleError):
            psh_envelope(g3)

    def test_psh_envelope_idempotent_on_randoms(self):
        rng = Random(37)
        params = GeneratorParams(max_points=4)
        for _ in range(20):
            curve = random_curve(rng, params)
            g = random_metrised(rng, curve, params)
            if mu_inf_total(g.shift(-g.base_value)) == NEG_INF:
                continue
            if mu_inf_total(g.shift(-g.base_value)) < 0:
                continue
            env = psh_envelope(g)
            assert psh_envelope(env) == env
            assert env.base_value == g.base_value


class TestHeights:
    def test_worked_height(self):
        assert height(w1(), "p0") == F(-1, 2)
        assert mu_ess(w1()) == 0

    def test_canonical_heights_constant(self):
        g = canonical_metrised(CURVE, RDivisor.of({"pinf": 3})).shift(F(5, 7))
        assert height(g, "p0") == F(5, 7)
        assert height(g, "pinf") == F(5, 7)

    def test_translation(self):
        assert mu_ess(w1().shift(F(2, 3))) == F(2, 3)
