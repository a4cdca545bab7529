"""Seeded random instances for the randomized identity and inequality suites.

Everything is driven by a ``random.Random`` so that a (seed, params)
pair reproduces an instance exactly.  Default sizes keep every derived
linear program tiny: at most 6 declared points, at most 4 breakpoints
per edge, coefficients in [-10, 10] with denominator at most 8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from random import Random

from .curve import CurveModel
from .green import Edge, MetrisedRDivisor
from .plf import PLF, ZERO


@dataclass(frozen=True)
class GeneratorParams:
    max_points: int = 6
    max_breakpoints: int = 4
    coeff_bound: int = 10
    max_denominator: int = 8
    max_weight: int = 3


def random_fraction(
    rng: Random,
    bound: int,
    max_denominator: int,
    *,
    positive: bool = False,
    nonzero: bool = False,
) -> Fraction:
    den = rng.randint(1, max_denominator)
    lo = 1 if positive else -bound * den
    num = rng.randint(lo, bound * den)
    while nonzero and num == 0:
        num = rng.randint(lo, bound * den)
    return Fraction(num, den)


def random_curve(rng: Random, params: GeneratorParams = GeneratorParams()) -> CurveModel:
    n = rng.randint(2, params.max_points)
    weights = {f"p{i}": rng.randint(1, params.max_weight) for i in range(n)}
    return CurveModel.of(0, weights)


def random_bounded_part(
    rng: Random, params: GeneratorParams = GeneratorParams(), *, convex: bool = False
) -> PLF:
    """A normalised bounded part: phi(0) = 0, final slope 0.

    Convex variant: strictly increasing negative slopes, so the full
    edge function stays convex for any linear part added to it.
    """
    m = rng.randint(0, params.max_breakpoints)
    if m == 0:
        return ZERO
    grid = rng.sample(range(1, 4 * params.coeff_bound), m)
    bps = sorted(Fraction(k, rng.randint(1, params.max_denominator)) for k in grid)
    bps = sorted(set(bps))
    if convex:
        slopes = sorted(
            {
                random_fraction(rng, params.coeff_bound, params.max_denominator, nonzero=True)
                for _ in bps
            }
        )
        slopes = [s if s < 0 else -s for s in slopes]
        slopes = sorted(set(slopes))[: len(bps)]
        return PLF(Fraction(0), tuple(bps[: len(slopes)]), tuple(slopes), Fraction(0))
    slopes = tuple(
        random_fraction(rng, params.coeff_bound, params.max_denominator) for _ in bps
    )
    return PLF(Fraction(0), tuple(bps), slopes, Fraction(0))


def random_metrised(
    rng: Random,
    curve: CurveModel,
    params: GeneratorParams = GeneratorParams(),
    *,
    convex: bool = False,
    integral_divisor: bool = False,
    positive_degree: bool = False,
) -> MetrisedRDivisor:
    """A random metrised divisor on the given curve.

    ``positive_degree`` bumps one slope upward until deg(D) > 0, which
    keeps the instance inside the scope of the profile machinery.
    """
    base = random_fraction(rng, params.coeff_bound, params.max_denominator)
    edges = {}
    pts = list(curve.points)
    support = rng.sample(pts, rng.randint(1, len(pts)))
    for x in support:
        if integral_divisor:
            mu = Fraction(rng.randint(-params.coeff_bound, params.coeff_bound))
        else:
            mu = random_fraction(rng, params.coeff_bound, params.max_denominator)
        phi = random_bounded_part(rng, params, convex=convex)
        edges[x] = Edge(mu, phi)
    g = MetrisedRDivisor(curve, base, tuple(edges.items()))
    if positive_degree and g.deg() <= 0:
        x = support[0]
        bump = (-g.deg()) / curve.weight(x) + 1
        if integral_divisor:
            bump = Fraction(math.ceil(bump))
        e = g.edge(x)
        edges[x] = Edge(e.mu + bump, e.phi)
        g = MetrisedRDivisor(curve, base, tuple(edges.items()))
    return g


def initial_slope(phi: PLF) -> Fraction:
    return phi.slopes[0] if phi.breakpoints else phi.final_slope


def random_psh(
    rng: Random,
    curve: CurveModel,
    params: GeneratorParams = GeneratorParams(),
    *,
    integral_divisor: bool = False,
    base_zero: bool = False,
    positive_degree: bool = False,
    exact_degree_margin: bool = False,
) -> MetrisedRDivisor:
    """A random plurisubharmonic instance: convex edges with
    mu_inf(g - g(eta0)) >= 0, repaired constructively.

    The repair adds to one edge slope the (rounded) deficit of
    sum w(x) (mu_x + phi_x'(0+)), so the result is plurisubharmonic by
    construction rather than by rejection.

    ``exact_degree_margin`` additionally enforces

        deg(D) >= sum_x w(x) (-a_x)  +  max(0, sum_x w(x) (q_x-1)/q_x - 1),

    where a_x < 0 is the initial slope of the bounded part at x and q_x
    its denominator.  Since ceil(y) <= y + (q-1)/q for y of denominator
    q, this margin makes  sum_x w(x) ceil(-n a_x) <= n deg(D) + 1  hold
    for every n >= 1, which is exactly the regime where the section
    filtration splits edge by edge and the two Arakelov-degree routes
    agree at every n (not merely in the limit).
    """
    g = random_metrised(
        rng, curve, params, convex=True, integral_divisor=integral_divisor
    )
    if base_zero:
        g = g.shift(-g.base_value)
    edges = dict(g.edges)
    support = list(edges)

    def total_deficit() -> Fraction:
        need = Fraction(0)
        for x, e in edges.items():
            need += curve.weight(x) * (e.mu + initial_slope(e.phi))
        return -need

    deficit = total_deficit()
    # `needed` is how much sum_x w(x) (mu_x + a_x) = deg(D) - sum w(-a_x)
    # must rise; adding `bump` to one slope raises it by w(x) * bump.
    needed = max(deficit, Fraction(0))
    margin_floor = Fraction(0)
    if exact_degree_margin:
        ceil_slack = sum(
            (
                curve.weight(x) * Fraction(q - 1, q)
                for x, e in edges.items()
                for q in [initial_slope(e.phi).denominator]
                if e.phi != ZERO
            ),
            Fraction(0),
        )
        margin_floor = max(margin_floor, ceil_slack - 1)
    if positive_degree:
        margin_floor = max(margin_floor, Fraction(1, 2))
    needed = max(needed, margin_floor - (-deficit))
    if needed > 0:
        x = support[rng.randrange(len(support))]
        bump = needed / curve.weight(x)
        if integral_divisor:
            bump = Fraction(math.ceil(bump))
        e = edges[x]
        edges[x] = Edge(e.mu + bump, e.phi)
        g = MetrisedRDivisor(curve, g.base_value, tuple(edges.items()))
    return g
