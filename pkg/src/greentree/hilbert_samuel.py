"""Exact Arakelov degrees of section spaces and the quadratic limit.

For an integral divisor D on a genus-0 model with a Green function g,
the space H0(nD) carries the sup norm  ||s||_{ng} = exp(-inf(g_(s) + ng)).
Over a trivially valued field such an ultrametric norm is diagonalised
by any basis adapted to its filtration

    F^t = {s in H0(nD) : ||s||_{ng} <= e^{-t}},

so the Arakelov degree (minus the log of the determinant norm) is the
Stieltjes integral of the filtration dimension profile:

    deg(n)  = int_0^inf dim F^t dt - int_{-inf}^0 (dim H0(nD) - dim F^t) dt,
    deg+(n) = int_0^inf dim F^t dt.

Everything in sight is exact: the jump thresholds form the finite set
{ n psi_x(r/n) : x active, r integer }  united with {n g(eta0)}, where
psi_x(a) = inf_t (g_x(t) + a t) is the per-edge threshold map, and the
dimension between consecutive thresholds is a Riemann-Roch count.

A second, independent route computes the same degree from the
Legendre-type transforms of the bounded parts:

    deg(n) = sum_x w(x) sum_{i=0}^{floor(-n a_x)} n phi_x*(i/n),

valid when the root value is 0, all edges are convex,
mu_inf(g - g(eta0)) >= 0, and the splitting condition
sum_x w(x) ceil(-n a_x) <= n deg(D) + 1 holds (a_x the initial slope of
phi_x); the generator in :mod:`greentree.randgen` produces instances
with that condition guaranteed for every n.  Without it the transform
sum can undershoot (never overshoot) the true degree at small n.

The module also hosts the convergence experiment deg(n)/(n^2/2) ->
vol_chi = (D,g).(D,g) for plurisubharmonic g, and the randomized
exact-inequality suite.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from random import Random
from typing import Sequence

from .curve import PointId, RDivisor, h0_dim
from .errors import InfeasibleError
from .green import MetrisedRDivisor, is_psh, mu_inf_total, pairing
from .plf import ZERO, bounds, frac, legendre_star, sup_abs_diff
from .positivity import (
    distribution,
    lambda_ess_threshold,
    threshold_function,
    vol,
    vol_chi,
)
from .randgen import (
    GeneratorParams,
    initial_slope,
    random_bounded_part,
    random_curve,
    random_fraction,
    random_metrised,
)


def _require_harness(g: MetrisedRDivisor) -> None:
    g.curve.require_exact("section-space filtrations")
    if not g.divisor().is_integral:
        raise InfeasibleError("filtration computations need an integral divisor")


@dataclass(frozen=True)
class _EdgeThresholds:
    """Per-edge jump data at level n: section slope r_lo + i certifies
    the log-norm bound values[i] on this edge."""

    point: PointId
    weight: int
    n_mu: int
    values: tuple[Fraction, ...]

    def least_slope(self, t: Fraction) -> int:
        """Least integer r with n psi(r/n) >= t (t <= n base assumed)."""
        return -self.n_mu + bisect_left(self.values, t)


def _edge_thresholds(g: MetrisedRDivisor, x: PointId, n: int) -> _EdgeThresholds:
    th = threshold_function(g, x)
    n_mu = int(th.mu * n)
    r_lo = -n_mu
    # psi increases strictly until it saturates at the root value; the
    # saturation slope is the largest line constraint at the root level.
    a_cap = -th.mu
    for t, v in th.rows[1:]:
        a_cap = max(a_cap, (th.root_value - v) / t)
    r_hi = max(r_lo, math.ceil(a_cap * n))
    # n psi(r/n) = min over rows of (n v + t r): walk the lower envelope
    # of these affine forms instead of re-minimising per r.
    best: dict[Fraction, Fraction] = {}
    for t, v in th.rows:
        nv = n * v
        if t not in best or nv < best[t]:
            best[t] = nv
    lines = sorted(best.items(), reverse=True)  # slope t descending
    stack: list[tuple[Fraction, Fraction]] = []
    switches: list[Fraction] = []
    for t, nv in lines:
        while stack:
            t0, nv0 = stack[-1]
            r_switch = (nv - nv0) / (t0 - t)
            if switches and r_switch <= switches[-1]:
                stack.pop()
                switches.pop()
            else:
                stack.append((t, nv))
                switches.append(r_switch)
                break
        else:
            stack.append((t, nv))
    values = []
    piece = 0
    for r in range(r_lo, r_hi + 1):
        while piece < len(switches) and r >= switches[piece]:
            piece += 1
        t, nv = stack[piece]
        values.append(nv + t * r)
    assert values[-1] == n * th.root_value
    return _EdgeThresholds(x, g.curve.weight(x), n_mu, tuple(values))


def filtration_dim(g: MetrisedRDivisor, n: int, t) -> int:
    """dim {s in H0(nD) : ||s||_{ng} <= e^{-t}}.

    A section with slope r at an active point certifies the bound
    n psi_x(r/n) there; away from the active support the certified
    bound is n g(eta0), whence the early exit.  The surviving space is
    the sections of nD minus the forced vanishing orders, a plain
    Riemann-Roch count.
    """
    _require_harness(g)
    t = frac(t)
    if t > n * g.base_value:
        return 0
    forced: dict[PointId, Fraction] = {}
    for x in g.support:
        ed = _edge_thresholds(g, x, n)
        r = ed.least_slope(t)
        forced[x] = Fraction(max(0, r + ed.n_mu))
    cut = g.divisor().scale(n) - RDivisor.of(forced)
    return h0_dim(cut, g.curve)


@dataclass(frozen=True)
class FiltrationProfile:
    """Jump list of t -> dim F^t: dims[k] is the dimension on the
    half-open interval (thresholds[k-1], thresholds[k]]."""

    n: int
    full_dim: int
    thresholds: tuple[Fraction, ...]
    dims: tuple[int, ...]

    def dim_at(self, t: Fraction) -> int:
        if not self.thresholds or t > self.thresholds[-1]:
            return 0
        return self.dims[bisect_left(self.thresholds, t)]

    def stieltjes_degree(self, positive_part: bool = False) -> Fraction:
        """sum over jumps of location * size; the positive part clips
        locations at 0 (both integrals of the dimension profile)."""
        total = Fraction(0)
        for k, t in enumerate(self.thresholds):
            nxt = self.dims[k + 1] if k + 1 < len(self.dims) else 0
            jump = self.dims[k] - nxt
            if jump:
                total += max(t, Fraction(0)) * jump if positive_part else t * jump
        return total


def filtration_profile(g: MetrisedRDivisor, n: int) -> FiltrationProfile:
    _require_harness(g)
    edges = [_edge_thresholds(g, x, n) for x in g.support]
    full = int(n * g.deg()) + 1
    if full <= 0:
        return FiltrationProfile(n, 0, (), ())
    levels = {n * g.base_value}
    for ed in edges:
        levels.update(ed.values)
    thresholds = tuple(sorted(levels))
    # Same count as filtration_dim, with the per-edge tables consumed by
    # a single merge sweep: the forced vanishing order at threshold t is
    # the number of table entries below t, because the least certified
    # slope starts at -ord_x(nD).  Validated against filtration_dim in
    # the test suite.
    dims = []
    pointers = [0] * len(edges)
    for t in thresholds:
        forced = 0
        for i, ed in enumerate(edges):
            p = pointers[i]
            values = ed.values
            while p < len(values) and values[p] < t:
                p += 1
            pointers[i] = p
            forced += ed.weight * p
        dims.append(max(0, full - forced))
    assert dims[0] == full, "smallest threshold must keep every section"
    return FiltrationProfile(n, full, thresholds, tuple(dims))


def arakelov_deg(g: MetrisedRDivisor, n: int) -> Fraction:
    """-ln of the determinant norm of (H0(nD), ||.||_{ng}), exactly."""
    return filtration_profile(g, n).stieltjes_degree()


def arakelov_deg_plus(g: MetrisedRDivisor, n: int) -> Fraction:
    """Positive Arakelov degree: the best degree over all subspaces,
    reached by the sections of nonnegative log-norm levels."""
    return filtration_profile(g, n).stieltjes_degree(positive_part=True)


def phi_star_sum(g: MetrisedRDivisor, n: int) -> Fraction:
    """Transform-sum route to the Arakelov degree.

    Preconditions (each reported by name): integral divisor, root value
    0, convex edges, mu_inf(g - g(eta0)) >= 0.
    """
    _require_harness(g)
    if g.base_value != 0:
        raise InfeasibleError(
            "phi_star_sum needs root value 0 (reduce by a translation first)"
        )
    if not all(e.phi.is_convex for _, e in g.edges):
        raise InfeasibleError("phi_star_sum needs convex edges")
    if mu_inf_total(g) < 0:
        raise InfeasibleError("phi_star_sum needs mu_inf(g - g(eta0)) >= 0")
    total = Fraction(0)
    for x, e in g.edges:
        if e.phi == ZERO:
            continue
        a = initial_slope(e.phi)
        star = legendre_star(e.phi)
        cutoff = math.floor(-n * a)
        # Walk the transform once: the evaluation points i/n ascend, so
        # the active segment pointer only moves forward.
        taus = (Fraction(0),) + star.breakpoints
        slopes = star.slopes + (star.final_slope,)
        piece = 0
        value = star.value_at_zero
        prev = Fraction(0)
        acc = Fraction(0)
        for i in range(cutoff + 1):
            lam = Fraction(i, n)
            while piece + 1 < len(taus) and taus[piece + 1] < lam:
                value += slopes[piece] * (taus[piece + 1] - prev)
                prev = taus[piece + 1]
                piece += 1
            value += slopes[piece] * (lam - prev)
            prev = lam
            acc += value
        total += g.curve.weight(x) * n * acc
    return total


def splitting_condition_holds(g: MetrisedRDivisor, n_max: int) -> bool:
    """Whether sum_x w(x) ceil(-n a_x) <= n deg(D) + 1 for all n <= n_max,
    the exact regime of agreement of the two degree routes."""
    d = g.deg()
    slopes = [
        (g.curve.weight(x), initial_slope(e.phi)) for x, e in g.edges if e.phi != ZERO
    ]
    for n in range(1, n_max + 1):
        lhs = sum(w * math.ceil(-n * a) for w, a in slopes)
        if lhs > n * d + 1:
            return False
    return True


# ---------------------------------------------------------------------------
# Convergence experiment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HSRow:
    n: int
    deg: Fraction
    deg_plus: Fraction
    ratio: Fraction
    gap: Fraction


@dataclass(frozen=True)
class HSReport:
    rows: tuple[HSRow, ...]
    target_pairing: Fraction
    target_vol_chi: Fraction
    target_vol: Fraction


def hs_convergence_run(g: MetrisedRDivisor, ns: Sequence[int]) -> HSReport:
    """Ratios deg(n)/(n^2/2) against the self-pairing, for psh g with
    deg(D) > 0; per-n computations are independent, aggregated in
    n-order."""
    _require_harness(g)
    if g.deg() <= 0:
        raise InfeasibleError("convergence experiment needs deg(D) > 0")
    if not is_psh(g):
        raise InfeasibleError("convergence experiment needs a plurisubharmonic g")
    target = pairing(g, g)
    chi = vol_chi(g)
    rows = []
    for n in sorted(set(int(n) for n in ns)):
        if n <= 0:
            raise InfeasibleError("n must be positive")
        d = arakelov_deg(g, n)
        dp = arakelov_deg_plus(g, n)
        ratio = d / Fraction(n * n, 2)
        rows.append(HSRow(n, d, dp, ratio, abs(ratio - chi)))
    return HSReport(tuple(rows), target, chi, vol(g))


# ---------------------------------------------------------------------------
# Randomized exact-inequality suite
# ---------------------------------------------------------------------------


@dataclass
class CheckCounter:
    name: str
    checked: int = 0
    violations: list[str] = field(default_factory=list)

    def record(self, ok: bool, detail: str) -> None:
        self.checked += 1
        if not ok:
            self.violations.append(detail)


@dataclass
class InequalityReport:
    seed: int
    trials: int
    params: GeneratorParams
    checks: dict[str, CheckCounter]

    @property
    def total_violations(self) -> int:
        return sum(len(c.violations) for c in self.checks.values())


CHECK_NAMES = (
    "lambda_ess_superadditive",
    "vol_chi_quotient_superadditive",
    "pairing_quotient_superadditive",
    "cauchy_schwarz",
    "vol_chi_translation",
    "lambda_ess_translation",
    "vol_chi_scaling",
    "vol_chi_lipschitz",
    "vol_chi_sandwich",
    "profile_superadditive",
)


def inequality_suite(
    seed: int, trials: int, params: GeneratorParams = GeneratorParams()
) -> InequalityReport:
    """Run `trials` seeded random instances through the exact identity
    and inequality checks; every violation is reported verbatim (and
    would witness a genuine bug, the statements being theorems)."""
    rng = Random(seed)
    checks = {name: CheckCounter(name) for name in CHECK_NAMES}
    for trial in range(trials):
        curve = random_curve(rng, params)
        g1 = random_metrised(rng, curve, params, positive_degree=True)
        g2 = random_metrised(rng, curve, params, positive_degree=True)
        g12 = g1 + g2
        d1, d2 = g1.deg(), g2.deg()
        tag = f"trial {trial}: g1={g1!r} g2={g2!r}"

        pr1, pr2, pr12 = distribution(g1), distribution(g2), distribution(g12)
        lam1 = pr1.lambda_threshold
        lam2 = pr2.lambda_threshold
        lam12 = pr12.lambda_threshold
        checks["lambda_ess_superadditive"].record(
            lam12 >= lam1 + lam2, f"{tag} lam12={lam12} lam1={lam1} lam2={lam2}"
        )

        v1 = 2 * (pr1.integral_positive() - pr1.deficit_negative())
        v2 = 2 * (pr2.integral_positive() - pr2.deficit_negative())
        v12 = 2 * (pr12.integral_positive() - pr12.deficit_negative())
        checks["vol_chi_quotient_superadditive"].record(
            v12 / (d1 + d2) >= v1 / d1 + v2 / d2,
            f"{tag} v12={v12} v1={v1} v2={v2}",
        )

        p11 = pairing(g1, g1)
        p22 = pairing(g2, g2)
        p12 = pairing(g1, g2)
        psum = p11 + 2 * p12 + p22
        checks["pairing_quotient_superadditive"].record(
            psum / (d1 + d2) >= p11 / d1 + p22 / d2,
            f"{tag} psum={psum} p11={p11} p22={p22}",
        )
        if p11 >= 0 and p22 >= 0:
            checks["cauchy_schwarz"].record(
                p12 >= 0 and p12 * p12 >= p11 * p22,
                f"{tag} p12={p12} p11={p11} p22={p22}",
            )

        c = random_fraction_nonzero(rng, params)
        checks["vol_chi_translation"].record(
            vol_chi(g1.shift(c)) == v1 + 2 * c * d1, f"{tag} c={c}"
        )
        checks["lambda_ess_translation"].record(
            lambda_ess_threshold(g1.shift(c)) == lam1 + c, f"{tag} c={c}"
        )
        a = abs(random_fraction_nonzero(rng, params))
        checks["vol_chi_scaling"].record(
            vol_chi(g1.scale(a)) == a * a * v1, f"{tag} a={a}"
        )

        g1p = _perturb_bounded_parts(rng, g1, params)
        diff = _sup_phi_diff(g1, g1p)
        v1p = vol_chi(g1p)
        checks["vol_chi_lipschitz"].record(
            abs(v1p - v1) <= 2 * diff * d1, f"{tag} diff={diff}"
        )

        lo, hi = _phi_bounds(g1)
        checks["vol_chi_sandwich"].record(
            2 * d1 * lo <= v1 <= 2 * d1 * hi, f"{tag} lo={lo} hi={hi} v1={v1}"
        )

        # Threshold-divisor superadditivity is only asserted below the
        # essential infima, where the divisors are honest suprema.
        t1 = lam1 - abs(random_fraction_nonzero(rng, params))
        t2 = lam2 - abs(random_fraction_nonzero(rng, params))
        checks["profile_superadditive"].record(
            pr12.value(t1 + t2) >= pr1.value(t1) + pr2.value(t2),
            f"{tag} t1={t1} t2={t2}",
        )
    return InequalityReport(seed, trials, params, checks)


def random_fraction_nonzero(rng: Random, params: GeneratorParams) -> Fraction:
    return random_fraction(rng, params.coeff_bound, params.max_denominator, nonzero=True)


def _perturb_bounded_parts(
    rng: Random, g: MetrisedRDivisor, params: GeneratorParams
) -> MetrisedRDivisor:
    """Same divisor, bounded parts nudged; keeps the Lipschitz bound honest."""
    from .green import Edge

    edges = []
    for x, e in g.edges:
        if rng.random() < 0.5:
            edges.append((x, Edge(e.mu, e.phi + random_bounded_part(rng, params))))
        else:
            edges.append((x, e))
    return MetrisedRDivisor(g.curve, g.base_value, tuple(edges))


def _sup_phi_diff(g1: MetrisedRDivisor, g2: MetrisedRDivisor) -> Fraction:
    """sup over the tree of |phi_{g1} - phi_{g2}| for equal divisors."""
    best = abs(g1.base_value - g2.base_value)
    for x in set(g1.support) | set(g2.support):
        best = max(best, sup_abs_diff(g1.bounded_part(x), g2.bounded_part(x)))
    return best


def _phi_bounds(g: MetrisedRDivisor) -> tuple[Fraction, Fraction]:
    """(min, max) over the tree of the bounded Green part phi_g."""
    lo = hi = g.base_value
    for x, e in g.edges:
        a, b = bounds(e.phi.shift(g.base_value))
        lo, hi = min(lo, a), max(hi, b)
    return lo, hi
