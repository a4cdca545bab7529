"""Positivity invariants of metrised R-divisors, exactly.

Two independent computational routes run through this module.

The maximin route.  The essential infimum

    lambda_ess(D, g) = sup_s inf_tree (g_(s) + g),

with s ranging over sections feasible for D, is a finite concave
program.  Writing c_x = ord_x(s), the inner infimum decomposes edge by
edge into

    m_x(c_x) = inf_{t >= 0} (g_x(t) + c_x * t),

a concave piecewise-linear function of c_x whose value is the minimum
of finitely many affine forms  g_x(t_i) + t_i * c_x  over the abscissa
candidates t_i in {0} union breakpoints(g_x).  The search may be
restricted to sections supported on the active support
S = Supp(D) union Supp(phi_g) plus one auxiliary compensation point:
at any point y outside S the edge is the constant g(eta0), so a
coefficient c_y < 0 forces m_y = -inf (the tail grows like c_y * t),
while c_y > 0 only eats into the degree-zero budget sum w(x) c_x = 0
without raising any m (m_y stays g(eta0), which already caps the
objective); hence moving all positive off-support mass to a single
auxiliary point loses nothing, and dropping negative off-support mass
is forced.  The resulting small linear program is solved by the exact
two-phase simplex of :mod:`greentree.simplex`.

The threshold route.  For each point the increasing concave map
psi_x(a) = m_x(a) has the exact generalized inverse

    a_x(tau) = min{a >= -ord_x(D) : psi_x(a) >= tau}
             = max(-ord_x(D), max_i (tau - g_x(t_i)) / t_i),

and the divisor cut out by sections of norm below e^{-tau} has
coefficient -a_x(tau) at x (the degree-zero budget is absorbed at an
auxiliary point, as above, which is possible exactly while
tau <= g(eta0)).  Its degree

    deg(D_{g,tau}) = - sum_x w(x) a_x(tau)

is a decreasing concave piecewise-linear function of tau that equals
deg(D) for very negative tau; the essential infimum is recovered as
sup{tau : deg(D_{g,tau}) > 0} (clipped at g(eta0)), and the chi-volume
and volume are exact integrals of the profile:

    vol_chi = 2 [ int_0^inf deg(D_{g,t}) dt
                  - int_{-inf}^0 (deg D - deg(D_{g,t})) dt ],
    vol     = 2 int_0^inf deg(D_{g,t}) dt.

Agreement of the two routes is a strong correctness signal and is part
of the acceptance suite; nothing in the threshold code calls the
simplex, and vice versa.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .curve import PointId, RDivisor, degree, is_principal
from .errors import InfeasibleError
from .green import MetrisedRDivisor, mu_inf_point, mu_inf_total
from .plf import NEG_INF, ExtScalar, RationalLike, frac
from .simplex import OPTIMAL, UNBOUNDED, solve_lp


def _edge_rows(g: MetrisedRDivisor, x: PointId) -> list[tuple[Fraction, Fraction]]:
    """Abscissa candidates (t_i, g_x(t_i)) of the edge function at x,
    t_i running over 0 and the breakpoints."""
    e = g.edge(x)
    base, mu = g.base_value, e.mu
    return [(t, base + mu * t + v) for t, v in e.phi.vertices]


def _require_model(g: MetrisedRDivisor, what: str) -> None:
    # The whole maximin/threshold reduction identifies principal shifts
    # with degree-zero slope vectors, which is the genus-0 model.
    g.curve.require_exact(what)


# ---------------------------------------------------------------------------
# Maximin route
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MaximinProgram:
    """The exact linear program behind lambda_ess and tilde_eval.

    Variables: one slope c_x per active-support point (plus an implicit
    auxiliary compensation point with weight 1).  Constraints:
    c_x >= -ord_x(D); weighted slopes sum to at most 0 (the auxiliary
    point absorbs the slack, nonnegatively); z <= g_x(t_i) + t_i c_x
    for every abscissa candidate; z <= g(eta0) for the constant edges.
    Objective: maximize z, optionally tilted by -t * c_{x0} to evaluate
    the envelope on the edge of x0 at parameter t.
    """

    g: MetrisedRDivisor
    tilt_point: Optional[PointId] = None
    tilt_parameter: Fraction = Fraction(0)

    @property
    def points(self) -> tuple[PointId, ...]:
        pts = list(self.g.support)
        if self.tilt_point is not None and self.tilt_point not in pts:
            pts.append(self.tilt_point)
        return tuple(pts)

    def solve(self) -> tuple[Fraction, dict[PointId, Fraction]]:
        """Optimal value and optimal slopes; raises when deg(D) < 0."""
        g = self.g
        _require_model(g, "the maximin program")
        d = g.deg()
        if d < 0:
            raise InfeasibleError("Gamma(D) empty: deg(D) < 0")
        pts = self.points
        base = g.base_value
        # Substitute y_x = c_x + ord_x(D) >= 0 and zp = g(eta0) - z >= 0;
        # the constant-edge cap becomes the variable bound zp >= 0.
        # Row  z <= g_x(t_i) + t_i c_x  becomes
        #      -t_i y_x - zp <= phi_x(t_i)        (t_i > 0 only; the
        # t_i = 0 row is zp >= 0, already a bound).
        n = len(pts)
        zp = n  # column index of zp; auxiliary compensation is a slack
        a_ub: list[list[Fraction]] = []
        b_ub: list[Fraction] = []
        for k, x in enumerate(pts):
            phi = g.edge(x).phi
            for t, v in phi.vertices[1:]:
                row = [Fraction(0)] * (n + 1)
                row[k] = -t
                row[zp] = Fraction(-1)
                a_ub.append(row)
                b_ub.append(v)
        # Degree budget: sum w(x) c_x <= 0, i.e. sum w(x) y_x <= deg(D).
        budget = [Fraction(g.curve.weight(x)) for x in pts] + [Fraction(0)]
        a_ub.append(budget)
        b_ub.append(d)

        cost = [Fraction(0)] * (n + 1)
        cost[zp] = Fraction(1)
        offset = base
        if self.tilt_point is not None:
            k = pts.index(self.tilt_point)
            t = self.tilt_parameter
            # maximize -t c_x + z = (base + t ord_x(D)) - (t y_x + zp)
            cost[k] = t
            offset = base + t * self.g.edge(self.tilt_point).mu

        res = solve_lp(cost, a_ub, b_ub)
        if res.status == UNBOUNDED:
            raise AssertionError("maximin program cannot be unbounded")
        if res.status != OPTIMAL:
            raise InfeasibleError("maximin program infeasible")
        slopes = {
            x: res.x[k] - self.g.edge(x).mu for k, x in enumerate(pts)
        }
        return offset - res.value, slopes


def lambda_ess_witness(g: MetrisedRDivisor) -> tuple[Fraction, dict[PointId, Fraction]]:
    """Essential infimum and an optimal principal-shift slope vector."""
    return MaximinProgram(g).solve()


def lambda_ess(g: MetrisedRDivisor) -> Fraction:
    return lambda_ess_witness(g)[0]


def tilde_eval(g: MetrisedRDivisor, x: PointId, t: RationalLike) -> Fraction:
    """Value of the plurisubharmonic envelope at tree parameter t on the
    edge of x, via the tilted maximin program."""
    t = frac(t)
    if t < 0:
        raise ValueError("tree parameter must be nonnegative")
    g.curve.weight(x)
    value, _ = MaximinProgram(g, tilt_point=x, tilt_parameter=t).solve()
    return value


# ---------------------------------------------------------------------------
# Threshold route
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThresholdFunction:
    """Per-edge section-slope threshold data.

    ``psi(a)`` is the best uniform bound the edge of x can certify for
    a section with slope a there; ``inverse(tau)`` is the least
    feasible slope certifying the bound tau.
    """

    point: PointId
    mu: Fraction
    rows: tuple[tuple[Fraction, Fraction], ...]  # (t_i, g_x(t_i)), t_0 = 0

    def psi(self, a: RationalLike) -> ExtScalar:
        a = frac(a)
        if a < -self.mu:
            return NEG_INF
        return min(v + t * a for t, v in self.rows)

    @property
    def root_value(self) -> Fraction:
        return self.rows[0][1]

    def inverse(self, tau: RationalLike) -> Fraction:
        """a_x(tau) = min{a >= -mu : psi(a) >= tau}; needs tau <= g(eta0)."""
        tau = frac(tau)
        if tau > self.root_value:
            raise InfeasibleError(f"threshold {tau} exceeds the root value {self.root_value}")
        best = -self.mu
        for t, v in self.rows[1:]:
            best = max(best, (tau - v) / t)
        return best

def threshold_function(g: MetrisedRDivisor, x: PointId) -> ThresholdFunction:
    return ThresholdFunction(x, g.edge(x).mu, tuple(_edge_rows(g, x)))


@dataclass(frozen=True)
class _InverseEnvelope:
    """Piecewise-linear description of tau -> a_x(tau): the constant
    floor -ord_x(D) left of the first kink, then the upper envelope of
    the affine constraints (tau - g_x(t_i)) / t_i.

    ``slopes[j]`` rules to the right of ``taus[j]``; the envelope is
    convex and increasing, so slopes ascend.
    """

    floor: Fraction
    taus: tuple[Fraction, ...]
    vals: tuple[Fraction, ...]
    slopes: tuple[Fraction, ...]

    def value(self, tau: Fraction) -> Fraction:
        if not self.taus or tau <= self.taus[0]:
            return self.floor
        idx = bisect_right(self.taus, tau) - 1
        return self.vals[idx] + self.slopes[idx] * (tau - self.taus[idx])


def _inverse_envelope(th: ThresholdFunction) -> _InverseEnvelope:
    floor = -th.mu
    best: dict[Fraction, Fraction] = {}
    for t, v in th.rows[1:]:
        m = Fraction(1) / t
        q = -v / t
        if m not in best or q > best[m]:
            best[m] = q
    if not best:
        return _InverseEnvelope(floor, (), (), ())
    lines = sorted(best.items())
    # Upper envelope of the lines by the ascending-slope hull walk.
    stack: list[tuple[Fraction, Fraction]] = []
    switches: list[Fraction] = []
    for m, q in lines:
        while stack:
            m0, q0 = stack[-1]
            x = (q0 - q) / (m - m0)
            if switches and x <= switches[-1]:
                stack.pop()
                switches.pop()
            else:
                stack.append((m, q))
                switches.append(x)
                break
        else:
            stack.append((m, q))
    # The line envelope increases from -inf, so it crosses the constant
    # floor exactly once; locate the piece containing the crossing.
    start = None
    for i, (m, q) in enumerate(stack):
        x = (floor - q) / m
        lo = switches[i - 1] if i > 0 else None
        hi = switches[i] if i < len(switches) else None
        if (lo is None or x >= lo) and (hi is None or x <= hi):
            start = (i, x)
            break
    assert start is not None, "increasing envelope must cross its floor"
    i0, tau_f = start
    taus = [tau_f]
    vals = [floor]
    slopes = [stack[i0][0]]
    for j in range(i0, len(switches)):
        x = switches[j]
        if x > taus[-1]:
            vals.append(vals[-1] + slopes[-1] * (x - taus[-1]))
            taus.append(x)
            slopes.append(stack[j + 1][0])
        else:
            slopes[-1] = stack[j + 1][0]
    return _InverseEnvelope(floor, tuple(taus), tuple(vals), tuple(slopes))


@dataclass(frozen=True)
class DistributionProfile:
    """Exact description of tau -> deg(D_{g,tau}).

    ``vertices`` are (tau, value) pairs of the uncapped threshold
    formula, ascending in tau and ending at ``lambda_threshold``; the
    profile equals ``degree`` left of the first vertex, interpolates
    affinely between vertices, and is 0 at and beyond the threshold.
    """

    degree: Fraction
    lambda_threshold: Fraction
    vertices: tuple[tuple[Fraction, Fraction], ...]

    def value(self, tau: RationalLike) -> Fraction:
        tau = frac(tau)
        if tau >= self.lambda_threshold:
            return Fraction(0)
        if tau <= self.vertices[0][0]:
            return self.degree
        for (a, va), (b, vb) in zip(self.vertices, self.vertices[1:]):
            if tau <= b:
                return va + (vb - va) * (tau - a) / (b - a)
        raise AssertionError("vertex list does not reach the threshold")

    def pieces(self) -> list[tuple[Fraction, Fraction, Fraction, Fraction]]:
        """Affine pieces (a, b, value_a, value_b) between consecutive
        vertices; the constant tails are implicit."""
        return [
            (a, b, va, vb)
            for (a, va), (b, vb) in zip(self.vertices, self.vertices[1:])
        ]

    # -- exact integrals -------------------------------------------------

    def integral_positive(self) -> Fraction:
        """int_0^inf of the capped profile."""
        total = Fraction(0)
        first = self.vertices[0][0]
        if first > 0:
            total += self.degree * first
        for a, b, va, vb in self.pieces():
            lo = max(a, Fraction(0))
            if lo >= b:
                continue
            vlo = va + (vb - va) * (lo - a) / (b - a)
            total += (vlo + vb) * (b - lo) / 2
        return total

    def deficit_negative(self) -> Fraction:
        """int_{-inf}^0 of (degree - capped profile)."""
        total = Fraction(0)
        lam = self.lambda_threshold
        if lam < 0:
            total += self.degree * (0 - lam)
        for a, b, va, vb in self.pieces():
            hi = min(b, Fraction(0))
            if hi <= a:
                continue
            vhi = va + (vb - va) * (hi - a) / (b - a)
            total += (self.degree - va + self.degree - vhi) * (hi - a) / 2
        return total

    # -- quantile ---------------------------------------------------------

    def quantile_vertices(self) -> tuple[tuple[Fraction, Fraction], ...]:
        """The transform u -> sup{tau : profile(tau) > u} on [0, degree],
        as piecewise-linear vertices (u, tau) with ascending u."""
        out: list[tuple[Fraction, Fraction]] = [(Fraction(0), self.lambda_threshold)]
        jump = self.vertices[-1][1]  # profile value just below the threshold
        if jump > 0:
            out.append((jump, self.lambda_threshold))
        for (a, va), (b, vb) in reversed(list(zip(self.vertices, self.vertices[1:]))):
            if va == vb:
                continue  # flat stretch: the quantile jumps, no u-mass
            if out[-1][0] != vb:
                out.append((vb, b))
            out.append((va, a))
        if out[-1][0] != self.degree:
            out.append((self.degree, self.vertices[0][0]))
        return tuple(out)

    def quantile(self, u: RationalLike) -> Fraction:
        u = frac(u)
        if not 0 <= u <= self.degree:
            raise ValueError("quantile argument outside [0, deg D]")
        verts = self.quantile_vertices()
        for (ua, ta), (ub, tb) in zip(verts, verts[1:]):
            if u <= ub:
                if ua == ub:
                    return tb
                return ta + (tb - ta) * (u - ua) / (ub - ua)
        return verts[-1][1]

    def quantile_integral(self) -> Fraction:
        """int_0^{deg D} of the quantile; equals vol_chi / 2."""
        verts = self.quantile_vertices()
        total = Fraction(0)
        for (ua, ta), (ub, tb) in zip(verts, verts[1:]):
            total += (ta + tb) * (ub - ua) / 2
        return total


def distribution(g: MetrisedRDivisor) -> DistributionProfile:
    """Assemble the exact degree profile of (D, g); needs deg(D) > 0."""
    _require_model(g, "the threshold profile")
    d = g.deg()
    if d <= 0:
        raise InfeasibleError("distribution profile needs deg(D) > 0")
    envelopes = [
        (g.curve.weight(x), _inverse_envelope(threshold_function(g, x)))
        for x in g.support
    ]

    def formula(tau: Fraction) -> Fraction:
        return -sum((w * env.value(tau) for w, env in envelopes), Fraction(0))

    base = g.base_value
    kinks = sorted({k for _, env in envelopes for k in env.taus if k <= base})
    lam = _zero_crossing(formula, kinks, base, d)
    vertices = [(k, formula(k)) for k in kinks if k < lam]
    vertices.append((lam, formula(lam)))
    if len(vertices) == 1 or vertices[0][1] != d:
        vertices.insert(0, (min(lam, *[k for k in kinks] or [lam]) - 1, d))
    # Drop collinear middle vertices for a canonical description.
    cleaned = [vertices[0]]
    for v in vertices[1:]:
        while len(cleaned) >= 2 and _collinear(cleaned[-2], cleaned[-1], v):
            cleaned.pop()
        cleaned.append(v)
    return DistributionProfile(d, lam, tuple(cleaned))


def _collinear(p, q, r) -> bool:
    return (q[1] - p[1]) * (r[0] - q[0]) == (r[1] - q[1]) * (q[0] - p[0])


def _zero_crossing(formula, kinks: list[Fraction], base: Fraction, deg: Fraction) -> Fraction:
    """min(base, first zero of the decreasing concave formula).

    Left of every kink the formula is the constant deg(D) > 0; if it is
    still positive at the last kink, the final ray is followed (its
    slope is read off from two sample points).
    """
    prev_tau: Fraction | None = None
    prev_val = deg
    for k in kinks:
        val = formula(k)
        if val <= 0:
            assert prev_val > 0
            if prev_tau is None:
                # cannot happen: formula == deg > 0 before the first kink
                raise AssertionError("profile starts nonpositive")
            tau = prev_tau + (k - prev_tau) * prev_val / (prev_val - val)
            return min(tau, base)
        prev_tau, prev_val = k, val
    if formula(base) > 0:
        return base
    # Crossing on the last ray, inside (last kink, base].
    a = prev_tau if prev_tau is not None else base - 1
    va = formula(a)
    vb = formula(base)
    assert va > 0 >= vb
    return a + (base - a) * va / (va - vb)


def lambda_ess_threshold(g: MetrisedRDivisor) -> Fraction:
    """Essential infimum via threshold inversion (no simplex involved);
    dual route to :func:`lambda_ess`, exact agreement expected."""
    _require_model(g, "threshold inversion")
    if g.deg() <= 0:
        if g.deg() < 0:
            raise InfeasibleError("Gamma(D) empty: deg(D) < 0")
        # Degree zero: the unique feasible slope vector is c = -ord(D).
        values = [g.base_value]
        for x in g.support:
            th = threshold_function(g, x)
            values.append(th.psi(-th.mu))
        return min(values)
    return distribution(g).lambda_threshold


def deg_dgt(g: MetrisedRDivisor, tau: RationalLike) -> Fraction:
    """deg(D_{g,tau}); the full profile is assembled and read once.

    Follows the convention that the divisor is zero at and beyond the
    essential infimum, so the value at tau = lambda_ess is 0 even when
    the profile jumps there.
    """
    return distribution(g).value(frac(tau))


def vol_chi(g: MetrisedRDivisor) -> Fraction:
    """chi-volume, an exact rational.

    Zero whenever deg(D) <= 0; otherwise twice the expectation of the
    degree-profile law, split into its positive and negative parts.
    """
    _require_model(g, "the chi-volume")
    if g.deg() <= 0:
        return Fraction(0)
    profile = distribution(g)
    return 2 * (profile.integral_positive() - profile.deficit_negative())


def vol(g: MetrisedRDivisor) -> Fraction:
    """Volume: twice the positive-part integral of the degree profile.

    The factor matches the expectation identity for the positive part
    of the profile law (and the Hilbert-Samuel positive-degree ratios);
    zero when deg(D) <= 0 since dim H0(nD) is then O(1).
    """
    _require_model(g, "the volume")
    if g.deg() <= 0:
        return Fraction(0)
    return 2 * distribution(g).integral_positive()


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Classification:
    big: bool
    pseudo_effective: bool
    effective_up_to_rlin: bool
    lambda_ess: Optional[Fraction]
    mu_inf: ExtScalar
    witness: Optional[dict[PointId, Fraction]] = None

    def __post_init__(self):
        # big => effective => pseudo-effective, always.
        if self.big:
            assert self.effective_up_to_rlin
        if self.effective_up_to_rlin:
            assert self.pseudo_effective


def classify(g: MetrisedRDivisor) -> Classification:
    """Positivity classification of (D, g).

    big:      deg(D) > 0 and lambda_ess > 0;
    pseudo-effective:   mu_inf(g) >= 0;
    effective up to R-linear equivalence:  mu_inf,x >= 0 at all but
    finitely many points (on this model: g(eta0) >= 0 and every stored
    edge has a finite infimum slope), and either mu_inf(g) > 0 or the
    divisor of infimum slopes is principal, which at genus 0 means its
    degree vanishes.
    """
    _require_model(g, "the positivity classification")
    mu = mu_inf_total(g)
    d = g.deg()
    lam: Optional[Fraction] = None
    witness = None
    if d >= 0:
        lam, witness = lambda_ess_witness(g)
    big = d > 0 and lam is not None and lam > 0
    pe = mu != NEG_INF and mu >= 0
    eff = False
    if g.base_value >= 0:
        slopes = {x: mu_inf_point(g, x) for x in g.support}
        if all(s != NEG_INF for s in slopes.values()):
            if mu > 0:
                eff = True
            else:
                slope_divisor = RDivisor.of(slopes)
                eff = is_principal(slope_divisor, g.curve)
    return Classification(big, pe, eff, lam, mu, witness)
