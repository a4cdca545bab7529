"""Metrised R-divisors: Green functions on the unit-depth tree.

The analytification of a curve over a trivially valued field is a tree
with one edge [0, +inf] per closed point, all glued at a root.  A Green
function g on it restricts to each edge as an asymptotically linear
function; the pair (D, g) with ord_x(D) the asymptotic slope of g along
the edge of x is a metrised R-divisor.

Here such a pair is stored in canonically decomposed form:

* ``base_value``: the root value g(eta_0);
* per nontrivial edge x, the asymptotic slope ``mu`` (= ord_x(D)) and
  the bounded part ``phi``, a PLF with phi(0) = 0 and final slope 0,
  so the full edge function is  base_value + mu*t + phi(t).

All but finitely many edges are constant equal to base_value; those are
not stored and every operation treats them symbolically (there are
infinitely many, but they are interchangeable).

The module provides the vector-space structure, evaluation, the
symmetric bilinear pairing

    <g1, g2> = g1(eta0) deg(D2) + g2(eta0) deg(D1)
               - sum_x w(x) * energy(phi_1x, phi_2x),

section sup-norms on the logarithmic scale, the per-edge infimum slopes
mu_inf whose sign governs pseudo-effectivity, heights, and the convex /
plurisubharmonic structure (a Green function is plurisubharmonic iff it
is convex on every edge and mu_inf(g - g(eta0)) >= 0; its envelope is
then the per-edge convex envelope).

Norms live on the log scale throughout (exact rationals); exponentials
are never taken.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .curve import CurveModel, PointId, RDivisor, degree, is_principal
from .errors import InfeasibleError
from .plf import (
    INF,
    NEG_INF,
    PLF,
    ExtScalar,
    RationalLike,
    ZERO,
    energy,
    frac,
    inf_affine_shift,
    inf_ratio,
    lin_comb,
    lower_convex_envelope,
)


@dataclass(frozen=True)
class Edge:
    """One nontrivial edge: asymptotic slope plus normalised bounded part."""

    mu: Fraction
    phi: PLF

    def __post_init__(self):
        object.__setattr__(self, "mu", frac(self.mu))

    @property
    def is_trivial(self) -> bool:
        return self.mu == 0 and self.phi == ZERO


@dataclass(frozen=True)
class MetrisedRDivisor:
    curve: CurveModel
    base_value: Fraction
    edges: tuple[tuple[PointId, Edge], ...]

    def __post_init__(self):
        object.__setattr__(self, "base_value", frac(self.base_value))
        kept = []
        for x, e in sorted(dict(self.edges).items()):
            if e.phi.final_slope != 0:
                raise InfeasibleError(
                    f"edge {x!r}: bounded part must have final slope 0, got {e.phi.final_slope}"
                )
            if e.phi.value_at_zero != 0:
                raise InfeasibleError(
                    f"edge {x!r}: bounded part must vanish at the root, got phi(0) = {e.phi.value_at_zero}"
                )
            if e.is_trivial:
                continue
            kept.append((x, e))
        object.__setattr__(self, "edges", tuple(kept))

    # -- structure ------------------------------------------------------

    @property
    def support(self) -> tuple[PointId, ...]:
        """Points with a nontrivial edge: Supp(D) united with Supp(phi_g)."""
        return tuple(x for x, _ in self.edges)

    def edge(self, x: PointId) -> Edge:
        for p, e in self.edges:
            if p == x:
                return e
        return Edge(Fraction(0), ZERO)

    def divisor(self) -> RDivisor:
        return RDivisor.of({x: e.mu for x, e in self.edges})

    def deg(self) -> Fraction:
        return degree(self.divisor(), self.curve)

    def edge_function(self, x: PointId) -> PLF:
        """The full restriction of g to the edge of x, as a PLF."""
        e = self.edge(x)
        return lin_comb(1, e.phi, 1, PLF.linear(self.base_value, e.mu))

    def bounded_part(self, x: PointId) -> PLF:
        """phi_g on the edge of x (includes the root value)."""
        return self.edge(x).phi.shift(self.base_value)

    # -- vector space -----------------------------------------------------

    def shift(self, c: RationalLike) -> "MetrisedRDivisor":
        """g + c: same divisor, root value translated."""
        return MetrisedRDivisor(self.curve, self.base_value + frac(c), self.edges)

    def __add__(self, other: "MetrisedRDivisor") -> "MetrisedRDivisor":
        return lin_comb_metrised(1, self, 1, other)

    def __sub__(self, other: "MetrisedRDivisor") -> "MetrisedRDivisor":
        return lin_comb_metrised(1, self, -1, other)

    def scale(self, a: RationalLike) -> "MetrisedRDivisor":
        a = frac(a)
        return MetrisedRDivisor(
            self.curve,
            a * self.base_value,
            tuple((x, Edge(a * e.mu, e.phi.scale(a))) for x, e in self.edges),
        )

    def __mul__(self, a: RationalLike) -> "MetrisedRDivisor":
        return self.scale(a)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return (
            f"MetrisedRDivisor(base={self.base_value}, "
            + ", ".join(f"{x}: mu={e.mu}" for x, e in self.edges)
            + ")"
        )


def make_metrised(
    curve: CurveModel,
    base_value: RationalLike,
    edges: Mapping[PointId, Union[Edge, tuple[RationalLike, PLF]]] | None = None,
) -> MetrisedRDivisor:
    """Validated constructor; rejects bounded parts that fail the
    normalisation phi(0) = 0, final slope 0, or points outside the model."""
    built: list[tuple[PointId, Edge]] = []
    for x, spec in (edges or {}).items():
        curve.weight(x)
        e = spec if isinstance(spec, Edge) else Edge(frac(spec[0]), spec[1])
        built.append((x, e))
    return MetrisedRDivisor(curve, frac(base_value), tuple(built))


def lin_comb_metrised(
    a: RationalLike, g1: MetrisedRDivisor, b: RationalLike, g2: MetrisedRDivisor
) -> MetrisedRDivisor:
    if g1.curve != g2.curve:
        raise InfeasibleError("metrised divisors live on different curve models")
    a, b = frac(a), frac(b)
    points = sorted(set(g1.support) | set(g2.support))
    edges = []
    for x in points:
        e1, e2 = g1.edge(x), g2.edge(x)
        edges.append((x, Edge(a * e1.mu + b * e2.mu, lin_comb(a, e1.phi, b, e2.phi))))
    return MetrisedRDivisor(g1.curve, a * g1.base_value + b * g2.base_value, tuple(edges))


@dataclass(frozen=True)
class SectionDivisor:
    """A section of H0(D), represented by its principal divisor.

    On the genus-0 model a rational "function" (or R/Q-power product of
    such) is determined up to scalars by its degree-zero divisor, and
    every degree-zero divisor arises this way; the norm of a section
    depends on the divisor only.
    """

    div: RDivisor
    curve: CurveModel

    def __post_init__(self):
        if not is_principal(self.div, self.curve):
            raise InfeasibleError(
                f"section divisor must be principal (degree 0); got degree "
                f"{degree(self.div, self.curve)}"
            )

    def ord(self, x: PointId) -> Fraction:
        return self.div.ord(x)

    def feasible_for(self, d: RDivisor) -> bool:
        """Whether (s) + D >= 0 componentwise."""
        return (self.div + d).is_effective


def principal_metrised(section: SectionDivisor) -> MetrisedRDivisor:
    """The canonically metrised principal divisor of a section: root
    value 0, per-edge slope ord_x(s), no bounded parts."""
    edges = tuple((x, Edge(c, ZERO)) for x, c in section.div.coeffs)
    return MetrisedRDivisor(section.curve, Fraction(0), edges)


def canonical_metrised(curve: CurveModel, divisor: RDivisor) -> MetrisedRDivisor:
    """The canonical Green function of D: linear of slope ord_x(D) on
    each edge of the support, zero elsewhere."""
    edges = tuple((x, Edge(c, ZERO)) for x, c in divisor.coeffs)
    return MetrisedRDivisor(curve, Fraction(0), edges)


def green_eval(g: MetrisedRDivisor, x: PointId, t: ExtScalar) -> ExtScalar:
    """g at the point of the edge of x with tree parameter t."""
    return g.edge_function(x)(t)


def pairing(g1: MetrisedRDivisor, g2: MetrisedRDivisor) -> Fraction:
    """Symmetric bilinear intersection pairing of two metrised divisors.

    Bounded parts are piecewise linear, hence always square-integrable;
    no pairability hypothesis is needed here.
    """
    if g1.curve != g2.curve:
        raise InfeasibleError("metrised divisors live on different curve models")
    curve = g1.curve
    total = g2.base_value * g1.deg() + g1.base_value * g2.deg()
    for x in set(g1.support) & set(g2.support):
        total -= curve.weight(x) * energy(g1.edge(x).phi, g2.edge(x).phi)
    return total


def mu_inf_point(g: MetrisedRDivisor, x: PointId) -> ExtScalar:
    """inf over the open edge of x of g(xi)/t(xi).

    Off the stored support the edge is constant base_value, so the
    ratio tends to 0 from above when base_value >= 0 and to -inf
    otherwise.
    """
    if x in g.support:
        return inf_ratio(g.edge_function(x))
    return Fraction(0) if g.base_value >= 0 else NEG_INF


def mu_inf_total(g: MetrisedRDivisor) -> ExtScalar:
    """Weighted global infimum slope sum_x w(x) mu_inf_x(g).

    If the root value is negative, all infinitely many constant edges
    contribute -inf; otherwise they contribute 0 and the sum runs over
    the stored support.
    """
    if g.base_value < 0:
        return NEG_INF
    total = Fraction(0)
    for x, _ in g.edges:
        m = mu_inf_point(g, x)
        if m == NEG_INF:
            return NEG_INF
        total += g.curve.weight(x) * m
    return total


def section_log_norm(g: MetrisedRDivisor, s: SectionDivisor) -> Fraction:
    """-ln ||s||_g = inf over the tree of (g_(s) + g), an exact rational.

    Requires s feasible for D, i.e. (s) + D >= 0; then every edge
    function of g_(s) + g has nonnegative final slope and the infimum
    is finite.  Constant edges away from both supports contribute the
    root value.
    """
    if g.curve != s.curve:
        raise InfeasibleError("section and divisor live on different curve models")
    if not s.feasible_for(g.divisor()):
        raise InfeasibleError("section is not feasible: (s) + D has a negative coefficient")
    best: ExtScalar = g.base_value
    for x in sorted(set(g.support) | set(s.div.support)):
        value = inf_affine_shift(g.edge_function(x), s.ord(x))
        assert value != NEG_INF
        best = min(best, value)
    return best


def convex_envelope_green(g: MetrisedRDivisor) -> MetrisedRDivisor:
    """Per-edge lower convex envelope, renormalised to (base, mu, phi).

    The envelope preserves the value at the root and each asymptotic
    slope, so the result is again a Green function of the same divisor.
    """
    edges = []
    for x, e in g.edges:
        env = lower_convex_envelope(g.edge_function(x))
        phi = lin_comb(1, env, -1, PLF.linear(g.base_value, e.mu))
        edges.append((x, Edge(e.mu, phi)))
    return MetrisedRDivisor(g.curve, g.base_value, tuple(edges))


def is_convex_green(g: MetrisedRDivisor) -> bool:
    return all(e.phi.is_convex for _, e in g.edges)


def is_psh(g: MetrisedRDivisor) -> bool:
    """Plurisubharmonicity: convex on every edge and
    mu_inf(g - g(eta0)) >= 0.  Needs a nonempty section space, which on
    this model means deg(D) >= 0."""
    if g.deg() < 0:
        raise InfeasibleError("is_psh needs deg(D) >= 0 (no sections otherwise)")
    return is_convex_green(g) and mu_inf_total(g.shift(-g.base_value)) >= 0


def psh_envelope(g: MetrisedRDivisor) -> MetrisedRDivisor:
    """The plurisubharmonic envelope, valid when mu_inf(g - g(eta0)) >= 0.

    Under that hypothesis the envelope is the per-edge convex envelope
    and keeps the root value.  Outside it the envelope drops at the
    root and is not an envelope computation on edges any more; use
    positivity.tilde_eval for pointwise values in that regime.
    """
    if mu_inf_total(g.shift(-g.base_value)) < 0:
        raise InfeasibleError(
            "psh_envelope needs mu_inf(g - g(eta0)) >= 0; "
            "use positivity.tilde_eval for the general envelope"
        )
    return convex_envelope_green(g)


def height(g: MetrisedRDivisor, x: PointId) -> Fraction:
    """Height of a closed point: the bounded part evaluated at the leaf."""
    return g.bounded_part(x)(INF)


def mu_ess(g: MetrisedRDivisor) -> Fraction:
    """Essential infimum of the height function; equals the root value
    because heights accumulate at g(eta0) along the constant edges."""
    return g.base_value
