"""Exact piecewise-linear functions on the half line.

This module is the computational core of the library.  A ``PLF`` is a
continuous piecewise-linear function f on [0, +inf) with rational data:
a value at 0, finitely many breakpoints 0 < t_1 < ... < t_m, one slope
per segment (t_{i-1}, t_i), and a final slope on (t_m, +inf).  When the
final slope vanishes, f extends continuously to [0, +inf] and plays the
role of a "bounded part" of an edge function; a nonzero final slope is
the asymptotic growth rate of the edge.

Everything here is exact: scalars are ``fractions.Fraction``, the only
admissible non-rational values are the two infinities (plain floats
``inf``/``-inf``, used as sentinels for limits, never as operands of
further arithmetic).

The available operations are the ones the rest of the library needs:

* evaluation, linear combinations (a vector-space structure);
* the Dirichlet-type energy  integral(f'(t) g'(t) dt)  over (0, +inf),
  finite whenever at most one of the two final slopes is nonzero;
* the lower convex envelope (largest convex minorant with the same
  value at 0 and the same final slope);
* the increasing, non-positive transform
      f*(lam) = inf_{x in [0, +inf]} (x*lam + f(x) - f(0)),
  defined for convex f bounded at infinity, returned again as a PLF in
  lam.  It satisfies  integral(f'(x)^2 dx) = -2 * integral(f*) ;
* one-shot infima  inf_t (f(t) + c*t)  and  inf_{t>0} f(t)/t ;
* the purely atomic derivative measure df' of a convex PLF and the
  pairing  integral(phi d(psi'))  against it.

A PLF attains extrema of all these functionals at breakpoints, at 0, or
in the limit t -> +inf, because every functional involved is monotone
along each open segment; candidate enumeration below is therefore exact
and complete.

Normal form: breakpoints strictly increasing, adjacent slopes distinct
(collinear segments merged).  Construction always normalises, so
structural equality of two PLFs is equality of functions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

from .errors import InfeasibleError

INF = float("inf")
NEG_INF = float("-inf")

#: A rational number, or one of the two infinities.
ExtScalar = Union[Fraction, float]

RationalLike = Union[Fraction, int, str]


def frac(x: RationalLike) -> Fraction:
    """Coerce ints, 'p/q' strings and Fractions to an exact Fraction."""
    if type(x) is Fraction:
        return x
    if isinstance(x, float):
        raise TypeError(f"refusing to coerce float {x!r}; pass exact rational data")
    return Fraction(x)


@dataclass(frozen=True)
class PLF:
    """Continuous piecewise-linear function on [0, +inf), rational data.

    ``slopes[i]`` is the slope on (breakpoints[i-1], breakpoints[i])
    with the convention breakpoints[-1] = 0; ``final_slope`` rules after
    the last breakpoint.  Instances are immutable and always in normal
    form.
    """

    value_at_zero: Fraction
    breakpoints: tuple[Fraction, ...]
    slopes: tuple[Fraction, ...]
    final_slope: Fraction

    def __post_init__(self):
        v0 = frac(self.value_at_zero)
        bps = tuple(frac(t) for t in self.breakpoints)
        slopes = tuple(frac(s) for s in self.slopes)
        final = frac(self.final_slope)
        if len(bps) != len(slopes):
            raise ValueError("need exactly one slope per breakpoint")
        if any(t <= 0 for t in bps):
            raise ValueError("breakpoints must be positive")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        # Merge collinear neighbours so equality is structural.
        nbps: list[Fraction] = []
        nslopes: list[Fraction] = []
        for t, s in zip(bps, slopes):
            if nslopes and nslopes[-1] == s:
                nbps[-1] = t
                continue
            nbps.append(t)
            nslopes.append(s)
        if nslopes and nslopes[-1] == final:
            nbps.pop()
            nslopes.pop()
        object.__setattr__(self, "value_at_zero", v0)
        object.__setattr__(self, "breakpoints", tuple(nbps))
        object.__setattr__(self, "slopes", tuple(nslopes))
        object.__setattr__(self, "final_slope", final)

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, c: RationalLike) -> "PLF":
        return cls(frac(c), (), (), Fraction(0))

    @classmethod
    def linear(cls, value_at_zero: RationalLike, slope: RationalLike) -> "PLF":
        return cls(frac(value_at_zero), (), (), frac(slope))

    @classmethod
    def from_vertices(
        cls,
        vertices: Sequence[tuple[RationalLike, RationalLike]],
        final_slope: RationalLike = 0,
    ) -> "PLF":
        """Build from [(t, f(t)), ...]; the first vertex must sit at t = 0."""
        verts = [(frac(t), frac(v)) for t, v in vertices]
        if not verts or verts[0][0] != 0:
            raise ValueError("vertex list must start at t = 0")
        bps, slopes = [], []
        for (a, fa), (b, fb) in zip(verts, verts[1:]):
            if b <= a:
                raise ValueError("vertex abscissae must be strictly increasing")
            bps.append(b)
            slopes.append((fb - fa) / (b - a))
        return cls(verts[0][1], tuple(bps), tuple(slopes), frac(final_slope))

    # -- basic queries -------------------------------------------------

    @cached_property
    def vertices(self) -> tuple[tuple[Fraction, Fraction], ...]:
        """((0, f(0)), (t_1, f(t_1)), ..., (t_m, f(t_m)))."""
        out = [(Fraction(0), self.value_at_zero)]
        for t, s in zip(self.breakpoints, self.slopes):
            prev_t, prev_v = out[-1]
            out.append((t, prev_v + s * (t - prev_t)))
        return tuple(out)

    @property
    def last_value(self) -> Fraction:
        """Value at the last breakpoint (at 0 when there is none)."""
        return self.vertices[-1][1]

    def __call__(self, t: ExtScalar) -> ExtScalar:
        if t == INF:
            if self.final_slope > 0:
                return INF
            if self.final_slope < 0:
                return NEG_INF
            return self.last_value
        t = frac(t)
        if t < 0:
            raise ValueError(f"PLF defined on [0, +inf); got t = {t}")
        value = self.value_at_zero
        prev = Fraction(0)
        for b, s in zip(self.breakpoints, self.slopes):
            if t <= b:
                return value + s * (t - prev)
            value += s * (b - prev)
            prev = b
        return value + self.final_slope * (t - prev)

    def slope_between(self, a: Fraction, b: Fraction) -> Fraction:
        """Slope on (a, b); the interval must not straddle a breakpoint."""
        mid = (a + b) / 2
        for t, s in zip(self.breakpoints, self.slopes):
            if mid < t:
                return s
        return self.final_slope

    @property
    def is_convex(self) -> bool:
        chain = self.slopes + (self.final_slope,)
        return all(a <= b for a, b in zip(chain, chain[1:]))

    @property
    def is_bounded(self) -> bool:
        return self.final_slope == 0

    # -- vector-space structure ----------------------------------------

    def __add__(self, other: "PLF") -> "PLF":
        return lin_comb(1, self, 1, other)

    def __sub__(self, other: "PLF") -> "PLF":
        return lin_comb(1, self, -1, other)

    def __neg__(self) -> "PLF":
        return self.scale(-1)

    def scale(self, a: RationalLike) -> "PLF":
        a = frac(a)
        return PLF(
            a * self.value_at_zero,
            self.breakpoints,
            tuple(a * s for s in self.slopes),
            a * self.final_slope,
        )

    def __mul__(self, a: RationalLike) -> "PLF":
        return self.scale(a)

    __rmul__ = __mul__

    def shift(self, c: RationalLike) -> "PLF":
        """Pointwise f + c."""
        c = frac(c)
        return PLF(self.value_at_zero + c, self.breakpoints, self.slopes, self.final_slope)

    def __repr__(self) -> str:
        pieces = ", ".join(f"{t}:{s}" for t, s in zip(self.breakpoints, self.slopes))
        return f"PLF(v0={self.value_at_zero}, [{pieces}], final={self.final_slope})"


ZERO = PLF.constant(0)


def lin_comb(a: RationalLike, f: PLF, b: RationalLike, g: PLF) -> PLF:
    """The PLF a*f + b*g, computed on the merged breakpoint grid."""
    a, b = frac(a), frac(b)
    grid = sorted(set(f.breakpoints) | set(g.breakpoints))
    slopes = []
    prev = Fraction(0)
    for t in grid:
        slopes.append(a * f.slope_between(prev, t) + b * g.slope_between(prev, t))
        prev = t
    return PLF(
        a * f.value_at_zero + b * g.value_at_zero,
        tuple(grid),
        tuple(slopes),
        a * f.final_slope + b * g.final_slope,
    )


def energy(f: PLF, g: PLF) -> Fraction:
    """integral over (0, +inf) of f'(t) g'(t) dt, exactly.

    Requires f.final_slope * g.final_slope == 0, otherwise the tail
    integrand is a nonzero constant and the integral diverges.
    """
    if f.final_slope * g.final_slope != 0:
        raise InfeasibleError(
            "energy integral diverges: both final slopes are nonzero "
            f"({f.final_slope} and {g.final_slope})"
        )
    total = Fraction(0)
    prev = Fraction(0)
    for t in sorted(set(f.breakpoints) | set(g.breakpoints)):
        total += f.slope_between(prev, t) * g.slope_between(prev, t) * (t - prev)
        prev = t
    return total


def lower_convex_envelope(f: PLF) -> PLF:
    """Largest convex function below f on [0, +inf).

    Computed as the lower convex hull of the graph vertices together
    with the asymptotic ray of slope f.final_slope.  The result keeps
    f's value at 0 and its final slope.
    """
    hull: list[tuple[Fraction, Fraction]] = []
    for p in f.vertices:
        while len(hull) >= 2 and _slope(hull[-2], hull[-1]) >= _slope(hull[-1], p):
            hull.pop()
        hull.append(p)
    # The final ray acts as a vertex at infinity with direction
    # (1, final_slope): pop trailing vertices that would bend above it.
    while len(hull) >= 2 and _slope(hull[-2], hull[-1]) >= f.final_slope:
        hull.pop()
    bps = tuple(t for t, _ in hull[1:])
    slopes = tuple(_slope(p, q) for p, q in zip(hull, hull[1:]))
    return PLF(hull[0][1], bps, slopes, f.final_slope)


def _slope(p: tuple[Fraction, Fraction], q: tuple[Fraction, Fraction]) -> Fraction:
    return (q[1] - p[1]) / (q[0] - p[0])


def legendre_star(f: PLF) -> PLF:
    """The transform lam -> inf_{x in [0, +inf]} (x*lam + f(x) - f(0)).

    Defined for convex f with final_slope 0 (continuous on [0, +inf]).
    The result is an increasing, non-positive PLF in lam that equals
    f(+inf) - f(0) at lam = 0 and vanishes for lam >= -f'(0+).
    """
    if not f.is_convex:
        raise InfeasibleError("legendre_star requires a convex input")
    if f.final_slope != 0:
        raise InfeasibleError("legendre_star requires final_slope 0")
    if not f.breakpoints:
        return ZERO
    # Convex, final slope 0 and normal form force slopes < 0 strictly.
    # For lam between -slopes[i] and -slopes[i-1] the infimum of
    # x*lam + f(x) sits at breakpoint t_i, so the transform is affine in
    # lam with slope t_i there; gluing the pieces:
    verts = f.vertices
    out_bps: list[Fraction] = []
    out_slopes: list[Fraction] = []
    for i in range(len(f.breakpoints) - 1, -1, -1):
        out_bps.append(-f.slopes[i])
        out_slopes.append(verts[i + 1][0])
    return PLF(f.last_value - f.value_at_zero, tuple(out_bps), tuple(out_slopes), Fraction(0))


def inf_affine_shift(f: PLF, c: RationalLike) -> ExtScalar:
    """inf over t >= 0 of (f(t) + c*t); -inf iff c + final_slope < 0.

    Along each segment the shifted function is affine, so the infimum
    is attained at 0, at a breakpoint, or in the limit t -> +inf.
    """
    c = frac(c)
    if c + f.final_slope < 0:
        return NEG_INF
    return min(v + c * t for t, v in f.vertices)


def inf_ratio(f: PLF) -> ExtScalar:
    """inf over t > 0 of f(t)/t; -inf iff f(0) < 0.

    On each affine segment f = b + a*t the ratio is a + b/t, monotone,
    so the infimum over (0, +inf) is the least of: the limits at 0+ and
    +inf, and the values at breakpoints.
    """
    if f.value_at_zero < 0:
        return NEG_INF
    candidates = [f.final_slope]
    if f.value_at_zero == 0:
        candidates.append(f.slopes[0] if f.slopes else f.final_slope)
    candidates.extend(v / t for t, v in f.vertices[1:])
    return min(candidates)


@dataclass(frozen=True)
class DerivativeMeasure:
    """The distributional derivative of a PLF's right derivative.

    Purely atomic: one atom per breakpoint, carrying the slope jump.
    For a convex source all masses are nonnegative, and total mass plus
    the initial slope recovers the final slope.
    """

    initial_slope: Fraction
    atoms: tuple[tuple[Fraction, Fraction], ...]

    @property
    def total_mass(self) -> Fraction:
        return sum((m for _, m in self.atoms), Fraction(0))


def derivative_measure(f: PLF) -> DerivativeMeasure:
    chain = f.slopes + (f.final_slope,)
    initial = chain[0]
    atoms = tuple(
        (t, after - before)
        for t, before, after in zip(f.breakpoints, chain, chain[1:])
    )
    return DerivativeMeasure(initial, atoms)


def stieltjes_vs_derivative(phi: PLF, psi: PLF) -> Fraction:
    """integral over (0, +inf] of phi d(psi'), for convex bounded psi.

    d(psi') is purely atomic (atoms at psi's kinks, masses the slope
    jumps), so the integral is a finite sum.  It satisfies
        result = -energy(phi, psi) - phi(0) * psi'(0+)
    exactly.  phi may be any PLF; only psi must be convex with
    final_slope 0 so that psi' is an increasing bounded step function.
    """
    if not psi.is_convex:
        raise InfeasibleError("stieltjes_vs_derivative needs convex psi")
    if psi.final_slope != 0:
        raise InfeasibleError("stieltjes_vs_derivative needs psi with final_slope 0")
    measure = derivative_measure(psi)
    return sum((phi(t) * m for t, m in measure.atoms), Fraction(0))


def bounds(f: PLF) -> tuple[ExtScalar, ExtScalar]:
    """(inf, sup) of f over [0, +inf]; infinite when the tail escapes."""
    values: list[ExtScalar] = [v for _, v in f.vertices]
    values.append(f(INF))
    return min(values), max(values)


def sup_abs_diff(f: PLF, g: PLF) -> Fraction:
    """sup over [0, +inf] of |f - g|, finite iff final slopes agree."""
    if f.final_slope != g.final_slope:
        raise InfeasibleError("sup|f - g| is infinite: final slopes differ")
    h = f - g
    lo, hi = bounds(h)
    return max(abs(lo), abs(hi))


def merge_grids(fs: Iterable[PLF]) -> list[Fraction]:
    """Sorted union of the breakpoints of all the given PLFs."""
    return sorted(set(itertools.chain.from_iterable(f.breakpoints for f in fs)))
