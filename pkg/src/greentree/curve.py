"""Closed points, R-divisors and dimension counting on a curve model.

A ``CurveModel`` is the combinatorial shadow of a regular projective
curve: a genus and a finite table of declared closed points with their
residue degrees (weights).  Undeclared points are perfectly legal; they
all carry weight-like behaviour only through the operations that need
"a fresh point", and every formula below depends on weights alone, so
no attempt is made to verify that a weight multiset is realised by an
actual curve.

Exact computations (section-space dimensions, principality) are only
valid at genus 0, where Riemann-Roch gives dim H0(D) = max(0, deg(floor
D) + 1) for every divisor and the degree-zero divisors are exactly the
principal ones.  Every exact operation refuses genus > 0 loudly; the
only thing offered there is the asymptotic growth rate of n -> dim
H0(nD), which equals max(deg D, 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import InfeasibleError
from .plf import RationalLike, frac

PointId = str


@dataclass(frozen=True)
class CurveModel:
    genus: int
    weights: tuple[tuple[PointId, int], ...]

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("genus must be a nonnegative integer")
        pairs = tuple(sorted(dict(self.weights).items()))
        if any(w <= 0 or not isinstance(w, int) for _, w in pairs):
            raise ValueError("point weights must be positive integers")
        object.__setattr__(self, "weights", pairs)

    @classmethod
    def of(cls, genus: int, weights: Mapping[PointId, int]) -> "CurveModel":
        return cls(genus, tuple(weights.items()))

    @property
    def exact_mode(self) -> bool:
        return self.genus == 0

    @property
    def points(self) -> tuple[PointId, ...]:
        return tuple(x for x, _ in self.weights)

    def weight(self, x: PointId) -> int:
        for p, w in self.weights:
            if p == x:
                return w
        raise InfeasibleError(f"point {x!r} is not declared in the curve model")

    def require_exact(self, what: str) -> None:
        if not self.exact_mode:
            raise InfeasibleError(
                f"{what} requires a genus-0 model (got genus {self.genus}); "
                "only asymptotic estimates are available at higher genus"
            )


@dataclass(frozen=True)
class RDivisor:
    """Finitely supported map from point ids to rational coefficients."""

    coeffs: tuple[tuple[PointId, Fraction], ...]

    def __post_init__(self):
        cleaned = {x: frac(c) for x, c in dict(self.coeffs).items() if frac(c) != 0}
        object.__setattr__(self, "coeffs", tuple(sorted(cleaned.items())))

    @classmethod
    def of(cls, coeffs: Mapping[PointId, RationalLike] | None = None) -> "RDivisor":
        return cls(tuple((coeffs or {}).items()))

    @classmethod
    def zero(cls) -> "RDivisor":
        return cls(())

    def ord(self, x: PointId) -> Fraction:
        for p, c in self.coeffs:
            if p == x:
                return c
        return Fraction(0)

    @property
    def support(self) -> tuple[PointId, ...]:
        return tuple(x for x, _ in self.coeffs)

    @property
    def is_effective(self) -> bool:
        return all(c >= 0 for _, c in self.coeffs)

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for _, c in self.coeffs)

    def as_dict(self) -> dict[PointId, Fraction]:
        return dict(self.coeffs)

    def __add__(self, other: "RDivisor") -> "RDivisor":
        out = self.as_dict()
        for x, c in other.coeffs:
            out[x] = out.get(x, Fraction(0)) + c
        return RDivisor.of(out)

    def __sub__(self, other: "RDivisor") -> "RDivisor":
        return self + other.scale(-1)

    def scale(self, a: RationalLike) -> "RDivisor":
        a = frac(a)
        return RDivisor.of({x: a * c for x, c in self.coeffs})

    def __mul__(self, a: RationalLike) -> "RDivisor":
        return self.scale(a)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        if not self.coeffs:
            return "RDivisor(0)"
        return "RDivisor(" + " + ".join(f"{c}*{x}" for x, c in self.coeffs) + ")"


def degree(divisor: RDivisor, curve: CurveModel) -> Fraction:
    """Weighted degree: sum of w(x) * ord_x over the support."""
    return sum((curve.weight(x) * c for x, c in divisor.coeffs), Fraction(0))


def floor_ceil(divisor: RDivisor) -> tuple[RDivisor, RDivisor]:
    """Componentwise floor and ceiling."""
    lo = RDivisor.of({x: Fraction(math.floor(c)) for x, c in divisor.coeffs})
    hi = RDivisor.of({x: Fraction(math.ceil(c)) for x, c in divisor.coeffs})
    return lo, hi


def h0_dim(divisor: RDivisor, curve: CurveModel) -> int:
    """dim of the space of sections {f : (f) + D >= 0}, exactly.

    Genus 0 only.  Sections see the rounded-down divisor, and
    Riemann-Roch there has no correction term: the dimension is
    deg(floor D) + 1 whenever that is positive, otherwise 0.
    """
    curve.require_exact("h0_dim")
    lo, _ = floor_ceil(divisor)
    d = degree(lo, curve)
    assert d.denominator == 1
    return max(0, int(d) + 1)


def h0_growth_rate(divisor: RDivisor, curve: CurveModel) -> Fraction:
    """Limit of dim H0(nD)/n: deg(D) when nonnegative, else 0.

    This is the only dimension statement available at genus > 0.
    """
    return max(degree(divisor, curve), Fraction(0))


def is_principal(divisor: RDivisor, curve: CurveModel) -> bool:
    """Degree-zero test; on the genus-0 model Pic0 is trivial, so a
    divisor is principal exactly when its degree vanishes."""
    curve.require_exact("is_principal")
    return degree(divisor, curve) == 0


def sup_divisors(divisors: Iterable[RDivisor]) -> RDivisor:
    """Componentwise maximum of finitely many R-divisors.

    A divisor carries coefficient 0 at every point outside its support,
    so the maximum at each point of the union support ranges over all
    members of the family, absent ones contributing 0.
    """
    items = list(divisors)
    if not items:
        raise ValueError("sup of an empty family of divisors")
    support: set[PointId] = set()
    for d in items:
        support.update(d.support)
    return RDivisor.of({x: max(d.ord(x) for d in items) for x in support})
