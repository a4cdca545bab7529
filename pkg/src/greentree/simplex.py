"""Dense two-phase simplex over exact rationals.

Solves  min c.x  subject to  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0,
with every coefficient a ``Fraction``.  Bland's smallest-index rule is
used for both the entering and the leaving variable, which rules out
cycling; with the dozens-of-cells problem sizes produced by the maximin
programs in this package, speed is irrelevant and exactness is the only
requirement.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Row = list[Fraction]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: str
    value: Fraction | None = None
    x: list[Fraction] | None = None


def solve_lp(
    cost: Sequence[Fraction],
    a_ub: Sequence[Sequence[Fraction]] = (),
    b_ub: Sequence[Fraction] = (),
    a_eq: Sequence[Sequence[Fraction]] = (),
    b_eq: Sequence[Fraction] = (),
) -> LPResult:
    n = len(cost)
    rows: list[Row] = []
    rhs: list[Fraction] = []
    slack_of_row: list[int | None] = []

    for a, b in zip(a_ub, b_ub):
        rows.append([Fraction(v) for v in a])
        rhs.append(Fraction(b))
        slack_of_row.append(len(rows) - 1)
    for a, b in zip(a_eq, b_eq):
        rows.append([Fraction(v) for v in a])
        rhs.append(Fraction(b))
        slack_of_row.append(None)

    m = len(rows)
    n_slack = sum(1 for s in slack_of_row if s is not None)
    total = n + n_slack

    tab: list[Row] = []
    slack_idx = 0
    slack_col_of_row: list[int | None] = []
    for i in range(m):
        row = rows[i] + [Fraction(0)] * n_slack + [rhs[i]]
        if slack_of_row[i] is not None:
            row[n + slack_idx] = Fraction(1)
            slack_col_of_row.append(n + slack_idx)
            slack_idx += 1
        else:
            slack_col_of_row.append(None)
        tab.append(row)

    # Normalise to nonnegative right-hand sides; a flipped <= row loses
    # its slack as a basis candidate.
    basis: list[int] = []
    artificial_cols: list[int] = []
    for i in range(m):
        if tab[i][-1] < 0:
            tab[i] = [-v for v in tab[i]]
        col = slack_col_of_row[i]
        if col is not None and tab[i][col] == 1:
            basis.append(col)
        else:
            art = total + len(artificial_cols)
            artificial_cols.append(art)
            basis.append(art)
    for i in range(m):
        pad = [Fraction(0)] * len(artificial_cols)
        tab[i] = tab[i][:-1] + pad + [tab[i][-1]]
        if basis[i] >= total:
            tab[i][basis[i]] = Fraction(1)
    width = total + len(artificial_cols)

    if artificial_cols:
        obj = [Fraction(0)] * (width + 1)
        for col in artificial_cols:
            obj[col] = Fraction(1)
        _reduce_objective(obj, tab, basis)
        _iterate(obj, tab, basis, width)
        if -obj[-1] != 0:
            return LPResult(INFEASIBLE)
        _expel_artificials(tab, basis, total)
        # Drop artificial columns entirely.
        tab = [row[:total] + [row[-1]] for row in tab]
        keep = [i for i, b in enumerate(basis) if b < total]
        tab = [tab[i] for i in keep]
        basis = [basis[i] for i in keep]
        width = total

    obj = [Fraction(cost[j]) if j < n else Fraction(0) for j in range(width)] + [Fraction(0)]
    _reduce_objective(obj, tab, basis)
    if not _iterate(obj, tab, basis, width):
        return LPResult(UNBOUNDED)

    x = [Fraction(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = tab[i][-1]
    return LPResult(OPTIMAL, value=-obj[-1], x=x)


def _reduce_objective(obj: Row, tab: list[Row], basis: list[int]) -> None:
    for i, b in enumerate(basis):
        coeff = obj[b]
        if coeff != 0:
            obj[:] = [o - coeff * v for o, v in zip(obj, tab[i])]


def _iterate(obj: Row, tab: list[Row], basis: list[int], width: int) -> bool:
    """Run simplex pivots until optimal (True) or unbounded (False)."""
    while True:
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            return True
        leave = None
        best: Fraction | None = None
        for i, row in enumerate(tab):
            if row[enter] > 0:
                ratio = row[-1] / row[enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            return False
        _pivot(obj, tab, basis, leave, enter)


def _pivot(obj: Row, tab: list[Row], basis: list[int], row: int, col: int) -> None:
    piv = tab[row][col]
    tab[row] = [v / piv for v in tab[row]]
    for i in range(len(tab)):
        if i != row and tab[i][col] != 0:
            f = tab[i][col]
            tab[i] = [v - f * w for v, w in zip(tab[i], tab[row])]
    if obj[col] != 0:
        f = obj[col]
        obj[:] = [v - f * w for v, w in zip(obj, tab[row])]
    basis[row] = col


def _expel_artificials(tab: list[Row], basis: list[int], total: int) -> None:
    """Pivot zero-level artificial variables out of the basis where a
    structural column is available; rows with none are redundant and
    are removed by the caller."""
    dummy_obj = [Fraction(0)] * (len(tab[0]))
    for i in range(len(tab)):
        if basis[i] >= total:
            col = next((j for j in range(total) if tab[i][j] != 0), None)
            if col is not None:
                _pivot(dummy_obj, tab, basis, i, col)
