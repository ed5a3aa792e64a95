"""Exact rational linear programming via two-phase primal simplex.

Solves problems in equality standard form

    minimize / maximize  c'x   subject to   Ax = b,  x >= 0

over the rationals, with Bland's anti-cycling rule, so every run is
deterministic and terminates.  On infeasibility a Farkas certificate y is
returned with  y'A <= 0  componentwise and  y'b > 0, which is the exact
separating witness callers turn into counterexample polymatroids.

The solver is dense and tuned for the small, highly structured systems
produced by the Shannon-cone certificate machinery (tens of rows, around a
hundred columns); entries stay as Fractions throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

__all__ = ["LpStatus", "LpSolution", "solve_eq_lp"]

_ZERO = Fraction(0)
_ONE = Fraction(1)


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, slots=True)
class LpSolution:
    status: LpStatus
    x: tuple[Fraction, ...] | None = None
    objective: Fraction | None = None
    farkas: tuple[Fraction, ...] | None = None


def solve_eq_lp(
    ncols: int,
    rows: Sequence[Sequence[Fraction | int]],
    rhs: Sequence[Fraction | int],
    objective: Sequence[Fraction | int],
    *,
    maximize: bool = False,
) -> LpSolution:
    """Solve min/max c'x s.t. Ax = b, x >= 0 exactly."""
    m = len(rows)
    if len(rhs) != m:
        raise ValueError("rhs length does not match row count")
    cost = [Fraction(v) for v in objective]
    if len(cost) != ncols:
        raise ValueError("objective length does not match column count")
    if maximize:
        cost = [-v for v in cost]

    # Tableau with artificial columns appended; flip rows to make b >= 0.
    tab: list[list[Fraction]] = []
    b: list[Fraction] = []
    flip: list[int] = []
    for i in range(m):
        row = [Fraction(v) for v in rows[i]]
        if len(row) != ncols:
            raise ValueError("row length does not match column count")
        bi = Fraction(rhs[i])
        if bi < 0:
            row = [-v for v in row]
            bi = -bi
            flip.append(-1)
        else:
            flip.append(1)
        row.extend(_ONE if k == i else _ZERO for k in range(m))
        tab.append(row)
        b.append(bi)

    total = ncols + m
    basis = list(range(ncols, total))  # artificials form the initial basis

    # Phase 1: minimize the sum of artificials.  With the all-artificial
    # basis, reduced cost r_j = c_j - colsum_j and the objective is sum(b).
    red = [_ZERO] * total
    for j in range(total):
        s = _ZERO
        for i in range(m):
            s += tab[i][j]
        red[j] = (_ONE if j >= ncols else _ZERO) - s
    obj = sum(b, _ZERO)

    obj = _pivot_until_optimal(tab, b, red, basis, obj, allowed=total)
    if obj is None:
        raise ArithmeticError("phase-1 objective cannot be unbounded")
    if obj > 0:
        # Farkas vector y = c_B' B^-1, read off the artificial columns.
        y = []
        for i in range(m):
            yi = _ZERO
            for k in range(m):
                if basis[k] >= ncols:
                    yi += tab[k][ncols + i]
            y.append(flip[i] * yi)
        return LpSolution(LpStatus.INFEASIBLE, farkas=tuple(y))

    _expel_artificials(tab, b, basis, ncols)

    # Phase 2 on the real objective, artificials barred from entering.
    red = list(cost) + [_ZERO] * (total - ncols)
    obj = _ZERO
    for i, bv in enumerate(basis):
        cb = cost[bv] if bv < ncols else _ZERO
        if cb:
            row = tab[i]
            for j in range(total):
                if row[j]:
                    red[j] -= cb * row[j]
            obj += cb * b[i]
    obj = _pivot_until_optimal(tab, b, red, basis, obj, allowed=ncols)
    if obj is None:
        return LpSolution(LpStatus.UNBOUNDED)

    x = [_ZERO] * ncols
    for i, j in enumerate(basis):
        if j < ncols:
            x[j] = b[i]
    return LpSolution(LpStatus.OPTIMAL, x=tuple(x),
                      objective=-obj if maximize else obj)


def _pivot_until_optimal(tab, b, red, basis, obj, *, allowed):
    """Run Bland-rule pivots until no reduced cost among the first
    ``allowed`` columns is negative.  Returns the objective value at
    optimality, or None when an unbounded improving direction is found."""
    while True:
        enter = -1
        for j in range(allowed):
            if red[j] < 0:
                enter = j
                break
        if enter < 0:
            return obj
        leave = -1
        best: Fraction | None = None
        for i, row in enumerate(tab):
            a = row[enter]
            if a > 0:
                ratio = b[i] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            return None
        obj = _pivot(tab, b, red, basis, obj, leave, enter)


def _pivot(tab, b, red, basis, obj, leave, enter):
    """Pivot on (leave, enter); returns the updated objective value."""
    prow = tab[leave]
    piv = prow[enter]
    if piv != 1:
        inv = 1 / piv
        for j, v in enumerate(prow):
            if v:
                prow[j] = v * inv
        b[leave] *= inv
    nz = [j for j, v in enumerate(prow) if v]
    brow = b[leave]
    for i, row in enumerate(tab):
        if i == leave:
            continue
        f = row[enter]
        if f:
            for j in nz:
                row[j] -= f * prow[j]
            b[i] -= f * brow
    f = red[enter]
    if f:
        for j in nz:
            red[j] -= f * prow[j]
        obj += f * brow
    basis[leave] = enter
    return obj


def _expel_artificials(tab, b, basis, ncols) -> None:
    """Pivot zero-level artificials out of the basis; drop redundant rows."""
    i = 0
    while i < len(tab):
        if basis[i] >= ncols:
            enter = next((j for j in range(ncols) if tab[i][j] != 0), None)
            if enter is None:
                # redundant constraint
                del tab[i], b[i], basis[i]
                continue
            _pivot(tab, b, [_ZERO] * len(tab[0]), basis, _ZERO, i, enter)
        i += 1
