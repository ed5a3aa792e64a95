"""Certificates over the polyhedral cone of Shannon inequalities.

The cone of n-variable polymatroids is cut out by the elemental
inequalities: n monotonicity terms h(All) - h(All minus i) >= 0 and
C(n,2)*2^(n-2) elemental submodularities I(i;j|K) >= 0.  Every valid
linear information inequality is a nonnegative combination of elementals,
so questions about exact and approximate implication between CI
statements reduce to small rational LPs:

- exact implication holds iff the consequent functional is dominated,
  modulo the span of the antecedent functionals, by the elemental cone;
- a factor lambda certifies the approximate implication
  lambda*h(antecedents) >= h(consequent) iff
  lambda*f_Sigma - f_tau is a nonnegative combination of elementals,
  and the least such lambda is itself an LP optimum.

All arithmetic is exact; a certificate is a rational identity that can be
re-verified without trusting the solver, and every negative answer comes
with a rational polymatroid witness.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .core import (
    CapExceeded,
    CiSet,
    CiTriple,
    EntropyVector,
    VarSet,
    canonicalize,
    classify,
)
from .imeasure import positive_implies
from .lp import LpStatus, solve_eq_lp

__all__ = [
    "LinearFunctional",
    "Elemental",
    "ElementalBasis",
    "LpCertificate",
    "EiResult",
    "CheckLambdaResult",
    "MinLambdaResult",
    "BoundReport",
    "lp_cap",
    "elemental_basis",
    "shannon_ei",
    "check_lambda",
    "min_lambda",
    "verify_theorem_bound",
    "saturate_conditionals",
]

DEFAULT_LP_CAP = 10


def lp_cap() -> int:
    """Ground-set size cap for LP operations; CIAPPROX_LP_CAP overrides."""
    raw = os.environ.get("CIAPPROX_LP_CAP")
    if raw is None:
        return DEFAULT_LP_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise CapExceeded(f"CIAPPROX_LP_CAP={raw!r} is not an integer") from exc
    return cap


def _require_in_cap(n: int) -> None:
    cap = lp_cap()
    if not 2 <= n <= cap:
        raise CapExceeded(f"LP operations support 2 <= n <= {cap}, got n={n}")


@dataclass(frozen=True, slots=True)
class LinearFunctional:
    """A sparse linear functional on entropy vectors: sum of
    coeffs[S] * h(S) over nonempty subsets S."""

    n: int
    coeffs: Mapping[VarSet, Fraction]

    @classmethod
    def build(cls, n: int, items: Iterable[tuple[int, Fraction | int]]) -> "LinearFunctional":
        acc: dict[int, Fraction] = {}
        for mask, coef in items:
            if mask == 0:
                continue
            acc[mask] = acc.get(mask, Fraction(0)) + Fraction(coef)
        return cls(n, {VarSet(m): c for m, c in acc.items() if c != 0})

    @classmethod
    def zero(cls, n: int) -> "LinearFunctional":
        return cls(n, {})

    @classmethod
    def from_triple(cls, t: CiTriple, n: int) -> "LinearFunctional":
        """The functional h(ZX) + h(ZY) - h(ZXY) - h(Z) of a triple."""
        zx = t.z.bits | t.x.bits
        zy = t.z.bits | t.y.bits
        return cls.build(n, [(zx, 1), (zy, 1), (zx | zy, -1), (t.z.bits, -1)])

    @classmethod
    def from_ciset(cls, s: CiSet, n: int) -> "LinearFunctional":
        items: list[tuple[int, Fraction]] = []
        for t in s:
            for vs, c in cls.from_triple(t, n).coeffs.items():
                items.append((vs.bits, c))
        return cls.build(n, items)

    def scaled(self, factor: Fraction) -> "LinearFunctional":
        return LinearFunctional.build(
            self.n, [(vs.bits, c * factor) for vs, c in self.coeffs.items()])

    def minus(self, other: "LinearFunctional") -> "LinearFunctional":
        items = [(vs.bits, c) for vs, c in self.coeffs.items()]
        items += [(vs.bits, -c) for vs, c in other.coeffs.items()]
        return LinearFunctional.build(self.n, items)

    def plus(self, other: "LinearFunctional") -> "LinearFunctional":
        items = [(vs.bits, c) for vs, c in self.coeffs.items()]
        items += [(vs.bits, c) for vs, c in other.coeffs.items()]
        return LinearFunctional.build(self.n, items)

    def is_zero(self) -> bool:
        return not self.coeffs

    def evaluate(self, h: EntropyVector):
        total = Fraction(0) if h.exact else 0.0
        for vs, c in self.coeffs.items():
            total += c * h.value(vs)
        return total


@dataclass(frozen=True, slots=True)
class Elemental:
    """One generator of the Shannon cone, uniformly written I(i;j|K):
    submodularity for i != j, monotonicity for i == j (there K is the
    complement of {i})."""

    i: int
    j: int
    cond: VarSet
    functional: LinearFunctional

    def render(self, names: Sequence[str] | None = None) -> str:
        def nm(k: int) -> str:
            return names[k] if names is not None else f"X{k}"

        cond = "".join(nm(k) for k in self.cond)
        body = f"{nm(self.i)};{nm(self.j)}"
        return f"I({body}|{cond})" if cond else f"I({body})"


@dataclass(frozen=True, slots=True)
class ElementalBasis:
    ambient: int
    inequalities: tuple[Elemental, ...]

    def __len__(self) -> int:
        return len(self.inequalities)


@lru_cache(maxsize=None)
def _elemental_basis_cached(n: int) -> ElementalBasis:
    full = (1 << n) - 1
    out: list[Elemental] = []
    for i in range(n):
        rest = full & ~(1 << i)
        out.append(Elemental(
            i, i, VarSet(rest),
            LinearFunctional.build(n, [(full, 1), (rest, -1)])))
    for i in range(n):
        for j in range(i + 1, n):
            rest = full & ~(1 << i) & ~(1 << j)
            k = rest
            while True:
                out.append(Elemental(
                    i, j, VarSet(k),
                    LinearFunctional.build(
                        n, [(k | 1 << i, 1), (k | 1 << j, 1),
                            (k | 1 << i | 1 << j, -1), (k, -1)])))
                if k == 0:
                    break
                k = (k - 1) & rest
    return ElementalBasis(n, tuple(out))


def elemental_basis(n: int) -> ElementalBasis:
    """The minimal generating set of Shannon inequalities on n variables:
    n monotonicities plus C(n,2)*2^(n-2) elemental submodularities."""
    _require_in_cap(n)
    return _elemental_basis_cached(n)


@dataclass(frozen=True, slots=True)
class LpCertificate:
    """A rational identity  sum multipliers[k]*elemental_k =
    lambda*f_Sigma - f_tau,  witnessing the approximate implication."""

    ambient: int
    lam: Fraction
    multipliers: tuple[Fraction, ...]

    def combination(self) -> LinearFunctional:
        basis = _elemental_basis_cached(self.ambient)
        items: list[tuple[int, Fraction]] = []
        for mult, e in zip(self.multipliers, basis.inequalities):
            if mult:
                for vs, c in e.functional.coeffs.items():
                    items.append((vs.bits, mult * c))
        return LinearFunctional.build(self.ambient, items)

    def verify(self, s: CiSet, t: CiTriple) -> bool:
        """Re-check the identity by direct functional arithmetic."""
        if any(mult < 0 for mult in self.multipliers):
            return False
        n = self.ambient
        target = LinearFunctional.from_ciset(s, n).scaled(self.lam).minus(
            LinearFunctional.from_triple(t, n))
        return self.combination().minus(target).is_zero()

    def render(self, names: Sequence[str] | None = None) -> str:
        basis = _elemental_basis_cached(self.ambient)
        lines = [
            f"{mult} * {e.render(names)}"
            for mult, e in zip(self.multipliers, basis.inequalities)
            if mult
        ]
        lines.append(f"lambda = {self.lam}")
        return "\n".join(lines)


@dataclass(frozen=True, slots=True)
class EiResult:
    holds: bool
    counterexample: EntropyVector | None = None

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True, slots=True)
class CheckLambdaResult:
    certified: bool
    certificate: LpCertificate | None = None
    refutation: EntropyVector | None = None

    def __bool__(self) -> bool:
        return self.certified


@dataclass(frozen=True, slots=True)
class MinLambdaResult:
    unbounded: bool
    value: Fraction | None = None
    certificate: LpCertificate | None = None


def _subset_rows(n: int, columns: Sequence[LinearFunctional],
                 rhs: LinearFunctional) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Assemble the equality system with one row per nonempty subset."""
    nrows = (1 << n) - 1
    rows = [[Fraction(0)] * len(columns) for _ in range(nrows)]
    for col, f in enumerate(columns):
        for vs, c in f.coeffs.items():
            rows[vs.bits - 1][col] = c
    b = [Fraction(0)] * nrows
    for vs, c in rhs.coeffs.items():
        b[vs.bits - 1] = c
    return rows, b


def _vector_from_subsets(n: int, values: Sequence[Fraction]) -> EntropyVector:
    vals = [Fraction(0)] * (1 << n)
    for mask in range(1, 1 << n):
        vals[mask] = Fraction(values[mask - 1])
    return EntropyVector(n, tuple(vals), exact=True).polymatroid_checked()


def shannon_ei(s: CiSet, t: CiTriple) -> EiResult:
    """Decide exact implication over all polymatroids.

    The consequent vanishes on the antecedent-annihilating part of the
    Shannon cone iff its functional lies in span(antecedents) minus the
    elemental cone; that membership is a rational LP feasibility problem,
    and its Farkas witness on failure is exactly a polymatroid with
    h(antecedents) = 0 and positive consequent (returned scaled so the
    consequent evaluates to 1).
    """
    n = s.ambient
    _require_in_cap(n)
    f_tau = LinearFunctional.from_triple(t, n)
    if f_tau.is_zero():
        return EiResult(True)
    basis = _elemental_basis_cached(n)
    sig = [LinearFunctional.from_triple(sigma, n) for sigma in s]
    columns = ([e.functional.scaled(Fraction(-1)) for e in basis.inequalities]
               + sig + [f.scaled(Fraction(-1)) for f in sig])
    rows, b = _subset_rows(n, columns, f_tau)
    sol = solve_eq_lp(len(columns), rows, b, [0] * len(columns))
    if sol.status is LpStatus.OPTIMAL:
        return EiResult(True)
    assert sol.status is LpStatus.INFEASIBLE and sol.farkas is not None
    h = sol.farkas
    scale = f_tau.evaluate(_vector_from_subsets_unchecked(n, h))
    assert scale > 0
    witness = _vector_from_subsets(n, [v / scale for v in h])
    return EiResult(False, witness)


def _vector_from_subsets_unchecked(n: int, values: Sequence[Fraction]) -> EntropyVector:
    vals = [Fraction(0)] * (1 << n)
    for mask in range(1, 1 << n):
        vals[mask] = Fraction(values[mask - 1])
    return EntropyVector(n, tuple(vals), exact=True)


def check_lambda(s: CiSet, t: CiTriple, lam: Fraction | int) -> CheckLambdaResult:
    """Certify or refute  lambda*h(s) >= h(t)  over all polymatroids."""
    lam = Fraction(lam)
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    n = s.ambient
    _require_in_cap(n)
    basis = _elemental_basis_cached(n)
    target = LinearFunctional.from_ciset(s, n).scaled(lam).minus(
        LinearFunctional.from_triple(t, n))
    columns = [e.functional for e in basis.inequalities]
    rows, b = _subset_rows(n, columns, target)
    sol = solve_eq_lp(len(columns), rows, b, [0] * len(columns))
    if sol.status is LpStatus.OPTIMAL:
        cert = LpCertificate(n, lam, tuple(sol.x))
        return CheckLambdaResult(True, certificate=cert)
    assert sol.status is LpStatus.INFEASIBLE and sol.farkas is not None
    h = [-v for v in sol.farkas]
    refutation = _vector_from_subsets(n, h)
    return CheckLambdaResult(False, refutation=refutation)


def min_lambda(s: CiSet, t: CiTriple) -> MinLambdaResult:
    """Least lambda with  lambda*h(s) >= h(t)  over all polymatroids, as an
    exact rational, or the unbounded outcome when no finite factor exists."""
    n = s.ambient
    _require_in_cap(n)
    basis = _elemental_basis_cached(n)
    f_sigma = LinearFunctional.from_ciset(s, n)
    f_tau = LinearFunctional.from_triple(t, n)
    columns = [f_sigma] + [e.functional.scaled(Fraction(-1)) for e in basis.inequalities]
    rows, b = _subset_rows(n, columns, f_tau)
    objective = [Fraction(1)] + [Fraction(0)] * len(basis)
    sol = solve_eq_lp(len(columns), rows, b, objective)
    if sol.status is LpStatus.INFEASIBLE:
        return MinLambdaResult(True)
    assert sol.status is LpStatus.OPTIMAL
    lam = sol.x[0]
    cert = LpCertificate(n, lam, tuple(sol.x[1:]))
    return MinLambdaResult(False, value=lam, certificate=cert)


@dataclass(frozen=True, slots=True)
class BoundReport:
    """Outcome of checking one antecedent-class approximation bound."""

    kind: str
    premise: str
    premise_holds: bool
    bound: Fraction
    unbounded: bool
    value: Fraction | None
    certificate: LpCertificate | None
    violated: bool


def _validate_kind(s: CiSet, kind: str) -> None:
    n = s.ambient
    if kind == "saturated":
        for t in s:
            flags = classify(t, n)
            if "saturated" not in flags and "conditional" not in flags:
                raise ValueError(f"{t} is neither saturated nor a conditional")
    elif kind == "marginal":
        for t in s:
            if "marginal" not in classify(t, n):
                raise ValueError(f"{t} is not a marginal CI")
    elif kind == "recursive":
        from .graphsep import dag_from_basis  # deferred: avoids cycle at import time

        dag_from_basis(s, tuple(range(n)))
    else:
        raise ValueError(f"unknown antecedent kind {kind!r}")


def verify_theorem_bound(s: CiSet, t: CiTriple, kind: str) -> BoundReport:
    """Check the class bound on the approximation factor: 1 for a recursive
    basis, min{|A|,|B|} for saturated-plus-conditional or marginal
    antecedents.  The implication premise is validated over positive
    polymatroids (atom containment).

    That premise is exactly right for saturated antecedents and recursive
    bases.  For marginal antecedents the bound is only guaranteed under
    the stronger cone-level premise (shannon_ei); a marginal report with
    premise_holds and violated both set marks an instance where the two
    premises part ways, not a failure of the bound itself."""
    _validate_kind(s, kind)
    premise_holds = bool(positive_implies(s, t))
    bound = Fraction(1) if kind == "recursive" else Fraction(min(len(t.x), len(t.y)))
    result = min_lambda(s, t)
    violated = premise_holds and (result.unbounded or result.value > bound)
    return BoundReport(
        kind=kind,
        premise="exact implication over positive polymatroids (atom containment)",
        premise_holds=premise_holds,
        bound=bound,
        unbounded=result.unbounded,
        value=result.value,
        certificate=result.certificate,
        violated=violated,
    )


def saturate_conditionals(s: CiSet, n: int) -> CiSet:
    """Rewrite every conditional (Y;Y|X) as the two saturated statements
    (Y; rest | X) and (Y;Y| complement of Y), which sum to the same
    conditional entropy h(Y|X) on every entropy vector.  Saturated members
    pass through unchanged."""
    full = VarSet.full(n)
    out: list[CiTriple] = []
    for t in s:
        flags = classify(t, n)
        if "saturated" in flags:
            out.append(t)
        elif "conditional" in flags:
            y, x = t.x, t.z
            out.append(canonicalize(y, full - (x | y), x))
            out.append(canonicalize(y, y, full - y))
        else:
            raise ValueError(f"{t} is neither saturated nor a conditional")
    return CiSet.of(out, n)
