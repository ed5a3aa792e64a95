"""Explicit discrete joint distributions and their entropy vectors.

Two constructions matter here beyond the generic machinery:

- the parity family: independent fair bits except that one designated
  variable equals the mod-2 sum of the others in a chosen scope, which
  pins exactly one unit of conditional mutual information on the scope
  and none elsewhere;

- a strictly positive three-block family p(A,B,C) built from twelve
  binary variables (three fair bits, three noisy pairs with parameter x,
  one noisy triple with parameter y) grouped so that I(A;B|C) and
  I(A;C|B) vanish as x,y -> 0 while I(A;BC) tends to 1.  On this family
  no finite factor lambda can bound I(A;BC) by
  lambda*(I(A;B|C) + I(A;C|B)), which is the quantitative sense in which
  the intersection rule fails to relax even on strictly positive
  distributions.

Probabilities are doubles, so entropies are float-backed and compared at
1e-9; the closed forms below are transcendental, and the boundary limits
are only ever approached, never evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .core import (
    CapExceeded,
    CiSet,
    CiTriple,
    EntropyVector,
    VarSet,
    canonicalize,
)

__all__ = [
    "JointDistribution",
    "GroupedView",
    "entropy_vector",
    "parity_distribution",
    "delta_f_functions",
    "intersection_counterexample",
    "counterexample_closed_forms",
    "project_marginals",
    "dump_distribution",
    "parse_distribution",
]

#: cap on the number of states of an explicit table
MAX_STATES = 1 << 20

#: normalization tolerance for probability tables
NORM_TOL = 1e-12


@dataclass(frozen=True, slots=True, eq=False)
class JointDistribution:
    """Dense probability table over named finite-domain variables."""

    names: tuple[str, ...]
    sizes: tuple[int, ...]
    probs: np.ndarray = field(repr=False)
    strictly_positive: bool = False

    @classmethod
    def from_table(cls, names: Sequence[str], sizes: Sequence[int],
                   probs: np.ndarray) -> "JointDistribution":
        names = tuple(names)
        sizes = tuple(int(s) for s in sizes)
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        states = math.prod(sizes) if sizes else 1
        if states > MAX_STATES:
            raise CapExceeded(f"table has {states} states, cap is {MAX_STATES}")
        table = np.asarray(probs, dtype=float).reshape(sizes)
        if np.any(table < 0):
            raise ValueError("negative probability")
        total = float(table.sum())
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        table = table.copy()
        table.setflags(write=False)
        return cls(names, sizes, table, strictly_positive=bool(np.all(table > 0)))

    @property
    def n(self) -> int:
        return len(self.names)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ValueError(f"unknown variable {name!r}") from None

    def marginal(self, axes: Iterable[int]) -> np.ndarray:
        keep = sorted(set(axes))
        drop = tuple(i for i in range(self.n) if i not in keep)
        return self.probs.sum(axis=drop) if drop else self.probs

    def subset_entropy(self, axes: Iterable[int]) -> float:
        """Marginal entropy in bits of the given variable axes."""
        marg = np.asarray(self.marginal(axes), dtype=float).ravel()
        pos = marg[marg > 0]
        return float(-np.sum(pos * np.log2(pos)))


@dataclass(frozen=True, slots=True, eq=False)
class GroupedView:
    """A distribution with its variables partitioned into named composite
    variables; entropies are then taken over unions of groups."""

    base: JointDistribution
    groups: tuple[tuple[str, tuple[int, ...]], ...]

    @classmethod
    def of(cls, base: JointDistribution,
           groups: Sequence[tuple[str, Sequence[str]]]) -> "GroupedView":
        resolved = []
        used: set[int] = set()
        for gname, members in groups:
            axes = tuple(base.index_of(m) for m in members)
            if used & set(axes):
                raise ValueError(f"group {gname!r} overlaps an earlier group")
            used.update(axes)
            resolved.append((gname, axes))
        if used != set(range(base.n)):
            raise ValueError("groups must partition the base variables")
        return cls(base, tuple(resolved))

    @property
    def n(self) -> int:
        return len(self.groups)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(g for g, _ in self.groups)

    def subset_entropy(self, group_indices: Iterable[int]) -> float:
        axes: list[int] = []
        for g in group_indices:
            axes.extend(self.groups[g][1])
        return self.base.subset_entropy(axes)


def entropy_vector(d: JointDistribution | GroupedView) -> EntropyVector:
    """Float-backed entropy vector over all subsets of the (grouped)
    variables, polymatroid-checked at the float tolerance."""
    n = d.n
    values = [0.0] * (1 << n)
    for mask in range(1, 1 << n):
        values[mask] = d.subset_entropy(VarSet(mask))
    return EntropyVector(n, tuple(values), exact=False).polymatroid_checked()


def parity_distribution(names: Sequence[str], a_set: Sequence[str],
                        b_set: Sequence[str] = (), c_set: Sequence[str] = ()) -> JointDistribution:
    """Independent fair bits, except that the first variable of ``a_set``
    equals the mod-2 sum of the remaining variables of a_set, b_set and
    c_set."""
    names = tuple(names)
    a = list(a_set)
    if not a:
        raise ValueError("a_set must be nonempty")
    sets = [set(a_set), set(b_set), set(c_set)]
    if sum(len(s) for s in sets) != len(set().union(*sets)):
        raise ValueError("a_set, b_set, c_set must be pairwise disjoint")
    n = len(names)
    idx = {nm: k for k, nm in enumerate(names)}
    pivot = idx[a[0]]
    scope = [idx[nm] for nm in list(a[1:]) + list(b_set) + list(c_set)]
    if n > 20:
        raise CapExceeded("parity tables support at most 20 binary variables")

    states = np.arange(1 << n)
    # state bit for axis k is the (n-1-k)-th bit of the row-major rank
    def bit(axis: int) -> np.ndarray:
        return states >> (n - 1 - axis) & 1

    parity = np.zeros(1 << n, dtype=np.int64)
    for k in scope:
        parity ^= bit(k)
    table = np.where(bit(pivot) == parity, 2.0 ** -(n - 1), 0.0)
    return JointDistribution.from_table(names, (2,) * n, table.reshape((2,) * n))


def _h2_terms(*pairs: tuple[float, int]) -> float:
    """-(sum of count * p * log2 p) over (p, count) pairs."""
    total = 0.0
    for p, count in pairs:
        if p <= 0:
            raise ValueError("probability term outside the open domain")
        total += count * p * math.log2(p)
    return -total


def delta_f_functions(x: float, y: float) -> tuple[float, float, float, float]:
    """The four closed-form entropies of the counterexample blocks:

        delta1(x) = H of a noisy pair      [1-3x, x, x, x]
        delta2(x) = H of its bit marginal  [1-2x, 2x]
        f1(y)     = H of the noisy triple  [1/2-3y, y*6, 1/2-3y]
        f2(y)     = H of its pair marginal [1/2-2y twice, 2y twice]

    Domains are the open intervals x in (0, 1/3) and y in (0, 1/6); the
    boundary values are limits only and raise here.
    """
    if not 0 < x < Fraction(1, 3):
        raise ValueError(f"x={x!r} outside the open interval (0, 1/3)")
    if not 0 < y < Fraction(1, 6):
        raise ValueError(f"y={y!r} outside the open interval (0, 1/6)")
    delta1 = _h2_terms((1 - 3 * x, 1), (x, 3))
    delta2 = _h2_terms((1 - 2 * x, 1), (2 * x, 1))
    f1 = _h2_terms((0.5 - 3 * y, 2), (y, 6))
    f2 = _h2_terms((0.5 - 2 * y, 2), (2 * y, 2))
    return delta1, delta2, f1, f2


def intersection_counterexample(x: float, y: float) -> GroupedView:
    """The strictly positive 12-bit distribution grouped into A, B, C.

    Blocks, mutually independent: three fair bits; three pairs with table
    [1-3x, x, x, x]; one triple with table [1/2-3y, y, y, y, y, y, y,
    1/2-3y].  The groups interleave the blocks so that each of A, B, C
    holds one fair bit, one half of two different pairs, and one bit of
    the triple.
    """
    delta_f_functions(x, y)  # domain validation
    bit = np.array([0.5, 0.5])
    pair = np.array([1 - 3 * x, x, x, x]).reshape(2, 2)
    triple = np.array([0.5 - 3 * y, y, y, y, y, y, y, 0.5 - 3 * y]).reshape(2, 2, 2)
    table = reduce(np.multiply.outer, [bit, bit, bit, pair, pair, pair, triple])
    names = ("A1", "A2", "A3", "A41", "A42", "A51", "A52", "A61", "A62",
             "A71", "A72", "A73")
    base = JointDistribution.from_table(names, (2,) * 12, table)
    assert base.strictly_positive
    return GroupedView.of(base, [
        ("A", ("A2", "A61", "A71", "A51")),
        ("B", ("A3", "A62", "A72", "A41")),
        ("C", ("A1", "A52", "A73", "A42")),
    ])


def counterexample_closed_forms(x: float, y: float) -> dict[str, float]:
    """Closed-form entropies and informations of the grouped family."""
    d1, d2, f1, f2 = delta_f_functions(x, y)
    single = 2 + 2 * d2
    pair = 2 + d1 + 2 * d2 + f2
    full = 3 + 3 * d1 + f1
    i_ab_c = 2 * d2 - d1 + 2 * f2 - f1 - 1
    i_ab = 2 * d2 - d1 - f2 + 2
    return {
        "H(A)": single, "H(B)": single, "H(C)": single,
        "H(AB)": pair, "H(AC)": pair, "H(BC)": pair,
        "H(ABC)": full,
        "I(A;B|C)": i_ab_c, "I(A;C|B)": i_ab_c, "I(B;C|A)": i_ab_c,
        "I(A;B)": i_ab,
        "I(A;BC)": i_ab + i_ab_c,
    }


def project_marginals(s: CiSet, u: VarSet) -> CiSet:
    """Restrict a set of marginal statements to the variables in ``u``:
    (X;Y) becomes (X∩U; Y∩U), and members that lose a whole side drop
    out."""
    out: list[CiTriple] = []
    for t in s:
        if t.z:
            raise ValueError(f"{t} is not a marginal statement")
        out.append(canonicalize(t.x & u, t.y & u, VarSet.empty()))
    return CiSet.of(out, s.ambient)


def dump_distribution(d: JointDistribution) -> str:
    """One line per state, ``v1 v2 ... : prob``, lexicographic state
    order."""
    lines = []
    for state in np.ndindex(*d.sizes):
        p = float(d.probs[state])
        lines.append(" ".join(str(v) for v in state) + " : " + repr(p))
    return "\n".join(lines) + "\n"


def parse_distribution(text: str, names: Sequence[str],
                       sizes: Sequence[int] | None = None) -> JointDistribution:
    """Inverse of dump_distribution for the given variable list (binary
    domains unless sizes are supplied).  Missing states get probability
    zero; duplicate states are rejected."""
    names = tuple(names)
    sizes = tuple(sizes) if sizes is not None else (2,) * len(names)
    table = np.zeros(sizes, dtype=float)
    filled = np.zeros(sizes, dtype=bool)
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            state_part, prob_part = line.rsplit(":", 1)
            state = tuple(int(v) for v in state_part.split())
            prob = float(prob_part)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: malformed state line {line!r}") from exc
        if len(state) != len(names):
            raise ValueError(f"line {lineno}: expected {len(names)} values")
        if filled[state]:
            raise ValueError(f"line {lineno}: duplicate state {state}")
        filled[state] = True
        table[state] = prob
    return JointDistribution.from_table(names, sizes, table)
