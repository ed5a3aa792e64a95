"""Atom calculus for CI implication over positive polymatroids.

The information diagram of n variables has 2^n - 1 nonempty atoms, one per
nonempty subset S of the ground set: the region lying inside the circles of
the variables in S and outside all others.  A CI triple (X;Y|Z) covers the
atoms that meet X, meet Y, and avoid Z, and a set of triples covers the
union of its members' atoms.

Over the positive polymatroids (entropy-like functions whose atom measure
is nonnegative everywhere), exact implication of a triple by a set of
triples is precisely atom containment: every atom of the consequent must
be covered by some antecedent.  When containment fails, placing unit
weight on a single uncovered atom yields a counterexample measure whose
entropy vector annihilates the antecedents but not the consequent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping

from .core import (
    CiSet,
    CiTriple,
    EntropyVector,
    MAX_GROUND_SET,
    CapExceeded,
    VarSet,
)

__all__ = [
    "AtomSet",
    "PositiveImeasure",
    "ImplicationResult",
    "atoms_of",
    "atoms_of_set",
    "positive_implies",
    "measure_to_entropy",
    "prune_antecedents",
]


@dataclass(frozen=True, slots=True)
class AtomSet:
    """A subset of the nonempty atoms, as a bitset indexed by atom id.

    The atom for nonempty subset S (a variable bitmask) has id S - 1, so an
    n-variable ground set has exactly 2^n - 1 addressable atoms.
    """

    bits: int
    ambient: int

    def __post_init__(self) -> None:
        if self.ambient > MAX_GROUND_SET:
            raise CapExceeded(f"atom bitsets support at most {MAX_GROUND_SET} variables")
        if self.bits < 0 or self.bits >= 1 << ((1 << self.ambient) - 1):
            raise ValueError("atom bitset out of range for ambient size")

    @classmethod
    def empty(cls, ambient: int) -> "AtomSet":
        return cls(0, ambient)

    def __or__(self, other: "AtomSet") -> "AtomSet":
        return AtomSet(self.bits | other.bits, self.ambient)

    def __and__(self, other: "AtomSet") -> "AtomSet":
        return AtomSet(self.bits & other.bits, self.ambient)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def issubset(self, other: "AtomSet") -> bool:
        return self.bits & ~other.bits == 0

    def isdisjoint(self, other: "AtomSet") -> bool:
        return self.bits & other.bits == 0

    def atoms(self) -> Iterator[VarSet]:
        """Yield the member atoms as variable subsets, ascending by id."""
        bits = self.bits
        while bits:
            low = bits & -bits
            yield VarSet(low.bit_length())  # atom id k -> subset mask k + 1
            bits ^= low


@dataclass(frozen=True, slots=True)
class PositiveImeasure:
    """Nonnegative rational weights on the nonempty atoms.

    Atoms absent from ``weights`` carry weight 0.
    """

    weights: Mapping[VarSet, Fraction]
    ambient: int

    def __post_init__(self) -> None:
        for atom, w in self.weights.items():
            if not atom:
                raise ValueError("the empty atom does not exist")
            if not atom.fits(self.ambient):
                raise ValueError(f"atom {atom} outside ambient size {self.ambient}")
            if w < 0:
                raise ValueError(f"negative weight on atom {atom}")

    def weight(self, atom: VarSet) -> Fraction:
        return Fraction(self.weights.get(atom, 0))


def atoms_of(t: CiTriple, ambient: int) -> AtomSet:
    """Atoms covered by the triple: nonempty S with S∩x ≠ ∅, S∩y ≠ ∅ and
    S∩z = ∅.  Trivial triples cover nothing."""
    if ambient > MAX_GROUND_SET:
        raise CapExceeded(f"atom enumeration supports at most {MAX_GROUND_SET} variables")
    if t.trivial:
        return AtomSet.empty(ambient)
    x, y, z = t.x.bits, t.y.bits, t.z.bits
    bits = 0
    for s in range(1, 1 << ambient):
        if s & x and s & y and not s & z:
            bits |= 1 << (s - 1)
    return AtomSet(bits, ambient)


def atoms_of_set(s: CiSet) -> AtomSet:
    """Union of atoms_of over the members."""
    out = AtomSet.empty(s.ambient)
    for t in s:
        out = out | atoms_of(t, s.ambient)
    return out


@dataclass(frozen=True, slots=True)
class ImplicationResult:
    """Outcome of an implication test over positive polymatroids.

    On failure, ``witness`` puts weight 1 on the lowest-id uncovered atom;
    expanding it through measure_to_entropy gives an entropy vector with
    h(antecedents) = 0 and h(consequent) = 1.
    """

    implied: bool
    witness: PositiveImeasure | None = None

    def __bool__(self) -> bool:
        return self.implied


def positive_implies(s: CiSet, t: CiTriple) -> ImplicationResult:
    """Decide whether ``s`` exactly implies ``t`` over positive polymatroids
    (atom containment)."""
    covered = atoms_of_set(s)
    target = atoms_of(t, s.ambient)
    missing = target.bits & ~covered.bits
    if not missing:
        return ImplicationResult(True)
    low = missing & -missing
    atom = VarSet(low.bit_length())
    witness = PositiveImeasure({atom: Fraction(1)}, s.ambient)
    return ImplicationResult(False, witness)


def measure_to_entropy(m: PositiveImeasure) -> EntropyVector:
    """Entropy vector of an atom measure: h(α) sums the weights of the
    atoms meeting α.  Exact and polymatroid-checked."""
    n = m.ambient
    values = [Fraction(0)] * (1 << n)
    for atom, w in m.weights.items():
        if w == 0:
            continue
        a = atom.bits
        for mask in range(1, 1 << n):
            if mask & a:
                values[mask] += w
    vec = EntropyVector(n, tuple(values), exact=True)
    return vec.polymatroid_checked()


def prune_antecedents(s: CiSet, t: CiTriple) -> CiSet:
    """Drop antecedents whose atoms are disjoint from the consequent's.

    Requires that ``s`` implies ``t`` over positive polymatroids; the
    pruned set still does, since dropped members cover none of the
    consequent's atoms.
    """
    if not positive_implies(s, t):
        raise ValueError("prune_antecedents requires an implied consequent")
    target = atoms_of(t, s.ambient)
    kept = [sigma for sigma in s if not atoms_of(sigma, s.ambient).isdisjoint(target)]
    return CiSet.of(kept, s.ambient)
