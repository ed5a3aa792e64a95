"""Ground types for conditional-independence reasoning.

Conventions used throughout the package:

- The ground set of jointly distributed variables is indexed 0..n-1 and a
  set of variables is a bitmask over those indices (``VarSet``).
- A CI statement is an unordered triple (X;Y|Z).  In canonical form the
  conditioning set Z is removed from both sides; X and Y may overlap or be
  equal, since a functional dependency Z -> Y is the triple (Y;Y|Z) via
  h(Y|Z) = I(Y;Y|Z).
- Entropies are measured in bits (log base 2).
- An entropy vector assigns a real to every subset of the ground set, with
  value 0 on the empty set.  Vectors are either float-backed (derived from
  distributions) or rational-backed (synthetic polymatroids, LP vertices).
  Rational vectors are exact; converting a float vector to a rational one
  is deliberately unsupported.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Union

__all__ = [
    "CiapproxError",
    "CapExceeded",
    "MissingEntropyValue",
    "PolymatroidViolation",
    "VarSet",
    "CiTriple",
    "CiSet",
    "EntropyVector",
    "canonicalize",
    "triple_of",
    "eval_mi",
    "eval_sum",
    "classify",
    "FLOAT_TOL",
    "MAX_GROUND_SET",
]

#: comparison tolerance for float-backed entropy values
FLOAT_TOL = 1e-9

#: hard cap on the ground-set size for set/atom machinery (2^16 atoms)
MAX_GROUND_SET = 16


class CiapproxError(Exception):
    """Base class for errors raised by this package."""


class CapExceeded(CiapproxError):
    """An operation was asked to run above its configured size cap."""


class MissingEntropyValue(CiapproxError):
    """An entropy vector lacks a value for a required subset."""

    def __init__(self, subset: "VarSet"):
        self.subset = subset
        super().__init__(f"no entropy value for subset {subset}")


class PolymatroidViolation(CiapproxError):
    """An entropy vector failed a monotonicity or submodularity check."""


@dataclass(frozen=True, slots=True)
class VarSet:
    """A subset of the ground variable set, stored as a bitmask."""

    bits: int

    def __post_init__(self) -> None:
        if self.bits < 0:
            raise ValueError("variable bitmask must be nonnegative")

    @classmethod
    def of(cls, indices: Iterable[int]) -> "VarSet":
        bits = 0
        for i in indices:
            if i < 0:
                raise ValueError(f"negative variable index {i}")
            bits |= 1 << i
        return cls(bits)

    @classmethod
    def empty(cls) -> "VarSet":
        return cls(0)

    @classmethod
    def full(cls, n: int) -> "VarSet":
        return cls((1 << n) - 1)

    def __or__(self, other: "VarSet") -> "VarSet":
        return VarSet(self.bits | other.bits)

    def __and__(self, other: "VarSet") -> "VarSet":
        return VarSet(self.bits & other.bits)

    def __sub__(self, other: "VarSet") -> "VarSet":
        return VarSet(self.bits & ~other.bits)

    def __contains__(self, index: int) -> bool:
        return bool(self.bits >> index & 1)

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def issubset(self, other: "VarSet") -> bool:
        return self.bits & ~other.bits == 0

    def isdisjoint(self, other: "VarSet") -> bool:
        return self.bits & other.bits == 0

    def complement(self, n: int) -> "VarSet":
        return VarSet(~self.bits & (1 << n) - 1)

    def fits(self, n: int) -> bool:
        return self.bits < 1 << n

    def sort_key(self) -> tuple[int, ...]:
        """Lexicographic key on the ascending index sequence."""
        return tuple(self)

    def __str__(self) -> str:
        if not self.bits:
            return "{}"
        return "{" + ",".join(str(i) for i in self) + "}"


def _lex_le(a: VarSet, b: VarSet) -> bool:
    return a.sort_key() <= b.sort_key()


@dataclass(frozen=True, slots=True)
class CiTriple:
    """A canonical CI statement (x;y|z).

    Invariants: z is disjoint from x and y; the unordered pair {x,y} is
    stored with the lexicographically smaller member first.  ``trivial``
    marks triples whose mutual information is identically zero because one
    side emptied out under canonicalization.
    """

    x: VarSet
    y: VarSet
    z: VarSet
    trivial: bool = False

    def mentions(self) -> VarSet:
        return self.x | self.y | self.z

    def is_conditional(self) -> bool:
        """Whether the triple encodes a functional dependency z -> x."""
        return not self.trivial and self.x == self.y

    def __str__(self) -> str:
        body = f"{self.x};{self.y}"
        if self.z:
            body += f"|{self.z}"
        return f"({body})"


def canonicalize(x: VarSet, y: VarSet, z: VarSet) -> CiTriple:
    """Canonical form of the statement (x;y|z).

    Removes the conditioning set from both sides (which leaves the
    conditional mutual information unchanged) and orders the {x,y} pair.
    A triple whose x or y side empties out is flagged trivial rather than
    rejected.
    """
    xr = x - z
    yr = y - z
    if not _lex_le(xr, yr):
        xr, yr = yr, xr
    trivial = not xr or not yr
    return CiTriple(xr, yr, z, trivial)


def triple_of(x: Iterable[int], y: Iterable[int], z: Iterable[int] = ()) -> CiTriple:
    """Convenience constructor from index iterables."""
    return canonicalize(VarSet.of(x), VarSet.of(y), VarSet.of(z))


@dataclass(frozen=True, slots=True)
class CiSet:
    """An ordered, duplicate-free collection of canonical CI triples.

    Trivial triples are dropped at construction: they carry no information
    content (their mutual information is identically zero) and no atoms.
    """

    triples: tuple[CiTriple, ...]
    ambient: int

    @classmethod
    def of(cls, triples: Iterable[CiTriple], ambient: int) -> "CiSet":
        if ambient < 0 or ambient > MAX_GROUND_SET:
            raise CapExceeded(f"ambient size {ambient} outside [0, {MAX_GROUND_SET}]")
        seen: dict[CiTriple, None] = {}
        for t in triples:
            if t.trivial:
                continue
            if not t.mentions().fits(ambient):
                raise ValueError(f"triple {t} mentions variables outside ambient size {ambient}")
            seen.setdefault(t)
        return cls(tuple(seen), ambient)

    def __iter__(self) -> Iterator[CiTriple]:
        return iter(self.triples)

    def __len__(self) -> int:
        return len(self.triples)

    def __contains__(self, t: CiTriple) -> bool:
        return t in self.triples


Number = Union[int, float, Fraction]


@dataclass(frozen=True, slots=True)
class EntropyVector:
    """A real-valued function on all subsets of the ground set.

    ``values[mask]`` is the entropy of the subset with that bitmask; the
    empty set has value exactly 0.  ``exact`` distinguishes the rational
    backing from the float backing; ``checked`` records that the vector
    passed the polymatroid test (exactly when rational, within FLOAT_TOL
    when float).
    """

    n: int
    values: tuple[Number, ...]
    exact: bool
    checked: bool = False

    def __post_init__(self) -> None:
        if len(self.values) != 1 << self.n:
            raise ValueError("entropy vector must cover every subset of the ground set")
        if self.values[0] != 0:
            raise ValueError("entropy of the empty set must be 0")
        if self.exact and any(not isinstance(v, Rational) for v in self.values):
            raise TypeError("rational-backed vector given non-rational values; "
                            "float->rational conversion is unsupported")

    @classmethod
    def from_subset_values(cls, n: int, mapping: Mapping[VarSet, Number], *,
                           exact: bool) -> "EntropyVector":
        values: list[Number] = [0] * (1 << n)
        present = [False] * (1 << n)
        for vs, val in mapping.items():
            if not vs.fits(n):
                raise ValueError(f"subset {vs} outside ambient size {n}")
            values[vs.bits] = val
            present[vs.bits] = True
        for mask in range(1, 1 << n):
            if not present[mask]:
                raise MissingEntropyValue(VarSet(mask))
        return cls(n, tuple(values), exact=exact)

    @classmethod
    def zero(cls, n: int, *, exact: bool = True) -> "EntropyVector":
        v = cls(n, (Fraction(0),) * (1 << n) if exact else (0.0,) * (1 << n), exact=exact)
        return v.polymatroid_checked()

    def value(self, subset: VarSet) -> Number:
        if not subset.fits(self.n):
            raise MissingEntropyValue(subset)
        return self.values[subset.bits]

    def polymatroid_checked(self) -> "EntropyVector":
        """Return a checked copy, verifying monotonicity and elemental
        submodularity (exactly if rational-backed, within FLOAT_TOL if
        float-backed)."""
        tol = 0 if self.exact else FLOAT_TOL
        n, vals = self.n, self.values
        full = (1 << n) - 1
        for mask in range(full + 1):
            for i in range(n):
                if mask >> i & 1:
                    continue
                if vals[mask | 1 << i] < vals[mask] - tol:
                    raise PolymatroidViolation(
                        f"monotonicity fails: h({VarSet(mask | 1 << i)}) < h({VarSet(mask)})")
        for i in range(n):
            for j in range(i + 1, n):
                rest = full & ~(1 << i) & ~(1 << j)
                k = rest
                while True:
                    gain = (vals[k | 1 << i] + vals[k | 1 << j]
                            - vals[k | 1 << i | 1 << j] - vals[k])
                    if gain < -tol:
                        raise PolymatroidViolation(
                            f"submodularity fails on I({i};{j}|{VarSet(k)})")
                    if k == 0:
                        break
                    k = (k - 1) & rest
        return EntropyVector(self.n, self.values, self.exact, checked=True)


def eval_mi(h: EntropyVector, t: CiTriple) -> Number:
    """Conditional mutual information of the triple under ``h``:
    h(ZX) + h(ZY) - h(ZXY) - h(Z).  For x = y this is the conditional
    entropy h(X|Z)."""
    if not t.mentions().fits(h.n):
        raise MissingEntropyValue(t.mentions())
    zx = t.z.bits | t.x.bits
    zy = t.z.bits | t.y.bits
    v = h.values
    return v[zx] + v[zy] - v[zx | zy] - v[t.z.bits]


def eval_sum(h: EntropyVector, s: CiSet) -> Number:
    """Sum of eval_mi over the members of ``s``."""
    total: Number = Fraction(0) if h.exact else 0.0
    for t in s:
        total += eval_mi(h, t)
    return total


def classify(t: CiTriple, ambient: int) -> frozenset[str]:
    """Flags for a canonical triple: saturated (mentions every variable),
    marginal (empty conditioning set), conditional (x = y).  A triple may
    carry several flags; a flagless triple reports {'general'}."""
    flags = set()
    if t.mentions() == VarSet.full(ambient):
        flags.add("saturated")
    if not t.z:
        flags.add("marginal")
    if t.is_conditional():
        flags.add("conditional")
    if not flags:
        flags.add("general")
    return frozenset(flags)
