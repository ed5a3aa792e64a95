"""Fixed-point closure of CI sets under the semigraphoid axioms.

The derivation universe is the set of canonical triples with pairwise
disjoint sides over the ambient ground set, plus conditional triples
(x = y), which are carried as members but do not fire axioms.  Symmetry is
implicit in the canonical unordered-pair representation; the remaining
axioms are

    decomposition   (X;YW|Z)             ->  (X;Y|Z)
    weak union      (X;YW|Z)             ->  (X;Y|ZW)
    contraction     (X;Y|Z), (X;W|YZ)    ->  (X;YW|Z)
    intersection    (X;Y|ZW), (X;W|ZY)   ->  (X;YW|Z)   [graphoid mode only]

The first three hold for every polymatroid; intersection holds only on a
strict subset of distributions (e.g. strictly positive ones), so the
graphoid closure is deliberately not sound over the full cone.

The closure is a deterministic worklist fixed point: triples are processed
in FIFO order and axioms fire in the order listed above, so derivation
traces are reproducible run to run.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .core import CapExceeded, CiSet, CiTriple, VarSet, canonicalize

__all__ = ["ClosureResult", "semigraphoid_closure", "graphoid_closure", "derives",
           "CLOSURE_CAP"]

#: ground-set cap for closure computation (the universe grows like 4^n)
CLOSURE_CAP = 8

Trace = dict[CiTriple, tuple[str, tuple[CiTriple, ...]]]


@dataclass(frozen=True, slots=True)
class ClosureResult:
    """A closed CI set, with an optional derivation trace mapping each
    derived triple to the axiom and premises that first produced it."""

    closure: CiSet
    axiom_trace: Trace | None = None

    def __contains__(self, t: CiTriple) -> bool:
        return t.trivial or t in self.closure

    def derived(self) -> Iterator[CiTriple]:
        """Members of the closure that were not in the input."""
        if self.axiom_trace is None:
            raise ValueError("closure was computed without tracing")
        return iter(self.axiom_trace)


def _subsets(bits: int) -> Iterator[int]:
    """Nonempty subsets of a bitmask."""
    sub = bits
    while sub:
        yield sub
        sub = (sub - 1) & bits


def _close(s: CiSet, *, intersection: bool, trace: bool) -> ClosureResult:
    n = s.ambient
    if n > CLOSURE_CAP:
        raise CapExceeded(f"closure supports at most {CLOSURE_CAP} variables, got {n}")

    seen: dict[CiTriple, None] = {}
    traces: Trace = {}
    # orientation index: (side bits, cond bits) -> list of other-side bits
    by_side_cond: dict[tuple[int, int], list[int]] = {}
    work: list[CiTriple] = []

    def add(t: CiTriple, axiom: str, premises: tuple[CiTriple, ...]) -> None:
        if t.trivial or t in seen:
            return
        seen[t] = None
        if axiom and trace:
            traces[t] = (axiom, premises)
        if t.is_conditional():
            return  # inert member: no axiom fires on a functional dependency
        work.append(t)
        by_side_cond.setdefault((t.x.bits, t.z.bits), []).append(t.y.bits)
        if t.x != t.y:
            by_side_cond.setdefault((t.y.bits, t.z.bits), []).append(t.x.bits)

    def member(x: int, y: int, z: int) -> CiTriple | None:
        t = canonicalize(VarSet(x), VarSet(y), VarSet(z))
        return t if t in seen else None

    for t in s:
        add(t, "", ())

    head = 0
    while head < len(work):
        t = work[head]
        head += 1
        orientations = [(t.x.bits, t.y.bits, t.z.bits)]
        if t.x != t.y:
            orientations.append((t.y.bits, t.x.bits, t.z.bits))
        for x, y, z in orientations:
            if y & (y - 1):  # axioms that split y need |y| >= 2
                for w in _subsets(y):
                    if w == y:
                        continue
                    add(canonicalize(VarSet(x), VarSet(y & ~w), VarSet(z)),
                        "decomposition", (t,))
                    add(canonicalize(VarSet(x), VarSet(y & ~w), VarSet(z | w)),
                        "weak_union", (t,))
            # contraction, this triple as (X;Y|Z): partner (X;W|YZ)
            for w in by_side_cond.get((x, y | z), ()):
                partner = member(x, w, y | z)
                if partner is not None:
                    add(canonicalize(VarSet(x), VarSet(y | w), VarSet(z)),
                        "contraction", (t, partner))
            # contraction, this triple as (X;W|YZ): split the condition
            for ysplit in _subsets(z):
                partner = member(x, ysplit, z & ~ysplit)
                if partner is not None:
                    add(canonicalize(VarSet(x), VarSet(y | ysplit), VarSet(z & ~ysplit)),
                        "contraction", (partner, t))
            if intersection:
                # (X;Y|ZW), (X;W|ZY) -> (X;YW|Z); one enumeration covers
                # both premise roles by the y/w symmetry of the axiom
                for w in _subsets(z):
                    partner = member(x, w, (z & ~w) | y)
                    if partner is not None:
                        add(canonicalize(VarSet(x), VarSet(y | w), VarSet(z & ~w)),
                            "intersection", (t, partner))

    closure = CiSet.of(seen, n)
    return ClosureResult(closure, traces if trace else None)


@lru_cache(maxsize=4096)
def _close_untraced(s: CiSet, intersection: bool) -> ClosureResult:
    return _close(s, intersection=intersection, trace=False)


def semigraphoid_closure(s: CiSet, *, trace: bool = False) -> ClosureResult:
    """Smallest superset of ``s`` closed under symmetry, decomposition,
    weak union and contraction."""
    if trace:
        return _close(s, intersection=False, trace=True)
    return _close_untraced(s, False)


def graphoid_closure(s: CiSet, *, trace: bool = False) -> ClosureResult:
    """Semigraphoid closure with the intersection axiom enabled."""
    if trace:
        return _close(s, intersection=True, trace=True)
    return _close_untraced(s, True)


def derives(s: CiSet, t: CiTriple, mode: str) -> bool:
    """Whether the canonical triple ``t`` lies in the closure of ``s``
    under the chosen axiom system ('semigraphoid' or 'graphoid')."""
    if mode == "semigraphoid":
        return t in semigraphoid_closure(s)
    if mode == "graphoid":
        return t in graphoid_closure(s)
    raise ValueError(f"unknown axiom mode {mode!r}")
