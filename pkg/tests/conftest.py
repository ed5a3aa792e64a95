"""Shared helpers: triple builders, seeded generators, independent oracles."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from ciapprox.core import CiSet, CiTriple, VarSet, canonicalize
from ciapprox.imeasure import PositiveImeasure, measure_to_entropy


def mk(x, y, z=()) -> CiTriple:
    return canonicalize(VarSet.of(x), VarSet.of(y), VarSet.of(z))


def cs(n, *triples) -> CiSet:
    return CiSet.of(triples, n)


def disjoint_triples(n: int) -> list[CiTriple]:
    """All canonical triples with pairwise disjoint sides, nonempty x, y."""
    out: dict[CiTriple, None] = {}
    for assign in itertools.product(range(4), repeat=n):
        x = y = z = 0
        for i, role in enumerate(assign):
            if role == 0:
                x |= 1 << i
            elif role == 1:
                y |= 1 << i
            elif role == 2:
                z |= 1 << i
        if x and y:
            out.setdefault(canonicalize(VarSet(x), VarSet(y), VarSet(z)))
    return list(out)


def conditional_triples(n: int) -> list[CiTriple]:
    """All canonical functional-dependency triples (x;x|z)."""
    out: dict[CiTriple, None] = {}
    for assign in itertools.product(range(3), repeat=n):
        x = z = 0
        for i, role in enumerate(assign):
            if role == 0:
                x |= 1 << i
            elif role == 1:
                z |= 1 << i
        if x:
            out.setdefault(canonicalize(VarSet(x), VarSet(x), VarSet(z)))
    return list(out)


def random_triple(rng: random.Random, n: int, *, allow_conditional: bool = True) -> CiTriple:
    while True:
        roles = [rng.randrange(4) for _ in range(n)]
        x = VarSet.of(i for i, r in enumerate(roles) if r == 0)
        y = VarSet.of(i for i, r in enumerate(roles) if r == 1)
        z = VarSet.of(i for i, r in enumerate(roles) if r == 2)
        if allow_conditional and rng.random() < 0.2:
            y = x
        t = canonicalize(x, y, z)
        if not t.trivial:
            return t


def random_positive_measure(rng: random.Random, n: int, *,
                            zero_prob: float = 0.5, den: int = 64) -> PositiveImeasure:
    weights = {}
    for mask in range(1, 1 << n):
        if rng.random() >= zero_prob:
            weights[VarSet(mask)] = Fraction(rng.randrange(1, 4 * den), den)
    return PositiveImeasure(weights, n)


def random_polymatroid(rng: random.Random, n: int):
    """Exact polymatroid sampled through a random positive atom measure."""
    return measure_to_entropy(random_positive_measure(rng, n))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xC1A9)


#: one (label, status, seconds) entry per acceptance criterion, filled by
#: the decorator in test_acceptance.py
ACCEPTANCE_RESULTS: list[tuple[str, str, float]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.write_sep("-", "acceptance criteria")
        for label, status, secs in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(f"ACCEPTANCE {label}: {status} ({secs:.1f}s)")
