"""Graph separation semantics for Markov and Bayesian networks.

Undirected separation is plain reachability after deleting the separator.
Directed separation follows the trail-activation definitions: a trail is
active given Z when every head-to-head vertex on it is in Z or has a
descendant in Z, and every other vertex avoids Z.  We decide it by
breadth-first search over (vertex, arrival direction) states, which visits
exactly the endpoints of active trails, rather than via moralized
ancestral graphs; this keeps the blocking predicate testable verbatim.

Also here: the pairwise saturated basis of an entropy vector, the
independence graph it induces, and the recursive basis of a DAG (the per
vertex statements "X_i independent of its non-parent predecessors given
its parents") together with its inverse.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    CiSet,
    EntropyVector,
    FLOAT_TOL,
    VarSet,
    canonicalize,
    eval_mi,
)

__all__ = [
    "UGraph",
    "Dag",
    "u_separates",
    "d_separates",
    "pairwise_basis",
    "independence_graph",
    "recursive_basis",
    "dag_from_basis",
]


@dataclass(frozen=True, slots=True)
class UGraph:
    """Undirected graph on vertices 0..n-1 with bitmask adjacency."""

    n: int
    adj: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.adj) != self.n:
            raise ValueError("adjacency table must cover every vertex")
        for v, nb in enumerate(self.adj):
            if nb >> v & 1:
                raise ValueError(f"self-loop at vertex {v}")
            for u in VarSet(nb):
                if not self.adj[u] >> v & 1:
                    raise ValueError(f"asymmetric edge {v}-{u}")

    @classmethod
    def from_edges(cls, n: int, edges: list[tuple[int, int]]) -> "UGraph":
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj))

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in VarSet(self.adj[u]) if u < v]


def _check_disjoint(x: VarSet, y: VarSet, z: VarSet) -> None:
    if not x or not y:
        raise ValueError("separation queries need nonempty x and y")
    if not (x.isdisjoint(y) and x.isdisjoint(z) and y.isdisjoint(z)):
        raise ValueError("separation queries need pairwise disjoint x, y, z")


def u_separates(g: UGraph, x: VarSet, y: VarSet, z: VarSet) -> bool:
    """Whether z is an xy-separator: no path joins x to y once z and its
    incident edges are removed."""
    _check_disjoint(x, y, z)
    blocked = z.bits
    reached = x.bits & ~blocked
    frontier = reached
    while frontier:
        nxt = 0
        for v in VarSet(frontier):
            nxt |= g.adj[v]
        frontier = nxt & ~reached & ~blocked
        reached |= frontier
    return not reached & y.bits


@dataclass(frozen=True, slots=True)
class Dag:
    """DAG on vertices 0..n-1: per-vertex parent masks plus a topological
    order (parents precede children in it)."""

    n: int
    parents: tuple[int, ...]
    order: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.order) != list(range(self.n)) or len(self.parents) != self.n:
            raise ValueError("order must be a permutation and parents must cover every vertex")
        earlier = 0
        for v in self.order:
            if self.parents[v] & ~earlier:
                raise ValueError(f"parents of vertex {v} are not all earlier in the order")
            earlier |= 1 << v

    @classmethod
    def from_parents(cls, parents: list[int], order: tuple[int, ...] | None = None) -> "Dag":
        n = len(parents)
        if order is None:
            order = _toposort(n, parents)
        return cls(n, tuple(parents), tuple(order))

    def children(self) -> tuple[int, ...]:
        out = [0] * self.n
        for v, ps in enumerate(self.parents):
            for p in VarSet(ps):
                out[p] |= 1 << v
        return tuple(out)

    def descendants_of(self, seed: int) -> int:
        """Vertices with a directed path from any vertex in the seed mask
        (the seed itself excluded unless reachable)."""
        ch = self.children()
        reached = 0
        frontier = seed
        while frontier:
            nxt = 0
            for v in VarSet(frontier):
                nxt |= ch[v]
            frontier = nxt & ~reached
            reached |= frontier
        return reached


def _toposort(n: int, parents: list[int]) -> tuple[int, ...]:
    indeg = [parents[v].bit_count() for v in range(n)]
    ready = deque(v for v in range(n) if indeg[v] == 0)
    children = [0] * n
    for v, ps in enumerate(parents):
        for p in VarSet(ps):
            children[p] |= 1 << v
    out: list[int] = []
    while ready:
        v = ready.popleft()
        out.append(v)
        for c in VarSet(children[v]):
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
    if len(out) != n:
        raise ValueError("parent structure contains a directed cycle")
    return tuple(out)


def d_separates(d: Dag, x: VarSet, y: VarSet, z: VarSet) -> bool:
    """Whether z d-separates x from y: every trail between them is blocked.

    Reachability over (vertex, direction) states: arriving at v along an
    incoming edge may continue to children while v is unobserved, and may
    bounce to parents only when v is in z or has a descendant there (the
    head-to-head activation); arriving along an outgoing edge may continue
    anywhere while v is unobserved.
    """
    _check_disjoint(x, y, z)
    children = d.children()
    in_z_or_above = z.bits
    for v in range(d.n):
        if d.descendants_of(1 << v) & z.bits:
            in_z_or_above |= 1 << v

    # state encoding: (vertex, came_from_parent)
    seen_down = 0       # reached along an edge parent -> v
    seen_up = x.bits    # reached against an edge (from a child), or a source
    queue: deque[tuple[int, bool]] = deque((s, False) for s in x)
    while queue:
        v, came_down = queue.popleft()
        vbit = 1 << v
        if vbit & y.bits:
            return False
        if came_down:
            if vbit & in_z_or_above:  # head-to-head continuation
                for p in VarSet(d.parents[v]):
                    if not seen_up >> p & 1:
                        seen_up |= 1 << p
                        queue.append((p, False))
            if not vbit & z.bits:
                for c in VarSet(children[v]):
                    if not seen_down >> c & 1:
                        seen_down |= 1 << c
                        queue.append((c, True))
        else:
            if not vbit & z.bits:
                for p in VarSet(d.parents[v]):
                    if not seen_up >> p & 1:
                        seen_up |= 1 << p
                        queue.append((p, False))
                for c in VarSet(children[v]):
                    if not seen_down >> c & 1:
                        seen_down |= 1 << c
                        queue.append((c, True))
    return True


def pairwise_basis(h: EntropyVector, eps: float | Fraction = 0) -> CiSet:
    """All saturated vertex-pair statements (u;v|rest) whose conditional
    mutual information under ``h`` is at most eps (within FLOAT_TOL for
    float-backed vectors, exactly for rational ones)."""
    if not h.checked:
        raise ValueError("pairwise_basis requires a polymatroid-checked vector")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    n = h.n
    slack = 0 if h.exact else FLOAT_TOL
    full = VarSet.full(n)
    out = []
    for u in range(n):
        for v in range(u + 1, n):
            pair = VarSet.of([u, v])
            t = canonicalize(VarSet.of([u]), VarSet.of([v]), full - pair)
            if eval_mi(h, t) <= eps + slack:
                out.append(t)
    return CiSet.of(out, n)


def independence_graph(pairs: CiSet, n: int) -> UGraph:
    """Graph whose edges are the vertex pairs *not* present in the
    pairwise basis."""
    missing = [0] * n
    for t in pairs:
        if len(t.x) != 1 or len(t.y) != 1 or t.mentions() != VarSet.full(n):
            raise ValueError(f"{t} is not a saturated vertex-pair statement")
        u, v = next(iter(t.x)), next(iter(t.y))
        missing[u] |= 1 << v
        missing[v] |= 1 << u
    full = (1 << n) - 1
    adj = tuple((full & ~(1 << v)) & ~missing[v] for v in range(n))
    return UGraph(n, adj)


def recursive_basis(d: Dag) -> CiSet:
    """The per-vertex statements (X_i ; predecessors minus parents | parents)
    read along the topological order; vertices whose parents exhaust their
    predecessors contribute trivial statements, which are dropped."""
    out = []
    earlier = 0
    for v in d.order:
        rest = earlier & ~d.parents[v]
        out.append(canonicalize(VarSet(1 << v), VarSet(rest), VarSet(d.parents[v])))
        earlier |= 1 << v
    return CiSet.of(out, d.n)


def dag_from_basis(s: CiSet, order: tuple[int, ...]) -> Dag:
    """Reconstruct the DAG encoded by a recursive basis.

    Each member must have the form (X_i ; predecessors minus P | P) for
    the vertex X_i it describes; vertices without a row default to
    "parents = all predecessors" (the case whose row is trivial).
    """
    n = s.ambient
    if sorted(order) != list(range(n)):
        raise ValueError("order must be a permutation of the ground set")
    earlier_mask = [0] * n
    earlier = 0
    for v in order:
        earlier_mask[v] = earlier
        earlier |= 1 << v

    parents = [earlier_mask[v] for v in range(n)]
    claimed = [False] * n
    for t in s:
        vertex: int | None = None
        for side, other in ((t.x, t.y), (t.y, t.x)):
            if len(side) == 1:
                v = next(iter(side))
                if (other.bits | t.z.bits) == earlier_mask[v] and other.bits:
                    vertex = v
                    parents[v] = t.z.bits
                    break
        if vertex is None:
            raise ValueError(f"{t} is not a recursive-basis row for order {order}")
        if claimed[vertex]:
            raise ValueError(f"two recursive-basis rows describe vertex {vertex}")
        claimed[vertex] = True
    return Dag(n, tuple(parents), tuple(order))
