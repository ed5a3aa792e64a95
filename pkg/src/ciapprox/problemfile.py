"""Text formats: implication problem files, DAG/graph files, distribution
files.

Problem file grammar (one directive per line, ``#`` comments allowed)::

    vars: A B C
    assume: I(A;B|C) I(A;C|B)
    query: I(A;BC)
    mode: minlambda
    lambda: 7/2          # optional parameters: lambda, eps, x, y

A CI statement is ``I(group;group)`` or ``I(group;group|group)`` where a
group is one or more declared variable names, juxtaposed or separated by
spaces/commas; juxtaposed names resolve by longest declared name first.
A statement with equal sides, e.g. ``I(A;A|B)``, is the functional
dependency B -> A.

DAG files declare ``vars:`` then ``node X parents Y Z`` lines (vertices
without a line have no parents); undirected graph files declare ``vars:``
then ``edge A B`` lines.

Distribution files declare ``vars:`` then one ``v1 v2 ... : prob`` line
per state of the binary variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .core import CiapproxError, CiSet, CiTriple, VarSet, canonicalize
from .distmodel import JointDistribution, parse_distribution
from .graphsep import Dag, UGraph

__all__ = [
    "ParseError",
    "ProblemFile",
    "MODES",
    "parse_statement",
    "render_triple",
    "parse_problem",
    "serialize_problem",
    "parse_dag_file",
    "render_dag_file",
    "parse_ugraph_file",
    "parse_distribution_file",
]

MODES = ("positive", "shannon", "semigraphoid", "graphoid", "minlambda", "checklambda")

PARAM_KEYS = ("lambda", "eps", "x", "y")


class ParseError(CiapproxError):
    """A diagnostic with 1-based line and column."""

    def __init__(self, message: str, line: int, col: int = 1):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, col {col}: {message}")


@dataclass(frozen=True, slots=True)
class ProblemFile:
    vars: tuple[str, ...]
    assume: CiSet
    query: tuple[CiTriple, ...]
    mode: str
    params: dict[str, str] = field(default_factory=dict)


def _split_group(group: str, names: tuple[str, ...], line: int, col: int) -> VarSet:
    by_length = sorted(names, key=len, reverse=True)
    indices: list[int] = []
    for token in re.split(r"[,\s]+", group.strip()):
        if not token:
            continue
        rest = token
        while rest:
            for nm in by_length:
                if rest.startswith(nm):
                    indices.append(names.index(nm))
                    rest = rest[len(nm):]
                    break
            else:
                raise ParseError(f"unknown variable at {rest!r}", line, col)
    return VarSet.of(indices)


_STMT = re.compile(r"^I\(([^;|()]+);([^;|()]+)(?:\|([^;|()]*))?\)$")


def parse_statement(text: str, names: tuple[str, ...],
                    line: int = 1, col: int = 1) -> CiTriple:
    """Parse one ``I(X;Y|Z)`` statement to a canonical triple."""
    m = _STMT.match(text.strip())
    if not m:
        raise ParseError(f"malformed CI statement {text!r}", line, col)
    x = _split_group(m.group(1), names, line, col)
    y = _split_group(m.group(2), names, line, col)
    z = _split_group(m.group(3) or "", names, line, col)
    if not x or not y:
        raise ParseError(f"CI statement {text!r} has an empty side", line, col)
    return canonicalize(x, y, z)


def render_triple(t: CiTriple, names: tuple[str, ...]) -> str:
    def group(vs: VarSet) -> str:
        return "".join(names[i] for i in vs)

    body = f"{group(t.x)};{group(t.y)}"
    if t.z:
        body += f"|{group(t.z)}"
    return f"I({body})"


def _directive_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_problem(text: str) -> ProblemFile:
    names: tuple[str, ...] | None = None
    assume: list[CiTriple] = []
    query: list[CiTriple] = []
    mode: str | None = None
    params: dict[str, str] = {}
    saw_assume = saw_query = False

    for lineno, line in _directive_lines(text):
        key, sep, rest = line.partition(":")
        key = key.strip().lower()
        if not sep:
            raise ParseError(f"expected 'key: value', got {line!r}", lineno)
        rest = rest.strip()
        if key == "vars":
            if names is not None:
                raise ParseError("duplicate vars line", lineno)
            names = tuple(rest.split())
            if len(set(names)) != len(names) or not names:
                raise ParseError("vars must be distinct and nonempty", lineno)
        elif key in ("assume", "query"):
            if names is None:
                raise ParseError(f"{key} before vars", lineno)
            col = line.index(":") + 2
            stmts = [parse_statement(tok, names, lineno, col) for tok in rest.split()]
            if key == "assume":
                saw_assume = True
                assume.extend(stmts)
            else:
                saw_query = True
                query.extend(stmts)
        elif key == "mode":
            if mode is not None:
                raise ParseError("duplicate mode line", lineno)
            if rest not in MODES:
                raise ParseError(f"unknown mode {rest!r}; choose from {', '.join(MODES)}", lineno)
            mode = rest
        elif key in PARAM_KEYS:
            if key in params:
                raise ParseError(f"duplicate parameter {key!r}", lineno)
            params[key] = rest
        else:
            raise ParseError(f"unknown directive {key!r}", lineno)

    if names is None:
        raise ParseError("missing vars line", 1)
    if mode is None:
        raise ParseError("missing mode line", 1)
    if not saw_query:
        raise ParseError("missing query line", 1)
    del saw_assume
    return ProblemFile(
        vars=names,
        assume=CiSet.of(assume, len(names)),
        query=tuple(query),
        mode=mode,
        params=params,
    )


def serialize_problem(p: ProblemFile) -> str:
    lines = ["vars: " + " ".join(p.vars)]
    if len(p.assume):
        lines.append("assume: " + " ".join(render_triple(t, p.vars) for t in p.assume))
    lines.append("query: " + " ".join(render_triple(t, p.vars) for t in p.query))
    lines.append(f"mode: {p.mode}")
    for key in PARAM_KEYS:
        if key in p.params:
            lines.append(f"{key}: {p.params[key]}")
    return "\n".join(lines) + "\n"


def parse_lambda(raw: str, line: int = 1) -> Fraction:
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"lambda must be a rational like 7/2, got {raw!r}", line) from None


def parse_dag_file(text: str) -> tuple[tuple[str, ...], Dag]:
    names: tuple[str, ...] | None = None
    parent_lists: dict[int, int] = {}
    for lineno, line in _directive_lines(text):
        if line.lower().startswith("vars:"):
            names = tuple(line.split(":", 1)[1].split())
            continue
        tokens = line.split()
        if tokens[0] != "node" or "parents" not in tokens:
            raise ParseError(f"expected 'node X parents ...', got {line!r}", lineno)
        if names is None:
            raise ParseError("node line before vars", lineno)
        sep = tokens.index("parents")
        if sep != 2:
            raise ParseError("exactly one node name per line", lineno)
        try:
            v = names.index(tokens[1])
            mask = 0
            for nm in tokens[sep + 1:]:
                mask |= 1 << names.index(nm)
        except ValueError:
            raise ParseError(f"undeclared variable in {line!r}", lineno) from None
        if v in parent_lists:
            raise ParseError(f"duplicate node line for {tokens[1]}", lineno)
        parent_lists[v] = mask
    if names is None:
        raise ParseError("missing vars line", 1)
    parents = [parent_lists.get(v, 0) for v in range(len(names))]
    try:
        return names, Dag.from_parents(parents)
    except ValueError as exc:
        raise ParseError(str(exc), 1) from None


def render_dag_file(names: tuple[str, ...], d: Dag) -> str:
    lines = ["vars: " + " ".join(names)]
    for v in range(d.n):
        if d.parents[v]:
            ps = " ".join(names[p] for p in VarSet(d.parents[v]))
            lines.append(f"node {names[v]} parents {ps}")
    return "\n".join(lines) + "\n"


def parse_ugraph_file(text: str) -> tuple[tuple[str, ...], UGraph]:
    names: tuple[str, ...] | None = None
    edges: list[tuple[int, int]] = []
    for lineno, line in _directive_lines(text):
        if line.lower().startswith("vars:"):
            names = tuple(line.split(":", 1)[1].split())
            continue
        tokens = line.split()
        if tokens[0] != "edge" or len(tokens) != 3:
            raise ParseError(f"expected 'edge A B', got {line!r}", lineno)
        if names is None:
            raise ParseError("edge line before vars", lineno)
        try:
            edges.append((names.index(tokens[1]), names.index(tokens[2])))
        except ValueError:
            raise ParseError(f"undeclared variable in {line!r}", lineno) from None
    if names is None:
        raise ParseError("missing vars line", 1)
    return names, UGraph.from_edges(len(names), edges)


def parse_distribution_file(text: str) -> JointDistribution:
    names: tuple[str, ...] | None = None
    body: list[str] = []
    for _, line in _directive_lines(text):
        if line.lower().startswith("vars:"):
            names = tuple(line.split(":", 1)[1].split())
        else:
            body.append(line)
    if names is None:
        raise ParseError("missing vars line", 1)
    return parse_distribution("\n".join(body), names)
