"""HTTP service exposing the implication engines.

One endpoint per capability: implication problems (atom containment,
Shannon-cone LP, semigraphoid/graphoid closure, minimal approximation
factor, factor certification), graph separation queries, recursive-basis
extraction, entropy vectors of explicit distributions, the strictly
positive counterexample family, and the antecedent-class bound checker.

Requests and responses are pydantic models with JSON-friendly payloads:
rationals travel as strings like ``"7/2"``, variable sets as name lists.
The command line client drives this app in-process by default, or over
the network against ``ciapprox serve``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .core import (
    CapExceeded,
    CiapproxError,
    CiSet,
    CiTriple,
    EntropyVector,
    VarSet,
    canonicalize,
    eval_mi,
)
from .distmodel import (
    counterexample_closed_forms,
    entropy_vector,
    intersection_counterexample,
)
from .graphoid import derives
from .graphsep import Dag, UGraph, d_separates, recursive_basis, u_separates
from .imeasure import positive_implies
from .problemfile import (
    ProblemFile,
    parse_distribution_file,
    parse_lambda,
    parse_statement,
    render_triple,
)
from .shannon import check_lambda, lp_cap, min_lambda, shannon_ei, verify_theorem_bound

SWEEP_GRID = (1e-2, 1e-3, 1e-4, 1e-5)

app = FastAPI(title="ciapprox", version=__version__)


def _names(vars: list[str]) -> tuple[str, ...]:
    if not vars or len(set(vars)) != len(vars):
        raise HTTPException(422, "vars must be distinct and nonempty")
    return tuple(vars)


def _varset(names: tuple[str, ...], members: list[str]) -> VarSet:
    try:
        return VarSet.of(names.index(m) for m in members)
    except ValueError:
        unknown = next(m for m in members if m not in names)
        raise HTTPException(422, f"undeclared variable {unknown!r}") from None


def _triples(names: tuple[str, ...], statements: list[str]) -> list[CiTriple]:
    try:
        return [parse_statement(s, names) for s in statements]
    except CiapproxError as exc:
        raise HTTPException(422, str(exc)) from None


def _frac(f: Fraction) -> str:
    return str(f)


def _vector_payload(h: EntropyVector, names: tuple[str, ...]) -> dict[str, str | float]:
    out: dict[str, str | float] = {}
    for mask in range(1, 1 << h.n):
        key = ",".join(names[i] for i in VarSet(mask))
        v = h.values[mask]
        out[key] = _frac(v) if h.exact else float(v)
    return out


class HealthResponse(BaseModel):
    status: str
    version: str
    lp_cap: int


class ProblemRequest(BaseModel):
    vars: list[str]
    assume: list[str] = Field(default_factory=list)
    query: list[str]
    mode: str | None = None
    params: dict[str, str] = Field(default_factory=dict)


class QueryOutcome(BaseModel):
    query: str
    mode: str
    answer: str
    positive: bool
    detail: dict[str, Any] = Field(default_factory=dict)


class ProblemResponse(BaseModel):
    results: list[QueryOutcome]
    all_positive: bool


class SeparationRequest(BaseModel):
    vars: list[str]
    edges: list[list[str]] = Field(default_factory=list)   # undirected queries
    parents: dict[str, list[str]] = Field(default_factory=dict)  # directed queries
    x: list[str]
    y: list[str]
    z: list[str] = Field(default_factory=list)


class SeparationResponse(BaseModel):
    separated: bool
    criterion: str


class BasisRequest(BaseModel):
    vars: list[str]
    parents: dict[str, list[str]] = Field(default_factory=dict)


class BasisResponse(BaseModel):
    statements: list[str]


class EntropyRequest(BaseModel):
    text: str  # distribution file: vars header plus state lines


class EntropyResponse(BaseModel):
    vars: list[str]
    entropies: dict[str, float]


class CounterexamplePoint(BaseModel):
    x: float
    y: float
    i_cond_sum: float
    i_joint: float
    closed_i_cond_sum: float
    closed_i_joint: float
    err_i_cond_sum: float
    err_i_joint: float
    ratio: float


class CounterexampleRequest(BaseModel):
    x: float | None = None
    y: float | None = None
    sweep: bool = False


class CounterexampleResponse(BaseModel):
    points: list[CounterexamplePoint]
    entropies: dict[str, float] | None = None
    closed_entropies: dict[str, float] | None = None


class VerifyBoundRequest(BaseModel):
    vars: list[str]
    assume: list[str]
    query: str
    kind: str


class VerifyBoundResponse(BaseModel):
    kind: str
    premise: str
    premise_holds: bool
    bound: str
    lam: str
    certificate: str | None
    violated: bool
    positive: bool


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__, lp_cap=lp_cap())


def run_problem(problem: ProblemFile) -> list[QueryOutcome]:
    """Dispatch every query of a parsed problem to its engine."""
    names = problem.vars
    mode = problem.mode
    assume = problem.assume
    results: list[QueryOutcome] = []
    for t in problem.query:
        rendered = render_triple(t, names)
        detail: dict[str, Any] = {}
        if mode == "positive":
            res = positive_implies(assume, t)
            positive = res.implied
            answer = "implied" if positive else "not-implied"
            if res.witness is not None:
                atom = next(iter(res.witness.weights))
                detail["witness_atom"] = [names[i] for i in atom]
        elif mode == "shannon":
            res = shannon_ei(assume, t)
            positive = res.holds
            answer = "holds" if positive else "refuted"
            if res.counterexample is not None:
                detail["counterexample"] = _vector_payload(res.counterexample, names)
        elif mode in ("semigraphoid", "graphoid"):
            positive = derives(assume, t, mode)
            answer = "derived" if positive else "not-derived"
        elif mode == "minlambda":
            res = min_lambda(assume, t)
            positive = not res.unbounded
            answer = "lambda" if positive else "unbounded"
            if positive:
                detail["lambda"] = _frac(res.value)
                detail["certificate"] = res.certificate.render(names)
        elif mode == "checklambda":
            lam = parse_lambda(problem.params.get("lambda", ""))
            res = check_lambda(assume, t, lam)
            positive = res.certified
            answer = "certified" if positive else "refuted"
            if positive:
                detail["certificate"] = res.certificate.render(names)
            else:
                detail["refutation"] = _vector_payload(res.refutation, names)
        else:
            raise CiapproxError(f"unknown mode {mode!r}")
        results.append(QueryOutcome(query=rendered, mode=mode, answer=answer,
                                    positive=positive, detail=detail))
    return results


@app.post("/implies", response_model=ProblemResponse)
def implies(req: ProblemRequest) -> ProblemResponse:
    names = _names(req.vars)
    mode = req.mode or "shannon"
    if mode not in ("positive", "shannon", "semigraphoid", "graphoid",
                    "minlambda", "checklambda"):
        raise HTTPException(422, f"unknown mode {mode!r}")
    problem = ProblemFile(
        vars=names,
        assume=CiSet.of(_triples(names, req.assume), len(names)),
        query=tuple(_triples(names, req.query)),
        mode=mode,
        params=req.params,
    )
    try:
        results = run_problem(problem)
    except CapExceeded as exc:
        raise HTTPException(422, str(exc)) from None
    except CiapproxError as exc:
        raise HTTPException(422, str(exc)) from None
    return ProblemResponse(results=results,
                           all_positive=all(r.positive for r in results))


def _dag_from_request(names: tuple[str, ...], parents: dict[str, list[str]]) -> Dag:
    masks = [0] * len(names)
    for child, ps in parents.items():
        if child not in names:
            raise HTTPException(422, f"undeclared variable {child!r}")
        masks[names.index(child)] = _varset(names, ps).bits
    try:
        return Dag.from_parents(masks)
    except ValueError as exc:
        raise HTTPException(422, str(exc)) from None


@app.post("/dsep", response_model=SeparationResponse)
def dsep(req: SeparationRequest) -> SeparationResponse:
    names = _names(req.vars)
    dag = _dag_from_request(names, req.parents)
    try:
        sep = d_separates(dag, _varset(names, req.x), _varset(names, req.y),
                          _varset(names, req.z))
    except ValueError as exc:
        raise HTTPException(422, str(exc)) from None
    return SeparationResponse(separated=sep, criterion="d-separation")


@app.post("/usep", response_model=SeparationResponse)
def usep(req: SeparationRequest) -> SeparationResponse:
    names = _names(req.vars)
    try:
        g = UGraph.from_edges(len(names),
                              [(names.index(a), names.index(b)) for a, b in req.edges])
        sep = u_separates(g, _varset(names, req.x), _varset(names, req.y),
                          _varset(names, req.z))
    except ValueError as exc:
        raise HTTPException(422, str(exc)) from None
    return SeparationResponse(separated=sep, criterion="graph separation")


@app.post("/basis", response_model=BasisResponse)
def basis(req: BasisRequest) -> BasisResponse:
    names = _names(req.vars)
    dag = _dag_from_request(names, req.parents)
    rb = recursive_basis(dag)
    return BasisResponse(statements=[render_triple(t, names) for t in rb])


@app.post("/entropy", response_model=EntropyResponse)
def entropy(req: EntropyRequest) -> EntropyResponse:
    try:
        dist = parse_distribution_file(req.text)
        h = entropy_vector(dist)
    except (CiapproxError, ValueError) as exc:
        raise HTTPException(422, str(exc)) from None
    payload = {k: float(v) for k, v in _vector_payload(h, dist.names).items()}
    return EntropyResponse(vars=list(dist.names), entropies=payload)


def _counterexample_point(x: float, y: float) -> CounterexamplePoint:
    h = entropy_vector(intersection_counterexample(x, y))
    closed = counterexample_closed_forms(x, y)
    A, B, C = VarSet.of([0]), VarSet.of([1]), VarSet.of([2])
    i_ab_c = eval_mi(h, canonicalize(A, B, C))
    i_ac_b = eval_mi(h, canonicalize(A, C, B))
    i_a_bc = eval_mi(h, canonicalize(A, B | C, VarSet.empty()))
    cond_sum = i_ab_c + i_ac_b
    closed_sum = closed["I(A;B|C)"] + closed["I(A;C|B)"]
    return CounterexamplePoint(
        x=x, y=y,
        i_cond_sum=cond_sum,
        i_joint=i_a_bc,
        closed_i_cond_sum=closed_sum,
        closed_i_joint=closed["I(A;BC)"],
        err_i_cond_sum=abs(cond_sum - closed_sum),
        err_i_joint=abs(i_a_bc - closed["I(A;BC)"]),
        ratio=i_a_bc / cond_sum,
    )


@app.post("/counterexample", response_model=CounterexampleResponse)
def counterexample(req: CounterexampleRequest) -> CounterexampleResponse:
    try:
        if req.sweep:
            points = [_counterexample_point(v, v) for v in SWEEP_GRID]
            return CounterexampleResponse(points=points)
        if req.x is None or req.y is None:
            raise HTTPException(422, "give x and y, or set sweep=true")
        points = [_counterexample_point(req.x, req.y)]
        h = entropy_vector(intersection_counterexample(req.x, req.y))
        payload = {k: float(v) for k, v in
                   _vector_payload(h, ("A", "B", "C")).items()}
        closed = counterexample_closed_forms(req.x, req.y)
        return CounterexampleResponse(points=points, entropies=payload,
                                      closed_entropies=closed)
    except ValueError as exc:
        raise HTTPException(422, str(exc)) from None


@app.post("/verify-bound", response_model=VerifyBoundResponse)
def verify_bound(req: VerifyBoundRequest) -> VerifyBoundResponse:
    names = _names(req.vars)
    assume = CiSet.of(_triples(names, req.assume), len(names))
    (t,) = _triples(names, [req.query])
    try:
        report = verify_theorem_bound(assume, t, req.kind)
    except (ValueError, CapExceeded) as exc:
        raise HTTPException(422, str(exc)) from None
    return VerifyBoundResponse(
        kind=report.kind,
        premise=report.premise,
        premise_holds=report.premise_holds,
        bound=_frac(report.bound),
        lam="unbounded" if report.unbounded else _frac(report.value),
        certificate=None if report.certificate is None
        else report.certificate.render(names),
        violated=report.violated,
        positive=report.premise_holds and not report.violated,
    )
