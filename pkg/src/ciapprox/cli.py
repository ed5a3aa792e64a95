"""Command line front end.

The CLI is a thin client over the HTTP service: every subcommand parses
its input files locally, posts one JSON request per operation, and renders
the response.  By default the service app runs in-process (no network, no
separate server); pass ``--server URL`` or set ``CIAPPROX_SERVER`` to
target a running ``ciapprox serve`` instead.

Exit codes: 0 when every query answered positively (implied / certified /
separated / bound respected), 2 when some answer is negative (refuted,
unbounded, not separated), 1 on errors such as parse failures or engine
caps.  ``--json`` switches the output to one JSON object per line.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any

from .core import CiapproxError, VarSet
from .problemfile import (
    ParseError,
    parse_dag_file,
    parse_problem,
    parse_ugraph_file,
    render_triple,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2


def _client(server: str | None):
    server = server or os.environ.get("CIAPPROX_SERVER")
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=600.0)
    import warnings

    with warnings.catch_warnings():
        # starlette 1.3 warns about its httpx-backed test transport; the
        # embedded in-process mode is exactly that transport, on purpose
        warnings.simplefilter("ignore")
        from starlette.testclient import TestClient

    from .service import app

    return TestClient(app)


def _post(args, path: str, payload: dict[str, Any]) -> dict[str, Any]:
    with _client(args.server) as client:
        resp = client.post(path, json=payload)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except Exception:
            detail = resp.text
        raise CiapproxError(f"{path}: {detail}")
    return resp.json()


def _emit_json(objs: list[dict[str, Any]]) -> None:
    for obj in objs:
        print(json.dumps(obj, sort_keys=True))


def _names_arg(raw: str | None) -> list[str]:
    if not raw:
        return []
    return [tok for tok in raw.replace(",", " ").split() if tok]


def _problem_payload(path: str, mode: str | None, lam: str | None) -> dict[str, Any]:
    with open(path, encoding="utf-8") as fh:
        problem = parse_problem(fh.read())
    params = dict(problem.params)
    if lam is not None:
        params["lambda"] = lam
    return {
        "vars": list(problem.vars),
        "assume": [render_triple(t, problem.vars) for t in problem.assume],
        "query": [render_triple(t, problem.vars) for t in problem.query],
        "mode": mode or problem.mode,
        "params": params,
    }


def _run_problem(args, mode: str | None, lam: str | None = None) -> int:
    payload = _problem_payload(args.file, mode, lam)
    data = _post(args, "/implies", payload)
    results = data["results"]
    if args.json:
        _emit_json(results)
    else:
        for r in results:
            line = f"{r['query']}: {r['answer']}"
            if "lambda" in r["detail"]:
                line += f" = {r['detail']['lambda']}"
            if "witness_atom" in r["detail"]:
                line += f"  (witness atom {{{','.join(r['detail']['witness_atom'])}}})"
            print(line)
            if "certificate" in r["detail"]:
                # multiplier lines only; the factor is already on the line above
                for cl in r["detail"]["certificate"].splitlines():
                    if not cl.startswith("lambda"):
                        print("  " + cl)
    return EXIT_OK if data["all_positive"] else EXIT_NEGATIVE


def cmd_implies(args) -> int:
    if args.mode is None:
        with open(args.file, encoding="utf-8") as fh:
            file_mode = parse_problem(fh.read()).mode
        if file_mode not in ("positive", "shannon", "semigraphoid", "graphoid"):
            raise CiapproxError(
                f"problem file selects mode {file_mode!r}; use the matching subcommand")
    return _run_problem(args, args.mode)


def cmd_minlambda(args) -> int:
    return _run_problem(args, "minlambda")


def cmd_checklambda(args) -> int:
    return _run_problem(args, "checklambda", lam=getattr(args, "lambda"))


def _separation(args, directed: bool) -> int:
    with open(args.file, encoding="utf-8") as fh:
        text = fh.read()
    if directed:
        names, dag = parse_dag_file(text)
        payload = {
            "vars": list(names),
            "parents": {names[v]: [names[p] for p in VarSet(dag.parents[v])]
                        for v in range(dag.n) if dag.parents[v]},
        }
        path = "/dsep"
    else:
        names, g = parse_ugraph_file(text)
        payload = {
            "vars": list(names),
            "edges": [[names[u], names[v]] for u, v in g.edges()],
        }
        path = "/usep"
    payload.update(x=_names_arg(args.x), y=_names_arg(args.y), z=_names_arg(args.z))
    data = _post(args, path, payload)
    if args.json:
        _emit_json([data])
    else:
        print("separated" if data["separated"] else "not separated")
    return EXIT_OK if data["separated"] else EXIT_NEGATIVE


def cmd_dsep(args) -> int:
    return _separation(args, directed=True)


def cmd_usep(args) -> int:
    return _separation(args, directed=False)


def cmd_basis(args) -> int:
    with open(args.file, encoding="utf-8") as fh:
        names, dag = parse_dag_file(fh.read())
    payload = {
        "vars": list(names),
        "parents": {names[v]: [names[p] for p in VarSet(dag.parents[v])]
                    for v in range(dag.n) if dag.parents[v]},
    }
    data = _post(args, "/basis", payload)
    if args.json:
        _emit_json([data])
    else:
        for stmt in data["statements"]:
            print(stmt)
    return EXIT_OK


def cmd_entropy(args) -> int:
    with open(args.file, encoding="utf-8") as fh:
        text = fh.read()
    data = _post(args, "/entropy", {"text": text})
    if args.json:
        _emit_json([data])
    else:
        for subset, value in data["entropies"].items():
            print(f"H({subset}) = {value!r}")
    return EXIT_OK


def cmd_counterexample(args) -> int:
    payload = {"x": args.x, "y": args.y, "sweep": args.sweep}
    data = _post(args, "/counterexample", payload)
    if args.json:
        _emit_json(data["points"])
    else:
        cols = ("x", "y", "i_cond_sum", "i_joint", "err_i_cond_sum",
                "err_i_joint", "ratio")
        print(",".join(cols))
        for pt in data["points"]:
            print(",".join(repr(pt[c]) for c in cols))
        if data.get("entropies"):
            for k, v in data["entropies"].items():
                print(f"H({k}) = {v!r}")
    return EXIT_OK


def cmd_verify_bound(args) -> int:
    with open(args.file, encoding="utf-8") as fh:
        problem = parse_problem(fh.read())
    if len(problem.query) != 1:
        raise CiapproxError("verify-bound expects exactly one query statement")
    payload = {
        "vars": list(problem.vars),
        "assume": [render_triple(t, problem.vars) for t in problem.assume],
        "query": render_triple(problem.query[0], problem.vars),
        "kind": args.kind,
    }
    data = _post(args, "/verify-bound", payload)
    if args.json:
        _emit_json([data])
    else:
        print(f"premise ({data['premise']}): "
              + ("holds" if data["premise_holds"] else "fails"))
        print(f"lambda = {data['lam']}, bound = {data['bound']}")
        print("bound violated" if data["violated"] else "bound respected")
    return EXIT_OK if data["positive"] else EXIT_NEGATIVE


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("ciapprox.service:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ciapprox",
        description="exact and approximate implication between CI statements")
    parser.add_argument("--server", help="URL of a running service "
                        "(default: run the service in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    p = add("implies", cmd_implies, help="decide implication from a problem file")
    p.add_argument("file")
    p.add_argument("--mode", choices=("positive", "shannon", "semigraphoid", "graphoid"))

    p = add("minlambda", cmd_minlambda, help="least approximation factor, exact rational")
    p.add_argument("file")

    p = add("checklambda", cmd_checklambda, help="certify or refute a given factor")
    p.add_argument("file")
    p.add_argument("--lambda", dest="lambda", metavar="P/Q",
                   help="factor to certify (overrides the file parameter)")

    for name, fn, blurb in (("dsep", cmd_dsep, "d-separation query on a DAG file"),
                            ("usep", cmd_usep, "separation query on a graph file")):
        p = add(name, fn, help=blurb)
        p.add_argument("file")
        p.add_argument("--x", required=True, help="comma separated variable names")
        p.add_argument("--y", required=True, help="comma separated variable names")
        p.add_argument("--z", default="", help="comma separated conditioning names")

    p = add("basis", cmd_basis, help="recursive basis of a DAG file")
    p.add_argument("file")

    p = add("entropy", cmd_entropy, help="entropy vector of a distribution file")
    p.add_argument("file")

    p = add("counterexample", cmd_counterexample,
            help="reproduce the strictly positive non-relaxation family")
    p.add_argument("--x", type=float)
    p.add_argument("--y", type=float)
    p.add_argument("--sweep", action="store_true",
                   help="evaluate the x=y grid 1e-2..1e-5 and report ratios")

    p = add("verify-bound", cmd_verify_bound,
            help="check the antecedent-class approximation bound")
    p.add_argument("file")
    p.add_argument("--kind", required=True,
                   choices=("saturated", "recursive", "marginal"))

    p = sub.add_parser("serve", help="run the HTTP service")
    p.set_defaults(fn=cmd_serve)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8023)
    return parser


def main(argv: list[str] | None = None) -> int:
    import httpx

    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, CiapproxError, httpx.HTTPError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
