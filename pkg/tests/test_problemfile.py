"""File grammars: problems, statements, DAGs, graphs, distributions."""

from __future__ import annotations

import pytest

from ciapprox.problemfile import (
    ParseError,
    parse_dag_file,
    parse_distribution_file,
    parse_problem,
    parse_statement,
    parse_ugraph_file,
    render_dag_file,
    render_triple,
    serialize_problem,
)

from conftest import mk

PROBLEM = """\
vars: A B C
assume: I(A;B|C) I(A;C|B)
query: I(A;BC)
mode: minlambda
"""


class TestStatements:
    def test_basic(self):
        t = parse_statement("I(A;B|C)", ("A", "B", "C"))
        assert t == mk([0], [1], [2])

    def test_conditional_statement(self):
        t = parse_statement("I(A;A|B)", ("A", "B"))
        assert t.is_conditional() and t == mk([0], [0], [1])

    def test_juxtaposed_and_spaced_groups(self):
        names = ("X1", "X2", "X3")
        assert parse_statement("I(X1;X2X3)", names) == mk([0], [1, 2])
        assert parse_statement("I(X1; X2 X3)", names) == mk([0], [1, 2])
        assert parse_statement("I(X1;X2,X3)", names) == mk([0], [1, 2])

    def test_longest_name_wins(self):
        names = ("A", "AB")
        assert parse_statement("I(A;AB)", names) == mk([0], [1])

    def test_undeclared_variable(self):
        with pytest.raises(ParseError) as err:
            parse_statement("I(A;B|X)", ("A", "B"))
        assert "unknown variable" in str(err.value)

    def test_malformed(self):
        for bad in ("I(A)", "I(A;B|C", "H(A;B)", "I(A;B;C)"):
            with pytest.raises(ParseError):
                parse_statement(bad, ("A", "B", "C"))

    def test_render_round_trip(self):
        names = ("A", "B", "C")
        for t in (mk([0], [1], [2]), mk([0], [1, 2]), mk([0], [0], [1])):
            assert parse_statement(render_triple(t, names), names) == t


class TestProblemFiles:
    def test_parse_example(self):
        p = parse_problem(PROBLEM)
        assert p.vars == ("A", "B", "C")
        assert len(p.assume) == 2
        assert p.query == (mk([0], [1, 2]),)
        assert p.mode == "minlambda"

    def test_round_trip_is_identity(self):
        p = parse_problem(PROBLEM)
        text = serialize_problem(p)
        again = parse_problem(text)
        assert again == p
        assert serialize_problem(again) == text

    def test_params_round_trip(self):
        p = parse_problem(PROBLEM + "lambda: 7/2\neps: 0.1\n")
        assert p.params == {"lambda": "7/2", "eps": "0.1"}
        assert parse_problem(serialize_problem(p)) == p

    def test_comments_and_blank_lines(self):
        text = "# a comment\n\nvars: A B\nquery: I(A;B)  # inline\nmode: shannon\n"
        p = parse_problem(text)
        assert p.query == (mk([0], [1]),)

    def test_unknown_variable_diagnosed_with_position(self):
        with pytest.raises(ParseError) as err:
            parse_problem("vars: A B\nquery: I(A;X)\nmode: shannon\n")
        assert err.value.line == 2

    def test_duplicate_mode_rejected(self):
        with pytest.raises(ParseError):
            parse_problem(PROBLEM + "mode: shannon\n")

    def test_unknown_mode_rejected(self):
        with pytest.raises(ParseError):
            parse_problem("vars: A\nquery: I(A;A)\nmode: telepathy\n")

    def test_missing_sections(self):
        with pytest.raises(ParseError):
            parse_problem("query: I(A;B)\nmode: shannon\n")
        with pytest.raises(ParseError):
            parse_problem("vars: A B\nmode: shannon\n")
        with pytest.raises(ParseError):
            parse_problem("vars: A B\nquery: I(A;B)\n")


class TestGraphFiles:
    def test_dag_file(self):
        names, dag = parse_dag_file(
            "vars: X1 X2 X3\nnode X2 parents X1\nnode X3 parents X2\n")
        assert names == ("X1", "X2", "X3")
        assert dag.parents == (0, 0b001, 0b010)

    def test_dag_render_round_trip(self):
        text = "vars: X1 X2 X3\nnode X3 parents X1 X2\n"
        names, dag = parse_dag_file(text)
        assert parse_dag_file(render_dag_file(names, dag))[1].parents == dag.parents

    def test_dag_cycle_rejected(self):
        with pytest.raises(ParseError):
            parse_dag_file("vars: A B\nnode A parents B\nnode B parents A\n")

    def test_dag_unknown_vertex(self):
        with pytest.raises(ParseError):
            parse_dag_file("vars: A B\nnode A parents Q\n")

    def test_ugraph_file(self):
        names, g = parse_ugraph_file("vars: A B C\nedge A B\nedge B C\n")
        assert names == ("A", "B", "C")
        assert sorted(g.edges()) == [(0, 1), (1, 2)]

    def test_ugraph_bad_line(self):
        with pytest.raises(ParseError):
            parse_ugraph_file("vars: A B\nlink A B\n")


class TestDistributionFiles:
    def test_parse_with_header(self):
        text = "vars: a b\n0 0 : 0.25\n0 1 : 0.25\n1 0 : 0.25\n1 1 : 0.25\n"
        d = parse_distribution_file(text)
        assert d.names == ("a", "b")
        assert float(d.probs[0, 1]) == 0.25

    def test_missing_header(self):
        with pytest.raises(ParseError):
            parse_distribution_file("0 0 : 1.0\n")
