"""Shannon-cone certificates: exact implication, factor certification,
minimal factors, class bounds, conditional saturation."""

from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from ciapprox.core import (
    CapExceeded,
    CiSet,
    VarSet,
    canonicalize,
    eval_mi,
    eval_sum,
)
from ciapprox.imeasure import measure_to_entropy, positive_implies
from ciapprox.shannon import (
    LinearFunctional,
    LpCertificate,
    check_lambda,
    elemental_basis,
    lp_cap,
    min_lambda,
    saturate_conditionals,
    shannon_ei,
    verify_theorem_bound,
)

from conftest import cs, mk, random_polymatroid, random_positive_measure, random_triple

A, B, C = VarSet.of([0]), VarSet.of([1]), VarSet.of([2])


def chain_sigma(n):
    """Antecedents (X1;Xi|X2..X(i-1)) whose sum telescopes to (X1;X2..Xn)."""
    return cs(n, *(mk([0], [i], range(1, i)) for i in range(1, n)))


class TestElementalBasis:
    @pytest.mark.parametrize("n,count", [(2, 3), (3, 9), (4, 28)])
    def test_counts(self, n, count):
        assert len(elemental_basis(n)) == n + n * (n - 1) // 2 * 2 ** (n - 2) == count

    def test_every_elemental_nonneg_on_polymatroids(self, rng):
        basis = elemental_basis(3)
        for _ in range(20):
            h = random_polymatroid(rng, 3)
            for e in basis.inequalities:
                assert e.functional.evaluate(h) >= 0

    def test_out_of_range(self):
        with pytest.raises(CapExceeded):
            elemental_basis(1)
        with pytest.raises(CapExceeded):
            elemental_basis(lp_cap() + 1)

    def test_cap_override(self, monkeypatch):
        monkeypatch.setenv("CIAPPROX_LP_CAP", "3")
        with pytest.raises(CapExceeded):
            elemental_basis(4)
        monkeypatch.setenv("CIAPPROX_LP_CAP", "11")
        assert len(elemental_basis(11)) == 11 + 55 * 2 ** 9


class TestShannonEi:
    def test_chain_rule_implication_holds(self):
        s = cs(3, mk([0], [1]), mk([0], [2], [1]))
        assert shannon_ei(s, mk([0], [2])).holds

    def test_intersection_consequent_refuted_with_witness(self):
        s = cs(3, mk([0], [1], [2]), mk([0], [2], [1]))
        res = shannon_ei(s, mk([0], [1]))
        assert not res.holds
        h = res.counterexample
        assert h.exact and h.checked
        assert eval_sum(h, s) == 0
        assert eval_mi(h, mk([0], [1])) == 1

    def test_empty_antecedents_refuted(self):
        res = shannon_ei(CiSet.of([], 3), mk([0], [1]))
        assert not res.holds
        assert eval_mi(res.counterexample, mk([0], [1])) == 1

    def test_trivial_consequent_holds(self):
        assert shannon_ei(CiSet.of([], 3), mk([0], [0], [0])).holds


class TestCheckLambda:
    def test_identity_combination(self):
        s = cs(2, mk([0], [1]))
        res = check_lambda(s, mk([0], [1]), 1)
        assert res.certified
        assert res.certificate.verify(s, mk([0], [1]))

    def test_intersection_never_certifies(self):
        s = cs(3, mk([0], [1], [2]), mk([0], [2], [1]))
        t = mk([0], [1, 2])
        res = check_lambda(s, t, 10 ** 6)
        assert not res.certified
        h = res.refutation
        assert h.checked and 10 ** 6 * eval_sum(h, s) < eval_mi(h, t)

    def test_chain_rule_one_certifies(self):
        s = cs(3, mk([0], [1]), mk([0], [2], [1]))
        res = check_lambda(s, mk([0], [2]), 1)
        assert res.certified and res.certificate.verify(s, mk([0], [2]))

    def test_negative_lambda_rejected(self):
        with pytest.raises(ValueError):
            check_lambda(cs(2, mk([0], [1])), mk([0], [1]), -1)

    def test_certified_factor_bounds_all_positive_measures(self, rng):
        s = cs(3, mk([0], [1, 2]))
        t = mk([0], [1], [2])
        lam = Fraction(1)
        assert check_lambda(s, t, lam).certified
        for _ in range(2000):
            h = measure_to_entropy(random_positive_measure(rng, 3))
            assert lam * eval_sum(h, s) >= eval_mi(h, t)


class TestMinLambda:
    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_telescoping_chain_is_tight_at_one(self, n):
        s = chain_sigma(n)
        t = mk([0], range(1, n))
        res = min_lambda(s, t)
        assert not res.unbounded and res.value == 1
        assert res.certificate.verify(s, t)

    def test_weak_union_instance(self):
        s = cs(3, mk([0], [1, 2]))
        res = min_lambda(s, mk([0], [1], [2]))
        assert res.value == 1

    def test_intersection_unbounded(self):
        s = cs(3, mk([0], [1], [2]), mk([0], [2], [1]))
        assert min_lambda(s, mk([0], [1, 2])).unbounded

    def test_agrees_with_check_lambda_around_optimum(self, rng):
        seen = 0
        for _ in range(40):
            s = cs(3, *(random_triple(rng, 3) for _ in range(2)))
            t = random_triple(rng, 3)
            res = min_lambda(s, t)
            if res.unbounded:
                continue
            seen += 1
            lam = res.value
            assert check_lambda(s, t, lam).certified
            assert check_lambda(s, t, lam + 1).certified
            if lam > 0:
                assert not check_lambda(s, t, lam * Fraction(99, 100)).certified
        assert seen > 10

    def test_finite_factor_implies_exact_implication(self, rng):
        for _ in range(40):
            s = cs(3, *(random_triple(rng, 3) for _ in range(2)))
            t = random_triple(rng, 3)
            if not min_lambda(s, t).unbounded:
                assert shannon_ei(s, t).holds

    def test_values_agree_with_float_solver(self, rng):
        # same LP assembled for scipy: minimize lambda subject to
        # lambda*f_Sigma - sum mu_e e = f_tau, lambda, mu >= 0
        import numpy as np
        from scipy.optimize import linprog

        for n in (3, 4):
            basis = elemental_basis(n)
            seen = 0
            for _ in range(60):
                s = cs(n, *(random_triple(rng, n) for _ in range(2)))
                t = random_triple(rng, n)
                f_sigma = LinearFunctional.from_ciset(s, n)
                f_tau = LinearFunctional.from_triple(t, n)
                nrows = (1 << n) - 1
                a_eq = np.zeros((nrows, 1 + len(basis)))
                for vs, c in f_sigma.coeffs.items():
                    a_eq[vs.bits - 1, 0] = float(c)
                for col, e in enumerate(basis.inequalities, start=1):
                    for vs, c in e.functional.coeffs.items():
                        a_eq[vs.bits - 1, col] = -float(c)
                b_eq = np.zeros(nrows)
                for vs, c in f_tau.coeffs.items():
                    b_eq[vs.bits - 1] = float(c)
                cost = np.zeros(1 + len(basis))
                cost[0] = 1.0
                float_res = linprog(cost, A_eq=a_eq, b_eq=b_eq,
                                    bounds=[(0, None)] * (1 + len(basis)),
                                    method="highs")
                exact = min_lambda(s, t)
                if exact.unbounded:
                    assert float_res.status == 2, (list(map(str, s)), str(t))
                else:
                    assert float_res.status == 0
                    assert float(exact.value) == pytest.approx(float_res.fun,
                                                               abs=1e-7)
                    seen += 1
            assert seen > 5


class TestCertificate:
    def test_tampered_multipliers_fail_verification(self):
        s = cs(3, mk([0], [1]), mk([0], [2], [1]))
        t = mk([0], [2])
        cert = min_lambda(s, t).certificate
        assert cert.verify(s, t)
        bad = LpCertificate(cert.ambient, cert.lam,
                            tuple(m + 1 for m in cert.multipliers))
        assert not bad.verify(s, t)
        neg = LpCertificate(cert.ambient, cert.lam,
                            tuple(-m for m in cert.multipliers))
        if any(m for m in cert.multipliers):
            assert not neg.verify(s, t)

    def test_render_format(self):
        s = cs(3, mk([0], [1, 2]))
        t = mk([0], [1], [2])
        cert = min_lambda(s, t).certificate
        text = cert.render(("A", "B", "C"))
        lines = text.splitlines()
        assert lines[-1] == "lambda = 1"
        assert all(" * I(" in line for line in lines[:-1])

    def test_duality_coherence_on_positive_measures(self, rng):
        # certified identity implies the inequality on sampled measures,
        # with exact rational arithmetic throughout
        instances = [
            (cs(3, mk([0], [1]), mk([0], [2], [1])), mk([0], [2])),
            (cs(3, mk([0], [1, 2])), mk([0], [1], [2])),
            (chain_sigma(4), mk([0], [1, 2, 3])),
        ]
        for s, t in instances:
            res = min_lambda(s, t)
            lam = res.value
            n = s.ambient
            for _ in range(300):
                h = measure_to_entropy(random_positive_measure(rng, n))
                assert lam * eval_sum(h, s) >= eval_mi(h, t)


def saturated_triples(n):
    out = []
    for assign in itertools.product(range(3), repeat=n):
        x = VarSet.of(i for i, r in enumerate(assign) if r == 0)
        y = VarSet.of(i for i, r in enumerate(assign) if r == 1)
        z = VarSet.of(i for i, r in enumerate(assign) if r == 2)
        if x and y:
            t = canonicalize(x, y, z)
            if t not in out:
                out.append(t)
    return out


class TestSaturatedEquivalence:
    def test_containment_iff_bounded_factor_n3(self, rng):
        # for saturated antecedents: implication over positive polymatroids
        # coincides with a factor at most min(|A|,|B|) over all polymatroids
        sats = saturated_triples(3)
        for _ in range(60):
            s = cs(3, *rng.sample(sats, k=rng.randrange(1, 4)))
            t = random_triple(rng, 3)
            implied = bool(positive_implies(s, t))
            res = min_lambda(s, t)
            bound = Fraction(min(len(t.x), len(t.y)))
            if implied:
                assert not res.unbounded and res.value <= bound
                assert shannon_ei(s, t).holds
            else:
                assert res.unbounded or res.value > bound


class TestVerifyTheoremBound:
    def test_recursive_chain(self):
        s = chain_sigma(3)
        report = verify_theorem_bound(s, mk([0], [1, 2]), "recursive")
        assert report.premise_holds and not report.violated
        assert report.bound == 1 and report.value == 1

    def test_saturated_instance(self):
        s = cs(3, mk([0], [1], [2]), mk([1], [2], [0]))
        report = verify_theorem_bound(s, mk([0], [1], [2]), "saturated")
        assert report.premise_holds and not report.violated
        assert report.value <= report.bound

    def test_marginal_instance(self):
        s = cs(3, mk([0, 1], [2]))
        t = mk([0], [2], [1])
        assert positive_implies(s, t).implied
        assert shannon_ei(s, t).holds
        report = verify_theorem_bound(s, t, "marginal")
        assert not report.violated and report.value <= 1

    def test_premise_failure_reported(self):
        s = cs(3, mk([0], [1], [2]))
        report = verify_theorem_bound(s, mk([0], [2]), "saturated")
        assert not report.premise_holds and not report.violated

    def test_kind_validation(self):
        with pytest.raises(ValueError):
            verify_theorem_bound(cs(3, mk([0], [1])), mk([0], [1]), "saturated")
        with pytest.raises(ValueError):
            verify_theorem_bound(cs(3, mk([0], [1], [2])), mk([0], [1]), "marginal")
        with pytest.raises(ValueError):
            verify_theorem_bound(cs(3, mk([0], [1], [2])), mk([0], [1]), "recursive")
        with pytest.raises(ValueError):
            verify_theorem_bound(cs(3, mk([0], [1])), mk([0], [1]), "mystery")


class TestSaturateConditionals:
    def test_conditional_split(self):
        # (Y;Y|X) on ground set {X,Y,W} -> (Y;W|X) and (Y;Y|XW)
        x, y, w = 0, 1, 2
        s = cs(3, mk([y], [y], [x]))
        got = saturate_conditionals(s, 3)
        assert set(got) == {mk([y], [w], [x]), mk([y], [y], [x, w])}

    def test_saturated_untouched(self):
        s = cs(3, mk([0], [1], [2]))
        assert list(saturate_conditionals(s, 3)) == list(s)

    def test_rejects_general_members(self):
        with pytest.raises(ValueError):
            saturate_conditionals(cs(3, mk([0], [1])), 3)

    def test_preserves_information_sum(self, rng):
        s = cs(4, mk([1], [1], [0]), mk([0], [1], [2, 3]), mk([2, 3], [2, 3], []))
        got = saturate_conditionals(s, 4)
        for _ in range(200):
            h = measure_to_entropy(random_positive_measure(rng, 4))
            assert eval_sum(h, s) == eval_sum(h, got)

    def test_rewriting_preserves_minimal_factors(self, rng):
        # h(s) == h(s') as functionals, so every factor question is
        # unchanged by the rewrite
        n = 4
        full = VarSet.full(n)
        seen = 0
        for _ in range(20):
            members = []
            for _ in range(rng.randrange(1, 3)):
                if rng.random() < 0.5:
                    x = VarSet.of(i for i in range(n) if rng.random() < 0.5)
                    y = VarSet.of(i for i in full - x if rng.random() < 0.6)
                    t = canonicalize(y, y, x)
                else:
                    x = VarSet.of(i for i in range(n) if rng.random() < 0.5)
                    y = full - x
                    t = canonicalize(x, y, VarSet.empty())
                if not t.trivial:
                    members.append(t)
            if not members:
                continue
            s = cs(n, *members)
            rewritten = saturate_conditionals(s, n)
            t = random_triple(rng, n)
            a, b = min_lambda(s, t), min_lambda(rewritten, t)
            assert a.unbounded == b.unbounded
            if not a.unbounded:
                assert a.value == b.value
                seen += 1
        assert seen > 2
