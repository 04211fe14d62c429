"""
Tests for the conditions, the reduction chain and the verdicts
"""

import itertools

import pytest

from app.core.exceptions import MissingEigenvalues, PsiUndefined
from app.schemas.common import Flavor, Mode, StopReason, Verdict
from app.services.dsp_decider import (
    NILPOTENT_COUNTEREXAMPLE_NOTE,
    decide,
    evaluate_conditions,
    nice_nilpotent_exists,
    nilpotent_exception,
    psi_chain,
    psi_step,
    shifted_rank_bound,
)
from app.services.jordan_core import (
    ClassTuple,
    JordanNormalForm,
    Partition,
    eigenvalue_pmv,
    pmv_gcd,
    to_diagonal,
)
from factories import assignment, diagonal_tuple, hypergeometric_tuple, mv_forms, random_form


def random_reducible_tuple(rng):
    """Random forms on which at least one reduction step is defined"""
    while True:
        n = int(rng.integers(2, 11))
        count = int(rng.integers(3, 6))
        forms = [random_form(rng, n) for _ in range(count)]
        report = evaluate_conditions(forms)
        if report.beta_holds and not report.omega_holds:
            return forms


def diagonal_multiset(forms):
    return sorted(to_diagonal(f).parts for f in forms)


class TestConditions:
    """alpha, beta, omega and the index of rigidity"""

    def test_beta_without_alpha(self):
        """(1,1,1,1),(2,2),(2,2): beta holds while alpha does not"""
        report = evaluate_conditions(mv_forms([1, 1, 1, 1], [2, 2], [2, 2]))
        assert report.d == [12, 8, 8]
        assert not report.alpha_holds
        assert report.beta_holds
        assert not report.omega_holds

    def test_alpha_without_beta(self):
        """(1,1,1,1),(3,1)^3: alpha holds as an equality while beta does not"""
        report = evaluate_conditions(mv_forms([1, 1, 1, 1], [3, 1], [3, 1], [3, 1]))
        assert sum(report.d) == 30
        assert report.alpha_holds
        assert not report.alpha_strict
        assert not report.beta_holds

    def test_hypergeometric_shape(self):
        """(1,1)^3 is rigid"""
        report = evaluate_conditions(mv_forms([1, 1], [1, 1], [1, 1]))
        assert report.r == [1, 1, 1]
        assert sum(report.d) == 6
        assert report.alpha_holds and not report.alpha_strict
        assert report.beta_holds
        assert not report.omega_holds
        assert report.kappa == 2
        assert report.rigid

    def test_omega_implies_beta(self, rng):
        for _ in range(500):
            n = int(rng.integers(1, 9))
            report = evaluate_conditions([random_form(rng, n) for _ in range(int(rng.integers(2, 6)))])
            assert not report.omega_holds or report.beta_holds


class TestPsiStep:
    """One application of the reduction map"""

    def test_pmv_recipe(self):
        """(2,1,1),(2,1,1),(2,2) at n=4 reduces to ((1,1),(1,1),(2)) at n=2"""
        images, n1 = psi_step(mv_forms([2, 1, 1], [2, 1, 1], [2, 2]))
        assert n1 == 2
        assert [to_diagonal(f).parts for f in images] == [(1, 1), (1, 1), (2,)]

    def test_hypergeometric_to_size_one(self):
        images, n1 = psi_step(mv_forms([1, 1], [1, 1], [1, 1]))
        assert n1 == 1
        assert all(f.n == 1 for f in images)

    def test_jordan_blocks_shrink(self):
        """The smallest block of the maximal-count eigenvalue shrinks"""
        forms = [
            JordanNormalForm.from_partitions([[2, 1]]),
            JordanNormalForm.from_partitions([[2], [1]]),
            JordanNormalForm.diagonal([1, 1, 1]),
        ]
        images, n1 = psi_step(forms)
        assert n1 == 2
        assert images[0] == JordanNormalForm.from_partitions([[2]])
        assert images[1] == JordanNormalForm.from_partitions([[1], [1]])
        assert images[2] == JordanNormalForm.from_blocks({1: [1], 2: [1]})

    def test_undefined(self):
        """omega holding, beta failing or n = 1 leave the map undefined"""
        with pytest.raises(PsiUndefined):
            psi_step(mv_forms([1, 1, 1], [1, 1, 1], [1, 1, 1]))
        with pytest.raises(PsiUndefined):
            psi_step(mv_forms([1, 1, 1], [2, 1], [2, 1]))
        with pytest.raises(PsiUndefined):
            psi_step(mv_forms([1], [1], [1]))

    def test_choice_must_have_maximal_count(self):
        forms = mv_forms([2, 1, 1], [2, 1, 1], [2, 2])
        with pytest.raises(PsiUndefined):
            psi_step(forms, choices=[1, 0, 0])

    def test_choice_independence(self, rng):
        """Every choice of maximal-count label gives the same diagonal images"""
        checked = 0
        while checked < 100:
            forms = random_reducible_tuple(rng)
            options = []
            for f in forms:
                counts = f.block_counts()
                top = max(counts.values())
                options.append([label for label, c in counts.items() if c == top])
            if all(len(o) == 1 for o in options):
                continue
            reference = [to_diagonal(f) for f in psi_step(forms)[0]]
            for choices in itertools.product(*options):
                assert [to_diagonal(f) for f in psi_step(forms, choices)[0]] == reference
            checked += 1

    def test_commutes_with_correspondence(self, rng):
        """Reducing then taking diagonal correspondents equals the reverse order"""
        for _ in range(300):
            forms = random_reducible_tuple(rng)
            diagonal = [to_diagonal(f).as_form() for f in forms]
            direct = diagonal_multiset(psi_step(forms)[0])
            via = diagonal_multiset(psi_step(diagonal)[0])
            assert direct == via

    def test_simplicity_preserved(self, rng):
        """A simple diagonal PMV stays simple along the chain"""
        for _ in range(300):
            forms = random_reducible_tuple(rng)
            if pmv_gcd([to_diagonal(f) for f in forms]) != 1:
                continue
            images, _ = psi_step(forms)
            assert pmv_gcd([to_diagonal(f) for f in images]) == 1


class TestPsiChain:
    """Iterated reduction"""

    def test_stops_when_beta_fails(self):
        """(1,1,1,1),(2,2),(2,2): n=4 -> n=3 where beta fails"""
        trace = psi_chain(mv_forms([1, 1, 1, 1], [2, 2], [2, 2]))
        assert [s.n for s in trace.stages] == [4, 3]
        second = [JordanNormalForm.from_model(m) for m in trace.stages[1].forms]
        assert [to_diagonal(f).parts for f in second] == [(1, 1, 1), (2, 1), (2, 1)]
        assert trace.stages[1].report.r == [2, 1, 1]
        assert trace.stop_reason == StopReason.BETA_FAILS
        assert trace.n_s == 3

    def test_stops_when_omega_holds(self):
        trace = psi_chain(mv_forms([1, 1, 1], [1, 1, 1], [1, 1, 1]))
        assert len(trace.stages) == 1
        assert trace.stop_reason == StopReason.OMEGA_HOLDS

    def test_reaches_size_one(self):
        trace = psi_chain(mv_forms([1, 1], [1, 1], [1, 1]))
        assert [s.n for s in trace.stages] == [2, 1]
        assert trace.stop_reason == StopReason.SIZE_ONE

    def test_kappa_invariant(self, rng):
        """The index of rigidity is constant along every chain"""
        for _ in range(1000):
            trace = psi_chain(random_reducible_tuple(rng))
            assert len({s.report.kappa for s in trace.stages}) == 1

    def test_rigidity_and_alpha(self, rng):
        """n_s = 1 iff alpha is an equality, when the criterion holds"""
        for _ in range(1000):
            trace = psi_chain(random_reducible_tuple(rng))
            if not trace.criterion_holds:
                continue
            first = trace.stages[0].report
            if trace.n_s == 1:
                assert not first.alpha_strict
            else:
                assert first.alpha_strict


class TestDecide:
    """Verdicts"""

    def test_hypergeometric_solvable(self):
        decision = decide(hypergeometric_tuple())
        assert decision.verdict == Verdict.SOLVABLE
        assert decision.theorem_used == "generic"
        assert decision.trace.n_s == 1
        assert decision.eigenvalues_generic is True

    def test_size_one(self):
        """Every 1x1 tuple satisfying the constraint is irreducible"""
        forms = tuple(JordanNormalForm.diagonal([1]) for _ in range(2))
        decision = decide(ClassTuple(Flavor.ADDITIVE, forms))
        assert decision.verdict == Verdict.SOLVABLE
        assert decision.theorem_used == "size_one"

    def test_alpha_failing_not_solvable(self):
        t = ClassTuple(Flavor.ADDITIVE, tuple(mv_forms([1, 1, 1, 1], [2, 2], [2, 2])))
        decision = decide(t)
        assert decision.verdict == Verdict.NOT_SOLVABLE
        assert decision.trace.n_s == 3

    def test_non_simple_additive(self):
        """No generic eigenvalues exist for a non-simple PMV"""
        t = ClassTuple(Flavor.ADDITIVE, tuple(mv_forms([2, 2], [2, 2], [2, 2], [2, 2])))
        decision = decide(t)
        assert decision.verdict == Verdict.NOT_SOLVABLE
        assert any("no generic eigenvalues" in note for note in decision.notes)

    def test_multiplicative_d_one(self):
        """Non-simple PMV but d = 1: the same criterion applies"""
        forms = tuple(JordanNormalForm.from_partitions([[2], [1, 1]]) for _ in range(4))
        t = ClassTuple(Flavor.MULTIPLICATIVE, forms)
        decision = decide(t)
        assert decision.theorem_used == "genericbis"
        assert decision.verdict == Verdict.SOLVABLE
        assert decision.trace.stop_reason == StopReason.OMEGA_HOLDS
        assert sum(decision.trace.stages[0].report.r) == 2 * t.n

    def test_multiplicative_d_greater_than_one(self):
        t = ClassTuple(Flavor.MULTIPLICATIVE, tuple(mv_forms([2, 2], [2, 2], [2, 2], [2, 2])))
        assert decide(t).verdict == Verdict.OUT_OF_THEOREM_SCOPE

    def test_any_weak_nilpotent_counterexample(self):
        """Three single blocks of size 2: alpha equality is out of scope"""
        forms = tuple(JordanNormalForm.from_partitions([[2]]) for _ in range(3))
        decision = decide(ClassTuple(Flavor.ADDITIVE, forms), Mode.ANY_WEAK)
        assert decision.verdict == Verdict.OUT_OF_THEOREM_SCOPE
        assert NILPOTENT_COUNTEREXAMPLE_NOTE in decision.notes

    def test_any_weak_alpha_fails(self):
        t = ClassTuple(Flavor.ADDITIVE, tuple(mv_forms([1, 1, 1, 1], [2, 2], [2, 2])))
        assert decide(t, Mode.ANY_WEAK).verdict == Verdict.NOT_WEAKLY_SOLVABLE

    def test_any_weak_alpha_strict(self):
        t = ClassTuple(Flavor.ADDITIVE, tuple(mv_forms([1, 1, 1], [1, 1, 1], [2, 1], [2, 1])))
        decision = decide(t, Mode.ANY_WEAK)
        assert decision.verdict == Verdict.WEAKLY_SOLVABLE

    def test_non_generic_eigenvalues_noted(self):
        """The verdict concerns generic eigenvalues; attached ones are checked"""
        t = diagonal_tuple("additive", [[(0, 1), (1, 1)], [(0, 1), (1, 1)], [(0, 1), (-2, 1)]])
        decision = decide(t)
        assert decision.verdict == Verdict.SOLVABLE
        assert decision.eigenvalues_generic is False

    def test_cross_flavor_agreement(self, rng):
        """Simple PMV: additive and multiplicative verdicts agree"""
        checked = 0
        while checked < 500:
            n = int(rng.integers(1, 9))
            forms = tuple(random_form(rng, n) for _ in range(int(rng.integers(2, 5))))
            if pmv_gcd(eigenvalue_pmv(forms)) != 1:
                continue
            additive = decide(ClassTuple(Flavor.ADDITIVE, forms))
            multiplicative = decide(ClassTuple(Flavor.MULTIPLICATIVE, forms))
            assert additive.verdict == multiplicative.verdict
            checked += 1

    def test_diagonal_correspondents_agree(self, rng):
        """A tuple and the tuple of its diagonal correspondents get the same verdict"""
        checked = 0
        while checked < 300:
            n = int(rng.integers(1, 9))
            forms = tuple(random_form(rng, n) for _ in range(int(rng.integers(2, 5))))
            diagonal = tuple(to_diagonal(f).as_form() for f in forms)
            if pmv_gcd(eigenvalue_pmv(forms)) != 1 or pmv_gcd(eigenvalue_pmv(diagonal)) != 1:
                continue
            original = decide(ClassTuple(Flavor.ADDITIVE, forms))
            correspondent = decide(ClassTuple(Flavor.ADDITIVE, diagonal))
            assert original.verdict == correspondent.verdict
            checked += 1

    def test_deterministic(self):
        t = ClassTuple(Flavor.ADDITIVE, tuple(mv_forms([2, 1, 1], [2, 1, 1], [2, 2])))
        assert decide(t).model_dump_json() == decide(t).model_dump_json()


class TestShiftedRankBound:
    """Necessary condition via shifted ranks"""

    def test_common_eigenvalue(self):
        """diag{0,1}^3: shifting by 0 everywhere gives 3 < 4"""
        t = diagonal_tuple("additive", [[(0, 1), (1, 1)]] * 3)
        bound = shifted_rank_bound(t)
        assert bound.min_value == 3
        assert bound.witness == ["0", "0", "0"]
        assert not bound.necessary_condition_holds

    def test_generic_example(self):
        bound = shifted_rank_bound(hypergeometric_tuple())
        assert bound.min_value == 4
        assert bound.necessary_condition_holds

    def test_scalar_classes(self):
        t = diagonal_tuple("additive", [[(1, 2)], [(2, 2)], [(-3, 2)]])
        bound = shifted_rank_bound(t)
        assert bound.min_value == 0
        assert bound.witness == ["1", "2", "-3"]

    def test_missing_eigenvalues(self):
        t = ClassTuple(Flavor.ADDITIVE, tuple(mv_forms([1, 1], [1, 1], [1, 1])))
        with pytest.raises(MissingEigenvalues):
            shifted_rank_bound(t)

    def test_jordan_blocks_count(self):
        """rank(A - b I) = n minus the number of blocks at b"""
        forms = (
            JordanNormalForm.from_partitions([[2]]),
            JordanNormalForm.from_partitions([[2]]),
        )
        a = assignment("additive", [[(1, 2)], [(-1, 2)]])
        bound = shifted_rank_bound(ClassTuple(Flavor.ADDITIVE, forms, a))
        assert bound.min_value == 2


class TestNiceNilpotent:
    """Nice tuples in nilpotent classes"""

    def test_exceptional_case_one(self):
        """n=4, p=3, four (2,2): exceptional"""
        decision = nice_nilpotent_exists([Partition.of(2, 2)] * 4, 4)
        assert decision.verdict == Verdict.OUT_OF_THEOREM_SCOPE
        assert nilpotent_exception([Partition.of(2, 2)] * 4, 4) == 1

    def test_base_size_is_not_exceptional(self):
        """n=2, p=3, four (2): omega holds with equality and k = 1"""
        decision = nice_nilpotent_exists([Partition.of(2)] * 4, 2)
        assert decision.verdict == Verdict.SOLVABLE

    def test_two_matrices(self):
        decision = nice_nilpotent_exists([Partition.of(2, 1), Partition.of(3)], 3)
        assert decision.verdict == Verdict.NOT_SOLVABLE

    def test_other_exceptional_cases(self):
        assert nilpotent_exception([Partition.of(3, 3)] * 3, 6) == 2
        assert nilpotent_exception(
            [Partition.of(4, 4), Partition.of(4, 4), Partition.of(2, 2, 2, 2)], 8
        ) == 3
        assert nilpotent_exception(
            [Partition.of(6, 6), Partition.of(3, 3, 3, 3), Partition((2,) * 6)], 12
        ) == 4

    def test_exception_needs_k_above_one(self):
        parts = [Partition.of(6), Partition.of(3, 3), Partition.of(2, 2, 2)]
        assert nilpotent_exception(parts, 6) is None
        assert nice_nilpotent_exists(parts, 6).verdict == Verdict.SOLVABLE
