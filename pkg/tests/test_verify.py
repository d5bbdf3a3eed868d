import math
import random

from boolefock.algebra import FockVector, site_vector, vacuum_vector
from boolefock.fock import TestAlgebraElement
from boolefock.states import (
    BooleanState,
    TraceClassOperator,
    evaluate,
    infinity_state,
    moment,
    symmetric_state,
    vacuum_state,
)
from boolefock.tail import PhiState, cond_expect
from boolefock.verify import (
    DENSE_ENGINE,
    SPARSE_ENGINE,
    check_boolean_relations,
    check_embedding_homomorphism,
    check_exchangeable,
    check_identically_distributed,
    check_matrix_unit_dictionary,
    check_nfold_factorization,
    check_pair_independence,
    classify_definetti,
    nfold_telescoping_lines,
)
from boolefock import sampling


def expected_nonsymmetric():
    return BooleanState(
        1.0, TraceClassOperator(((0.5, vacuum_vector()), (0.5, site_vector(2))))
    )


def nonexpected():
    s = 1 / math.sqrt(2)
    return BooleanState(1.0, TraceClassOperator.rank_one(FockVector(s, {1: s})))


def test_exchangeable_symmetric_states_pass():
    for gamma in (0.0, 0.25, 1.0):
        report = check_exchangeable(symmetric_state(gamma), n_words=100, seed=1)
        assert report.passed
        assert report.witness is None


def test_exchangeable_converse_witness_d_vs_beta():
    state = BooleanState(1.0, TraceClassOperator.rank_one(site_vector(1)))
    report = check_exchangeable(state, n_words=50, seed=2)
    assert not report.passed
    assert report.witness is not None

    # the underlying discrepancy: moment at site 1 sees d, elsewhere beta
    a = TestAlgebraElement(1, 2, 3, 4, 5)
    assert moment(state, [(1, a)]) == a.d
    assert moment(state, [(2, a)]) == a.beta


def test_exchangeable_infinity_state_passes():
    report = check_exchangeable(infinity_state(), n_words=150, seed=3)
    assert report.passed


def test_identically_distributed_vacuum_singular():
    report = check_identically_distributed(vacuum_state(), PhiState.singular(), seed=4)
    assert report.passed


def test_identically_distributed_fails_for_expected_nonsymmetric():
    state = expected_nonsymmetric()
    from boolefock.tail import preserving_phi

    phi = preserving_phi(state.density)
    report = check_identically_distributed(state, phi, seed=5)
    assert not report.passed
    assert report.witness is not None
    assert report.witness["site_i"] != report.witness["site_k"]


def test_identically_distributed_trivial_on_equal_indices():
    state = expected_nonsymmetric()
    from boolefock.tail import preserving_phi

    phi = preserving_phi(state.density)
    report = check_identically_distributed(state, phi, index_pairs=[(3, 3)], seed=6)
    assert report.passed
    assert report.max_deviation == 0


def test_pair_independence_vacuum_singular():
    report = check_pair_independence(vacuum_state(), PhiState.singular(), n_samples=60, seed=7)
    assert report.passed


def test_pair_independence_mixed_symmetric():
    for gamma in (0.0, 0.3, 1.0):
        report = check_pair_independence(
            symmetric_state(gamma), PhiState.singular(), n_samples=40, seed=8
        )
        assert report.passed


def test_pair_independence_pure_tail_factor():
    # a pure tail element is fixed by the expectation, so the identity is
    # the bimodule property in disguise
    rng = random.Random(9)
    state = vacuum_state()
    phi = PhiState.singular()
    for _ in range(30):
        z = sampling.tail_element(rng)
        y = sampling.block_element(rng, [3, 5])
        lhs = evaluate(state, z.embed() * y)
        fz = cond_expect(phi, z.embed())
        fy = cond_expect(phi, y)
        rhs = evaluate(state, fz.embed() * fy.embed())
        assert abs(lhs - rhs) <= 1e-10
        assert fz.max_diff(z) <= 1e-12


def test_nfold_two_blocks_matches_pair_identity():
    rng = random.Random(10)
    state = vacuum_state()
    phi = PhiState.singular()
    x = sampling.block_element(rng, [1, 2])
    y = sampling.block_element(rng, [4])
    lines = dict(nfold_telescoping_lines(state, phi, [x, y]))
    lhs = evaluate(state, x * y)
    fx, fy = cond_expect(phi, x), cond_expect(phi, y)
    rhs = evaluate(state, fx.embed() * fy.embed())
    assert abs(lines["product"] - lhs) <= 1e-12
    assert abs(lines["stage1_factorized"] - rhs) <= 1e-12
    assert abs(lines["fully_factored"] - rhs) <= 1e-12


def test_nfold_factorization_vacuum_singleton_blocks():
    report = check_nfold_factorization(
        vacuum_state(), PhiState.singular(), n=4, n_samples=20, seed=11
    )
    assert report.passed
    assert report.max_deviation <= 1e-9


def test_nfold_telescoping_lines_all_equal_n3():
    rng = random.Random(12)
    state = vacuum_state()
    phi = PhiState.singular()
    for _ in range(20):
        blocks = sampling.disjoint_blocks(rng, range(1, 9), 3, max_block=2)
        factors = [sampling.block_element(rng, b) for b in blocks]
        lines = nfold_telescoping_lines(state, phi, factors)
        base = lines[0][1]
        for label, value in lines[1:]:
            assert abs(value - base) <= 1e-9, label


def test_classify_symmetric():
    result = classify_definetti(symmetric_state(0.5), seed=13)
    assert (result.symmetric, result.expected, result.iid, result.consistent) == (
        True,
        True,
        True,
        True,
    )


def test_classify_expected_nonsymmetric():
    result = classify_definetti(expected_nonsymmetric(), seed=14)
    assert (result.symmetric, result.expected, result.iid, result.consistent) == (
        False,
        True,
        False,
        True,
    )


def test_classify_nonexpected():
    result = classify_definetti(nonexpected(), seed=15)
    assert (result.symmetric, result.expected, result.iid, result.consistent) == (
        False,
        False,
        False,
        True,
    )
    ratio_reports = [r for r in result.reports if r.name == "preserving_expectation_exists"]
    assert len(ratio_reports) == 1
    assert ratio_reports[0].witness["ratio"] < 1.0 - 1e-12


def test_checkers_agree_with_dense_engine():
    states = [vacuum_state(), expected_nonsymmetric(), nonexpected(), symmetric_state(0.4)]
    for state in states:
        sparse = check_exchangeable(state, n_words=30, seed=16, engine=SPARSE_ENGINE)
        dense = check_exchangeable(state, n_words=30, seed=16, engine=DENSE_ENGINE)
        assert sparse.passed == dense.passed
        assert abs(sparse.max_deviation - dense.max_deviation) <= 1e-10

    state = vacuum_state()
    phi = PhiState.singular()
    for checker, kwargs in (
        (check_identically_distributed, {"seed": 17}),
        (check_pair_independence, {"n_samples": 20, "seed": 18}),
        (check_nfold_factorization, {"n": 3, "n_samples": 10, "seed": 19}),
    ):
        sparse = checker(state, phi, engine=SPARSE_ENGINE, **kwargs)
        dense = checker(state, phi, engine=DENSE_ENGINE, **kwargs)
        assert sparse.passed == dense.passed
        assert abs(sparse.max_deviation - dense.max_deviation) <= 1e-10


def test_classification_consistent_on_random_sweep():
    rng = random.Random(20)
    for slot in range(60):
        state, branch = sampling.stratified_state(rng, slot, max_rank=5)
        result = classify_definetti(state, seed=21 + slot)
        assert result.consistent, (branch, state.gamma)
        if branch in ("vacuum", "symmetric_mixed", "infinity"):
            assert result.symmetric and result.iid
        elif branch == "expected_nonsymmetric":
            assert result.expected and not result.symmetric and not result.iid
        else:
            assert not result.expected and not result.symmetric and not result.iid


def test_report_invariant_passed_iff_within_tolerance():
    state = BooleanState(1.0, TraceClassOperator.rank_one(site_vector(1)))
    report = check_exchangeable(state, n_words=30, seed=22)
    assert report.passed == (report.max_deviation <= 1e-9)
    assert (report.witness is not None) == (not report.passed)


def test_relation_suites_pass():
    assert check_boolean_relations(n_samples=200, seed=23).passed
    dictionary = check_matrix_unit_dictionary(max_site=8)
    assert dictionary.passed and dictionary.max_deviation == 0
    assert check_embedding_homomorphism(n_samples=150, seed=24).passed
