"""Property checkers for exchangeability and conditional independence.

Each checker samples identities, reports the worst deviation, and carries
a serialized witness for the first failure so a run can be replayed.  The
checkers route all kernel arithmetic through an :class:`Engine`, which
lets the test suite substitute the dense-truncation oracle for the sparse
kernel and compare verdicts.

``classify_definetti`` combines them into the De Finetti verdict for a
state: exchangeable if and only if conditionally independent and
identically distributed over the tail algebra.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import reduce
from itertools import combinations
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

from . import oracle, sampling
from .algebra import (
    VACUUM,
    BooleanElement,
    identity,
    matrix_unit,
    max_entry_diff,
    site_vector,
)
from .fock import (
    FinitePermutation,
    TestAlgebraElement,
    annihilator,
    creator,
    embed,
    permute_word,
    word_to_json,
)
from .jsonutil import encode_complex
from .sampling import SITE_POOL
from .states import BooleanState, TraceClassOperator, evaluate, moment
from .tail import PhiState, cond_expect, counterexample_ratio, is_expected, preserving_phi

#: Pass/fail tolerance for checkers; looser than the kernel tolerance to
#: absorb accumulation over length-5 words.
CHECK_TOL = 1e-9


class Engine(NamedTuple):
    """The kernel operations a checker needs, swappable for the oracle."""

    mul: Callable[[BooleanElement, BooleanElement], BooleanElement]
    evaluate: Callable[[BooleanState, BooleanElement], complex]
    moment: Callable[[BooleanState, Sequence], complex]
    cond_expect: Callable[[PhiState, BooleanElement], object]


SPARSE_ENGINE = Engine(
    mul=lambda x, y: x * y,
    evaluate=evaluate,
    moment=moment,
    cond_expect=cond_expect,
)

DENSE_ENGINE = Engine(
    mul=oracle.dense_mul,
    evaluate=oracle.dense_evaluate,
    moment=oracle.dense_moment,
    cond_expect=oracle.dense_cond_expect,
)


@dataclass
class CheckReport:
    """Outcome of one property check.

    ``passed`` holds exactly when ``max_deviation`` stayed within the
    tolerance; a failing report carries the first witness found.
    """

    name: str
    passed: bool
    max_deviation: float
    witness: Optional[dict]
    samples_run: int

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "max_deviation": self.max_deviation,
            "samples_run": self.samples_run,
            "witness": self.witness,
        }


class _Recorder:
    """Accumulates deviations and keeps the first failing witness."""

    def __init__(self, tol: float):
        self.tol = tol
        self.max_deviation = 0.0
        self.witness: Optional[dict] = None
        self.samples = 0

    def record(self, deviation: float, witness_factory: Callable[[], dict]) -> None:
        self.samples += 1
        if deviation > self.max_deviation:
            self.max_deviation = deviation
        if self.witness is None and deviation > self.tol:
            self.witness = witness_factory()

    def report(self, name: str) -> CheckReport:
        return CheckReport(
            name=name,
            passed=self.max_deviation <= self.tol,
            max_deviation=self.max_deviation,
            witness=self.witness,
            samples_run=self.samples,
        )


def site_pool(state: BooleanState, base: Sequence[int] = SITE_POOL) -> List[int]:
    """Sites a checker should probe: the base range, the support of the
    density, and one fresh site beyond both."""
    sites = set(base) | set(state.density.site_support())
    pool = sorted(sites)
    pool.append(pool[-1] + 1)
    return pool


#: Length-one probe elements isolating single matrix entries of a state:
#: the site diagonal, the two vacuum coherences, and a generic mix.
PROBE_ELEMENTS = (
    TestAlgebraElement(0, 0, 0, 1, 0),
    TestAlgebraElement(0, 1, 0, 0, 0),
    TestAlgebraElement(0, 0, 1, 0, 0),
    TestAlgebraElement(1, 2, 3, 4, 5),
)


def check_exchangeable(
    state: BooleanState,
    n_words: int = 200,
    max_len: int = 5,
    seed: int = 0,
    tol: float = CHECK_TOL,
    engine: Engine = SPARSE_ENGINE,
) -> CheckReport:
    """Compare word moments against their permuted counterparts.

    Runs deterministic length-one probes over every site pair first (these
    witness any non-symmetric state of the implemented family), then the
    requested number of random words against random permutations.
    """
    rng = random.Random(seed)
    pool = site_pool(state)
    rec = _Recorder(tol)

    def compare(word, perm):
        lhs = engine.moment(state, word)
        rhs = engine.moment(state, permute_word(perm, word))
        rec.record(
            abs(lhs - rhs),
            lambda: {
                "kind": "exchangeability",
                "word": word_to_json(word),
                "permutation": perm.to_json(),
                "lhs": encode_complex(lhs),
                "rhs": encode_complex(rhs),
            },
        )

    for probe in PROBE_ELEMENTS:
        for i, j in combinations(pool, 2):
            compare([(i, probe)], FinitePermutation.swap(i, j))
    for _ in range(n_words):
        compare(sampling.word(rng, pool, max_len), sampling.permutation(rng, pool))
    return rec.report("exchangeability")


def check_identically_distributed(
    state: BooleanState,
    phi: PhiState,
    sample_elements: Optional[Sequence[TestAlgebraElement]] = None,
    index_pairs: Optional[Sequence[Tuple[int, int]]] = None,
    seed: int = 0,
    tol: float = CHECK_TOL,
    engine: Engine = SPARSE_ENGINE,
) -> CheckReport:
    """Check that the conditioned one-site marginals do not depend on the site."""
    rng = random.Random(seed)
    pool = site_pool(state)
    if sample_elements is None:
        sample_elements = list(PROBE_ELEMENTS) + [
            sampling.test_element(rng) for _ in range(8)
        ]
    if index_pairs is None:
        index_pairs = list(combinations(pool, 2))
    rec = _Recorder(tol)
    for a in sample_elements:
        for i, k in index_pairs:
            lhs = engine.cond_expect(phi, embed(i, a))
            rhs = engine.cond_expect(phi, embed(k, a))
            rec.record(
                lhs.max_diff(rhs),
                lambda: {
                    "kind": "identical_distribution",
                    "site_i": i,
                    "site_k": k,
                    "element": a.to_json(),
                    "phi": phi.to_json(),
                    "lhs": lhs.to_json(),
                    "rhs": rhs.to_json(),
                },
            )
    return rec.report("identical_distribution")


def check_pair_independence(
    state: BooleanState,
    phi: PhiState,
    n_samples: int = 100,
    seed: int = 0,
    tol: float = CHECK_TOL,
    engine: Engine = SPARSE_ENGINE,
) -> CheckReport:
    """Check factorization of two-block moments through the tail algebra.

    Samples generic elements of the algebras of two disjoint site blocks
    joined with the tail and compares the state on their product with the
    state on the product of their conditional expectations.
    """
    rng = random.Random(seed)
    pool = site_pool(state)
    rec = _Recorder(tol)
    for _ in range(n_samples):
        block_x, block_y = sampling.disjoint_blocks(rng, pool, 2, max_block=3)
        x = sampling.block_element(rng, block_x)
        y = sampling.block_element(rng, block_y)
        lhs = engine.evaluate(state, engine.mul(x, y))
        fx = engine.cond_expect(phi, x)
        fy = engine.cond_expect(phi, y)
        rhs = engine.evaluate(state, engine.mul(fx.embed(), fy.embed()))
        rec.record(
            abs(lhs - rhs),
            lambda: {
                "kind": "pair_independence",
                "sites_x": list(block_x),
                "sites_y": list(block_y),
                "x": x.to_json(),
                "y": y.to_json(),
                "phi": phi.to_json(),
                "lhs": encode_complex(lhs),
                "rhs": encode_complex(rhs),
            },
        )
    return rec.report("pair_independence")


def nfold_telescoping_lines(
    state: BooleanState,
    phi: PhiState,
    factors: Sequence[BooleanElement],
    engine: Engine = SPARSE_ENGINE,
) -> List[Tuple[str, complex]]:
    """Every line of the telescoped n-fold factorization, in order.

    Starting from the plain product moment, each stage applies pair
    factorization against the remaining suffix, unfolds the accumulated
    expectation through the bimodule property, and rewrites via state
    preservation; the final line is the fully factored product of tail
    expectations.  All lines are equal when the state is conditionally
    independent over the tail algebra.
    """
    ev = lambda el: engine.evaluate(state, el)
    ex = lambda el: engine.cond_expect(phi, el)
    prod = lambda elems: reduce(engine.mul, elems)
    n = len(factors)
    lines: List[Tuple[str, complex]] = [("product", ev(prod(factors)))]
    head = factors[0]
    for t in range(1, n):
        suffix = prod(factors[t:])
        head_exp = ex(head)
        lines.append(
            (
                f"stage{t}_factorized",
                ev(engine.mul(head_exp.embed(), ex(suffix).embed())),
            )
        )
        unfolded = reduce(lambda u, v: u * v, [ex(f) for f in factors[:t]])
        lines.append(
            (
                f"stage{t}_bimodule",
                ev(engine.mul(unfolded.embed(), ex(suffix).embed())),
            )
        )
        if t < n - 1:
            absorbed = engine.mul(head_exp.embed(), suffix)
            lines.append((f"stage{t}_preserved", ev(ex(absorbed).embed())))
            head = engine.mul(head_exp.embed(), factors[t])
    fully = prod([ex(f).embed() for f in factors])
    lines.append(("fully_factored", ev(fully)))
    return lines


def check_nfold_factorization(
    state: BooleanState,
    phi: PhiState,
    n: int = 4,
    n_samples: int = 30,
    seed: int = 0,
    block_size: int = 1,
    tol: float = CHECK_TOL,
    engine: Engine = SPARSE_ENGINE,
) -> CheckReport:
    """Check the n-block factorization and each of its telescoping steps."""
    if n < 2:
        raise ValueError("n-fold factorization needs at least two blocks")
    rng = random.Random(seed)
    pool = site_pool(state)
    rec = _Recorder(tol)
    for _ in range(n_samples):
        blocks = sampling.disjoint_blocks(rng, pool, n, max_block=block_size)
        factors = [sampling.block_element(rng, block) for block in blocks]
        lines = nfold_telescoping_lines(state, phi, factors, engine)
        for (label_a, val_a), (label_b, val_b) in zip(lines, lines[1:]):
            rec.record(
                abs(val_a - val_b),
                lambda: {
                    "kind": "nfold_factorization",
                    "blocks": [list(b) for b in blocks],
                    "factors": [f.to_json() for f in factors],
                    "phi": phi.to_json(),
                    "step": f"{label_a} -> {label_b}",
                    "lhs": encode_complex(val_a),
                    "rhs": encode_complex(val_b),
                },
            )
    return rec.report("nfold_factorization")


@dataclass
class Classification:
    """The De Finetti verdict for one state."""

    symmetric: bool
    expected: bool
    iid: bool
    consistent: bool
    reports: List[CheckReport]
    max_deviation: float

    def to_json(self) -> dict:
        return {
            "symmetric": self.symmetric,
            "expected": self.expected,
            "iid": self.iid,
            "consistent": self.consistent,
            "max_deviation": self.max_deviation,
        }


def classify_definetti(
    state: BooleanState,
    seed: int = 0,
    n_words: int = 60,
    n_pairs: int = 24,
    max_len: int = 5,
    tol: float = CHECK_TOL,
    engine: Engine = SPARSE_ENGINE,
) -> Classification:
    """Classify a state: exchangeable, expected, conditionally i.i.d.

    The verdicts must agree (``consistent``): a state is exchangeable
    exactly when it is conditionally independent and identically
    distributed over the tail algebra.
    """
    reports: List[CheckReport] = []
    exch = check_exchangeable(
        state, n_words=n_words, max_len=max_len, seed=seed, tol=tol, engine=engine
    )
    reports.append(exch)
    symmetric = exch.passed

    expected = state.gamma == 0.0 or is_expected(state.density)
    if expected:
        phi = PhiState.singular() if state.gamma == 0.0 else preserving_phi(state.density)
        reports.append(
            CheckReport("preserving_expectation_exists", True, 0.0, None, 1)
        )
        ident = check_identically_distributed(
            state, phi, seed=seed + 1, tol=tol, engine=engine
        )
        pair = check_pair_independence(
            state, phi, n_samples=n_pairs, seed=seed + 2, tol=tol, engine=engine
        )
        reports.extend([ident, pair])
        iid = ident.passed and pair.passed
    else:
        found = counterexample_ratio(state.density)
        # The contraction identity is phi-free; record how well the
        # witness reproduces it under both implemented families.
        psi_x = engine.evaluate(BooleanState(1.0, state.density), found.element)
        dev = 0.0
        for phi in (PhiState.singular(), _site_phi(state)):
            fx = engine.cond_expect(phi, found.element)
            lhs = engine.evaluate(BooleanState(1.0, state.density), fx.embed())
            dev = max(dev, abs(lhs - found.ratio * psi_x))
        reports.append(
            CheckReport(
                "preserving_expectation_exists",
                False,
                dev,
                {
                    "kind": "expectation_ratio",
                    "ratio": found.ratio,
                    "element": found.element.to_json(),
                },
                1,
            )
        )
        iid = False

    consistent = symmetric == iid
    max_dev = max(r.max_deviation for r in reports)
    return Classification(symmetric, expected, iid, consistent, reports, max_dev)


def _site_phi(state: BooleanState) -> PhiState:
    """Some valid normal phi for ratio cross-checks: a site projection."""
    supp = state.density.site_support()
    target = supp[0] if supp else 1
    return PhiState.normal(TraceClassOperator(((1.0, site_vector(target)),)))


# ---------------------------------------------------------------------------
# Relation suites for the CLI.


def check_boolean_relations(
    n_samples: int = 500,
    seed: int = 0,
    tol: float = 1e-12,
    max_support: int = 16,
) -> CheckReport:
    """annihilator(f) * creator(g) == <g, f> * eps(#,#) on random pairs."""
    rng = random.Random(seed)
    sites = tuple(range(1, 2 * max_support + 1))
    rec = _Recorder(tol)
    for _ in range(n_samples):
        f = sampling.site_vector(rng, sites, max_support)
        g = sampling.site_vector(rng, sites, max_support)
        lhs = annihilator(f) * creator(g)
        rhs = g.inner(f) * matrix_unit(VACUUM, VACUUM)
        rec.record(
            max_entry_diff(lhs, rhs),
            lambda: {
                "kind": "boolean_relation",
                "f": {str(i): encode_complex(a) for i, a in sorted(f.wave.items())},
                "g": {str(i): encode_complex(a) for i, a in sorted(g.wave.items())},
            },
        )
    return rec.report("boolean_relations")


def check_matrix_unit_dictionary(max_site: int = 8) -> CheckReport:
    """The creator/annihilator dictionary holds exactly in matrix units."""
    rec = _Recorder(0.0)
    vacuum_unit = matrix_unit(VACUUM, VACUUM)
    for i in range(1, max_site + 1):
        b_dag = creator(site_vector(i))
        b = annihilator(site_vector(i))
        for lhs, rhs, label in (
            (b_dag, matrix_unit(i, VACUUM), f"creator_{i}"),
            (b, matrix_unit(VACUUM, i), f"annihilator_{i}"),
            (b * b_dag, vacuum_unit, f"vacuum_unit_{i}"),
        ):
            rec.record(
                max_entry_diff(lhs, rhs),
                lambda: {"kind": "matrix_unit_dictionary", "identity": label},
            )
        for j in range(1, max_site + 1):
            lhs = creator(site_vector(i)) * annihilator(site_vector(j))
            rec.record(
                max_entry_diff(lhs, matrix_unit(i, j)),
                lambda: {"kind": "matrix_unit_dictionary", "identity": f"unit_{i}_{j}"},
            )
    return rec.report("matrix_unit_dictionary")


def check_embedding_homomorphism(
    n_samples: int = 300, seed: int = 0, tol: float = 1e-12
) -> CheckReport:
    """embed(j, .) is multiplicative and unital."""
    rng = random.Random(seed)
    rec = _Recorder(tol)
    for j in SITE_POOL:
        rec.record(
            max_entry_diff(embed(j, TestAlgebraElement.unit()), identity()),
            lambda: {"kind": "embedding_homomorphism", "identity": f"unital_{j}"},
        )
    for _ in range(n_samples):
        j = rng.choice(SITE_POOL)
        a = sampling.test_element(rng)
        b = sampling.test_element(rng)
        rec.record(
            max_entry_diff(embed(j, a) * embed(j, b), embed(j, a * b)),
            lambda: {
                "kind": "embedding_homomorphism",
                "site": j,
                "a": a.to_json(),
                "b": b.to_json(),
            },
        )
    return rec.report("embedding_homomorphism")
