"""Seeded random generators for elements, vectors, densities, and states.

Every generator takes an explicit ``random.Random`` so identical seeds
reproduce identical objects, which is what makes the CLI reports
byte-stable.  Amplitudes are drawn with real and imaginary parts uniform
in [-1, 1]; moments are multilinear, so this small box already spans the
identities being checked.
"""

from __future__ import annotations

import random
from typing import List, Optional, Sequence, Tuple

from .algebra import VACUUM, BooleanElement, FockVector, vacuum_vector
from .fock import FinitePermutation, TestAlgebraElement
from .states import BooleanState, TraceClassOperator, gram_schmidt
from .tail import TailElement, is_expected

#: Default site range for words, permutations, and supports.
SITE_POOL = tuple(range(1, 9))


def complex_box(rng: random.Random, scale: float = 1.0) -> complex:
    return complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale))


def test_element(rng: random.Random) -> TestAlgebraElement:
    return TestAlgebraElement(*(complex_box(rng) for _ in range(5)))


def site_vector(
    rng: random.Random, sites: Sequence[int], max_support: int = 3
) -> FockVector:
    k = rng.randint(1, min(max_support, len(sites)))
    support = rng.sample(list(sites), k)
    return FockVector(0j, {i: complex_box(rng) for i in support})


def fock_vector(
    rng: random.Random, sites: Sequence[int], max_support: int = 3
) -> FockVector:
    v = site_vector(rng, sites, max_support)
    return FockVector(complex_box(rng), dict(v.wave))


def boolean_element(
    rng: random.Random,
    sites: Sequence[int] = SITE_POOL,
    max_entries: int = 4,
    with_scalar: bool = True,
) -> BooleanElement:
    indices = [VACUUM, *sites]
    entries = {}
    for _ in range(rng.randint(1, max_entries)):
        m = rng.choice(indices)
        n = rng.choice(indices)
        entries[(m, n)] = complex_box(rng)
    scalar = complex_box(rng) if with_scalar else 0j
    return BooleanElement(entries, scalar)


def word(
    rng: random.Random, sites: Sequence[int], max_len: int = 5
) -> List[Tuple[int, TestAlgebraElement]]:
    length = rng.randint(1, max_len)
    return [(rng.choice(list(sites)), test_element(rng)) for _ in range(length)]


def permutation(rng: random.Random, sites: Sequence[int]) -> FinitePermutation:
    pool = list(sites)
    k = rng.randint(2, len(pool)) if len(pool) >= 2 else len(pool)
    chosen = rng.sample(pool, k)
    images = chosen[:]
    rng.shuffle(images)
    return FinitePermutation(dict(zip(chosen, images)))


def tail_element(rng: random.Random) -> TailElement:
    return TailElement(complex_box(rng), complex_box(rng))


def positive_weights(rng: random.Random, count: int) -> List[float]:
    raw = [rng.uniform(0.1, 1.0) for _ in range(count)]
    total = sum(raw)
    return [w / total for w in raw]


def orthonormal_site_frame(
    rng: random.Random, sites: Sequence[int], count: int
) -> List[FockVector]:
    """Orthonormal vectors supported on the given sites only."""
    frame: List[FockVector] = []
    attempts = 0
    while len(frame) < count:
        attempts += 1
        if attempts > 50 * count:
            raise RuntimeError("failed to draw an independent site frame")
        candidate = site_vector(rng, sites, max_support=len(sites))
        frame = gram_schmidt(frame + [candidate])
    return frame


def expected_density(
    rng: random.Random,
    rank: int,
    sites: Sequence[int] = SITE_POOL,
    vacuum_weight: Optional[float] = None,
) -> TraceClassOperator:
    """A density with the vacuum vector as an eigenvector.

    With ``vacuum_weight`` set, one eigenpair is the vacuum projection at
    that weight and the remaining rank lives on the sites; with ``None``
    the vacuum lies in the kernel.  At rank one a vacuum weight forces the
    pure vacuum projection.
    """
    site_rank = rank if vacuum_weight is None else rank - 1
    if site_rank == 0:
        return TraceClassOperator.vacuum_projection()
    pairs: List[Tuple[float, FockVector]] = []
    rest = 1.0
    if vacuum_weight is not None:
        pairs.append((vacuum_weight, vacuum_vector()))
        rest = 1.0 - vacuum_weight
    if site_rank > 0:
        frame = orthonormal_site_frame(rng, sites, site_rank)
        for w, xi in zip(positive_weights(rng, site_rank), frame):
            pairs.append((w * rest, xi))
    return TraceClassOperator(tuple(pairs))


def nonexpected_density(
    rng: random.Random, rank: int, sites: Sequence[int] = SITE_POOL
) -> TraceClassOperator:
    """A density whose vacuum vector is not an eigenvector.

    Exactly one eigenvector mixes the vacuum with the sites, with overlap
    magnitude in [0.3, 0.8]; the rest are site-supported.  This keeps the
    contraction ratio of the counterexample bounded away from 1.
    """
    frame = orthonormal_site_frame(rng, sites, rank)
    alpha = rng.uniform(0.3, 0.8)
    beta = (1.0 - alpha * alpha) ** 0.5
    mixed = FockVector(alpha, {}) + beta * frame[0]
    vectors = [mixed] + frame[1:]
    t = TraceClassOperator(tuple(zip(positive_weights(rng, rank), vectors)))
    assert not is_expected(t)
    return t


def generic_density(
    rng: random.Random, rank: int, sites: Sequence[int] = SITE_POOL
) -> TraceClassOperator:
    """A density from random vacuum-mixing vectors; no expectedness bias."""
    raw = [fock_vector(rng, sites, max_support=len(sites)) for _ in range(rank)]
    frame = gram_schmidt(raw)
    while len(frame) < rank:
        frame = gram_schmidt(frame + [fock_vector(rng, sites, max_support=len(sites))])
    return TraceClassOperator(tuple(zip(positive_weights(rng, rank), frame)))


def block_element(rng: random.Random, block: Sequence[int]) -> BooleanElement:
    """A generic element of the algebra of a site block joined with the tail.

    Takes the form ``A + a * P`` with ``A`` a dense random matrix over the
    vacuum and the block sites and ``P`` the projection onto the sites
    outside the block.
    """
    indices = [VACUUM, *block]
    entries = {(m, n): complex_box(rng) for m in indices for n in indices}
    a = complex_box(rng)
    entries[(VACUUM, VACUUM)] -= a
    for i in block:
        entries[(i, i)] -= a
    return BooleanElement(entries, a)


def disjoint_blocks(
    rng: random.Random, pool: Sequence[int], n_blocks: int, max_block: int = 2
) -> List[List[int]]:
    sizes = [rng.randint(1, max_block) for _ in range(n_blocks)]
    while sum(sizes) > len(pool):
        k = max(range(n_blocks), key=lambda i: sizes[i])
        sizes[k] -= 1
    chosen = rng.sample(list(pool), sum(sizes))
    blocks = []
    at = 0
    for size in sizes:
        blocks.append(sorted(chosen[at : at + size]))
        at += size
    return blocks


#: Branch labels cycled by the stratified state generator.
STATE_BRANCHES = (
    "vacuum",
    "symmetric_mixed",
    "infinity",
    "expected_nonsymmetric",
    "nonexpected",
)


def stratified_state(
    rng: random.Random, slot: int, max_rank: int = 4, sites: Sequence[int] = SITE_POOL
) -> Tuple[BooleanState, str]:
    """Round-robin over the five state branches; parameters random.

    Cycling the branch with ``slot`` guarantees sweep coverage of every
    branch regardless of sample count.
    """
    branch = STATE_BRANCHES[slot % len(STATE_BRANCHES)]
    if branch == "vacuum":
        return BooleanState(1.0, TraceClassOperator.vacuum_projection()), branch
    if branch == "symmetric_mixed":
        gamma = rng.uniform(0.05, 0.95)
        return BooleanState(gamma, TraceClassOperator.vacuum_projection()), branch
    if branch == "infinity":
        return BooleanState(0.0, TraceClassOperator.vacuum_projection()), branch
    gamma = 1.0 if rng.random() < 0.5 else rng.uniform(0.1, 0.95)
    rank = rng.randint(1, max_rank)
    if branch == "expected_nonsymmetric":
        with_vacuum = rank > 1 and rng.random() < 0.5
        t = expected_density(
            rng, rank, sites, vacuum_weight=rng.uniform(0.1, 0.8) if with_vacuum else None
        )
        return BooleanState(gamma, t), branch
    t = nonexpected_density(rng, rank, sites)
    return BooleanState(gamma, t), branch
