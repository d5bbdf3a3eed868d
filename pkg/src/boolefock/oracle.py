"""Dense-truncation reference implementations.

Each function rebuilds its inputs as dense numpy matrices over the finite
basis spanned by the vacuum and every site appearing in any input, runs the
computation with plain dense linear algebra, and converts back.  Products
of finitely supported operators never leave that basis, so the truncation
is exact; the only arithmetic shared with the sparse kernel is complex
multiplication itself.  Tests substitute these for the kernel to cross
check every operation.
"""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

import numpy as np

from .algebra import CHOP, VACUUM, BooleanElement, FockVector, Index
from .fock import TestAlgebraElement
from .states import BooleanState, TraceClassOperator
from .tail import PhiState, TailElement


def truncation_basis(*site_groups: Sequence[int]) -> List[Index]:
    """The vacuum plus the union of the given site collections, sorted."""
    sites = set()
    for group in site_groups:
        sites.update(group)
    return [VACUUM] + sorted(sites)


def dense_compact(x: BooleanElement, basis: List[Index]) -> np.ndarray:
    pos = {ix: k for k, ix in enumerate(basis)}
    mat = np.zeros((len(basis), len(basis)), dtype=complex)
    for (m, n), amp in x.compact.items():
        mat[pos[m], pos[n]] = amp
    return mat


def dense_full(x: BooleanElement, basis: List[Index]) -> np.ndarray:
    """Compact part plus the identity coefficient on the truncated space."""
    return dense_compact(x, basis) + x.scalar * np.eye(len(basis), dtype=complex)


def element_from_dense(
    mat: np.ndarray, scalar: complex, basis: List[Index]
) -> BooleanElement:
    entries: Dict[Tuple[Index, Index], complex] = {}
    for r, m in enumerate(basis):
        for c, n in enumerate(basis):
            amp = complex(mat[r, c])
            if abs(amp) >= CHOP:
                entries[(m, n)] = amp
    return BooleanElement(entries, scalar)


def dense_vector(v: FockVector, basis: List[Index]) -> np.ndarray:
    pos = {ix: k for k, ix in enumerate(basis)}
    arr = np.zeros(len(basis), dtype=complex)
    arr[pos[VACUUM]] = v.vacuum_amp
    for i, amp in v.wave.items():
        arr[pos[i]] = amp
    return arr


def dense_density(t: TraceClassOperator, basis: List[Index]) -> np.ndarray:
    mat = np.zeros((len(basis), len(basis)), dtype=complex)
    for w, xi in t.eigenpairs:
        col = dense_vector(xi, basis)
        mat += w * np.outer(col, col.conjugate())
    return mat


def dense_mul(x: BooleanElement, y: BooleanElement) -> BooleanElement:
    basis = truncation_basis(x.sites(), y.sites())
    prod = dense_full(x, basis) @ dense_full(y, basis)
    scalar = x.scalar * y.scalar
    compact = prod - scalar * np.eye(len(basis), dtype=complex)
    return element_from_dense(compact, scalar, basis)


def dense_add(x: BooleanElement, y: BooleanElement) -> BooleanElement:
    basis = truncation_basis(x.sites(), y.sites())
    total = dense_compact(x, basis) + dense_compact(y, basis)
    return element_from_dense(total, x.scalar + y.scalar, basis)


def dense_adjoint(x: BooleanElement) -> BooleanElement:
    basis = truncation_basis(x.sites())
    return element_from_dense(
        dense_compact(x, basis).conjugate().T, x.scalar.conjugate(), basis
    )


def dense_apply(x: BooleanElement, v: FockVector) -> FockVector:
    basis = truncation_basis(x.sites(), v.sites())
    out = dense_full(x, basis) @ dense_vector(v, basis)
    wave = {}
    vac = 0j
    for k, ix in enumerate(basis):
        amp = complex(out[k])
        if ix == VACUUM:
            vac = amp
        elif abs(amp) >= CHOP:
            wave[ix] = amp
    return FockVector(vac, wave)


def dense_evaluate(state: BooleanState, x: BooleanElement) -> complex:
    if state.gamma == 0.0:
        return complex(x.scalar)
    basis = truncation_basis(x.sites(), state.density.site_support())
    t = dense_density(state.density, basis)
    return state.gamma * complex(np.trace(t @ dense_compact(x, basis))) + x.scalar


def dense_moment(
    state: BooleanState, word: Sequence[Tuple[int, TestAlgebraElement]]
) -> complex:
    if not word:
        raise ValueError("moment requires a non-empty word")
    sites = [j for j, _ in word]
    supp = state.density.site_support() if state.gamma != 0.0 else ()
    basis = truncation_basis(sites, supp)
    pos = {ix: k for k, ix in enumerate(basis)}
    dim = len(basis)
    prod = np.eye(dim, dtype=complex)
    scalar = 1.0 + 0j
    for j, a in word:
        mat = a.beta * np.eye(dim, dtype=complex)
        mat[pos[VACUUM], pos[VACUUM]] = a.a
        mat[pos[VACUUM], pos[j]] = a.b
        mat[pos[j], pos[VACUUM]] = a.c
        mat[pos[j], pos[j]] = a.d
        prod = prod @ mat
        scalar *= a.beta
    compact = prod - scalar * np.eye(dim, dtype=complex)
    if state.gamma == 0.0:
        return complex(scalar)
    t = dense_density(state.density, basis)
    return state.gamma * complex(np.trace(t @ compact)) + scalar


def dense_cond_expect(phi: PhiState, x: BooleanElement) -> TailElement:
    basis = truncation_basis(
        x.sites(), phi.density.site_support() if phi.kind == "normal" else ()
    )
    pos = {ix: k for k, ix in enumerate(basis)}
    full = dense_full(x, basis)
    vac = complex(full[pos[VACUUM], pos[VACUUM]])
    if phi.kind == "singular":
        return TailElement(vac, x.scalar)
    corner = dense_compact(x, basis)
    corner[pos[VACUUM], :] = 0
    corner[:, pos[VACUUM]] = 0
    s = dense_density(phi.density, basis)
    return TailElement(vac, complex(np.trace(s @ corner)) + x.scalar)
