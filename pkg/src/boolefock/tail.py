"""The tail algebra and conditional expectations onto it.

Up to multiplicity the tail algebra of a Boolean process is spanned by the
vacuum projection ``P = eps(#,#)`` and its complement ``I - P``; a tail
element is a pair ``(x, y)`` standing for ``x*P + y*(I - P)`` with
coordinatewise product.  Every conditional expectation onto it has the form

    F_phi(X) = <X e_#, e_#> * P + phi(Q X Q) * (I - P)

for a state ``phi`` on the bounded operators over the sites (``Q = I - P``).
Two computable families of ``phi`` are provided: ``normal`` states given by a
finite-rank density with no vacuum component, and the ``singular`` family
that factors through the quotient by the compacts and therefore reads off
the identity coefficient alone.

Whether some ``F_phi`` preserves the trace state of a density ``T`` is
decidable: it happens exactly when the vacuum vector is an eigenvector of
``T``.  The negative branch is settled for every ``phi`` at once because the
witness ``X`` below satisfies ``Q X Q = 0``, so the phi-dependent term drops
out of ``F_phi(X)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .algebra import (
    DEFAULT_TOL,
    VACUUM,
    BooleanElement,
    FockVector,
    vacuum_expectation,
    vacuum_vector,
)
from .states import TraceClassOperator


class DecisionError(ValueError):
    """A decision operation was invoked on the wrong branch."""


@dataclass(frozen=True)
class TailElement:
    """``x * P + y * (I - P)`` with P the vacuum projection."""

    x: complex
    y: complex

    def __post_init__(self):
        object.__setattr__(self, "x", complex(self.x))
        object.__setattr__(self, "y", complex(self.y))

    @classmethod
    def unit(cls) -> "TailElement":
        return cls(1, 1)

    def __mul__(self, other: "TailElement") -> "TailElement":
        if not isinstance(other, TailElement):
            return NotImplemented
        return TailElement(self.x * other.x, self.y * other.y)

    def __add__(self, other: "TailElement") -> "TailElement":
        if not isinstance(other, TailElement):
            return NotImplemented
        return TailElement(self.x + other.x, self.y + other.y)

    def adjoint(self) -> "TailElement":
        return TailElement(self.x.conjugate(), self.y.conjugate())

    def embed(self) -> BooleanElement:
        """Write the pair as an algebra element ``(x - y)*eps(#,#) + y*I``."""
        diff = self.x - self.y
        entries = {(VACUUM, VACUUM): diff} if diff != 0 else {}
        return BooleanElement(entries, self.y)

    def max_diff(self, other: "TailElement") -> float:
        return max(abs(self.x - other.x), abs(self.y - other.y))

    def to_json(self) -> dict:
        from .jsonutil import encode_complex

        return {"x": encode_complex(self.x), "y": encode_complex(self.y)}


@dataclass(frozen=True)
class PhiState:
    """A state on the bounded operators over the sites.

    ``normal`` wraps a finite-rank density supported on the sites only;
    ``singular`` vanishes on every compact and returns the identity
    coefficient.
    """

    kind: str
    density: Optional[TraceClassOperator] = None

    def __post_init__(self):
        if self.kind not in ("normal", "singular"):
            raise ValueError(f"phi kind must be 'normal' or 'singular', got {self.kind!r}")
        if self.kind == "singular":
            if self.density is not None:
                raise ValueError("a singular phi carries no density")
        else:
            if self.density is None:
                raise ValueError("a normal phi requires a density")
            for _, xi in self.density.eigenpairs:
                if xi.vacuum_amp != 0:
                    raise ValueError("a normal phi density must have no vacuum component")

    @classmethod
    def singular(cls) -> "PhiState":
        return cls("singular")

    @classmethod
    def normal(cls, density: TraceClassOperator) -> "PhiState":
        return cls("normal", density)

    def corner_value(self, x: BooleanElement) -> complex:
        """``phi(Q X Q)`` for ``Q = I - eps(#,#)``.

        The compact part of ``Q X Q`` is the site block of ``compact(x)``
        and the identity coefficient passes through.
        """
        if self.kind == "singular":
            return complex(x.scalar)
        total = complex(x.scalar)
        for (m, n), amp in x.compact.items():
            if m != VACUUM and n != VACUUM:
                total += amp * self.density.entry(n, m)
        return total

    def to_json(self) -> dict:
        if self.kind == "singular":
            return {"kind": "singular"}
        return {"kind": "normal", "S": self.density.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "PhiState":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise ValueError(f"expected a phi object with a kind, got {obj!r}")
        if obj["kind"] == "singular":
            return cls.singular()
        if obj["kind"] == "normal":
            return cls.normal(TraceClassOperator.from_json(obj["S"]))
        raise ValueError(f"unknown phi kind {obj['kind']!r}")


def cond_expect(phi: PhiState, x: BooleanElement) -> TailElement:
    """The conditional expectation ``F_phi`` applied to ``x``.

    Unital, idempotent through the tail embedding, and a bimodule map
    over the tail algebra.
    """
    return TailElement(vacuum_expectation(x), phi.corner_value(x))


def bimodule_property_holds(
    phi: PhiState,
    z: TailElement,
    x: BooleanElement,
    z2: TailElement,
    tol: float = DEFAULT_TOL,
) -> bool:
    """Check ``F_phi(Z X Z') == Z F_phi(X) Z'`` with Z, Z' tail elements."""
    lhs = cond_expect(phi, z.embed() * x * z2.embed())
    rhs = z * cond_expect(phi, x) * z2
    return lhs.max_diff(rhs) <= tol


def is_expected(t: TraceClassOperator, tol: float = DEFAULT_TOL) -> bool:
    """True iff the vacuum vector is an eigenvector of ``t``.

    Exactly the condition under which some conditional expectation onto
    the tail algebra preserves the trace state of ``t``.
    """
    image = t.apply(vacuum_vector())
    residual = sum(abs(a) ** 2 for a in image.wave.values()) ** 0.5
    return residual <= tol


def preserving_phi(t: TraceClassOperator, tol: float = DEFAULT_TOL) -> PhiState:
    """Build a ``phi`` whose conditional expectation preserves the trace state.

    For vacuum weight 1 the state is the vacuum state and every
    conditional expectation preserves it; the singular phi is returned by
    convention.  Otherwise the density is the site part of ``t`` rescaled
    by one minus the vacuum weight.
    """
    if not is_expected(t, tol):
        raise DecisionError(
            "no preserving conditional expectation exists: the vacuum vector "
            "is not an eigenvector of the density"
        )
    w = t.vacuum_weight()
    if w >= 1.0 - tol:
        return PhiState.singular()
    pairs = []
    for weight, xi in t.eigenpairs:
        mag = abs(xi.vacuum_amp)
        if mag >= 1.0 - tol:
            continue  # the vacuum-aligned eigenvector
        if mag > tol:
            # a degenerate eigenvalue listed in a basis mixing the vacuum
            # with the sites; re-diagonalize the site block instead
            pairs = _site_block_eigenpairs(t)
            break
        site_part = FockVector(0j, dict(xi.wave))
        pairs.append((weight, site_part))
    total = sum(wt for wt, _ in pairs)
    normalized = tuple(
        (wt / total, (1.0 / xi.norm()) * xi) for wt, xi in pairs
    )
    return PhiState.normal(TraceClassOperator(normalized))


def _site_block_eigenpairs(t: TraceClassOperator):
    """Eigenpairs of the site corner of ``t``, phase-canonicalized."""
    import numpy as np

    sites = t.site_support()
    dim = len(sites)
    mat = np.empty((dim, dim), dtype=complex)
    for r, m in enumerate(sites):
        for c, n in enumerate(sites):
            mat[r, c] = t.entry(m, n)
    values, vectors = np.linalg.eigh(mat)
    pairs = []
    for k in range(dim):
        lam = float(values[k])
        if lam <= 1e-12:
            continue
        col = vectors[:, k]
        pivot = max(range(dim), key=lambda i: abs(col[i]))
        col = col / (col[pivot] / abs(col[pivot]))
        wave = {
            site: complex(col[i]) for i, site in enumerate(sites) if abs(col[i]) > 1e-13
        }
        pairs.append((lam, FockVector(0j, wave)))
    return pairs


@dataclass(frozen=True)
class RatioWitness:
    """The contraction ratio and the element exhibiting it."""

    ratio: float
    element: BooleanElement


def counterexample_ratio(
    t: TraceClassOperator, tol: float = DEFAULT_TOL
) -> RatioWitness:
    """Witness that no conditional expectation preserves the trace state.

    Picks the eigenvector ``xi`` of largest weight among those overlapping
    the vacuum (first such on ties) and returns the rank-one element
    ``X = |e_#><xi|`` together with the ratio by which every ``F_phi``
    contracts it:

        psi_T(F_phi(X)) / psi_T(X) = sum_k (w_k / w_pivot) |<e_#, xi_k>|^2 < 1.

    The ratio is independent of ``phi`` because ``Q X Q = 0``.
    """
    if is_expected(t, tol):
        raise DecisionError(
            "the vacuum vector is an eigenvector of the density; a preserving "
            "conditional expectation exists"
        )
    pivot = None
    for k, (weight, xi) in enumerate(t.eigenpairs):
        if abs(xi.vacuum_amp) <= tol:
            continue
        if pivot is None or weight > t.eigenpairs[pivot][0]:
            pivot = k
    if pivot is None:  # unreachable: is_expected would have been true
        raise DecisionError("density has no eigenvector overlapping the vacuum")
    pivot_weight, pivot_vec = t.eigenpairs[pivot]
    ratio = sum(
        (w / pivot_weight) * abs(xi.vacuum_amp) ** 2 for w, xi in t.eigenpairs
    )
    entries = {(VACUUM, VACUUM): pivot_vec.vacuum_amp.conjugate()}
    for i, amp in pivot_vec.wave.items():
        entries[(VACUUM, i)] = amp.conjugate()
    return RatioWitness(float(ratio), BooleanElement(entries))


def preserving_cond_expect(
    t: TraceClassOperator, x: BooleanElement, tol: float = DEFAULT_TOL
) -> TailElement:
    """Closed form of the expectation preserving the trace state of ``t``.

        F(X) = <X e_#, e_#> * P + (psi_T(X) - w * <X e_#, e_#>) / (1 - w) * (I - P)

    with ``w`` the vacuum weight of ``t``.  Agrees with
    ``cond_expect(preserving_phi(t), x)`` everywhere.
    """
    if not is_expected(t, tol):
        raise DecisionError(
            "no preserving conditional expectation exists: the vacuum vector "
            "is not an eigenvector of the density"
        )
    w = t.vacuum_weight()
    if w >= 1.0 - tol:
        raise DecisionError(
            "vacuum weight is 1: the closed form degenerates (every "
            "conditional expectation preserves the vacuum state)"
        )
    vac = vacuum_expectation(x)
    psi = t.trace_against(x) + x.scalar
    return TailElement(vac, (psi - w * vac) / (1.0 - w))
