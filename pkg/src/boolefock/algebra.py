"""Exact sparse arithmetic for operators of the form ``A + s*I``.

The underlying Hilbert space is spanned by a distinguished vacuum basis
vector ``e_#`` and site vectors ``e_1, e_2, ...``.  An element stores the
compact part ``A`` as a finitely supported matrix over that basis plus a
complex coefficient ``s`` of the identity.  The algebra they span is the
compacts-plus-identity C*-algebra generated by the Boolean annihilators
(see :mod:`boolefock.fock`).

All values in this module are immutable and every operation is a pure
function, so elements can be shared freely between threads.  Canonical
form is maintained throughout: stored amplitudes are never zero, and
arithmetic drops entries whose magnitude falls below ``CHOP`` to keep
rounding residue from inflating supports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Mapping, Tuple, Union

from .jsonutil import decode_complex, encode_complex

#: The distinguished vacuum index.
VACUUM = "#"

#: An index is either ``VACUUM`` or a site label (a positive int).
Index = Union[str, int]

#: Amplitudes below this magnitude are treated as rounding residue.
CHOP = 1e-14

#: Default comparison tolerance for float-valued identities.
DEFAULT_TOL = 1e-10


def check_site(ix: Index) -> int:
    if isinstance(ix, int) and not isinstance(ix, bool) and ix >= 1:
        return ix
    raise ValueError(f"site labels are integers >= 1, got {ix!r}")


def check_index(ix: Index) -> Index:
    if ix == VACUUM:
        return VACUUM
    return check_site(ix)


def index_key(ix: Index) -> Tuple[int, int]:
    """Sort key placing the vacuum before every site."""
    return (0, 0) if ix == VACUUM else (1, ix)


def index_to_json(ix: Index):
    return VACUUM if ix == VACUUM else int(ix)


def index_from_json(obj) -> Index:
    if obj == VACUUM:
        return VACUUM
    if isinstance(obj, int) and not isinstance(obj, bool):
        return check_site(obj)
    raise ValueError(f"expected '#' or a site integer, got {obj!r}")


def index_from_key(key: str) -> Index:
    """Parse an index that was used as a JSON object key."""
    if key == VACUUM:
        return VACUUM
    try:
        return check_site(int(key))
    except (TypeError, ValueError):
        raise ValueError(f"expected '#' or a site integer key, got {key!r}") from None


def _chop_map(entries: Dict, chop: float = CHOP) -> Dict:
    return {k: v for k, v in entries.items() if abs(v) >= chop}


@dataclass(frozen=True)
class FockVector:
    """A vector ``alpha * e_# + sum_i wave[i] * e_i`` with finite support.

    The inner product is linear in the first argument and conjugate
    linear in the second.
    """

    vacuum_amp: complex = 0j
    wave: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {}
        for ix, amp in self.wave.items():
            z = complex(amp)
            if z != 0:
                cleaned[check_site(ix)] = z
        object.__setattr__(self, "vacuum_amp", complex(self.vacuum_amp))
        object.__setattr__(self, "wave", cleaned)

    def amp(self, ix: Index) -> complex:
        if ix == VACUUM:
            return self.vacuum_amp
        return self.wave.get(ix, 0j)

    def sites(self) -> Tuple[int, ...]:
        return tuple(sorted(self.wave))

    def inner(self, other: "FockVector") -> complex:
        total = self.vacuum_amp * other.vacuum_amp.conjugate()
        for i, amp in self.wave.items():
            o = other.wave.get(i)
            if o is not None:
                total += amp * o.conjugate()
        return total

    def norm(self) -> float:
        return abs(self.inner(self)) ** 0.5

    def __add__(self, other: "FockVector") -> "FockVector":
        wave = dict(self.wave)
        for i, amp in other.wave.items():
            wave[i] = wave.get(i, 0j) + amp
        return FockVector(self.vacuum_amp + other.vacuum_amp, wave)

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + (-1) * other

    def __rmul__(self, c) -> "FockVector":
        c = complex(c)
        return FockVector(c * self.vacuum_amp, {i: c * a for i, a in self.wave.items()})

    def to_json(self) -> dict:
        out = {}
        if self.vacuum_amp != 0:
            out[VACUUM] = encode_complex(self.vacuum_amp)
        for i in sorted(self.wave):
            out[str(i)] = encode_complex(self.wave[i])
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "FockVector":
        if not isinstance(obj, dict):
            raise ValueError(f"expected a vector object, got {obj!r}")
        vac = 0j
        wave = {}
        for key, pair in obj.items():
            ix = index_from_key(key)
            amp = decode_complex(pair)
            if ix == VACUUM:
                vac = amp
            else:
                wave[ix] = amp
        return cls(vac, wave)


def vacuum_vector() -> FockVector:
    return FockVector(1.0, {})


def site_vector(i: int) -> FockVector:
    return FockVector(0j, {check_site(i): 1.0})


def basis_vector(ix: Index) -> FockVector:
    return vacuum_vector() if ix == VACUUM else site_vector(ix)


@dataclass(frozen=True)
class BooleanElement:
    """An operator ``compact + scalar * I`` in canonical form.

    ``compact`` maps ``(row, col)`` index pairs to nonzero amplitudes;
    equality is exact and entrywise.
    """

    compact: Mapping[Tuple[Index, Index], complex] = field(default_factory=dict)
    scalar: complex = 0j

    def __post_init__(self):
        cleaned = {}
        for key, amp in self.compact.items():
            m, n = key
            z = complex(amp)
            if z != 0:
                cleaned[(check_index(m), check_index(n))] = z
        object.__setattr__(self, "compact", cleaned)
        object.__setattr__(self, "scalar", complex(self.scalar))

    def entry(self, m: Index, n: Index) -> complex:
        return self.compact.get((m, n), 0j)

    def support_indices(self) -> Tuple[Index, ...]:
        seen = set()
        for m, n in self.compact:
            seen.add(m)
            seen.add(n)
        return tuple(sorted(seen, key=index_key))

    def sites(self) -> Tuple[int, ...]:
        return tuple(ix for ix in self.support_indices() if ix != VACUUM)

    def adjoint(self) -> "BooleanElement":
        return BooleanElement(
            {(n, m): amp.conjugate() for (m, n), amp in self.compact.items()},
            self.scalar.conjugate(),
        )

    def apply(self, v: FockVector) -> FockVector:
        out_vac = self.scalar * v.vacuum_amp
        out_wave = {i: self.scalar * a for i, a in v.wave.items()}
        for (m, n), amp in self.compact.items():
            coeff = amp * v.amp(n)
            if coeff == 0:
                continue
            if m == VACUUM:
                out_vac += coeff
            else:
                out_wave[m] = out_wave.get(m, 0j) + coeff
        return FockVector(out_vac, _chop_map(out_wave))

    def __add__(self, other: "BooleanElement") -> "BooleanElement":
        if not isinstance(other, BooleanElement):
            return NotImplemented
        entries = dict(self.compact)
        for key, amp in other.compact.items():
            entries[key] = entries.get(key, 0j) + amp
        return BooleanElement(_chop_map(entries), self.scalar + other.scalar)

    def __sub__(self, other: "BooleanElement") -> "BooleanElement":
        return self + (-1) * other

    def __neg__(self) -> "BooleanElement":
        return (-1) * self

    def __mul__(self, other):
        if isinstance(other, BooleanElement):
            by_row: Dict[Index, list] = {}
            for (p, q), amp in other.compact.items():
                by_row.setdefault(p, []).append((q, amp))
            prod: Dict[Tuple[Index, Index], complex] = {}
            for (m, n), a in self.compact.items():
                for q, b in by_row.get(n, ()):
                    key = (m, q)
                    prod[key] = prod.get(key, 0j) + a * b
            if self.scalar != 0:
                for key, b in other.compact.items():
                    prod[key] = prod.get(key, 0j) + self.scalar * b
            if other.scalar != 0:
                for key, a in self.compact.items():
                    prod[key] = prod.get(key, 0j) + a * other.scalar
            return BooleanElement(_chop_map(prod), self.scalar * other.scalar)
        if isinstance(other, (int, float, complex)):
            return self._scaled(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self._scaled(other)
        return NotImplemented

    def _scaled(self, c) -> "BooleanElement":
        c = complex(c)
        return BooleanElement(
            _chop_map({k: c * v for k, v in self.compact.items()}), c * self.scalar
        )

    def to_json(self) -> dict:
        rows = sorted(
            self.compact.items(),
            key=lambda kv: (index_key(kv[0][0]), index_key(kv[0][1])),
        )
        return {
            "scalar": encode_complex(self.scalar),
            "compact": [
                {
                    "row": index_to_json(m),
                    "col": index_to_json(n),
                    "amp": encode_complex(amp),
                }
                for (m, n), amp in rows
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BooleanElement":
        if not isinstance(obj, dict) or "scalar" not in obj or "compact" not in obj:
            raise ValueError(f"expected an element object with scalar/compact, got {obj!r}")
        entries = {}
        for item in obj["compact"]:
            key = (index_from_json(item["row"]), index_from_json(item["col"]))
            entries[key] = decode_complex(item["amp"])
        return cls(entries, decode_complex(obj["scalar"]))


def matrix_unit(m: Index, n: Index) -> BooleanElement:
    """The operator sending ``e_n`` to ``e_m`` and killing the rest."""
    return BooleanElement({(check_index(m), check_index(n)): 1.0})


def identity() -> BooleanElement:
    return BooleanElement({}, 1.0)


def zero() -> BooleanElement:
    return BooleanElement({}, 0j)


def vacuum_expectation(x: BooleanElement) -> complex:
    """The vacuum corner ``<X e_#, e_#>``."""
    return x.entry(VACUUM, VACUUM) + x.scalar


def max_entry_diff(x: BooleanElement, y: BooleanElement) -> float:
    """Largest entrywise deviation, including the identity coefficient."""
    dev = abs(x.scalar - y.scalar)
    for key in set(x.compact) | set(y.compact):
        dev = max(dev, abs(x.compact.get(key, 0j) - y.compact.get(key, 0j)))
    return dev


def max_amp_diff(v: FockVector, w: FockVector) -> float:
    dev = abs(v.vacuum_amp - w.vacuum_amp)
    for i in set(v.wave) | set(w.wave):
        dev = max(dev, abs(v.wave.get(i, 0j) - w.wave.get(i, 0j)))
    return dev
