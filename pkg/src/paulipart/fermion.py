"""Fermion-to-qubit encodings and linear-time structural partitioning.

Number, number-excitation and double-excitation terms are expanded into Pauli
strings under the Jordan-Wigner or parity encoding.  The strings of one
double-excitation term split into two commuting families by the parity of
their Y count; all I/Z strings from number-type terms share one family.  No
pairwise commutation test is performed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import IndexOutOfRange, ParseError, UnsupportedIndexPattern
from .pauli import Hamiltonian, HamiltonianTerm, PauliString
from .partition import PartitionMode, PartitionSet

# Sparse operator: {(z, x): complex coefficient} over +1-signed letter strings.
Operator = dict[tuple[int, int], complex]

_ZERO = 1e-12


class Encoding(str, enum.Enum):
    JW = "jw"
    PARITY = "parity"


class TermKind(str, enum.Enum):
    NUMBER = "N"
    NUMBER_EXCITATION = "NE"
    DOUBLE_EXCITATION = "DE"


@dataclass(frozen=True)
class FermionicTerm:
    """``h a+_p a_p``, ``h a+_p a+_q a_p a_q``, or ``h a+_p a+_q a_r a_s + h.c.``.

    ``coefficient_imag`` is only meaningful for double excitations, where the
    complex weight ``h = coefficient + i*coefficient_imag`` multiplies the
    operator and ``conj(h)`` its Hermitian conjugate.
    """

    kind: TermKind
    indices: tuple[int, ...]
    coefficient: float
    n_modes: int
    coefficient_imag: float = 0.0

    def __post_init__(self):
        arity = {TermKind.NUMBER: 1, TermKind.NUMBER_EXCITATION: 2, TermKind.DOUBLE_EXCITATION: 4}
        kind = TermKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if len(self.indices) != arity[kind]:
            raise ValueError(f"{kind.value} term needs {arity[kind]} indices")
        if len(set(self.indices)) != len(self.indices):
            raise ValueError(f"indices {self.indices} are not distinct")
        for i in self.indices:
            if not 0 <= i < self.n_modes:
                raise IndexOutOfRange(f"mode index {i} outside 0..{self.n_modes - 1}")
        if kind is not TermKind.DOUBLE_EXCITATION and self.coefficient_imag:
            raise ValueError("only double excitations take an imaginary coefficient part")

    @classmethod
    def number(cls, p: int, coefficient: float, n_modes: int) -> "FermionicTerm":
        return cls(TermKind.NUMBER, (p,), coefficient, n_modes)

    @classmethod
    def number_excitation(cls, p: int, q: int, coefficient: float, n_modes: int) -> "FermionicTerm":
        return cls(TermKind.NUMBER_EXCITATION, (p, q), coefficient, n_modes)

    @classmethod
    def double_excitation(cls, p: int, q: int, r: int, s: int, coefficient: float, n_modes: int,
                          coefficient_imag: float = 0.0) -> "FermionicTerm":
        """Canonicalize to p > q and r > s, flipping the sign once per swap."""
        sign = 1.0
        if p < q:
            p, q, sign = q, p, -sign
        if r < s:
            r, s, sign = s, r, -sign
        return cls(TermKind.DOUBLE_EXCITATION, (p, q, r, s), sign * coefficient, n_modes,
                   sign * coefficient_imag)

    @property
    def complex_coefficient(self) -> complex:
        return complex(self.coefficient, self.coefficient_imag)


# --- sparse Pauli algebra with complex phases ---------------------------------

def _mul_letters(z1: int, x1: int, z2: int, x2: int) -> tuple[int, int, int]:
    """Product of +1-signed strings: returns (z, x, k) with phase i**k."""
    z, x = z1 ^ z2, x1 ^ x2
    k = ((z1 & x1).bit_count() + (z2 & x2).bit_count() - (z & x).bit_count()
         + 2 * (z1 & x2).bit_count()) % 4
    return z, x, k


_I_POWERS = (1, 1j, -1, -1j)


def op_mul(a: Operator, b: Operator) -> Operator:
    out: Operator = {}
    for (z1, x1), c1 in a.items():
        for (z2, x2), c2 in b.items():
            z, x, k = _mul_letters(z1, x1, z2, x2)
            out[(z, x)] = out.get((z, x), 0) + c1 * c2 * _I_POWERS[k]
    return {key: c for key, c in out.items() if abs(c) > _ZERO}


def _below(p: int) -> int:
    return (1 << p) - 1


def _above(p: int, n: int) -> int:
    return ((1 << n) - 1) & ~((1 << (p + 1)) - 1)


def ladder(p: int, n_modes: int, encoding: Encoding, dagger: bool) -> Operator:
    """``a_p`` (or ``a+_p``) as a sparse Pauli operator."""
    bit = 1 << p
    phase = -0.5j if dagger else 0.5j
    if encoding is Encoding.JW:
        chain = _below(p)  # Z_{p-1} ... Z_0
        return {(chain, bit): 0.5, (chain | bit, bit): phase}
    chain = _above(p, n_modes)  # X_{N-1} ... X_{p+1}
    zp = 1 << (p - 1) if p > 0 else 0
    return {(zp, chain | bit): 0.5, (bit, chain | bit): phase}


def fermion_operator(term: FermionicTerm, encoding: Encoding) -> Operator:
    """Full (Hermitian) qubit operator of a term, identity component included."""
    encoding = Encoding(encoding)
    n = term.n_modes

    def a(p, dagger=False):
        return ladder(p, n, encoding, dagger)

    def chain(*ops):
        out = {(0, 0): 1.0}
        for op in ops:
            out = op_mul(out, op)
        return out

    if term.kind is TermKind.NUMBER:
        (p,) = term.indices
        body = chain(a(p, True), a(p))
        return {k: term.coefficient * c for k, c in body.items()}
    if term.kind is TermKind.NUMBER_EXCITATION:
        p, q = term.indices
        body = chain(a(p, True), a(q, True), a(p), a(q))
        return {k: term.coefficient * c for k, c in body.items()}
    p, q, r, s = term.indices
    body = chain(a(p, True), a(q, True), a(r), a(s))
    h = term.complex_coefficient
    # h*A + conj(h)*A^dagger has real weight 2*Re(h*c) on each string of A.
    return {k: 2 * (h * c).real for k, c in body.items()}


def _to_terms(op: Operator, n_modes: int) -> list[HamiltonianTerm]:
    terms = []
    for (z, x), c in op.items():
        c = complex(c)
        if abs(c.imag) > 1e-9:
            raise ArithmeticError(f"non-Hermitian expansion: coefficient {c}")
        if abs(c.real) > _ZERO:
            terms.append(HamiltonianTerm(c.real, PauliString(n_modes, z, x)))
    return terms


def encode_jw(t: FermionicTerm) -> list[HamiltonianTerm]:
    """Jordan-Wigner expansion of ``t``; an all-I term carries the constant offset."""
    return _to_terms(fermion_operator(t, Encoding.JW), t.n_modes)


def _check_parity_pattern(t: FermionicTerm) -> None:
    if t.kind is not TermKind.DOUBLE_EXCITATION:
        return
    a, b, c, d = sorted(t.indices, reverse=True)
    if not (a - 1 > b and b - 1 > c and c - 1 > d):
        raise UnsupportedIndexPattern(
            f"parity encoding needs indices separated by at least 2, got {t.indices}"
        )


def encode_parity(t: FermionicTerm) -> list[HamiltonianTerm]:
    _check_parity_pattern(t)
    return _to_terms(fermion_operator(t, Encoding.PARITY), t.n_modes)


def encode(t: FermionicTerm, encoding: Encoding | str) -> list[HamiltonianTerm]:
    return encode_jw(t) if Encoding(encoding) is Encoding.JW else encode_parity(t)


@dataclass
class EncodedGroup:
    family_even: list[HamiltonianTerm] = field(default_factory=list)
    family_odd: list[HamiltonianTerm] = field(default_factory=list)
    qwc_pool: list[HamiltonianTerm] = field(default_factory=list)
    offset: float = 0.0


def group_term(t: FermionicTerm, encoding: Encoding | str) -> EncodedGroup:
    group = EncodedGroup()
    for term in encode(t, encoding):
        p = term.pauli
        if p.is_identity():
            group.offset += term.coefficient
        elif t.kind is not TermKind.DOUBLE_EXCITATION:
            group.qwc_pool.append(term)
        elif p.y_count % 2 == 0:
            group.family_even.append(term)
        else:
            group.family_odd.append(term)
    return group


@dataclass
class StructuralPartition(PartitionSet):
    offset: float = 0.0


def partition_structural(terms: Sequence[FermionicTerm], encoding: Encoding | str) -> StructuralPartition:
    """Encode and group every term; families in term order, even before odd, I/Z pool last."""
    encoding = Encoding(encoding)
    if not terms:
        raise ValueError("no fermionic terms")
    n_modes = terms[0].n_modes
    coeffs: dict[tuple[int, int], float] = {}
    family_of: dict[tuple[int, int], int] = {}
    n_families = 0
    offset = 0.0
    pool: list[HamiltonianTerm] = []

    def place(strings: Iterable[HamiltonianTerm], family: int) -> None:
        for term in strings:
            key = (term.pauli.z, term.pauli.x)
            coeffs[key] = coeffs.get(key, 0.0) + term.coefficient
            family_of.setdefault(key, family)

    for t in terms:
        if t.n_modes != n_modes:
            raise ValueError("terms disagree on the number of modes")
        group = group_term(t, encoding)
        offset += group.offset
        pool.extend(group.qwc_pool)
        for fam in (group.family_even, group.family_odd):
            if fam:
                place(fam, n_families)
                n_families += 1
    if pool:
        place(pool, n_families)

    kept = [key for key, c in coeffs.items() if abs(c) > _ZERO]
    if not kept:
        raise ValueError("all encoded strings cancelled")
    h = Hamiltonian(n_modes, [HamiltonianTerm(coeffs[k], PauliString(n_modes, *k)) for k in kept])
    grouped: dict[int, list[int]] = {}
    for idx, key in enumerate(kept):
        grouped.setdefault(family_of[key], []).append(idx)
    families = [grouped[f] for f in sorted(grouped)]
    return StructuralPartition(families, PartitionMode.GC, h, f"structural-{encoding.value}", offset=offset)


def encode_hamiltonian(terms: Sequence[FermionicTerm], encoding: Encoding | str) -> Hamiltonian:
    """Sum of all encoded terms, identity included as an all-I string."""
    if not terms:
        raise ValueError("no fermionic terms")
    n = terms[0].n_modes
    out = []
    for t in terms:
        out.extend(encode(t, encoding))
    return Hamiltonian(n, out)


def parse_fermionic(text: str) -> list[FermionicTerm]:
    """Parse ``modes <N>`` then ``N c p`` / ``NE c p q`` / ``DE c p q r s [imag]`` lines."""
    n_modes = None
    terms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        head = fields[0]
        try:
            if head == "modes":
                if n_modes is not None or len(fields) != 2:
                    raise ParseError("duplicate or malformed 'modes' header", lineno)
                n_modes = int(fields[1])
                if n_modes < 1:
                    raise ParseError("mode count must be positive", lineno)
                continue
            if n_modes is None:
                raise ParseError("'modes <N>' header must come first", lineno)
            coeff = float(fields[1])
            idx = [int(v) for v in fields[2:6]]
            if head == "N" and len(fields) == 3:
                terms.append(FermionicTerm.number(idx[0], coeff, n_modes))
            elif head == "NE" and len(fields) == 4:
                terms.append(FermionicTerm.number_excitation(idx[0], idx[1], coeff, n_modes))
            elif head == "DE" and len(fields) in (6, 7):
                imag = float(fields[6]) if len(fields) == 7 else 0.0
                terms.append(FermionicTerm.double_excitation(*idx, coeff, n_modes, imag))
            else:
                raise ParseError(f"unrecognised term line {line!r}", lineno)
        except ParseError:
            raise
        except (ValueError, IndexError) as exc:
            raise ParseError(str(exc), lineno) from None
    if not terms:
        raise ParseError("no fermionic terms found")
    return terms
