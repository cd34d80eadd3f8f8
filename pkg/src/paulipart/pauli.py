"""Pauli strings in symplectic (z, x) bit form, Hamiltonians, and commutation.

Qubit ``i`` is the ``i``-th letter from the left in text form and bit ``i`` of
the ``z``/``x`` integers.  A letter is I for ``(z, x) = (0, 0)``, Z for
``(1, 0)``, X for ``(0, 1)`` and Y for ``(1, 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import (
    EmptyString,
    InvalidCharacter,
    LengthMismatch,
    NonHermitianProduct,
    ParseError,
)

_LETTER_BITS = {"I": (0, 0), "Z": (1, 0), "X": (0, 1), "Y": (1, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}


@dataclass(frozen=True)
class PauliString:
    """Hermitian N-qubit Pauli operator ``sign * P_0 (x) ... (x) P_{N-1}``."""

    n_qubits: int
    z: int
    x: int
    sign: int = 1

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        limit = 1 << self.n_qubits
        if not (0 <= self.z < limit and 0 <= self.x < limit):
            raise ValueError("bit vectors wider than n_qubits")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @classmethod
    def from_letters(cls, text: str, sign: int = 1) -> "PauliString":
        return parse_pauli(text, sign)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, letter: str) -> "PauliString":
        zb, xb = _LETTER_BITS[letter]
        return cls(n_qubits, zb << qubit, xb << qubit)

    @property
    def letters(self) -> str:
        return "".join(
            _BITS_LETTER[((self.z >> i) & 1, (self.x >> i) & 1)]
            for i in range(self.n_qubits)
        )

    def letter(self, qubit: int) -> str:
        return _BITS_LETTER[((self.z >> qubit) & 1, (self.x >> qubit) & 1)]

    @property
    def support(self) -> int:
        return self.z | self.x

    @property
    def weight(self) -> int:
        return self.support.bit_count()

    @property
    def y_count(self) -> int:
        return (self.z & self.x).bit_count()

    def is_identity(self) -> bool:
        return self.z == 0 and self.x == 0

    def is_diagonal(self) -> bool:
        """True for strings built only from I and Z."""
        return self.x == 0

    def unsigned(self) -> "PauliString":
        return PauliString(self.n_qubits, self.z, self.x, 1)

    def __neg__(self) -> "PauliString":
        return PauliString(self.n_qubits, self.z, self.x, -self.sign)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def __str__(self) -> str:
        return ("-" if self.sign < 0 else "") + self.letters

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"


def parse_pauli(text: str, sign: int = 1) -> PauliString:
    """Parse a string of I/X/Y/Z letters; a leading ``+``/``-`` sets the sign."""
    if text and text[0] in "+-":
        if text[0] == "-":
            sign = -sign
        text = text[1:]
    if not text:
        raise EmptyString()
    z = x = 0
    for i, ch in enumerate(text):
        try:
            zb, xb = _LETTER_BITS[ch]
        except KeyError:
            raise InvalidCharacter(i, ch) from None
        z |= zb << i
        x |= xb << i
    return PauliString(len(text), z, x, sign)


def _check_lengths(a: PauliString, b: PauliString) -> None:
    if a.n_qubits != b.n_qubits:
        raise LengthMismatch(f"{a.n_qubits}-qubit vs {b.n_qubits}-qubit string")


def anticommuting_mask(a: PauliString, b: PauliString) -> int:
    """Bit mask of indices where the two letters anticommute."""
    return (a.x & b.z) ^ (a.z & b.x)


def commutes_qwc(a: PauliString, b: PauliString) -> bool:
    _check_lengths(a, b)
    return anticommuting_mask(a, b) == 0


def commutes_gc(a: PauliString, b: PauliString) -> bool:
    _check_lengths(a, b)
    return anticommuting_mask(a, b).bit_count() % 2 == 0


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Operator product ``a @ b``; raises if the phase is imaginary."""
    _check_lengths(a, b)
    z = a.z ^ b.z
    x = a.x ^ b.x
    # P = i^{|z&x|} X^x Z^z; moving Z^{z_a} past X^{x_b} costs (-1)^{|z_a & x_b|}.
    power = (
        (a.z & a.x).bit_count()
        + (b.z & b.x).bit_count()
        - (z & x).bit_count()
        + 2 * (a.z & b.x).bit_count()
    ) % 4
    if power % 2:
        raise NonHermitianProduct(f"{a} * {b} has phase {'i' if power == 1 else '-i'}")
    sign = a.sign * b.sign * (1 if power == 0 else -1)
    return PauliString(a.n_qubits, z, x, sign)


def product(paulis: Iterable[PauliString], n_qubits: int) -> PauliString:
    out = PauliString.identity(n_qubits)
    for p in paulis:
        out = multiply(out, p)
    return out


@dataclass(frozen=True)
class HamiltonianTerm:
    coefficient: float
    pauli: PauliString

    def __post_init__(self):
        if not math.isfinite(self.coefficient):
            raise ValueError("coefficient must be finite")
        if self.pauli.sign != 1:
            raise ValueError("term strings carry sign +1; fold signs into the coefficient")

    @property
    def signed_pauli(self) -> PauliString:
        """The string with the coefficient's sign attached (``-XX`` for ``-0.5 XX``)."""
        return -self.pauli if self.coefficient < 0 else self.pauli


class Hamiltonian:
    """Ordered, duplicate-free list of real-weighted Pauli strings."""

    def __init__(self, n_qubits: int, terms: Iterable[HamiltonianTerm] = ()):
        if n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        self.n_qubits = n_qubits
        merged: dict[tuple[int, int], float] = {}
        for term in terms:
            if term.pauli.n_qubits != n_qubits:
                raise LengthMismatch(
                    f"term {term.pauli} has {term.pauli.n_qubits} qubits, expected {n_qubits}"
                )
            key = (term.pauli.z, term.pauli.x)
            merged[key] = merged.get(key, 0.0) + term.coefficient
        self.terms: tuple[HamiltonianTerm, ...] = tuple(
            HamiltonianTerm(c, PauliString(n_qubits, z, x)) for (z, x), c in merged.items()
        )
        self._index = {key: i for i, key in enumerate(merged)}

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, "PauliString | str"]]) -> "Hamiltonian":
        """Build from ``(coefficient, string)`` pairs; string signs fold into coefficients."""
        terms = []
        for coeff, p in pairs:
            if isinstance(p, str):
                p = parse_pauli(p)
            terms.append(HamiltonianTerm(float(coeff) * p.sign, p.unsigned()))
        if not terms:
            raise ValueError("empty Hamiltonian")
        return cls(terms[0].pauli.n_qubits, terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[HamiltonianTerm]:
        return iter(self.terms)

    def __getitem__(self, i: int) -> HamiltonianTerm:
        return self.terms[i]

    @property
    def paulis(self) -> list[PauliString]:
        return [t.pauli for t in self.terms]

    @property
    def coefficients(self) -> list[float]:
        return [t.coefficient for t in self.terms]

    def index_of(self, pauli: PauliString) -> int:
        return self._index[(pauli.z, pauli.x)]

    def __repr__(self) -> str:
        return f"Hamiltonian(n_qubits={self.n_qubits}, terms={len(self.terms)})"


def parse_hamiltonian(text: str) -> Hamiltonian:
    """Parse ``<coefficient> <letters>`` lines; ``#`` starts a comment line."""
    pairs = []
    n_qubits = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ParseError(f"expected '<coefficient> <pauli>', got {line!r}", lineno)
        try:
            coeff = float(fields[0])
        except ValueError:
            raise ParseError(f"bad coefficient {fields[0]!r}", lineno) from None
        if not math.isfinite(coeff):
            raise ParseError(f"non-finite coefficient {fields[0]!r}", lineno)
        try:
            p = parse_pauli(fields[1])
        except ParseError as exc:
            raise ParseError(str(exc), lineno) from None
        if n_qubits is None:
            n_qubits = p.n_qubits
        elif p.n_qubits != n_qubits:
            raise ParseError(f"string {fields[1]} has {p.n_qubits} qubits, expected {n_qubits}", lineno)
        pairs.append((coeff, p))
    if not pairs:
        raise ParseError("no Hamiltonian terms found")
    return Hamiltonian.from_pairs(pairs)


def format_hamiltonian(h: Hamiltonian, header: Sequence[str] = ()) -> str:
    lines = [f"# {line}" for line in header]
    lines += [f"{t.coefficient!r} {t.pauli.letters}" for t in h.terms]
    return "\n".join(lines) + "\n"


def all_pauli_strings(n_qubits: int, include_identity: bool = True) -> list[PauliString]:
    """Every N-qubit string in lexicographic I<X<Y<Z letter order."""
    from itertools import product as iproduct

    out = [parse_pauli("".join(p)) for p in iproduct("IXYZ", repeat=n_qubits)]
    return out if include_identity else out[1:]
