"""Dense statevector simulation: gates, Pauli expectations, shot sampling.

Qubit 0 is the most significant bit of a basis index, so ``|01>`` is index 1
and the amplitude array reshaped to ``(2,) * N`` has qubit ``q`` on axis ``q``.
Sampling uses numpy's PCG64 generator seeded explicitly.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InsufficientShots, ParseError, QubitCountMismatch, TooManyQubits
from .pauli import PauliString
from .synthesis import Circuit, MeasurementMap

MAX_QUBITS = 16
NORM_TOL = 1e-10

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


class StateVector:
    def __init__(self, amplitudes, normalize: bool = False):
        amps = np.array(amplitudes, dtype=complex).ravel()
        n = amps.size.bit_length() - 1
        if amps.size < 2 or 1 << n != amps.size:
            raise ValueError(f"state length {amps.size} is not a power of two >= 2")
        if n > MAX_QUBITS:
            raise TooManyQubits(f"{n} qubits exceeds the statevector cap of {MAX_QUBITS}")
        norm = np.linalg.norm(amps)
        if normalize:
            if norm == 0:
                raise ValueError("zero vector")
            amps = amps / norm
        elif abs(norm - 1) > NORM_TOL:
            raise ValueError(f"state norm {norm} differs from 1")
        self.n_qubits = n
        self.amplitudes = amps

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        """Computational basis state from a bitstring, qubit 0 first."""
        if not bits or set(bits) - {"0", "1"}:
            raise ValueError(f"bad basis label {bits!r}")
        amps = np.zeros(1 << len(bits), dtype=complex)
        amps[int(bits, 2)] = 1
        return cls(amps)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy())

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits})"


def _check(state: StateVector, n_qubits: int) -> None:
    if state.n_qubits != n_qubits:
        raise QubitCountMismatch(f"state has {state.n_qubits} qubits, operator has {n_qubits}")


def _apply_gate(t: np.ndarray, name: str, qubits: tuple[int, ...]) -> np.ndarray:
    if name == "H":
        (q,) = qubits
        return np.moveaxis(np.tensordot(_H, t, axes=([1], [q])), 0, q)
    if name == "S":
        (q,) = qubits
        idx = [slice(None)] * t.ndim
        idx[q] = 1
        t[tuple(idx)] *= 1j
        return t
    if name == "CZ":
        a, b = qubits
        idx = [slice(None)] * t.ndim
        idx[a] = idx[b] = 1
        t[tuple(idx)] *= -1
        return t
    if name == "CNOT":
        c, tq = qubits
        idx = [slice(None)] * t.ndim
        idx[c] = 1
        sub = t[tuple(idx)]
        axis = tq - (1 if tq > c else 0)
        t[tuple(idx)] = np.flip(sub, axis=axis).copy()
        return t
    if name == "SWAP":
        a, b = qubits
        return np.swapaxes(t, a, b).copy()
    raise ValueError(f"unknown gate {name!r}")


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    _check(state, circuit.n_qubits)
    t = state.tensor().copy()
    for g in circuit.gates:
        t = _apply_gate(t, g.name, g.qubits)
    return StateVector(np.ascontiguousarray(t).ravel())


def _index_mask(bits: int, n: int) -> int:
    """Qubit bitmask -> basis-index bitmask (qubit q is index bit n-1-q)."""
    out = 0
    for q in range(n):
        if (bits >> q) & 1:
            out |= 1 << (n - 1 - q)
    return out


def apply_pauli(state: StateVector, p: PauliString) -> np.ndarray:
    """``P |psi>`` as a raw amplitude array."""
    _check(state, p.n_qubits)
    n = p.n_qubits
    zm, xm = _index_mask(p.z, n), _index_mask(p.x, n)
    idx = np.arange(1 << n, dtype=np.uint64)
    parity = np.bitwise_count(idx & np.uint64(zm)) & 1
    phase = p.sign * (1j ** ((p.z & p.x).bit_count() % 4))
    out = np.empty_like(state.amplitudes)
    out[(idx ^ np.uint64(xm)).astype(np.int64)] = phase * np.where(parity, -1, 1) * state.amplitudes
    return out


def expectation(state: StateVector, p: PauliString) -> float:
    value = np.vdot(state.amplitudes, apply_pauli(state, p))
    if abs(value.imag) > 1e-9:
        raise ArithmeticError(f"expectation of Hermitian {p} has imaginary part {value.imag}")
    return float(value.real)


def haar_random_state(n_qubits: int, seed: int) -> StateVector:
    """Independent standard complex Gaussian amplitudes, normalized."""
    if n_qubits > MAX_QUBITS:
        raise TooManyQubits(f"{n_qubits} qubits exceeds the statevector cap of {MAX_QUBITS}")
    if n_qubits < 1:
        raise ValueError("n_qubits must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    dim = 1 << n_qubits
    amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(amps, normalize=True)


def _bits_of(indices: np.ndarray, n: int) -> np.ndarray:
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return (indices[:, None] >> shifts[None, :]) & 1


@dataclass
class OutcomeTable:
    """One row per shot, one +-1 column per family member."""

    labels: list[str]
    values: np.ndarray

    @property
    def n_shots(self) -> int:
        return self.values.shape[0]

    def means(self) -> np.ndarray:
        return self.values.mean(axis=0)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.labels)
        w.writerows(self.values.tolist())
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "OutcomeTable":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows:
            raise ParseError("empty outcome table")
        try:
            values = np.array([[int(v) for v in r] for r in rows[1:] if r], dtype=np.int64)
        except ValueError as exc:
            raise ParseError(f"outcome table: {exc}") from None
        if values.size and not np.isin(values, (-1, 1)).all():
            raise ParseError("outcome table entries must be +1 or -1")
        return cls(rows[0], values.reshape(-1, len(rows[0])))


def sample_outcomes(state: StateVector, circuit: Circuit, mmap: MeasurementMap, shots: int,
                    seed: int) -> OutcomeTable:
    if shots < 1:
        raise InsufficientShots("need at least one shot")
    out = apply_circuit(state, circuit)
    probs = out.probabilities()
    probs = probs / probs.sum()
    rng = np.random.Generator(np.random.PCG64(seed))
    picks = rng.choice(probs.size, size=shots, p=probs)
    samples = _bits_of(picks.astype(np.int64), out.n_qubits)
    return OutcomeTable([str(m) for m in mmap.members()], mmap.outcome_matrix(samples))


def exact_outcome_expectations(state: StateVector, circuit: Circuit, mmap: MeasurementMap) -> np.ndarray:
    """Member means under the exact post-circuit distribution (no sampling)."""
    out = apply_circuit(state, circuit)
    probs = out.probabilities()
    samples = _bits_of(np.arange(probs.size, dtype=np.int64), out.n_qubits)
    return probs @ mmap.outcome_matrix(samples)


def parse_state(text: str) -> StateVector:
    """Amplitude file: ``basis <bits>``, or one ``re [im]`` amplitude per line."""
    amps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] == "basis":
            if amps or len(fields) != 2:
                raise ParseError("'basis <bits>' must be the only entry", lineno)
            try:
                return StateVector.basis(fields[1])
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
        try:
            if len(fields) > 2:
                raise ValueError("expected 're [im]'")
            amps.append(complex(float(fields[0]), float(fields[1]) if len(fields) == 2 else 0.0))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    if not amps:
        raise ParseError("state file has no amplitudes")
    try:
        return StateVector(amps, normalize=True)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def dense_pauli(p: PauliString) -> np.ndarray:
    """Full 2^N x 2^N matrix (Kronecker product, qubit 0 leftmost)."""
    mats = {
        "I": np.eye(2, dtype=complex),
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "Z": np.diag([1, -1]).astype(complex),
    }
    m = np.ones((1, 1), dtype=complex)
    for ch in p.letters:
        m = np.kron(m, mats[ch])
    return p.sign * m


def dense_expectation(state: StateVector, p: PauliString) -> float:
    return float(np.vdot(state.amplitudes, dense_pauli(p) @ state.amplitudes).real)


def members_expectations(state: StateVector, members: Sequence[PauliString]) -> np.ndarray:
    return np.array([expectation(state, p) for p in members])
