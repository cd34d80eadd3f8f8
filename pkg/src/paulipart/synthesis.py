"""Clifford measurement circuits for commuting families.

A family is first distilled into an independent basis (GF(2) elimination on
the symplectic vectors).  The basis is written as a stabilizer tableau: one
column per basis string, rows ``0..N-1`` the Z bits and rows ``N..2N-1`` the X
bits.  Synthesis applies H to make the X block full column rank, reduces it to
the identity with CNOT and SWAP, clears the Z block with S and CZ, and ends
with H on every measured qubit.  Each basis string is then a single Z on its
own qubit, and every family member is read out as a signed product of bits.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptyFamily,
    NotCommuting,
    NotDiagonalized,
    ParseError,
    RankDeficiency,
)
from .pauli import PauliString, commutes_gc, commutes_qwc, multiply, parse_pauli

FORMAT_VERSION = 1
# Above this many candidate H sets, fall back to a greedy single-swap search.
HSET_ENUMERATION_LIMIT = 2000

GATE_ARITY = {"H": 1, "S": 1, "CNOT": 2, "CZ": 2, "SWAP": 2}
ENTANGLING = frozenset({"CNOT", "CZ", "SWAP"})


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        if self.name not in GATE_ARITY:
            raise ValueError(f"unknown gate {self.name!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(self.qubits) != GATE_ARITY[self.name]:
            raise ValueError(f"{self.name} takes {GATE_ARITY[self.name]} operand(s)")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.name} operands must be distinct")

    def __str__(self) -> str:
        return " ".join([self.name, *map(str, self.qubits)])


def gate(name: str, *qubits: int) -> Gate:
    return Gate(name, qubits)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    measured_qubits: tuple[int, ...] = ()
    # (stage label, 2N x k tableau) pairs recorded during synthesis
    snapshots: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "measured_qubits", tuple(sorted(set(self.measured_qubits))))
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.n_qubits:
                    raise ValueError(f"gate {g} addresses qubit outside 0..{self.n_qubits - 1}")
        for q in self.measured_qubits:
            if not 0 <= q < self.n_qubits:
                raise ValueError(f"measured qubit {q} out of range")

    def __len__(self) -> int:
        return len(self.gates)

    @property
    def entangling_count(self) -> int:
        return sum(g.name in ENTANGLING for g in self.gates)

    def gate_strings(self) -> list[str]:
        return [str(g) for g in self.gates]

    def to_text(self) -> str:
        lines = [f"qubits {self.n_qubits}"]
        lines += [str(g) for g in self.gates]
        lines += [f"MEASURE {q}" for q in self.measured_qubits]
        return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> Circuit:
    n_qubits = None
    gates, measured = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *args = line.split()
        try:
            operands = [int(a) for a in args]
        except ValueError:
            raise ParseError(f"non-integer operand in {line!r}", lineno) from None
        if head == "qubits":
            if n_qubits is not None or len(operands) != 1 or operands[0] < 1:
                raise ParseError("malformed or repeated 'qubits' header", lineno)
            n_qubits = operands[0]
            continue
        if n_qubits is None:
            raise ParseError("'qubits <N>' header must come first", lineno)
        if any(not 0 <= q < n_qubits for q in operands):
            raise ParseError(f"qubit index out of range in {line!r}", lineno)
        if head == "MEASURE":
            if len(operands) != 1:
                raise ParseError("MEASURE takes one qubit", lineno)
            measured.append(operands[0])
            continue
        try:
            gates.append(Gate(head.upper(), tuple(operands)))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    if n_qubits is None:
        raise ParseError("missing 'qubits <N>' header")
    return Circuit(n_qubits, gates, measured)


# --- tableau ------------------------------------------------------------------

@dataclass(frozen=True)
class StabilizerTableau:
    """Independent, pairwise commuting basis strings as symplectic columns."""

    n_qubits: int
    columns: tuple[PauliString, ...]

    def __post_init__(self):
        cols = tuple(self.columns)
        object.__setattr__(self, "columns", cols)
        if not cols:
            raise EmptyFamily("tableau needs at least one column")
        if len(cols) > self.n_qubits:
            raise RankDeficiency(f"{len(cols)} columns cannot be independent on {self.n_qubits} qubits")
        for a, b in itertools.combinations(cols, 2):
            if not commutes_gc(a, b):
                raise NotCommuting(a, b)
        if _gf2_rank([(p.z << self.n_qubits) | p.x for p in cols]) != len(cols):
            raise RankDeficiency("tableau columns are linearly dependent")

    @property
    def k(self) -> int:
        return len(self.columns)

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(p.sign for p in self.columns)

    def rows(self) -> list[int]:
        """2N row bitmasks over the columns (bit j = column j)."""
        n = self.n_qubits
        rows = [0] * (2 * n)
        for j, p in enumerate(self.columns):
            for q in range(n):
                if (p.z >> q) & 1:
                    rows[q] |= 1 << j
                if (p.x >> q) & 1:
                    rows[n + q] |= 1 << j
        return rows

    def matrix(self) -> np.ndarray:
        return _rows_to_matrix(self.rows(), self.k)

    @classmethod
    def from_strings(cls, strings: Sequence[str | PauliString]) -> "StabilizerTableau":
        paulis = [s if isinstance(s, PauliString) else parse_pauli(s) for s in strings]
        return cls(paulis[0].n_qubits, tuple(paulis))


def _rows_to_matrix(rows: Sequence[int], k: int) -> np.ndarray:
    return np.array([[(r >> j) & 1 for j in range(k)] for r in rows], dtype=np.uint8).reshape(len(rows), k)


def _gf2_rank(vectors: Iterable[int]) -> int:
    basis: dict[int, int] = {}
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = v
                break
            v ^= basis[top]
    return len(basis)


@dataclass(frozen=True)
class Decomposition:
    """``member = sign * prod(basis[j] for j in indices)``, indices ascending."""

    indices: tuple[int, ...]
    sign: int


def extract_basis(family: Sequence[PauliString]) -> tuple[StabilizerTableau, list[Decomposition]]:
    """Choose an independent spanning subset and decompose every member over it.

    Y-free strings are preferred as basis elements (then original order), and
    the chosen strings keep their order of appearance in the family.
    """
    if not family:
        raise EmptyFamily("empty family")
    n = family[0].n_qubits
    for a, b in itertools.combinations(family, 2):
        if not commutes_gc(a, b):
            raise NotCommuting(a, b)
    if all(p.is_identity() for p in family):
        raise EmptyFamily("family contains only identity strings")

    def vec(p):
        return (p.z << n) | p.x

    order = sorted(range(len(family)), key=lambda i: (family[i].y_count, i))
    pivots: dict[int, int] = {}
    chosen = []
    for i in order:
        v = vec(family[i])
        while v:
            top = v.bit_length() - 1
            if top not in pivots:
                pivots[top] = v
                chosen.append(i)
                break
            v ^= pivots[top]
    chosen.sort()
    basis = [family[i] for i in chosen]
    tableau = StabilizerTableau(n, tuple(basis))

    # Elimination with combination tracking to express members over the basis.
    reduced: dict[int, tuple[int, int]] = {}
    for j, p in enumerate(basis):
        v, combo = vec(p), 1 << j
        while v:
            top = v.bit_length() - 1
            if top not in reduced:
                reduced[top] = (v, combo)
                break
            rv, rc = reduced[top]
            v, combo = v ^ rv, combo ^ rc
    decomps = []
    for p in family:
        v, combo = vec(p), 0
        while v:
            top = v.bit_length() - 1
            rv, rc = reduced[top]
            v, combo = v ^ rv, combo ^ rc
        idx = tuple(j for j in range(len(basis)) if (combo >> j) & 1)
        prod = PauliString.identity(n)
        for j in idx:
            prod = multiply(prod, basis[j])
        assert (prod.z, prod.x) == (p.z, p.x)
        decomps.append(Decomposition(idx, p.sign * prod.sign))
    return tableau, decomps


# --- synthesis ------------------------------------------------------------------

class _Work:
    """Mutable tableau rows plus the gate log."""

    def __init__(self, n: int, rows: list[int], k: int):
        self.n, self.rows, self.k = n, rows, k
        self.gates: list[Gate] = []
        self.snapshots: list[tuple[str, np.ndarray]] = []

    def snap(self, label: str) -> None:
        self.snapshots.append((label, _rows_to_matrix(self.rows, self.k)))

    def x(self, q: int) -> int:
        return self.rows[self.n + q]

    def z(self, q: int) -> int:
        return self.rows[q]

    def h(self, q):
        r, n = self.rows, self.n
        r[q], r[q + n] = r[q + n], r[q]
        self.gates.append(gate("H", q))

    def s(self, q):
        self.rows[q] ^= self.rows[q + self.n]
        self.gates.append(gate("S", q))

    def cnot(self, c, t):
        r, n = self.rows, self.n
        r[t + n] ^= r[c + n]
        r[c] ^= r[t]
        self.gates.append(gate("CNOT", c, t))

    def cz(self, a, b):
        r, n = self.rows, self.n
        r[a] ^= r[b + n]
        r[b] ^= r[a + n]
        self.gates.append(gate("CZ", min(a, b), max(a, b)))

    def swap(self, a, b):
        r, n = self.rows, self.n
        r[a], r[b] = r[b], r[a]
        r[a + n], r[b + n] = r[b + n], r[a + n]
        self.gates.append(gate("SWAP", a, b))


def _run(tableau: StabilizerTableau, hset: Sequence[int]) -> _Work:
    n, k = tableau.n_qubits, tableau.k
    w = _Work(n, tableau.rows(), k)
    w.snap("initial")
    for q in hset:
        w.h(q)
    w.snap("hadamard")
    if _gf2_rank(w.x(q) for q in range(n)) != k:
        raise RankDeficiency(f"H on {list(hset)} leaves the X block rank deficient")

    pivot = []
    for j in range(k):
        p = min(q for q in range(n) if q not in pivot and (w.x(q) >> j) & 1)
        pivot.append(p)
        for q in range(n):
            if q != p and (w.x(q) >> j) & 1:
                w.cnot(p, q)
    w.snap("eliminate")

    target = sorted(pivot)
    for j in range(k):
        if pivot[j] != target[j]:
            a, b = target[j], pivot[j]
            w.swap(a, b)
            other = pivot.index(a)
            pivot[other], pivot[j] = b, a
    w.snap("permute")

    for j, p in enumerate(target):
        if (w.z(p) >> j) & 1:
            w.s(p)
    for a in range(k):
        for b in range(a):
            if (w.z(target[a]) >> b) & 1:
                w.cz(target[b], target[a])
    measured = set(target)
    for q in range(n):
        if q in measured:
            continue
        for j, p in enumerate(target):
            if (w.z(q) >> j) & 1:
                w.cz(p, q)
    w.snap("phase")
    if any(w.z(q) for q in range(n)):
        raise RankDeficiency("Z block not cleared; columns do not commute")

    for p in target:
        w.h(p)
    w.snap("final")
    w.measured = tuple(target)
    return w


def peephole(gates: Sequence[Gate]) -> list[Gate]:
    """Rewrite ``H_q . CZ(q, a)... . H_q`` as ``CNOT(a, q)...`` when only CZs touch q in between."""
    g = list(gates)
    changed = True
    while changed:
        changed = False
        for i, gi in enumerate(g):
            if gi.name != "H":
                continue
            q = gi.qubits[0]
            mids = []
            for j in range(i + 1, len(g)):
                gj = g[j]
                if q not in gj.qubits:
                    continue
                if gj.name == "H":
                    for m in mids:
                        a, b = g[m].qubits
                        g[m] = gate("CNOT", b if a == q else a, q)
                    del g[j]
                    del g[i]
                    changed = True
                elif gj.name == "CZ":
                    mids.append(j)
                    continue
                break
            if changed:
                break
    return g


def _cost(gates: Sequence[Gate]) -> tuple[int, int]:
    return len(gates), sum(g.name in ENTANGLING for g in gates)


def _candidate_hsets(tableau: StabilizerTableau) -> list[tuple[int, ...]]:
    n, k = tableau.n_qubits, tableau.k
    rows = tableau.rows()
    support = sorted({q for p in tableau.columns for q in range(n) if ((p.z | p.x) >> q) & 1})
    xrank = _gf2_rank(rows[n + q] for q in range(n))

    def full_rank(hset):
        hs = set(hset)
        return _gf2_rank(rows[q] if q in hs else rows[n + q] for q in range(n)) == k

    for d in range(k - xrank, len(support) + 1):
        if comb(len(support), d) > HSET_ENUMERATION_LIMIT:
            return [_greedy_hset(rows, n, k, support)]
        found = [s for s in itertools.combinations(support, d) if full_rank(s)]
        if found:
            return found
    raise RankDeficiency("no Hadamard set gives a full-rank X block")


def _greedy_hset(rows: list[int], n: int, k: int, support: Sequence[int]) -> tuple[int, ...]:
    """Toggle one qubit at a time while that raises the X-block rank."""
    hset: set[int] = set()

    def rank(hs):
        return _gf2_rank(rows[q] if q in hs else rows[n + q] for q in range(n))

    current = rank(hset)
    while current < k:
        for q in support:
            trial = hset ^ {q}
            r = rank(trial)
            if r > current:
                hset, current = trial, r
                break
        else:
            raise RankDeficiency("greedy Hadamard search stalled")
    return tuple(sorted(hset))


def is_qwc_tableau(tableau: StabilizerTableau) -> bool:
    return all(commutes_qwc(a, b) for a, b in itertools.combinations(tableau.columns, 2))


def _synthesize_qwc(tableau: StabilizerTableau) -> Circuit:
    n = tableau.n_qubits
    gates, measured = [], []
    for q in range(n):
        letters = {p.letter(q) for p in tableau.columns} - {"I"}
        if not letters:
            continue
        (letter,) = letters
        measured.append(q)
        if letter == "Y":
            gates.append(gate("S", q))
        if letter in "XY":
            gates.append(gate("H", q))
    return Circuit(n, gates, measured)


def synthesize(tableau: StabilizerTableau, hset: Sequence[int] | None = None) -> Circuit:
    """Measurement circuit mapping each basis column to a single Z.

    QWC bases get single-qubit rotations only.  Otherwise every minimum-size
    Hadamard set that makes the X block full rank is tried (unless ``hset``
    is given) and the cheapest circuit after H/CZ/H simplification wins; ties
    go to fewer entangling gates, then the lexicographically first set.
    Snapshots of the tableau at each stage are attached to the result.
    """
    if hset is None and is_qwc_tableau(tableau):
        return _synthesize_qwc(tableau)
    candidates = [tuple(hset)] if hset is not None else _candidate_hsets(tableau)
    best = None
    for cand in candidates:
        work = _run(tableau, cand)
        gates = peephole(work.gates)
        key = (*_cost(gates), cand)
        if best is None or key < best[0]:
            best = (key, work, gates)
    _, work, gates = best
    return Circuit(tableau.n_qubits, gates, work.measured, snapshots=tuple(work.snapshots))


# --- conjugation ----------------------------------------------------------------

def conjugate_gate(p: PauliString, g: Gate) -> PauliString:
    """``G p G^dagger`` with exact sign."""
    z, x, sign = p.z, p.x, p.sign
    if g.name == "H":
        (q,) = g.qubits
        zq, xq = (z >> q) & 1, (x >> q) & 1
        if zq & xq:
            sign = -sign
        if zq != xq:
            z ^= 1 << q
            x ^= 1 << q
    elif g.name == "S":
        (q,) = g.qubits
        xq = (x >> q) & 1
        if xq & (z >> q):
            sign = -sign
        z ^= xq << q
    elif g.name == "CNOT":
        c, t = g.qubits
        xc, zc, xt, zt = (x >> c) & 1, (z >> c) & 1, (x >> t) & 1, (z >> t) & 1
        if xc & zt & (xt ^ zc ^ 1):
            sign = -sign
        x ^= xc << t
        z ^= zt << c
    elif g.name == "CZ":
        a, b = g.qubits
        xa, za, xb, zb = (x >> a) & 1, (z >> a) & 1, (x >> b) & 1, (z >> b) & 1
        if xa & xb & (za ^ zb):
            sign = -sign
        z ^= (xb << a) | (xa << b)
    else:  # SWAP
        a, b = g.qubits
        for v in ("z", "x"):
            bits = z if v == "z" else x
            ba, bb = (bits >> a) & 1, (bits >> b) & 1
            if ba != bb:
                bits ^= (1 << a) | (1 << b)
            if v == "z":
                z = bits
            else:
                x = bits
    return PauliString(p.n_qubits, z, x, sign)


def conjugate(p: PauliString, circuit: Circuit) -> PauliString:
    """The observable ``U p U^dagger`` that the circuit turns ``p`` into."""
    for g in circuit.gates:
        p = conjugate_gate(p, g)
    return p


def diagonalize_check(family: Sequence[PauliString], circuit: Circuit) -> list[PauliString]:
    """Conjugate every member symbolically; raise NotDiagonalized on any X/Y left over."""
    out = []
    for p in family:
        c = conjugate(p, circuit)
        if c.x:
            raise NotDiagonalized(c)
        if c.z & ~_mask(circuit.measured_qubits):
            raise NotDiagonalized(c)
        out.append(c)
    return out


def _mask(qubits: Iterable[int]) -> int:
    m = 0
    for q in qubits:
        m |= 1 << q
    return m


# --- measurement map --------------------------------------------------------------

@dataclass(frozen=True)
class MapEntry:
    member: PauliString
    sign: int
    bits: tuple[int, ...]
    decomposition: tuple[int, ...] = ()

    def outcome(self, readings: dict[int, int] | Sequence[int]) -> int:
        """Member eigenvalue from measured bits (0/1 per qubit)."""
        parity = 0
        for q in self.bits:
            parity ^= readings[q]
        return -self.sign if parity else self.sign


@dataclass(frozen=True)
class MeasurementMap:
    n_qubits: int
    entries: tuple[MapEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i) -> MapEntry:
        return self.entries[i]

    def members(self) -> list[PauliString]:
        return [e.member for e in self.entries]

    def outcome_matrix(self, samples: np.ndarray) -> np.ndarray:
        """(shots, qubits) 0/1 array -> (shots, members) +-1 array."""
        samples = np.asarray(samples, dtype=np.int64)
        out = np.empty((samples.shape[0], len(self.entries)), dtype=np.int64)
        for j, e in enumerate(self.entries):
            parity = samples[:, list(e.bits)].sum(axis=1) % 2 if e.bits else np.zeros(samples.shape[0], np.int64)
            out[:, j] = e.sign * (1 - 2 * parity)
        return out

    def to_report(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "n_qubits": self.n_qubits,
            "entries": [
                {"member": str(e.member), "sign": e.sign, "bits": list(e.bits),
                 "decomposition": list(e.decomposition)}
                for e in self.entries
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_report(), indent=2)

    @classmethod
    def from_report(cls, report: dict | str) -> "MeasurementMap":
        if isinstance(report, str):
            try:
                report = json.loads(report)
            except json.JSONDecodeError as exc:
                raise ParseError(f"measurement map is not JSON: {exc}") from None
        try:
            entries = tuple(
                MapEntry(parse_pauli(e["member"]), int(e["sign"]), tuple(int(b) for b in e["bits"]),
                         tuple(e.get("decomposition", ())))
                for e in report["entries"]
            )
            n = int(report.get("n_qubits", entries[0].member.n_qubits))
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed measurement map: {exc}") from None
        return cls(n, entries)


def build_measurement_map(family: Sequence[PauliString], tableau: StabilizerTableau, circuit: Circuit,
                          decompositions: Sequence[Decomposition] | None = None) -> MeasurementMap:
    """Read each member off the measured bits.

    Members are conjugated directly; the result is cross-checked against the
    product of the conjugated basis strings given by the decomposition.
    """
    if decompositions is None:
        _, decompositions = _decompose_over(family, tableau)
    images = diagonalize_check(tableau.columns, circuit)
    direct = diagonalize_check(family, circuit)
    entries = []
    for p, d, img in zip(family, decompositions, direct):
        z, sign = 0, d.sign
        for j in d.indices:
            z ^= images[j].z
            sign *= images[j].sign
        if (z, sign) != (img.z, img.sign):
            raise NotDiagonalized(img)
        bits = tuple(q for q in range(p.n_qubits) if (img.z >> q) & 1)
        entries.append(MapEntry(p, img.sign, bits, d.indices))
    return MeasurementMap(tableau.n_qubits, tuple(entries))


def _decompose_over(family, tableau):
    # Re-run extraction on basis + family so indices refer to tableau columns.
    k = tableau.k
    _, decomps = extract_basis(list(tableau.columns) + list(family))
    return tableau, decomps[k:]


@dataclass(frozen=True)
class FamilyMeasurement:
    tableau: StabilizerTableau
    circuit: Circuit
    map: MeasurementMap


def measure_family(family: Sequence[PauliString], elide: bool = False) -> FamilyMeasurement:
    """extract_basis + synthesize + build_measurement_map (+ optional SWAP elision)."""
    tableau, decomps = extract_basis(family)
    circuit = synthesize(tableau)
    mmap = build_measurement_map(family, tableau, circuit, decomps)
    if elide:
        circuit, mmap = elide_swaps(circuit, mmap)
    return FamilyMeasurement(tableau, circuit, mmap)


def elide_swaps(circuit: Circuit, mmap: MeasurementMap) -> tuple[Circuit, MeasurementMap]:
    """Drop SWAPs by relabelling later operands and readout bits, then re-simplify."""
    if not any(g.name == "SWAP" for g in circuit.gates):
        return circuit, mmap
    wire = list(range(circuit.n_qubits))  # logical qubit -> physical wire
    gates = []
    for g in circuit.gates:
        if g.name == "SWAP":
            a, b = g.qubits
            wire[a], wire[b] = wire[b], wire[a]
            continue
        qs = [wire[q] for q in g.qubits]
        if g.name == "CZ":
            qs = sorted(qs)
        gates.append(Gate(g.name, tuple(qs)))
    gates = peephole(gates)
    measured = [wire[q] for q in circuit.measured_qubits]
    entries = tuple(
        MapEntry(e.member, e.sign, tuple(sorted(wire[q] for q in e.bits)), e.decomposition)
        for e in mmap.entries
    )
    return Circuit(circuit.n_qubits, gates, measured), MeasurementMap(mmap.n_qubits, entries)
