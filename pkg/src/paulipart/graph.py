"""QWC / GC commutation graphs over a Hamiltonian's Pauli strings."""

from __future__ import annotations

import enum
from typing import Iterator, Sequence

import numpy as np

from . import _kernels
from .errors import PauliPartError
from .pauli import Hamiltonian, PauliString


class Mode(str, enum.Enum):
    QWC = "qwc"
    GC = "gc"

    @classmethod
    def parse(cls, value: "Mode | str") -> "Mode":
        return value if isinstance(value, cls) else cls(str(value).lower())


def pack_paulis(paulis: Sequence[PauliString], n_qubits: int) -> tuple[np.ndarray, np.ndarray]:
    """Pack z/x bit vectors into (m, words) little-endian uint64 arrays."""
    n_words = _kernels.words_for(n_qubits)
    z = np.zeros((len(paulis), n_words), dtype=np.uint64)
    x = np.zeros((len(paulis), n_words), dtype=np.uint64)
    for i, p in enumerate(paulis):
        z[i] = _kernels.int_to_row(p.z, n_words)
        x[i] = _kernels.int_to_row(p.x, n_words)
    return z, x


class CommutationGraph:
    """Simple undirected graph, one vertex per term, stored as adjacency bitsets."""

    def __init__(self, adjacency: np.ndarray, mode: Mode, vertex_labels: Sequence[int] | None = None,
                 paulis: Sequence[PauliString] | None = None):
        adjacency = np.ascontiguousarray(adjacency, dtype=np.uint64)
        adjacency.setflags(write=False)
        self.adjacency = adjacency
        self.mode = Mode.parse(mode)
        self.n_vertices = adjacency.shape[0]
        self.vertex_labels = tuple(range(self.n_vertices) if vertex_labels is None else vertex_labels)
        self.paulis = tuple(paulis) if paulis is not None else None
        self._rows = [_kernels.row_to_int(r) for r in adjacency]

    @classmethod
    def from_edges(cls, n_vertices: int, edges, mode: Mode | str = Mode.GC) -> "CommutationGraph":
        mask = np.zeros((n_vertices, n_vertices), dtype=bool)
        for u, v in edges:
            if u == v:
                raise PauliPartError("self-loops are not allowed")
            mask[u, v] = mask[v, u] = True
        return cls(_kernels.pack_bool_rows(mask) if n_vertices else np.zeros((0, 1), np.uint64),
                   Mode.parse(mode))

    def neighbors(self, v: int) -> int:
        """Neighbourhood of ``v`` as an integer bitset."""
        return self._rows[v]

    def neighbor_list(self, v: int) -> list[int]:
        row = self._rows[v]
        return [u for u in range(self.n_vertices) if (row >> u) & 1]

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self._rows[u] >> v) & 1)

    def degree(self, v: int) -> int:
        return self._rows[v].bit_count()

    @property
    def n_edges(self) -> int:
        return sum(r.bit_count() for r in self._rows) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n_vertices):
            row = self._rows[u] >> (u + 1)
            v = u + 1
            while row:
                if row & 1:
                    yield (u, v)
                row >>= 1
                v += 1

    def is_clique(self, vertices) -> bool:
        vs = list(vertices)
        return all(self.has_edge(a, b) for i, a in enumerate(vs) for b in vs[i + 1:])

    def dump_edges(self) -> str:
        """Edge list text, one ``u v`` line per edge (0-based)."""
        return "".join(f"{u} {v}\n" for u, v in self.edges())

    def __repr__(self) -> str:
        return f"CommutationGraph(mode={self.mode.value}, vertices={self.n_vertices}, edges={self.n_edges})"


def build_graph_from_paulis(paulis: Sequence[PauliString], mode: Mode | str) -> CommutationGraph:
    mode = Mode.parse(mode)
    if not paulis:
        raise PauliPartError("cannot build a graph over zero strings")
    n_qubits = paulis[0].n_qubits
    z, x = pack_paulis(paulis, n_qubits)
    adj = _kernels.adjacency(z, x, mode is Mode.QWC)
    return CommutationGraph(adj, mode, paulis=paulis)


def build_graph(h: Hamiltonian, mode: Mode | str) -> CommutationGraph:
    return build_graph_from_paulis(h.paulis, mode)


def count_qwc_edges(n_qubits: int) -> int:
    """QWC edges among all 4^N strings (identity included), in closed form."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    return (10 ** n_qubits - 4 ** n_qubits) // 2


def qwc_edge_sum(n_qubits: int) -> int:
    """The same count via the per-identity-count sum over k."""
    from math import comb

    total = sum(comb(n_qubits, k) * 3 ** (n_qubits - k) * (2 ** (n_qubits + k) - 1) for k in range(n_qubits + 1))
    return total // 2
