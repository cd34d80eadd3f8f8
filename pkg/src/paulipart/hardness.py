"""Clique cover to commuting partition reduction, with exact cross-validation.

Vertex ``i`` of an n-vertex graph becomes an n-qubit string whose letter ``j``
is Z when ``j == i``, X when ``j > i`` and ``(i, j)`` is not an edge, and I
otherwise.  Two strings then commute exactly when their vertices are adjacent.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ParseError, TooLarge
from .pauli import Hamiltonian, HamiltonianTerm, PauliString, commutes_gc, commutes_qwc

EXACT_LIMIT = 12


@dataclass(frozen=True)
class SimpleGraph:
    n_vertices: int
    edges: frozenset[tuple[int, int]]

    def __init__(self, n_vertices: int, edges: Iterable[tuple[int, int]] = ()):
        if n_vertices < 0:
            raise ValueError("vertex count must be non-negative")
        norm = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n_vertices and 0 <= v < n_vertices):
                raise ValueError(f"edge ({u}, {v}) references a missing vertex")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "n_vertices", n_vertices)
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def complete(cls, n: int) -> "SimpleGraph":
        return cls(n, itertools.combinations(range(n), 2))

    @classmethod
    def edgeless(cls, n: int) -> "SimpleGraph":
        return cls(n)

    @classmethod
    def random(cls, n: int, p: float, seed: int) -> "SimpleGraph":
        rng = np.random.Generator(np.random.PCG64(seed))
        return cls(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < p])

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def adjacency_masks(self) -> list[int]:
        masks = [0] * self.n_vertices
        for u, v in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return masks

    def to_text(self) -> str:
        return f"n {self.n_vertices}\n" + "".join(f"{u} {v}\n" for u, v in sorted(self.edges))


def parse_graph(text: str) -> SimpleGraph:
    """``n <count>`` header, then one ``u v`` edge per line (0-based)."""
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        try:
            if fields[0] == "n":
                if n is not None or len(fields) != 2:
                    raise ParseError("malformed or repeated 'n <count>' header", lineno)
                n = int(fields[1])
                if n < 1:
                    raise ParseError("vertex count must be positive", lineno)
                continue
            if n is None:
                raise ParseError("'n <count>' header must come first", lineno)
            if len(fields) != 2:
                raise ParseError(f"expected 'u v', got {line!r}", lineno)
            u, v = int(fields[0]), int(fields[1])
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise ParseError(f"invalid edge ({u}, {v})", lineno)
            edges.append((u, v))
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), lineno) from None
    if n is None:
        raise ParseError("missing 'n <count>' header")
    return SimpleGraph(n, edges)


def reduce_to_mcp(g: SimpleGraph) -> Hamiltonian:
    n = g.n_vertices
    if n < 1:
        raise ValueError("graph must have at least one vertex")
    terms = []
    for i in range(n):
        x = 0
        for j in range(i + 1, n):
            if not g.has_edge(i, j):
                x |= 1 << j
        terms.append(HamiltonianTerm(1.0, PauliString(n, 1 << i, x)))
    return Hamiltonian(n, terms)


def _clique_table(masks: Sequence[int]) -> list[bool]:
    n = len(masks)
    ok = [False] * (1 << n)
    ok[0] = True
    for s in range(1, 1 << n):
        v = (s & -s).bit_length() - 1
        rest = s & (s - 1)
        ok[s] = ok[rest] and (rest & ~masks[v]) == 0
    return ok


def exact_clique_cover_size(g: SimpleGraph) -> int:
    """Minimum clique cover by dynamic programming over vertex subsets."""
    n = g.n_vertices
    if n > EXACT_LIMIT:
        raise TooLarge(n, EXACT_LIMIT)
    if n == 0:
        return 0
    clique = _clique_table(g.adjacency_masks())
    best = [0] * (1 << n)
    for s in range(1, 1 << n):
        low = s & -s
        rest = s ^ low
        # the clique holding the lowest vertex is low | sub for some sub of rest
        cost = n + 1
        sub = rest
        while True:
            c = low | sub
            if clique[c]:
                cost = min(cost, 1 + best[s ^ c])
            if sub == 0:
                break
            sub = (sub - 1) & rest
        best[s] = cost
    return best[(1 << n) - 1]


def exact_commuting_partition_size(paulis: Sequence[PauliString],
                                   commute: Callable[[PauliString, PauliString], bool] = commutes_gc) -> int:
    """Fewest pairwise-commuting groups, by backtracking with increasing k."""
    m = len(paulis)
    if m > EXACT_LIMIT:
        raise TooLarge(m, EXACT_LIMIT)
    ok = [[commute(a, b) for b in paulis] for a in paulis]

    def fits(k: int) -> bool:
        groups: list[list[int]] = []

        def place(i: int) -> bool:
            if i == m:
                return True
            for grp in groups:
                if all(ok[i][j] for j in grp):
                    grp.append(i)
                    if place(i + 1):
                        return True
                    grp.pop()
            if len(groups) < k:
                groups.append([i])
                if place(i + 1):
                    return True
                groups.pop()
            return False

        return place(0)

    for k in range(1, m + 1):
        if fits(k):
            return k
    return 0


def cross_validate(g: SimpleGraph) -> bool:
    """Both exact optima agree, and commuting subsets are exactly the cliques."""
    n = g.n_vertices
    if n > EXACT_LIMIT:
        raise TooLarge(n, EXACT_LIMIT)
    h = reduce_to_mcp(g)
    paulis = h.paulis
    for i, j in itertools.combinations(range(n), 2):
        edge = g.has_edge(i, j)
        if commutes_gc(paulis[i], paulis[j]) != edge or commutes_qwc(paulis[i], paulis[j]) != edge:
            return False
    comm_masks = [0] * n
    for i, j in itertools.combinations(range(n), 2):
        if commutes_gc(paulis[i], paulis[j]):
            comm_masks[i] |= 1 << j
            comm_masks[j] |= 1 << i
    if _clique_table(comm_masks) != _clique_table(g.adjacency_masks()):
        return False
    return exact_clique_cover_size(g) == exact_commuting_partition_size(paulis)
