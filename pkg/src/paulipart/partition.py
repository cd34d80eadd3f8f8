"""Commuting-family partitioners: naive, greedy clique removal, exact Bron-Kerbosch removal."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import ParseError, TooLarge
from .graph import CommutationGraph, Mode
from .pauli import Hamiltonian, commutes_gc, commutes_qwc

FORMAT_VERSION = 1
DEFAULT_BK_LIMIT = 300


class PartitionMode(str, enum.Enum):
    NAIVE = "naive"
    QWC = "qwc"
    GC = "gc"

    @classmethod
    def parse(cls, value) -> "PartitionMode":
        if isinstance(value, Mode):
            return cls(value.value)
        return value if isinstance(value, cls) else cls(str(value).lower())


@dataclass
class PartitionSet:
    families: list[list[int]]
    mode: PartitionMode
    source: Hamiltonian | None = None
    algorithm: str = ""
    diagnostic: str = field(default="", compare=False)

    def __post_init__(self):
        self.mode = PartitionMode.parse(self.mode)
        self.families = [sorted(int(v) for v in fam) for fam in self.families]

    def __len__(self) -> int:
        return len(self.families)

    @property
    def num_partitions(self) -> int:
        return len(self.families)

    def family_strings(self, signed: bool = False) -> list[list[str]]:
        if self.source is None:
            raise ValueError("partition has no source Hamiltonian")
        terms = self.source.terms
        if signed:
            return [[str(terms[i].signed_pauli) for i in fam] for fam in self.families]
        return [[terms[i].pauli.letters for i in fam] for fam in self.families]

    def to_report(self, **extra) -> dict:
        report = {
            "format_version": FORMAT_VERSION,
            "mode": self.mode.value,
            "algorithm": self.algorithm,
            "num_partitions": self.num_partitions,
            "families": self.families,
        }
        if self.source is not None:
            report["n_qubits"] = self.source.n_qubits
            report["family_strings"] = self.family_strings()
        report.update(extra)
        return report

    def to_json(self, **extra) -> str:
        return json.dumps(self.to_report(**extra), indent=2)


def partition_from_report(report: dict | str, h: Hamiltonian | None = None) -> PartitionSet:
    if isinstance(report, str):
        try:
            report = json.loads(report)
        except json.JSONDecodeError as exc:
            raise ParseError(f"partition report is not JSON: {exc}") from None
    try:
        families = report["families"]
        mode = report["mode"]
    except KeyError as exc:
        raise ParseError(f"partition report lacks {exc}") from None
    return PartitionSet(families, mode, h, report.get("algorithm", ""))


def partition_naive(h: Hamiltonian) -> PartitionSet:
    return PartitionSet([[i] for i in range(len(h))], PartitionMode.NAIVE, h, "naive")


def _families_from_labels(family_of: np.ndarray) -> list[list[int]]:
    families: dict[int, list[int]] = {}
    for v, f in enumerate(family_of.tolist()):
        families.setdefault(f, []).append(v)
    return [families[f] for f in sorted(families)]


def partition_greedy(g: CommutationGraph, source: Hamiltonian | None = None) -> PartitionSet:
    """Greedy clique removal.

    Each round seeds a clique with the unmarked vertex of highest residual
    degree, then repeatedly adds the candidate with the most neighbours among
    the remaining candidates (ties to the lowest index), marks the clique and
    recurses on what is left.
    """
    if g.n_vertices == 0:
        return PartitionSet([], g.mode, source, "greedy")
    family_of = _kernels.greedy_cover(g.adjacency)
    return PartitionSet(_families_from_labels(family_of), g.mode, source, "greedy")


def max_clique(g: CommutationGraph, active: int | None = None) -> list[int]:
    """An exact maximum clique of the subgraph induced by ``active`` (a bitset)."""
    n_words = g.adjacency.shape[1]
    if active is None:
        active = (1 << g.n_vertices) - 1
    best = _kernels.max_clique(g.adjacency, _kernels.int_to_row(active, n_words))
    bits = _kernels.row_to_int(best)
    return [v for v in range(g.n_vertices) if (bits >> v) & 1]


def partition_bron_kerbosch(g: CommutationGraph, max_vertices: int = DEFAULT_BK_LIMIT,
                            source: Hamiltonian | None = None) -> PartitionSet:
    """Repeatedly remove an exact maximum clique (Bron-Kerbosch, Tomita pivoting)."""
    if g.n_vertices > max_vertices:
        raise TooLarge(g.n_vertices, max_vertices)
    remaining = (1 << g.n_vertices) - 1
    families = []
    while remaining:
        clique = max_clique(g, remaining)
        families.append(clique)
        for v in clique:
            remaining &= ~(1 << v)
    return PartitionSet(families, g.mode, source, "bk")


def verify_partition(p: PartitionSet, h: Hamiltonian) -> bool:
    """Check cover, disjointness and pairwise commutation; sets ``p.diagnostic``."""
    seen: dict[int, int] = {}
    for f, fam in enumerate(p.families):
        for v in fam:
            if not 0 <= v < len(h):
                p.diagnostic = f"family {f} references term {v} outside 0..{len(h) - 1}"
                return False
            if v in seen:
                p.diagnostic = f"term {v} appears in families {seen[v]} and {f}"
                return False
            seen[v] = f
    missing = [v for v in range(len(h)) if v not in seen]
    if missing:
        p.diagnostic = f"terms not covered: {missing}"
        return False
    if p.mode is PartitionMode.NAIVE:
        big = [f for f, fam in enumerate(p.families) if len(fam) != 1]
        if big:
            p.diagnostic = f"naive family {big[0]} is not a singleton"
            return False
    else:
        commute = commutes_qwc if p.mode is PartitionMode.QWC else commutes_gc
        for f, fam in enumerate(p.families):
            for i, a in enumerate(fam):
                for b in fam[i + 1:]:
                    if not commute(h[a].pauli, h[b].pauli):
                        p.diagnostic = (
                            f"family {f}: {h[a].pauli} and {h[b].pauli} do not commute ({p.mode.value})"
                        )
                        return False
    p.diagnostic = ""
    return True


def families_as_paulis(p: PartitionSet, h: Hamiltonian, signed: bool = False) -> list[list]:
    if signed:
        return [[h[i].signed_pauli for i in fam] for fam in p.families]
    return [[h[i].pauli for i in fam] for fam in p.families]


def partition_hamiltonian(h: Hamiltonian, mode: PartitionMode | str, algorithm: str,
                          max_vertices: int = DEFAULT_BK_LIMIT) -> PartitionSet:
    """Convenience front end used by the CLI: build the graph and run ``algorithm``."""
    from .graph import build_graph

    mode = PartitionMode.parse(mode)
    if algorithm == "naive" or mode is PartitionMode.NAIVE:
        return partition_naive(h)
    g = build_graph(h, Mode(mode.value))
    if algorithm == "greedy":
        return partition_greedy(g, h)
    if algorithm == "bk":
        return partition_bron_kerbosch(g, max_vertices, h)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def mub_bounds(n_qubits: int) -> tuple[int, int]:
    """(largest commuting family of non-identity strings, fewest families covering them all)."""
    return 2 ** n_qubits - 1, 2 ** n_qubits + 1


def family_sizes(p: PartitionSet) -> list[int]:
    return [len(f) for f in p.families]


def relabel(p: PartitionSet, order: Sequence[int]) -> PartitionSet:
    """Map vertex indices through ``order`` (graph vertex -> term index)."""
    return PartitionSet([[order[v] for v in fam] for fam in p.families], p.mode, p.source, p.algorithm)
