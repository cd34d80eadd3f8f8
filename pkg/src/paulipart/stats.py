"""Covariances, expected state-preparation counts and the partition-splitting test."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InsufficientShots, NonPositiveEpsilon, NotARefinement, NotCommuting
from .pauli import PauliString, commutes_gc, multiply
from .simulator import OutcomeTable, StateVector, expectation

THEORETICAL = "theoretical"
SAMPLE = "sample"
DEFAULT_BURN_IN = 30


@dataclass
class CovarianceMatrix:
    labels: list[str]
    entries: np.ndarray
    provenance: str = THEORETICAL
    n_shots: int | None = None
    weights: np.ndarray | None = None

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=float)
        k = len(self.labels)
        if self.entries.shape != (k, k):
            raise ValueError(f"entries shape {self.entries.shape} does not match {k} labels")
        if not np.allclose(self.entries, self.entries.T, atol=1e-12):
            raise ValueError("covariance matrix must be symmetric")
        self.weights = np.ones(k) if self.weights is None else np.asarray(self.weights, dtype=float)
        if self.weights.shape != (k,):
            raise ValueError("one weight per label required")

    def __getitem__(self, pair) -> float:
        i, j = (self.labels.index(v) if isinstance(v, str) else v for v in pair)
        return float(self.entries[i, j])

    def variance(self) -> float:
        """Variance of the weighted sum: sum_ij w_i w_j Cov_ij."""
        return float(self.weights @ self.entries @ self.weights)

    def with_weights(self, weights) -> "CovarianceMatrix":
        return CovarianceMatrix(self.labels, self.entries, self.provenance, self.n_shots, weights)

    def to_report(self) -> dict:
        return {
            "labels": self.labels,
            "provenance": self.provenance if self.n_shots is None else f"{self.provenance}({self.n_shots})",
            "entries": self.entries.tolist(),
            "weights": self.weights.tolist(),
            "variance": self.variance(),
        }


def theoretical_covariance(state: StateVector, family: Sequence[PauliString],
                           weights=None) -> CovarianceMatrix:
    k = len(family)
    for a, b in itertools.combinations(family, 2):
        if not commutes_gc(a, b):
            raise NotCommuting(a, b)
    means = [expectation(state, p) for p in family]
    cov = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            cov[i, j] = cov[j, i] = expectation(state, multiply(family[i], family[j])) - means[i] * means[j]
    return CovarianceMatrix([str(p) for p in family], cov, THEORETICAL, None, weights)


def sample_covariance(table: OutcomeTable, weights=None) -> CovarianceMatrix:
    """Unbiased (n-1) sample covariance of the outcome columns."""
    n = table.n_shots
    if n < 2:
        raise InsufficientShots(f"sample covariance needs at least 2 shots, got {n}")
    cov = np.atleast_2d(np.cov(table.values.astype(float), rowvar=False, ddof=1))
    return CovarianceMatrix(list(table.labels), cov, SAMPLE, n, weights)


def n_expect(variances: Sequence[float], epsilon: float) -> float:
    """k * sum(Var) / epsilon^2 for a k-way partitioning."""
    if not epsilon > 0:
        raise NonPositiveEpsilon(f"epsilon must be positive, got {epsilon}")
    if len(variances) < 1:
        raise ValueError("need at least one partition")
    return len(variances) * float(sum(variances)) / epsilon ** 2


def n_expect_from(matrices: Sequence[CovarianceMatrix], epsilon: float) -> float:
    return n_expect([m.variance() for m in matrices], epsilon)


@dataclass(frozen=True)
class SplitDecision:
    decision: str  # "KEEP" or "SPLIT"
    margin: float
    broken: float
    unbroken: float
    k: int
    k_prime: int

    def to_report(self) -> dict:
        return {"decision": self.decision, "margin": self.margin, "broken": self.broken,
                "unbroken": self.unbroken, "k": self.k, "k_prime": self.k_prime}


def split_decision(full: Sequence[CovarianceMatrix], proposal: Sequence[Sequence[str | PauliString]],
                   burn_in: int = DEFAULT_BURN_IN) -> SplitDecision:
    """Compare a k-way partitioning with a refinement into k' families.

    Broken terms are the weighted covariances between members that the
    refinement separates; unbroken terms are everything else in the coarse
    variance.  SPLIT iff ``k * broken > (k' - k) * unbroken``.
    """
    provenances = {m.provenance for m in full}
    if len(provenances) != 1:
        raise ValueError("covariance matrices mix theoretical and sample provenance")
    for m in full:
        if m.provenance == SAMPLE and m.n_shots < burn_in:
            raise InsufficientShots(f"{m.n_shots} shots is below the burn-in of {burn_in}")
    where: dict[str, tuple[int, int]] = {}
    for f, m in enumerate(full):
        for i, label in enumerate(m.labels):
            if label in where:
                raise ValueError(f"label {label} appears in two families")
            where[label] = (f, i)
    fine_of: dict[str, int] = {}
    for g, fam in enumerate(proposal):
        if not fam:
            raise NotARefinement("empty family in proposal")
        coarse = set()
        for label in map(str, fam):
            if label not in where or label in fine_of:
                raise NotARefinement(f"proposal member {label} missing from, or repeated against, the partitioning")
            fine_of[label] = g
            coarse.add(where[label][0])
        if len(coarse) != 1:
            raise NotARefinement(f"proposal family {g} spans several coarse families")
    if len(fine_of) != len(where):
        raise NotARefinement("proposal does not cover every member")

    broken = total = 0.0
    for m in full:
        w = m.weights
        total += m.variance()
        for i, j in itertools.permutations(range(len(m.labels)), 2):
            if fine_of[m.labels[i]] != fine_of[m.labels[j]]:
                broken += w[i] * w[j] * m.entries[i, j]
    unbroken = total - broken
    k, k_prime = len(full), len(proposal)
    margin = k * broken - (k_prime - k) * unbroken
    return SplitDecision("SPLIT" if margin > 0 else "KEEP", float(margin), float(broken), float(unbroken),
                         k, k_prime)
