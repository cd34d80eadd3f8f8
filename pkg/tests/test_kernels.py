"""Compiled and pure-Python kernels must agree exactly; both are checked against networkx."""

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paulipart import _kernels
from paulipart._kernels import _pykernels as py
from paulipart.graph import CommutationGraph, build_graph_from_paulis, pack_paulis
from paulipart.pauli import PauliString, commutes_gc, commutes_qwc

needs_compiled = pytest.mark.skipif(_kernels.compiled_backend is None, reason="extension not built")


@st.composite
def random_graph(draw, max_n=40):
    n = draw(st.integers(1, max_n))
    density = draw(st.floats(0.05, 0.95))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < density, 1)
    return upper | upper.T


def _adj(mask):
    return py.pack_bool_rows(mask) if mask.shape[0] else np.zeros((0, 1), np.uint64)


def test_pack_and_unpack():
    mask = np.zeros((2, 70), dtype=bool)
    mask[0, 0] = mask[0, 65] = mask[1, 69] = True
    rows = py.pack_bool_rows(mask)
    assert rows.shape == (2, 2)
    assert py.row_to_int(rows[0]) == (1 << 65) | 1
    assert (py.int_to_row((1 << 69), 2) == rows[1]).all()


@st.composite
def pauli_batch(draw):
    n = draw(st.integers(1, 70))
    m = draw(st.integers(1, 30))
    return [PauliString(n, draw(st.integers(0, (1 << n) - 1)), draw(st.integers(0, (1 << n) - 1)))
            for _ in range(m)]


@settings(max_examples=60, deadline=None)
@given(pauli_batch(), st.booleans())
def test_adjacency_matches_predicates(paulis, qwc):
    g = build_graph_from_paulis(paulis, "qwc" if qwc else "gc")
    pred = commutes_qwc if qwc else commutes_gc
    for i in range(len(paulis)):
        for j in range(len(paulis)):
            expected = i != j and pred(paulis[i], paulis[j])
            assert g.has_edge(i, j) == expected


@needs_compiled
@settings(max_examples=60, deadline=None)
@given(pauli_batch(), st.booleans())
def test_adjacency_backends_agree(paulis, qwc):
    z, x = pack_paulis(paulis, paulis[0].n_qubits)
    a = _kernels.compiled_backend.adjacency(z, x, qwc)
    b = py.adjacency(z, x, qwc)
    assert (a == b).all()


@needs_compiled
@settings(max_examples=80, deadline=None)
@given(random_graph())
def test_greedy_backends_agree(mask):
    adj = _adj(mask)
    assert (_kernels.compiled_backend.greedy_cover(adj) == py.greedy_cover(adj)).all()


@needs_compiled
@settings(max_examples=80, deadline=None)
@given(random_graph(max_n=30))
def test_max_clique_backends_agree(mask):
    adj = _adj(mask)
    active = py.int_to_row((1 << mask.shape[0]) - 1, adj.shape[1])
    assert (_kernels.compiled_backend.max_clique(adj, active) == py.max_clique(adj, active)).all()


@settings(max_examples=80, deadline=None)
@given(random_graph(max_n=30))
def test_max_clique_size_matches_networkx(mask):
    g = CommutationGraph(_adj(mask), "gc")
    from paulipart.partition import max_clique

    clique = max_clique(g)
    assert g.is_clique(clique)
    ng = nx.from_numpy_array(mask.astype(int))
    assert len(clique) == max(len(c) for c in nx.find_cliques(ng))


@settings(max_examples=80, deadline=None)
@given(random_graph())
def test_greedy_cover_is_a_clique_partition(mask):
    g = CommutationGraph(_adj(mask), "gc")
    labels = _kernels.greedy_cover(g.adjacency)
    assert (labels >= 0).all()
    for f in set(labels.tolist()):
        assert g.is_clique(np.flatnonzero(labels == f).tolist())


def test_greedy_tie_breaking_lowest_index():
    # path 0-1-2-3: degrees 1,2,2,1; seed is vertex 1, then 0 joins (lowest tie)
    g = CommutationGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    assert _kernels.greedy_cover(g.adjacency).tolist() == [0, 0, 1, 1]


def test_backend_flag():
    assert _kernels.BACKEND in ("cython", "python")


def test_pure_python_env_selects_fallback():
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-c", "import paulipart; print(paulipart.KERNEL_BACKEND)"],
                         env={"PAULIPART_PURE_PYTHON": "1", "PATH": ""}, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
