import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import dense, dense_circuit, dense_of, random_state
from paulipart.errors import (
    InsufficientShots,
    NonPositiveEpsilon,
    NotARefinement,
    NotCommuting,
    ParseError,
    QubitCountMismatch,
    TooManyQubits,
)
from paulipart.partition import partition_hamiltonian
from paulipart.pauli import Hamiltonian, HamiltonianTerm, PauliString, all_pauli_strings, commutes_gc, parse_pauli
from paulipart.simulator import (
    OutcomeTable,
    StateVector,
    apply_circuit,
    exact_outcome_expectations,
    expectation,
    haar_random_state,
    parse_state,
    sample_outcomes,
)
from paulipart.stats import (
    CovarianceMatrix,
    n_expect,
    n_expect_from,
    sample_covariance,
    split_decision,
    theoretical_covariance,
)
from paulipart.synthesis import Circuit, gate, measure_family

S01 = StateVector.basis("01")
BOWTIE_K2 = [["IZ", "ZI"], ["-XX", "-YY", "ZZ"]]


def fam(*strings):
    return [parse_pauli(s) for s in strings]


# --- simulator -------------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2 ** 32 - 1), st.data())
def test_apply_circuit_matches_dense(n, seed, data):
    names = ["H", "S"] + (["CNOT", "CZ", "SWAP"] if n > 1 else [])
    gates = []
    for _ in range(data.draw(st.integers(0, 12))):
        name = data.draw(st.sampled_from(names))
        qs = data.draw(st.permutations(range(n)))
        gates.append(gate(name, *qs[: 1 if name in ("H", "S") else 2]))
    c = Circuit(n, gates)
    psi = random_state(n, np.random.default_rng(seed))
    out = apply_circuit(StateVector(psi), c)
    assert np.allclose(out.amplitudes, dense_circuit(c) @ psi)
    assert abs(np.linalg.norm(out.amplitudes) - 1) < 1e-10


def test_apply_circuit_examples():
    h0 = apply_circuit(StateVector.basis("0"), Circuit(1, [gate("H", 0)]))
    assert np.allclose(h0.amplitudes, [2 ** -0.5, 2 ** -0.5])
    bell = StateVector(np.array([1, 0, 0, 1]) / np.sqrt(2))
    assert np.allclose(apply_circuit(bell, Circuit(2, [])).amplitudes, bell.amplitudes)
    fm = measure_family(fam("XX", "YY", "ZZ"))
    table = sample_outcomes(bell, fm.circuit, fm.map, 50, seed=1)
    assert (table.values[:, [0, 2]] == 1).all() and (table.values[:, 1] == -1).all()
    with pytest.raises(QubitCountMismatch):
        apply_circuit(bell, Circuit(3, []))


def test_expectation_examples():
    assert expectation(S01, parse_pauli("IZ")) == -1
    assert expectation(S01, parse_pauli("ZI")) == 1
    assert expectation(S01, parse_pauli("-XX")) == 0
    assert expectation(haar_random_state(3, 4), PauliString.identity(3)) == pytest.approx(1, abs=1e-12)
    with pytest.raises(QubitCountMismatch):
        expectation(S01, parse_pauli("Z"))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2 ** 32 - 1), st.data())
def test_expectation_matches_dense(n, seed, data):
    z = data.draw(st.integers(0, (1 << n) - 1))
    x = data.draw(st.integers(0, (1 << n) - 1))
    p = PauliString(n, z, x, data.draw(st.sampled_from([1, -1])))
    psi = random_state(n, np.random.default_rng(seed))
    want = np.vdot(psi, dense_of(p) @ psi).real
    assert expectation(StateVector(psi), p) == pytest.approx(want, abs=1e-12)
    assert -1 - 1e-12 <= want <= 1 + 1e-12


def test_state_vector_validation():
    with pytest.raises(ValueError):
        StateVector([1, 0, 0])
    with pytest.raises(ValueError):
        StateVector([1, 1])
    assert StateVector([1, 1], normalize=True).probabilities().tolist() == pytest.approx([0.5, 0.5])
    with pytest.raises(TooManyQubits):
        haar_random_state(17, 0)


def test_haar_state_is_normalized_and_seeded():
    a, b = haar_random_state(4, 7), haar_random_state(4, 7)
    assert abs(np.linalg.norm(a.amplitudes) - 1) < 1e-10
    assert np.array_equal(a.amplitudes, b.amplitudes)
    assert not np.array_equal(a.amplitudes, haar_random_state(4, 8).amplitudes)


def test_haar_mean_z_is_zero():
    z0 = parse_pauli("ZI")
    values = np.array([expectation(haar_random_state(2, s), z0) for s in range(10_000)])
    assert abs(values.mean()) < 3 * values.std(ddof=1) / np.sqrt(values.size)


def test_sampling_is_reproducible():
    fm = measure_family(fam("IYX", "ZZZ", "XIX", "ZXY"))
    psi = haar_random_state(3, 11)
    a = sample_outcomes(psi, fm.circuit, fm.map, 500, seed=5)
    b = sample_outcomes(psi, fm.circuit, fm.map, 500, seed=5)
    c = sample_outcomes(psi, fm.circuit, fm.map, 500, seed=6)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    with pytest.raises(InsufficientShots):
        sample_outcomes(psi, fm.circuit, fm.map, 0, seed=5)


def test_sample_means_converge():
    fm = measure_family(fam("IYX", "ZZZ", "XIX", "ZXY"))
    psi = haar_random_state(3, 12)
    table = sample_outcomes(psi, fm.circuit, fm.map, 100_000, seed=3)
    exact = np.array([expectation(psi, m) for m in fm.map.members()])
    sigma = np.sqrt((1 - exact ** 2) / table.n_shots)
    assert (np.abs(table.means() - exact) <= 3 * sigma + 1e-12).all()


def test_eigenstate_gives_constant_shots():
    fm = measure_family(fam("IZ", "ZI", "ZZ"))
    table = sample_outcomes(S01, fm.circuit, fm.map, 40, seed=0)
    assert (table.values == table.values[0]).all()
    assert table.values[0].tolist() == [-1, 1, -1]


def test_outcome_table_csv_round_trip():
    t = OutcomeTable(["XX", "-YY"], np.array([[1, -1], [-1, -1]]))
    back = OutcomeTable.from_csv(t.to_csv())
    assert back.labels == t.labels and np.array_equal(back.values, t.values)
    with pytest.raises(ParseError):
        OutcomeTable.from_csv("XX\n2\n")


def test_parse_state():
    assert np.array_equal(parse_state("basis 01\n").amplitudes, S01.amplitudes)
    s = parse_state("# plus\n1\n1\n")
    assert np.allclose(s.amplitudes, [2 ** -0.5] * 2)
    s = parse_state("1 0\n0 1\n")
    assert np.allclose(s.amplitudes, np.array([1, 1j]) / np.sqrt(2))
    for bad in ("", "basis 0a\n", "1\n1\n1\n", "1 2 3\n1\n", "1\nbasis 0\n"):
        with pytest.raises(ParseError):
            parse_state(bad)


# --- the central end-to-end identity ------------------------------------------------

@st.composite
def small_hamiltonians(draw):
    n = draw(st.integers(1, 5))
    keys = draw(st.lists(st.tuples(st.integers(0, (1 << n) - 1), st.integers(0, (1 << n) - 1))
                         .filter(lambda k: k != (0, 0)), min_size=1, max_size=12, unique=True))
    coeffs = draw(st.lists(st.floats(-3, 3, allow_nan=False), min_size=len(keys), max_size=len(keys)))
    return Hamiltonian(n, [HamiltonianTerm(c, PauliString(n, z, x)) for c, (z, x) in zip(coeffs, keys)])


@settings(max_examples=60, deadline=None)
@given(small_hamiltonians(), st.sampled_from(["gc", "qwc", "naive"]), st.integers(0, 2 ** 32 - 1))
def test_partitioned_measurement_reproduces_energy(h, mode, seed):
    algo = "naive" if mode == "naive" else "bk"
    part = partition_hamiltonian(h, mode, algo)
    psi = haar_random_state(h.n_qubits, seed)
    total = 0.0
    for family in part.families:
        members = [h.paulis[i] for i in family]
        fm = measure_family(members)
        means = exact_outcome_expectations(psi, fm.circuit, fm.map)
        total += sum(h.coefficients[i] * m for i, m in zip(family, means))
    matrix = sum(t.coefficient * dense(t.pauli.letters) for t in h)
    want = np.vdot(psi.amplitudes, matrix @ psi.amplitudes).real
    assert abs(total - want) < 1e-9


# --- covariance ------------------------------------------------------------------

def test_bowtie_theoretical_covariance():
    cov = theoretical_covariance(S01, fam("-XX", "-YY", "ZZ"))
    assert cov.entries.tolist() == [[1, 1, 0], [1, 1, 0], [0, 0, 0]]
    assert cov["-XX", "-YY"] == 1
    assert not theoretical_covariance(S01, fam("IZ", "ZI")).entries.any()
    with pytest.raises(NotCommuting):
        theoretical_covariance(S01, fam("XI", "ZI"))


def test_eigenstate_has_zero_covariance():
    psi = StateVector(np.array([1, 0, 0, 1]) / np.sqrt(2))
    assert np.allclose(theoretical_covariance(psi, fam("XX", "-YY", "ZZ")).entries, 0)


def _partner(m1: PauliString, m2: PauliString) -> PauliString:
    """A Pauli that commutes with m1 and anticommutes with m2."""
    for q in all_pauli_strings(m1.n_qubits):
        if commutes_gc(q, m1) and not commutes_gc(q, m2):
            return q
    raise AssertionError("no partner")


def test_matched_state_flips_covariance():
    strings = all_pauli_strings(2, include_identity=False)
    pairs = [(a, b) for a, b in itertools.combinations(strings, 2) if commutes_gc(a, b)]
    rng = np.random.default_rng(21)
    for m1, m2 in pairs:
        q = _partner(m1, m2)
        psi = random_state(2, rng)
        matched = dense_of(q) @ psi
        # the matched state carries psi's weight from each (m1, m2) sector into (m1, -m2)
        for e1, e2 in itertools.product((1, -1), repeat=2):
            proj = (np.eye(4) + e1 * dense_of(m1)) @ (np.eye(4) + e2 * dense_of(m2)) / 4
            flip = (np.eye(4) + e1 * dense_of(m1)) @ (np.eye(4) - e2 * dense_of(m2)) / 4
            assert np.linalg.norm(proj @ psi) == pytest.approx(np.linalg.norm(flip @ matched), abs=1e-12)
        a = theoretical_covariance(StateVector(psi), [m1, m2]).entries[0, 1]
        b = theoretical_covariance(StateVector(matched), [m1, m2]).entries[0, 1]
        assert a == pytest.approx(-b, abs=1e-12)


def test_sample_covariance_by_hand():
    t = OutcomeTable(["A", "B"], np.array([[1, -1], [1, -1], [-1, 1], [-1, 1]]))
    cov = sample_covariance(t)
    assert cov.entries == pytest.approx(np.array([[4, -4], [-4, 4]]) / 3)
    assert cov.provenance == "sample" and cov.n_shots == 4
    constant = OutcomeTable(["A", "B"], np.ones((5, 2), dtype=int))
    assert not sample_covariance(constant).entries.any()
    with pytest.raises(InsufficientShots):
        sample_covariance(OutcomeTable(["A"], np.ones((1, 1), dtype=int)))


def test_correlated_members_sampled():
    fm = measure_family(fam("-XX", "-YY", "ZZ"))
    table = sample_outcomes(S01, fm.circuit, fm.map, 4000, seed=8)
    cov = sample_covariance(table)
    # -XX and -YY are +-1 with mean 0 and perfectly correlated
    assert cov.entries[0, 1] == pytest.approx(1, abs=3 * np.sqrt(1 / 4000) + 1e-3)


def test_covariance_matrix_validation():
    with pytest.raises(ValueError):
        CovarianceMatrix(["A", "B"], [[1, 0.5], [0, 1]])
    with pytest.raises(ValueError):
        CovarianceMatrix(["A"], [[1, 0], [0, 1]])


# --- n_expect and splitting ---------------------------------------------------------

def _bowtie(groups, state=S01):
    weights = {"IZ": 1, "ZI": 1, "-XX": 1, "-YY": 1, "ZZ": 1}
    return [theoretical_covariance(state, fam(*g), [weights[s] for s in g]) for g in groups]


def test_bowtie_n_expect():
    assert n_expect_from(_bowtie(BOWTIE_K2), 1.0) == 8
    assert n_expect_from(_bowtie([["IZ", "ZI"], ["-XX"], ["-YY", "ZZ"]]), 0.5) == 6 / 0.25
    assert n_expect([0, 0, 0], 0.1) == 0
    with pytest.raises(NonPositiveEpsilon):
        n_expect([1.0], 0)


def test_bowtie_split():
    d = split_decision(_bowtie(BOWTIE_K2), [["IZ", "ZI"], ["-XX"], ["-YY", "ZZ"]])
    assert d.decision == "SPLIT" and d.margin == pytest.approx(2)
    assert (d.k, d.k_prime) == (2, 3)


def test_zero_covariance_keeps():
    psi = StateVector(np.array([1, 0, 0, 1]) / np.sqrt(2))
    full = [theoretical_covariance(psi, fam("XX", "-YY", "ZZ"))]
    d = split_decision(full, [["XX"], ["-YY", "ZZ"]])
    assert d.decision == "KEEP" and d.margin <= 0


def test_split_rejects_non_refinements():
    full = _bowtie(BOWTIE_K2)
    for bad in ([["IZ", "-XX"], ["ZI"], ["-YY", "ZZ"]],
                [["IZ", "ZI"], ["-XX", "-YY"]],
                [["IZ", "ZI"], ["-XX"], ["-XX", "-YY", "ZZ"]],
                [["IZ", "ZI"], [], ["-XX", "-YY", "ZZ"]]):
        with pytest.raises(NotARefinement):
            split_decision(full, bad)


def test_split_enforces_burn_in():
    fm = measure_family(fam("-XX", "-YY", "ZZ"))
    small = sample_covariance(sample_outcomes(S01, fm.circuit, fm.map, 10, seed=1))
    with pytest.raises(InsufficientShots):
        split_decision([small], [["-XX"], ["-YY", "ZZ"]])
    assert split_decision([small], [["-XX"], ["-YY", "ZZ"]], burn_in=5).decision in ("KEEP", "SPLIT")
    with pytest.raises(ValueError):
        split_decision([small, _bowtie([["IZ", "ZI"]])[0]], [["-XX"], ["-YY", "ZZ"], ["IZ", "ZI"]], burn_in=5)
