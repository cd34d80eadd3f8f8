import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from paulipart.pauli import PauliString

# Independent dense oracle: plain Kronecker products of the textbook matrices.
SIGMA = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
GATE = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "S": np.diag([1, 1j]),
}


def dense(letters: str, sign: int = 1) -> np.ndarray:
    m = np.ones((1, 1), dtype=complex)
    for ch in letters:
        m = np.kron(m, SIGMA[ch])
    return sign * m


def dense_of(p: PauliString) -> np.ndarray:
    return dense(p.letters, p.sign)


def embed_1q(u: np.ndarray, q: int, n: int) -> np.ndarray:
    m = np.ones((1, 1), dtype=complex)
    for i in range(n):
        m = np.kron(m, u if i == q else np.eye(2))
    return m


def dense_gate(name: str, qubits, n: int) -> np.ndarray:
    """Unitary of one gate, built column by column on basis states (qubit 0 = MSB)."""
    if name in GATE:
        return embed_1q(GATE[name], qubits[0], n)
    dim = 1 << n
    u = np.zeros((dim, dim), dtype=complex)
    for b in range(dim):
        bits = [(b >> (n - 1 - q)) & 1 for q in range(n)]
        phase = 1
        if name == "CNOT":
            c, t = qubits
            bits[t] ^= bits[c]
        elif name == "CZ":
            a, c = qubits
            phase = -1 if bits[a] and bits[c] else 1
        elif name == "SWAP":
            a, c = qubits
            bits[a], bits[c] = bits[c], bits[a]
        out = int("".join(map(str, bits)), 2)
        u[out, b] = phase
    return u


def dense_circuit(circuit) -> np.ndarray:
    u = np.eye(1 << circuit.n_qubits, dtype=complex)
    for g in circuit.gates:
        u = dense_gate(g.name, g.qubits, circuit.n_qubits) @ u
    return u


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return v / np.linalg.norm(v)


def random_gc_family(n: int, size: int, rng: np.random.Generator, signed: bool = False) -> list[PauliString]:
    """Draw random strings, keeping each one that commutes with all kept so far."""
    from paulipart.pauli import commutes_gc

    fam: list[PauliString] = []
    seen = set()
    for _ in range(200):
        if len(fam) == size:
            break
        z, x = int(rng.integers(0, 1 << n)), int(rng.integers(0, 1 << n))
        if (z, x) == (0, 0) or (z, x) in seen:
            continue
        sign = int(rng.choice([1, -1])) if signed else 1
        p = PauliString(n, z, x, sign)
        if all(commutes_gc(p, q) for q in fam):
            fam.append(p)
            seen.add((z, x))
    return fam


def pauli_strategy(n_min=1, n_max=5, signed=False):
    @st.composite
    def build(draw, n=None):
        n = n if n is not None else draw(st.integers(n_min, n_max))
        z = draw(st.integers(0, (1 << n) - 1))
        x = draw(st.integers(0, (1 << n) - 1))
        sign = draw(st.sampled_from([1, -1])) if signed else 1
        return PauliString(n, z, x, sign)

    return build


@st.composite
def pauli_pair(draw, n_max=5, signed=False):
    n = draw(st.integers(1, n_max))
    build = pauli_strategy(signed=signed)
    return draw(build(n=n)), draw(build(n=n))


def all_letters(n: int, include_identity=False):
    out = ["".join(p) for p in itertools.product("IXYZ", repeat=n)]
    return out if include_identity else out[1:]


# --- acceptance summary ----------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_record():
    def record(number: int, passed: bool | None, text: str) -> None:
        status = "N/A " if passed is None else ("PASS" if passed else "FAIL")
        ACCEPTANCE_LINES.append(f"criterion {number:>2}: {status}  {text}")

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
