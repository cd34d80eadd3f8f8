"""Time the compiled and pure-Python graph kernels on the same random inputs.

    python benchmarks/bench_kernels.py [--sizes 50 100 200] [--repeat 3]

Both backends are checked for identical output before timing.
"""

import argparse
import time

import numpy as np

from paulipart import _kernels
from paulipart._kernels import _pykernels as py
from paulipart.graph import pack_paulis
from paulipart.pauli import PauliString


def random_paulis(m, n, rng):
    return [PauliString(n, int(rng.integers(0, 1 << n)), int(rng.integers(0, 1 << n))) for _ in range(m)]


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200, 400])
    ap.add_argument("--qubits", type=int, default=12)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cy = _kernels.compiled_backend
    if cy is None:
        raise SystemExit("compiled kernels are not built (or PAULIPART_PURE_PYTHON is set); "
                         "run `pip install -e . --no-build-isolation` first")

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<12}{'terms':>7}{'cython s':>12}{'python s':>12}{'speedup':>10}")
    for m in args.sizes:
        paulis = random_paulis(m, args.qubits, rng)
        z, x = pack_paulis(paulis, args.qubits)
        adj = py.adjacency(z, x, False)
        assert (cy.adjacency(z, x, False) == adj).all()
        active = py.int_to_row((1 << m) - 1, adj.shape[1])
        cases = [
            ("adjacency", lambda b: b.adjacency(z, x, False)),
            ("greedy", lambda b: b.greedy_cover(adj)),
        ]
        if m <= 200:
            cases.append(("max_clique", lambda b: b.max_clique(adj, active)))
        for name, call in cases:
            assert (np.asarray(call(cy)) == np.asarray(call(py))).all(), name
            t_cy = best_of(lambda: call(cy), args.repeat)
            t_py = best_of(lambda: call(py), args.repeat)
            print(f"{name:<12}{m:>7}{t_cy:>12.5f}{t_py:>12.5f}{t_py / max(t_cy, 1e-9):>9.1f}x")


if __name__ == "__main__":
    main()
