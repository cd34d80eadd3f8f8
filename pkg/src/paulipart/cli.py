"""Command-line front end.

Exit status: 0 on success, 1 when a verification fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import fermion, hardness
from .errors import NotDiagonalized, PauliPartError
from .partition import (
    DEFAULT_BK_LIMIT,
    PartitionSet,
    partition_from_report,
    partition_hamiltonian,
    verify_partition,
)
from .pauli import Hamiltonian, format_hamiltonian, parse_hamiltonian
from .simulator import (
    MAX_QUBITS,
    StateVector,
    exact_outcome_expectations,
    expectation,
    haar_random_state,
    parse_state,
    sample_outcomes,
)
from .stats import n_expect, sample_covariance, split_decision, theoretical_covariance
from .synthesis import (
    FORMAT_VERSION,
    Circuit,
    MeasurementMap,
    conjugate,
    measure_family,
    parse_circuit,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _terms_report(h: Hamiltonian) -> list[dict]:
    return [{"coefficient": t.coefficient, "pauli": t.pauli.letters} for t in h.terms]


def _hamiltonian_from_report(report: dict) -> Hamiltonian:
    try:
        pairs = [(t["coefficient"], t["pauli"]) for t in report["terms"]]
    except (KeyError, TypeError):
        raise InputError("partition report has no usable 'terms'; pass --hamiltonian") from None
    return Hamiltonian.from_pairs(pairs)


def _load_report(path: str) -> dict:
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not a JSON report: {exc}") from None


# --- partition ------------------------------------------------------------------

def cmd_partition(args) -> int:
    start = time.perf_counter()
    extra = {}
    if args.algo == "structural":
        terms = fermion.parse_fermionic(_read(args.input))
        p = fermion.partition_structural(terms, args.encoding)
        h = p.source
        extra = {"encoding": args.encoding, "offset": p.offset}
    else:
        h = parse_hamiltonian(_read(args.input))
        p = partition_hamiltonian(h, args.mode, args.algo, args.max_vertices)
    elapsed = time.perf_counter() - start
    if not verify_partition(p, h):
        raise PauliPartError(f"internal error, invalid partition: {p.diagnostic}")
    if args.format == "text":
        lines = [f"# mode={p.mode.value} algorithm={p.algorithm} k={p.num_partitions} "
                 f"wall_time_s={elapsed:.6f}"]
        lines += [" ".join(fam) for fam in p.family_strings()]
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(p.to_json(wall_time_s=elapsed, terms=_terms_report(h), **extra), args.out)
    return EXIT_OK


# --- synthesize -------------------------------------------------------------------

def _families_for_synthesis(args) -> tuple[Hamiltonian, list[list[int]]]:
    text = _read(args.input)
    try:
        report = json.loads(text)
    except json.JSONDecodeError:
        h = parse_hamiltonian(text)
        return h, [list(range(len(h)))]
    h = parse_hamiltonian(_read(args.hamiltonian)) if args.hamiltonian else _hamiltonian_from_report(report)
    p = partition_from_report(report, h)
    if not verify_partition(p, h):
        raise InputError(f"partition report is inconsistent with the Hamiltonian: {p.diagnostic}")
    return h, p.families


def cmd_synthesize(args) -> int:
    h, families = _families_for_synthesis(args)
    results = []
    for i, fam in enumerate(families):
        members = [h[j].pauli for j in fam if not h[j].pauli.is_identity()]
        if not members:
            continue
        fm = measure_family(members, elide=args.elide_swaps)
        results.append((i, members, fm))

    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        manifest = []
        for i, members, fm in results:
            stem = f"family_{i:03d}"
            (out / f"{stem}.circuit").write_text(fm.circuit.to_text())
            (out / f"{stem}.map.json").write_text(fm.map.to_json())
            manifest.append({"family": i, "members": [m.letters for m in members],
                             "circuit": f"{stem}.circuit", "map": f"{stem}.map.json",
                             "gates": len(fm.circuit), "entangling": fm.circuit.entangling_count})
        (out / "synthesis.json").write_text(json.dumps(
            {"format_version": FORMAT_VERSION, "elide_swaps": args.elide_swaps, "families": manifest}, indent=2))
        (out / "hamiltonian.txt").write_text(format_hamiltonian(h))
        return EXIT_OK

    if args.format == "json":
        payload = {"format_version": FORMAT_VERSION, "elide_swaps": args.elide_swaps, "families": [
            {"family": i, "members": [m.letters for m in members], "circuit": fm.circuit.gate_strings(),
             "measured_qubits": list(fm.circuit.measured_qubits), "map": fm.map.to_report()}
            for i, members, fm in results]}
        _emit(json.dumps(payload, indent=2), None)
    else:
        chunks = []
        for i, members, fm in results:
            chunks.append(f"# family {i}: {' '.join(m.letters for m in members)}\n{fm.circuit.to_text()}")
        _emit("".join(chunks), None)
    return EXIT_OK


# --- verify ----------------------------------------------------------------------

def verify_pair(circuit: Circuit, mmap: MeasurementMap, h: Hamiltonian | None = None,
                n_states: int = 5, seed: int = 0) -> list[str]:
    """Diagnostics for one circuit/map pair; empty when everything checks out."""
    problems = []
    if mmap.n_qubits != circuit.n_qubits:
        return [f"map is for {mmap.n_qubits} qubits, circuit for {circuit.n_qubits}"]
    for e in mmap:
        if h is not None:
            try:
                h.index_of(e.member)
            except KeyError:
                problems.append(f"member {e.member} is not a Hamiltonian term")
        c = conjugate(e.member, circuit)
        if c.x:
            problems.append(f"NotDiagonalized: {e.member} -> {c}")
            continue
        support = tuple(q for q in range(c.n_qubits) if (c.z >> q) & 1)
        if support != tuple(e.bits):
            problems.append(f"{e.member}: readout bits {list(e.bits)} but observable acts on {list(support)}")
        unmeasured = set(support) - set(circuit.measured_qubits)
        if unmeasured:
            problems.append(f"{e.member}: reads unmeasured qubits {sorted(unmeasured)}")
        if circuit.n_qubits > MAX_QUBITS and c.sign != e.sign:
            problems.append(f"{e.member}: map sign {e.sign} but conjugation gives {c.sign}")
    if problems or circuit.n_qubits > MAX_QUBITS:
        return problems
    for s in range(n_states):
        state = haar_random_state(circuit.n_qubits, seed + s)
        mapped = exact_outcome_expectations(state, circuit, mmap)
        for e, got in zip(mmap, mapped):
            want = expectation(state, e.member)
            if abs(got - want) > 1e-9:
                problems.append(f"expectation mismatch for {e.member}: mapped {got:.12f}, direct {want:.12f}")
        if problems:
            break
    return problems


def cmd_verify(args) -> int:
    h = parse_hamiltonian(_read(args.hamiltonian)) if args.hamiltonian else None
    pairs = []
    if args.dir:
        d = Path(args.dir)
        manifest = _load_report(str(d / "synthesis.json"))
        if h is None and (d / "hamiltonian.txt").exists():
            h = parse_hamiltonian(_read(str(d / "hamiltonian.txt")))
        for fam in manifest["families"]:
            pairs.append((fam["circuit"], d / fam["circuit"], d / fam["map"]))
    elif args.circuit and args.map:
        pairs.append((args.circuit, Path(args.circuit), Path(args.map)))
    else:
        raise InputError("give --dir, or both --circuit and --map")

    results = []
    for name, cpath, mpath in pairs:
        circuit = parse_circuit(_read(str(cpath)))
        mmap = MeasurementMap.from_report(_read(str(mpath)))
        problems = verify_pair(circuit, mmap, h, args.states, args.seed)
        results.append({"circuit": name, "passed": not problems, "diagnostics": problems})
    passed = all(r["passed"] for r in results)
    if args.format == "text":
        lines = [f"{'PASS' if r['passed'] else 'FAIL'} {r['circuit']}" + "".join(f"\n  {d}" for d in r["diagnostics"])
                 for r in results]
        _emit("\n".join(lines), args.out)
    else:
        _emit(json.dumps({"format_version": FORMAT_VERSION, "passed": passed, "results": results}, indent=2),
              args.out)
    return EXIT_OK if passed else EXIT_FAIL


# --- stats -------------------------------------------------------------------------

def _state_from_args(args, n_qubits: int, seed: int) -> StateVector:
    if args.state:
        state = parse_state(_read(args.state))
    elif args.basis:
        state = StateVector.basis(args.basis)
    elif args.haar:
        state = haar_random_state(n_qubits, seed)
    else:
        raise InputError("choose a state with --state, --basis or --haar")
    if state.n_qubits != n_qubits:
        raise InputError(f"state has {state.n_qubits} qubits, Hamiltonian has {n_qubits}")
    return state


def _is_refinement(fine: list[list[int]], coarse: list[list[int]]) -> bool:
    owner = {v: i for i, fam in enumerate(coarse) for v in fam}
    return len(fine) > len(coarse) and all(len({owner.get(v) for v in fam}) == 1 for fam in fine)


def _partition_stats(h, p: PartitionSet, state, args, seed):
    theo, samp, fams = [], [], []
    for f, fam in enumerate(p.families):
        members = [h[j].pauli for j in fam]
        weights = [h[j].coefficient for j in fam]
        cov = theoretical_covariance(state, members, weights)
        entry = {"family": [m.letters for m in members], "coefficients": weights,
                 "theoretical_variance": cov.variance(), "theoretical_covariance": cov.entries.tolist()}
        theo.append(cov)
        if args.shots:
            fm = measure_family(members)
            table = sample_outcomes(state, fm.circuit, fm.map, args.shots, seed + f)
            scov = sample_covariance(table, weights)
            samp.append(scov)
            entry["sample_variance"] = scov.variance()
            entry["sample_covariance"] = scov.entries.tolist()
        entry["n_expect_contribution"] = len(p.families) * cov.variance() / args.epsilon ** 2
        fams.append(entry)
    report = {"k": len(p.families), "families": fams,
              "n_expect": n_expect([c.variance() for c in theo], args.epsilon)}
    if samp:
        report["n_expect_sample"] = n_expect([c.variance() for c in samp], args.epsilon)
    return report, theo, samp


def _stats_for_state(h, partitions, state, args, seed) -> dict:
    reports, mats = [], []
    for name, p in partitions:
        rep, theo, samp = _partition_stats(h, p, state, args, seed)
        rep["partition"] = name
        reports.append(rep)
        mats.append((theo, samp))
    decisions = []
    for a, (name_a, pa) in enumerate(partitions):
        for b, (name_b, pb) in enumerate(partitions):
            if a == b or not _is_refinement(pb.families, pa.families):
                continue
            proposal = [[h[j].pauli.letters for j in fam] for fam in pb.families]
            d = {"coarse": name_a, "fine": name_b,
                 "theoretical": split_decision(mats[a][0], proposal).to_report()}
            if mats[a][1]:
                d["sample"] = split_decision(mats[a][1], proposal).to_report()
            decisions.append(d)
    return {"partitionings": reports, "split_decisions": decisions}


def cmd_stats(args) -> int:
    h = parse_hamiltonian(_read(args.hamiltonian))
    if not args.epsilon > 0:
        raise InputError("--epsilon must be positive")
    partitions = []
    for path in args.partition:
        p = partition_from_report(_load_report(path), h)
        if not verify_partition(p, h):
            raise InputError(f"{path}: {p.diagnostic}")
        partitions.append((path, p))
    seed = args.seed
    report = {"format_version": FORMAT_VERSION, "epsilon": args.epsilon, "shots": args.shots, "seed": seed}
    if args.sweep:
        if not args.haar:
            raise InputError("--sweep needs --haar")
        runs = []
        for s in range(seed, seed + args.sweep):
            state = haar_random_state(h.n_qubits, s)
            runs.append({"state_seed": s, **_stats_for_state(h, partitions, state, args, s)})
        report["sweep"] = runs
    else:
        state = _state_from_args(args, h.n_qubits, seed)
        report.update(_stats_for_state(h, partitions, state, args, seed))
    if args.format == "text":
        _emit(_stats_text(report), args.out)
    else:
        _emit(json.dumps(report, indent=2), args.out)
    return EXIT_OK


def _stats_text(report: dict) -> str:
    runs = report.get("sweep") or [report]
    lines = []
    for run in runs:
        if "state_seed" in run:
            lines.append(f"# state seed {run['state_seed']}")
        for rep in run["partitionings"]:
            lines.append(f"{rep['partition']}: k={rep['k']} n_expect={rep['n_expect']:.6g}")
        for d in run["split_decisions"]:
            t = d["theoretical"]
            lines.append(f"{d['coarse']} -> {d['fine']}: {t['decision']} (margin {t['margin']:.6g})")
    return "\n".join(lines) + "\n"


# --- reduce / encode -------------------------------------------------------------

def cmd_reduce(args) -> int:
    g = hardness.parse_graph(_read(args.input))
    h = hardness.reduce_to_mcp(g)
    _emit(format_hamiltonian(h, [f"clique-cover reduction of a {g.n_vertices}-vertex graph"]), args.out)
    return EXIT_OK


def cmd_encode(args) -> int:
    terms = fermion.parse_fermionic(_read(args.input))
    h = fermion.encode_hamiltonian(terms, args.encoding)
    _emit(format_hamiltonian(h, [f"{args.encoding} encoding of {len(terms)} fermionic terms"]), args.out)
    return EXIT_OK


# --- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paulipart", description="Partition, measure and analyse Pauli Hamiltonians.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=True):
        p.add_argument("--out", help="output path (directory for synthesize)")
        if fmt:
            p.add_argument("--format", choices=["json", "text"], default="json")

    p = sub.add_parser("partition", help="group Hamiltonian terms into commuting families")
    p.add_argument("input", help="Hamiltonian file (fermionic term file with --algo structural)")
    p.add_argument("--mode", choices=["qwc", "gc"], default="gc")
    p.add_argument("--algo", choices=["naive", "greedy", "bk", "structural"], default="greedy")
    p.add_argument("--encoding", choices=["jw", "parity"], default="jw")
    p.add_argument("--max-vertices", type=int, default=DEFAULT_BK_LIMIT)
    common(p)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("synthesize", help="measurement circuit and readout map per family")
    p.add_argument("input", help="partition report (JSON) or a Hamiltonian file holding one family")
    p.add_argument("--hamiltonian", help="Hamiltonian file, if the report lacks its terms")
    p.add_argument("--elide-swaps", action="store_true")
    common(p)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("verify", help="check circuits and maps symbolically and on a statevector")
    p.add_argument("--dir", help="output directory of synthesize")
    p.add_argument("--circuit")
    p.add_argument("--map")
    p.add_argument("--hamiltonian")
    p.add_argument("--states", type=int, default=5, help="random states for the expectation check")
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("stats", help="covariances, n_expect and split decisions")
    p.add_argument("hamiltonian")
    p.add_argument("--partition", action="append", required=True, help="partition report; repeatable")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--state", help="amplitude file")
    src.add_argument("--basis", help="computational basis state, e.g. 01")
    src.add_argument("--haar", action="store_true", help="Haar-random state from --seed")
    p.add_argument("--sweep", type=int, default=0, help="with --haar: evaluate seeds seed..seed+n-1")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--shots", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("reduce", help="clique-cover instance to Pauli Hamiltonian")
    p.add_argument("input", help="graph edge-list file")
    common(p, fmt=False)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("encode", help="fermionic terms to a Pauli Hamiltonian")
    p.add_argument("input")
    p.add_argument("--encoding", choices=["jw", "parity"], default="jw")
    common(p, fmt=False)
    p.set_defaults(func=cmd_encode)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NotDiagonalized as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (InputError, PauliPartError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
