"""Command-line front end.

Exit codes: 0 success, 1 the run completed but missed its target,
2 invalid input, 3 size cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .circuit import (
    MAX_DENSE_WIDTH, build_oracle_circuit, build_walk_circuit, gate_count, gate_shape,
    oracle_vertex_action, pad_instance, round_sizes, vertex_qubits, walk_circuit_deviation,
)
from .counting import (
    best_outcomes, counting_distribution, counting_error_bound, counting_time, run_counting,
)
from .errors import DomainError, ResourceError
from .graph import BicliqueInstance
from .search import (
    SearchSchedule, make_schedule, min_iterations, predicted_overlap, run_search,
)
from .walk import FULL, SPACES, oracle_full, search_spectrum

EXIT_OK, EXIT_MISS, EXIT_DOMAIN, EXIT_RESOURCE = 0, 1, 2, 3

SEARCH_TOL = 1e-6
CIRCUIT_TOL = 1e-9
ORACLE_TOL = 1e-12
SWEEP_MAX_FULL_DIM = 256
FULL_SPACE_MAX_DIM = 4096


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _write_csv(rows: list[dict], columns: Sequence[str], out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])


def _emit(payload: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        flat = {k: v for k, v in payload.items() if not isinstance(v, (dict, list))}
        _write_csv([flat], list(flat), out)


def _instance(args) -> BicliqueInstance:
    if getattr(args, "instance", None):
        text = args.instance
        path = Path(text)
        if path.exists():
            text = path.read_text()
        return BicliqueInstance.from_json(text)
    if args.m is None or args.n is None:
        raise DomainError("give --m and --n (with --k or --marked), or --instance")
    if args.marked:
        try:
            marked = tuple(int(x) for x in args.marked.split(",") if x.strip())
        except ValueError as exc:
            raise DomainError(f"--marked must be a comma list of integers: {exc}") from exc
        return BicliqueInstance(args.m, args.n, marked)
    if args.k is None:
        raise DomainError("give --k or --marked")
    return BicliqueInstance.from_counts(args.m, args.n, args.k)


def cmd_search(args, out) -> int:
    inst = _instance(args)
    if args.t is not None:
        l = min_iterations(inst) if args.l is None else args.l
        schedule = SearchSchedule(l, args.t)
    else:
        schedule = make_schedule(inst, args.l)
    if args.space == FULL and inst.dim > FULL_SPACE_MAX_DIM:
        raise ResourceError(f"full-space dimension {inst.dim} is too large")
    report = run_search(inst, schedule, args.space)
    payload = report.to_dict()
    payload.update({"m": inst.m, "n": inst.n, "k": inst.k, "x": schedule.x})
    _emit(payload, args.output, out)
    return EXIT_OK if report.success_probability >= 1 - SEARCH_TOL else EXIT_MISS


def cmd_count(args, out) -> int:
    inst = _instance(args)
    if not 2 * inst.k < inst.n:
        print(f"warning: k = {inst.k} >= n/2 = {inst.n / 2}; counting proviso violated",
              file=sys.stderr)
    dist = counting_distribution(inst, args.p)
    est = run_counting(inst, args.p, args.max_retries, np.random.default_rng(args.seed),
                       enforce_proviso=False, distribution=dist)
    M = 1 << args.p
    theta = 2 * math.asin(math.sqrt(inst.k / inst.n))
    best = sorted(set(best_outcomes(theta, M)) | set(best_outcomes(-theta, M)))
    top = np.argsort(-dist, kind="stable")[:5]
    payload = est.to_dict()
    payload.update({
        "m": inst.m, "n": inst.n, "k": inst.k,
        "true_error_bound": counting_error_bound(inst.n, inst.k, M),
        "best_outcomes": best,
        "best_outcome_probability": float(dist[best].sum()),
        "pi_outcome_probability": float(dist[M // 2]),
        "top_outcomes": [[int(i), float(dist[i])] for i in top],
    })
    if est.k_tilde is not None:
        payload["within_true_bound"] = abs(est.k_tilde - inst.k) <= payload["true_error_bound"]
    _emit(payload, args.output, out)
    return EXIT_MISS if est.inconclusive else EXIT_OK


def cmd_spectrum(args, out) -> int:
    inst = _instance(args)
    t = counting_time(inst) if args.t is None else args.t
    spectrum = search_spectrum(inst, t)

    def vec(v):
        return [[float(z.real), float(z.imag)] for z in v]

    payload = {
        "m": inst.m, "n": inst.n, "k": inst.k, "t": t,
        "eigenphase_pi": spectrum.eigenphase_pi,
        "theta_plus": spectrum.theta_plus,
        "theta_minus": spectrum.theta_minus,
        "normalization": spectrum.normalization,
        "v_minus1": vec(spectrum.v_minus1),
        "v_plus": vec(spectrum.v_plus),
        "v_minus": vec(spectrum.v_minus),
    }
    _emit(payload, args.output, out)
    return EXIT_OK


def cmd_verify_circuit(args, out) -> int:
    if args.m is None or args.n is None:
        raise DomainError("verify-circuit needs --m and --n")
    mp, np_, swapped = round_sizes(args.m, args.n)
    layout = pad_instance(args.m, args.n)
    if layout.l1 + 1 > MAX_DENSE_WIDTH:
        raise ResourceError(f"walk register width {layout.l1 + 1} exceeds the dense cap")
    t = 1.0 if args.t is None else args.t
    t2 = 10.0 * t + 1.0 if args.t2 is None else args.t2
    dev = walk_circuit_deviation(mp, np_, t)
    c1, c2 = build_walk_circuit(mp, np_, t), build_walk_circuit(mp, np_, t2)
    n1, n2 = gate_count(c1), gate_count(c2)
    counts_equal = n1 == n2 and gate_shape(c1) == gate_shape(c2)
    payload = {
        "m": args.m, "n": args.n, "rounded_m": mp, "rounded_n": np_, "swapped": swapped,
        "l1": layout.l1, "l2": layout.l2, "d": layout.d, "padded_dim": layout.padded_dim,
        "t": t, "t2": t2,
        "deviation_original": dev["original"],
        "deviation_padding": dev["padding"],
        "deviation_coupling": dev["coupling"],
        "gate_count_t": n1[0], "gate_count_t2": n2[0],
        "gate_counts_by_kind": n1[1],
        "gate_counts_equal": counts_equal,
    }
    ok = max(dev.values()) <= CIRCUIT_TOL and counts_equal
    if args.k is not None or args.marked:
        inst = _instance(args)
        if vertex_qubits(inst) + 2 > MAX_DENSE_WIDTH:
            raise ResourceError("oracle register exceeds the dense cap")
        action, leak = oracle_vertex_action(
            inst, build_oracle_circuit(inst, 1, args.sign_correction))
        target = oracle_full(inst)
        if not args.sign_correction:
            target = target.copy()
            target[: inst.m, : inst.m] *= -1
        oracle_dev = float(np.max(np.abs(action - target)))
        payload.update({"oracle_deviation": oracle_dev, "oracle_ancilla_leak": leak,
                        "sign_correction": args.sign_correction})
        ok = ok and oracle_dev <= ORACLE_TOL and leak <= ORACLE_TOL
    if args.emit_gates:
        payload["gates"] = c1.to_dict()["gates"]
    _emit(payload, args.output, out)
    return EXIT_OK if ok else EXIT_MISS


SWEEP_COLUMNS = ("m", "n", "k", "l", "t", "predicted_overlap", "simulated_overlap",
                 "success_probability")


def sweep_rows(inst: BicliqueInstance, points, space: str) -> list[dict]:
    """One row per ``(l, t)``; ``simulated_overlap`` is ``i <w|psi>`` (real for this walk)."""
    rows = []
    for l, t in points:
        report = run_search(inst, SearchSchedule(l, t), space)
        rows.append({
            "m": inst.m, "n": inst.n, "k": inst.k, "l": l, "t": t,
            "predicted_overlap": predicted_overlap(inst, l, t),
            "simulated_overlap": float((1j * report.overlap_with_w).real),
            "success_probability": report.success_probability,
        })
    return rows


def cmd_sweep(args, out) -> int:
    inst = _instance(args)
    if args.space == FULL and inst.dim > SWEEP_MAX_FULL_DIM:
        raise ResourceError(f"full-space sweep capped at {SWEEP_MAX_FULL_DIM} dimensions")
    if args.t_num is not None:
        if args.l is None:
            raise DomainError("a t sweep needs a fixed --l")
        if args.t_start is None or args.t_stop is None:
            raise DomainError("a t sweep needs --t-start and --t-stop")
        ts = np.linspace(args.t_start, args.t_stop, args.t_num) if args.t_num > 0 else []
        points = [(args.l, float(t)) for t in ts]
    else:
        l_min = min_iterations(inst)
        start = l_min if args.l_start is None else args.l_start
        stop = l_min + 5 if args.l_stop is None else args.l_stop
        if start < 0:
            raise DomainError(f"--l-start must be non-negative, got {start}")
        points = [(l, make_schedule(inst, l).t) for l in range(start, stop + 1)]
    rows = sweep_rows(inst, points, args.space)
    if args.output == "json":
        out.write(json.dumps(rows, indent=2) + "\n")
    else:
        _write_csv(rows, SWEEP_COLUMNS, out)
    return EXIT_OK


def _add_instance_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--m", type=int, help="size of the first part")
    p.add_argument("--n", type=int, help="size of the second part")
    p.add_argument("--k", type=int, help="mark the first k second-part vertices")
    p.add_argument("--marked", help="comma list of marked vertex indices")
    p.add_argument("--instance", help='instance JSON {"m":..,"n":..,"marked":[..]} or a path to one')
    p.add_argument("--output", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bicliquesearch",
        description="Deterministic quantum-walk search and counting on complete bipartite graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", help="run the deterministic search")
    _add_instance_flags(p)
    p.add_argument("--l", type=int, help="iteration count (default: minimal admissible)")
    p.add_argument("--t", type=float, help="walk time (default: the deterministic time for l)")
    p.add_argument("--space", choices=SPACES, default="reduced")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("count", help="estimate the number of marked vertices")
    _add_instance_flags(p)
    p.add_argument("--p", type=int, default=6, help="phase register qubits")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-retries", type=int, default=8)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("spectrum", help="closed-form spectrum of the reduced search operator")
    _add_instance_flags(p)
    p.add_argument("--t", type=float, help="walk time (default: pi/sqrt(mn))")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("verify-circuit", help="check the gate-level walk (and oracle) circuits")
    _add_instance_flags(p)
    p.add_argument("--t", type=float, help="walk time (default 1.0)")
    p.add_argument("--t2", type=float, help="second walk time for the gate-count comparison")
    p.add_argument("--sign-correction", action="store_true")
    p.add_argument("--emit-gates", action="store_true", help="include the gate list for --t")
    p.set_defaults(func=cmd_verify_circuit)

    p = sub.add_parser("sweep", help="tabulate predicted vs simulated overlaps")
    _add_instance_flags(p)
    p.set_defaults(output="csv")
    p.add_argument("--space", choices=SPACES, default="reduced")
    p.add_argument("--l-start", type=int)
    p.add_argument("--l-stop", type=int, help="inclusive")
    p.add_argument("--l", type=int, help="fixed l for a t sweep")
    p.add_argument("--t-start", type=float)
    p.add_argument("--t-stop", type=float)
    p.add_argument("--t-num", type=int)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    out.write(buf.getvalue())
    return code


if __name__ == "__main__":
    raise SystemExit(main())
