"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a check fails, 2 when the
input is malformed or inconsistent.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import __version__
from .axioms import SUITES, SuiteConfig, run_lattice_suite, run_reconstruction_suite
from .core import HermitianOperator, matrix_from_json, random_hermitian, random_unit_vector, seeded_rng
from .errors import (
    DimensionMismatch,
    InsufficientSignal,
    InconsistentBracket,
    InvalidSpace,
    NotHermitian,
    SpaceMismatch,
    SectorMismatch,
    ZeroVector,
)
from .poisson import FINITE_DIFFERENCE, OPERATOR, BracketOracle, bracket_samples, compare_flows, hamiltonian_flow, infer_hbar
from .schemas import SCHEMA_VERSION, identify
from .states import PureState, QuantumSector, StateSpace, load_bundle, state_from_json

SEED_ENV = "POISSONTP_SEED"

EXIT_PASS, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class InputError(Exception):
    pass


INPUT_ERRORS = (
    InputError,
    OSError,
    json.JSONDecodeError,
    KeyError,
    TypeError,
    InvalidSpace,
    DimensionMismatch,
    SpaceMismatch,
    SectorMismatch,
    ZeroVector,
    NotHermitian,
)


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{SEED_ENV}={raw!r} is not an integer")


def _load_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _emit(doc: dict, path: str):
    text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _write_csv(path: str, header: list[str], rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _parse_tols(items) -> dict:
    out = {}
    for item in items or []:
        name, sep, val = item.partition("=")
        if not sep:
            raise InputError(f"tolerance override {item!r} must look like name=value")
        try:
            out[name] = float(val)
        except ValueError:
            raise InputError(f"tolerance override {item!r} has a non-numeric value")
    return out


def _parse_times(spec: str) -> list[float]:
    """``start:stop:count`` (inclusive grid) or a comma-separated list."""
    try:
        if ":" in spec:
            a, b, n = spec.split(":")
            return [float(t) for t in np.linspace(float(a), float(b), int(n))]
        return [float(t) for t in spec.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"cannot parse time grid {spec!r}")


def _config(args, **extra) -> SuiteConfig:
    try:
        return SuiteConfig(
            seed=args.seed if args.seed is not None else _default_seed(),
            trials=args.trials,
            tolerances=_parse_tols(getattr(args, "tol", None)),
            jobs=getattr(args, "jobs", 1),
            **extra,
        )
    except ValueError as exc:
        raise InputError(str(exc))


def _report_csv(path, report):
    _write_csv(
        path,
        ["name", "sector", "trials", "worst", "tol", "pass", "note"],
        ([c.name, c.sector, c.trials, c.worst, c.tol, c.passed, c.note] for c in report.checks),
    )


# --------------------------------------------------------------------------
# subcommands


def cmd_verify(args) -> int:
    space, _ = load_bundle(_load_json(args.space))
    cfg = _config(args)
    report = SUITES[args.suite](space, cfg)
    _emit(report.to_json(), args.output)
    if args.emit_csv:
        _report_csv(args.emit_csv, report)
    for c in report.failures():
        print(f"FAIL {c.name} sector={c.sector} worst={c.worst} tol={c.tol}", file=sys.stderr)
    return EXIT_PASS if report.passed else EXIT_FAIL


def _load_state(path: str) -> PureState:
    doc = _load_json(path)
    if "sectors" in doc:
        _, states = load_bundle(doc)
        if not states:
            raise InputError("state bundle contains no states")
        return states[0]
    return state_from_json(doc)


def _load_operator(path: str) -> HermitianOperator:
    doc = _load_json(path)
    if "matrix" in doc:
        doc = doc["matrix"]
    return HermitianOperator(matrix_from_json(doc))


def cmd_flow(args) -> int:
    h = _load_operator(args.hamiltonian)
    rho = _load_state(args.state)
    if not rho.is_quantum:
        raise InputError("flows need a quantum initial state")
    if h.dim != rho.dim:
        raise DimensionMismatch(f"Hamiltonian dim {h.dim} != state dim {rho.dim}")
    times = _parse_times(args.times)
    if not times:
        raise InputError("empty time grid")
    oracle = BracketOracle(hbar=args.hbar)
    flow = hamiltonian_flow(h, rho, times, oracle, args.method, args.steps)
    doc = flow.to_json()
    ok = True
    if args.compare:
        other = "rk4" if args.method == "exact" else "exact"
        d = compare_flows(flow, hamiltonian_flow(h, rho, times, oracle, other, args.steps))
        ok = d <= args.compare_tol
        doc["compare"] = {"max_distance": d, "tol": args.compare_tol, "pass": ok}
    _emit(doc, args.output)
    if args.emit_csv:
        n = rho.dim
        _write_csv(
            args.emit_csv,
            ["t", "p_initial"] + [f"re{j}" for j in range(n)] + [f"im{j}" for j in range(n)],
            (
                [t, float(abs(np.vdot(rho.vector, s.vector)) ** 2)] + list(s.vector.real) + list(s.vector.imag)
                for t, s in flow.trajectory
            ),
        )
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_reconstruct(args) -> int:
    space, _ = load_bundle(_load_json(args.space))
    report = run_reconstruction_suite(space, _config(args))
    blocks = report.get("algebra_blocks")
    dims = [s.dim for s in space.sectors]
    assoc = max(c.worst for c in report.checks if c.name == "star_associativity")
    oracle = max(c.worst for c in report.checks if c.name == "star_oracle")
    doc = {
        "blocks": dims if blocks.passed else [],
        "span_dims": [d * d for d in dims] if blocks.passed else [],
        "assoc_residual": assoc,
        "oracle_residual": oracle,
        "pass": report.passed,
        "report": report.to_json(),
    }
    _emit(doc, args.output)
    if args.emit_csv:
        _report_csv(args.emit_csv, report)
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_hbar(args) -> int:
    space, _ = load_bundle(_load_json(args.space))
    if not space.is_quantum:
        raise InvalidSpace("hbar inference needs quantum sectors")
    if args.true_hbar is not None:
        if not args.true_hbar > 0:
            raise InputError("--true-hbar must be positive")
        space = StateSpace(tuple(QuantumSector(s.dim, args.true_hbar) for s in space.sectors))
    if not 0 <= args.sector < len(space.sectors):
        raise InputError(f"no sector {args.sector}")
    seed = args.seed if args.seed is not None else _default_seed()
    tol = args.tol if args.tol is not None else (1e-9 if args.mode == OPERATOR else 1e-6)
    rows, ok = [], True
    for k, sec in enumerate(space.sectors):
        rng = seeded_rng(seed, k)
        a, b = random_hermitian(sec.dim, rng), random_hermitian(sec.dim, rng)
        states = [PureState(k, vector=random_unit_vector(sec.dim, rng)) for _ in range(args.samples)]
        oracle = BracketOracle(args.mode, sec.hbar)
        try:
            est = infer_hbar(bracket_samples(a, b, states, oracle), rel_tol=max(tol, 1e-6))
        except (InsufficientSignal, InconsistentBracket) as exc:
            print(f"sector {k}: {exc}", file=sys.stderr)
            return EXIT_FAIL
        rel = abs(est - sec.hbar) / sec.hbar
        ok &= rel <= tol
        rows.append({"sector": k, "hbar_true": sec.hbar, "hbar_est": est, "rel_error": rel})
    doc = {"hbar_est": rows[args.sector]["hbar_est"], "per_sector": rows, "pass": bool(ok)}
    _emit(doc, args.output)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_lattice(args) -> int:
    if args.dim < 1 or args.pairs < 1 or args.atoms < 1:
        raise InputError("--dim, --pairs and --atoms must be positive")
    report = run_lattice_suite(args.dim, args.pairs, _config(args), atoms=args.atoms)
    doc = {
        "dim": args.dim,
        "pairs": args.pairs,
        "atoms": args.atoms,
        "orthomodular_pass": report.get("lattice_orthomodular", 0).passed,
        "covering_pass": report.get("lattice_covering", 0).passed,
        "atomic_pass": report.get("lattice_atomic", 0).passed,
        "pass": report.passed,
        "report": report.to_json(),
    }
    _emit(doc, args.output)
    if args.emit_csv:
        _report_csv(args.emit_csv, report)
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_validate(path: str) -> int:
    import jsonschema

    try:
        kind = identify(_load_json(path))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except jsonschema.ValidationError as exc:
        print(f"invalid: {exc.message}", file=sys.stderr)
        return EXIT_INVALID
    print(json.dumps({"valid": True, "kind": kind}))
    return EXIT_PASS


# --------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, trials: int = 50):
    p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default ${SEED_ENV} or 0)")
    p.add_argument("--trials", type=int, default=trials, help="random trials per check (default %(default)s)")
    p.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a check tolerance")
    p.add_argument("--jobs", type=int, default=1, help="worker threads (default 1)")
    p.add_argument("-o", "--output", default="-", help="output path, '-' for stdout")
    p.add_argument("--emit-csv", metavar="PATH", help="also write a CSV table")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poissontp",
        description="Check pure-state spaces with a transition probability and a Poisson bracket.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} (schema {SCHEMA_VERSION})")
    parser.add_argument("--validate", metavar="FILE", help="validate a JSON document produced or read by this tool")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("verify", help="run an axiom suite over a state-space bundle")
    p.add_argument("--space", required=True, help="state bundle JSON")
    p.add_argument("--suite", choices=sorted(SUITES), default="qm")
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("flow", help="Hamiltonian flow of a state")
    p.add_argument("--hamiltonian", required=True, help="matrix JSON")
    p.add_argument("--state", required=True, help="state JSON or bundle (first state is used)")
    p.add_argument("--times", default="0:10:101", help="start:stop:count or comma list (default %(default)s)")
    p.add_argument("--method", choices=["exact", "rk4"], default="exact")
    p.add_argument("--steps", type=int, default=1000, help="RK4 steps over the grid (default %(default)s)")
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--compare", action="store_true", help="report the distance to the other method")
    p.add_argument("--compare-tol", type=float, default=1e-6)
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--emit-csv", metavar="PATH")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("reconstruct", help="rebuild the observable algebra and check it")
    p.add_argument("--space", required=True)
    _common(p, trials=20)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("hbar", help="infer hbar from bracket and commutator samples")
    p.add_argument("--space", required=True)
    p.add_argument("--true-hbar", type=float, default=None, help="override every sector's hbar")
    p.add_argument("--sector", type=int, default=0, help="sector reported as hbar_est")
    p.add_argument("--samples", type=int, default=8)
    p.add_argument("--mode", choices=[OPERATOR, FINITE_DIFFERENCE], default=OPERATOR)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol", type=float, default=None, help="relative tolerance (1e-9 operator, 1e-6 finite-difference)")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_hbar)

    p = sub.add_parser("lattice", help="sampled orthomodular, covering and atomicity checks")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--atoms", type=int, default=500)
    _common(p, trials=50)
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("validate", help="validate a JSON document")
    p.add_argument("file")
    p.set_defaults(func=lambda a: cmd_validate(a.file))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.validate:
        return cmd_validate(args.validate)
    if not getattr(args, "func", None):
        parser.print_help(sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
