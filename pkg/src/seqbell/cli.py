"""Command-line entry point: ``seqbell <command> [options]``."""

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import io
from .bell import bell_value, local_bound, pnc_bound, pnc_grid_bound, seesaw_max, sos_diagnose
from .certification import SURFACE_COLUMNS, BellTuple, invert_tuple, surface_sweep
from .chain import predicted_values, run_chain, verify_theorem_conditions
from .incompatibility import (
    SEQUENTIAL_COLUMNS,
    chsh_baseline,
    degree_pair,
    degree_triple,
    degree_trine,
    jointly_measurable_anticommuting,
    jointly_measurable_trine,
    sequential_degree_grid,
    sequential_trine_bounds,
)
from .linalg import SX, SY, SZ, matrix_from_json, matrix_to_json, operator_norm
from .quantum import canonical_realization, correlation_operators
from .reproduce import format_table, run_checks
from .sweep import SWEEP_COLUMNS, chain_sweep, resolve_threads

COMMANDS = ("bounds", "chain", "sweep", "certify", "surface", "incompat", "verify", "reproduce")
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunManifest:
    command: str
    config_path: str | None = None
    out_path: str | None = None
    tolerance: float | None = None
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


class UsageError(Exception):
    pass


def _finite(x):
    return None if x is None or not math.isfinite(x) else x


def cmd_bounds(args, m: RunManifest) -> int:
    rho, alice, bob = canonical_realization()
    sos = sos_diagnose(rho, alice, bob)
    out = {
        "local_bound": local_bound(),
        "pnc_bound": pnc_bound(),
        "pnc_grid_bound": pnc_grid_bound(args.step or 0.01),
        "quantum_value": bell_value(rho, alice, bob),
        "sos": {"omega": list(sos.omega), "gamma_value": sos.gamma_value, "gap": sos.gap},
        "seesaw": [
            {"d": d, "restarts": args.restarts, "seed": m.seed, "value": seesaw_max(d, args.restarts, m.seed)}
            for d in args.dim
        ],
    }
    io.emit(io.dumps(out), m.out_path)
    return EXIT_OK


def _scenario(args, m: RunManifest):
    if m.config_path:
        return io.load_scenario(m.config_path)
    etas = [e for e in (args.eta1, args.eta2, args.eta3) if e is not None]
    if not etas:
        raise UsageError("chain needs --config or at least --eta1")
    return io.load_scenario({"etas": etas})


def cmd_chain(args, m: RunManifest) -> int:
    cfg = _scenario(args, m)
    res = run_chain(cfg)
    out = {
        "etas": cfg.etas,
        "bell_values": res.bell_values,
        "heisenberg_values": res.heisenberg_values,
        "violations": [v > 4.0 for v in res.bell_values],
        "effective_omegas": [[w for _, w in eff] for eff in res.effective_observables],
        "states": [matrix_to_json(s.matrix) for s in res.states],
    }
    if len(cfg.etas) <= 4:
        out["predicted_values"] = predicted_values(cfg.etas)
    io.emit(io.dumps(out), m.out_path)
    return EXIT_OK


def cmd_sweep(args, m: RunManifest) -> int:
    rows = chain_sweep(args.step or 0.05, m.threads)
    io.emit(io.csv_text(SWEEP_COLUMNS, rows), m.out_path)
    return EXIT_OK


def cmd_certify(args, m: RunManifest) -> int:
    if args.i1 is None:
        raise UsageError("certify needs --i1 (and usually --i2, --i3)")
    nan = float("nan")
    t = BellTuple(args.i1, nan if args.i2 is None else args.i2, nan if args.i3 is None else args.i3)
    res = invert_tuple(t)
    d = res.to_dict()
    d["eta2"] = _finite(d["eta2"]) if args.i2 is not None else None
    d["eta3_min"] = _finite(d["eta3_min"]) if args.i3 is not None else None
    io.emit(io.dumps(d), m.out_path)
    return EXIT_OK


def cmd_surface(args, m: RunManifest) -> int:
    rows = surface_sweep(args.step or 0.01)
    io.emit(io.csv_text(SURFACE_COLUMNS, rows), m.out_path)
    return EXIT_OK


def _config_ops(m: RunManifest, n: int):
    data = json.loads(Path(m.config_path).read_text())
    ops = data.get("observables")
    if not isinstance(ops, list) or len(ops) != n:
        raise UsageError(f"config needs 'observables': a list of {n} matrices")
    return [matrix_from_json(o) for o in ops]


def cmd_incompat(args, m: RunManifest) -> int:
    mode = args.mode
    if mode == "pair":
        ops = _config_ops(m, 2) if m.config_path else [SX, SZ]
        r = degree_pair(*ops)
        out = {"kind": r.kind, "degree": r.degree, "incompatible": r.incompatible}
    elif mode == "triple":
        ops = _config_ops(m, 3) if m.config_path else [SX, SY, SZ]
        r = degree_triple(*ops)
        out = {"kind": r.kind, "degree": r.degree, "incompatible": r.incompatible}
        if args.eta1 is not None:
            out["jointly_measurable_if_anticommuting"] = jointly_measurable_anticommuting(args.eta1)
    elif mode == "trine":
        ops = _config_ops(m, 3) if m.config_path else list(canonical_realization()[2])
        r = degree_trine(ops)
        out = {"kind": r.kind, "degree": r.degree, "incompatible": r.incompatible}
        if args.eta1 is not None:
            out["jointly_measurable"] = jointly_measurable_trine(args.eta1)
    elif mode == "chsh":
        if args.eta1 is None or args.eta2 is None:
            raise UsageError("chsh mode needs --eta1 and --eta2")
        r = chsh_baseline((args.eta1, args.eta2))
        out = asdict(r)
        out["window"] = list(r.window)
        out["in_window"] = r.in_window
    else:
        if args.i1 is not None:
            if None in (args.i2, args.i3, args.eta1, args.eta2, args.eta3):
                raise UsageError("sequential bounds need --i1 --i2 --i3 and --eta1 --eta2 --eta3")
            bounds = sequential_trine_bounds(BellTuple(args.i1, args.i2, args.i3), (args.eta1, args.eta2, args.eta3))
            io.emit(io.dumps([asdict(b) for b in bounds]), m.out_path)
            return EXIT_OK
        rows = sequential_degree_grid(args.step or 0.05, 1.0 if args.eta3 is None else args.eta3)
        io.emit(io.csv_text(SEQUENTIAL_COLUMNS, rows), m.out_path)
        return EXIT_OK
    io.emit(io.dumps(out), m.out_path)
    return EXIT_OK


def cmd_verify(args, m: RunManifest) -> int:
    if m.config_path or args.eta1 is not None:
        cfg = _scenario(args, m)
    else:
        cfg = io.load_scenario({"etas": [20 / 29, 0.8, 1.0, 1.0]})
    tol = m.tolerance or 1e-12
    report = verify_theorem_conditions(cfg)
    out = {"tolerance": tol, "bobs": [asdict(r) | {"max_residual": r.max_residual()} for r in report]}
    alice = cfg.alice
    bob = cfg.bobs[0][0]
    if alice.is_trine() and bob.is_trine():
        cs = correlation_operators(alice, bob)
        rho = cfg.initial_state.matrix
        out["correlation_operators"] = {
            "commutators": max(operator_norm(a @ b - b @ a) for a in cs for b in cs),
            "trace_deviation": max(abs(float(np.trace(c @ rho).real) - 1.0) for c in cs),
        }
    worst = max(r.max_residual() for r in report)
    out["within_tolerance"] = worst <= tol
    io.emit(io.dumps(out), m.out_path)
    return EXIT_OK


def cmd_reproduce(args, m: RunManifest) -> int:
    rows = run_checks(m.tolerance, m.seed, args.restarts)
    table = format_table(rows)
    if m.out_path:
        io.write_json({"checks": [r.to_dict() for r in rows]}, m.out_path)
    print(table, end="")
    return EXIT_OK if all(r.passed for r in rows) else EXIT_FAIL


HANDLERS = {
    "bounds": cmd_bounds,
    "chain": cmd_chain,
    "sweep": cmd_sweep,
    "certify": cmd_certify,
    "surface": cmd_surface,
    "incompat": cmd_incompat,
    "verify": cmd_verify,
    "reproduce": cmd_reproduce,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario JSON file")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--tolerance", type=float)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, help="worker threads for sweeps (fallback: SEQBELL_THREADS)")
    common.add_argument("--step", type=float, help="grid step for sweeps")
    for k in (1, 2, 3):
        common.add_argument(f"--eta{k}", type=float)
    for k in (1, 2, 3):
        common.add_argument(f"--i{k}", type=float)

    p = argparse.ArgumentParser(prog="seqbell", description="Sequential Bell scenarios with unsharp measurements.")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")
    sub.add_parser("bounds", parents=[common], help="local, noncontextual and quantum bounds")
    sub.choices["bounds"].add_argument("--dim", type=int, nargs="+", default=[2, 3], help="local dimensions for the see-saw")
    sub.choices["bounds"].add_argument("--restarts", type=int, default=10)
    sub.add_parser("chain", parents=[common], help="simulate a sequential chain")
    sub.add_parser("sweep", parents=[common], help="CSV grid of the canonical four-Bob chain")
    sub.add_parser("certify", parents=[common], help="invert an observed Bell tuple")
    sub.add_parser("surface", parents=[common], help="CSV of the three-Bob trade-off surface")
    inc = sub.add_parser("incompat", parents=[common], help="degrees of incompatibility")
    inc.add_argument("--mode", choices=("pair", "triple", "trine", "sequential", "chsh"), default="trine")
    sub.add_parser("verify", parents=[common], help="operator-identity residuals for a chain")
    rep = sub.add_parser("reproduce", parents=[common], help="recompute every headline number")
    rep.add_argument("--restarts", type=int, default=10)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        manifest = RunManifest(
            command=args.command,
            config_path=args.config,
            out_path=args.out,
            tolerance=args.tolerance,
            seed=args.seed,
            threads=resolve_threads(args.threads),
        )
        return HANDLERS[args.command](args, manifest)
    except (UsageError, ValueError, OSError) as exc:
        print(f"seqbell {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
