"""Command-line front end: ``spinchain {compile,simulate,sweep,verify,inspect-params}``.

Exit codes: 0 success, 1 verification failure, 2 bad arguments or
gate descriptor, 3 file I/O or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from spinchain.chain import ChainConfig
from spinchain.compiler import CompileError, PulseProgram, lower, parse_gate
from spinchain.experiments import (
    MIN_WEIGHT,
    SweepConfig,
    random_superposition,
    run_program,
    series_csv,
    states_csv,
    summary_csv,
    sweep,
)
from spinchain.pulses import composite_params
from spinchain.symbolic import SymbolicPhase
from spinchain.verify import symbolic_verify

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3

UNITS = "frequencies in units of J, times in 1/J, phases in radians"


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _config(args) -> ChainConfig:
    try:
        cfg = ChainConfig.load(args.config) if args.config else ChainConfig(L=args.L or 7)
    except OSError as exc:
        raise CliError(f"cannot read config: {exc}", EXIT_IO) from exc
    except ValueError as exc:
        raise CliError(f"invalid config: {exc}", EXIT_IO) from exc
    changes = {}
    if getattr(args, "L", None) is not None and args.config:
        changes["L"] = args.L
    if args.delta_omega is not None:
        changes["delta_omega"] = args.delta_omega
    if args.k is not None:
        changes["k"] = args.k
    try:
        return cfg.replace(**changes) if changes else cfg
    except ValueError as exc:
        raise CliError(f"invalid config: {exc}", EXIT_USAGE) from exc


def _blocks(args, cfg: ChainConfig):
    if not args.gate:
        raise CliError("--gate is required", EXIT_USAGE)
    try:
        return parse_gate(args.gate, cfg.L, cfg.k)
    except CompileError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc


def _emit(text: str, out: Optional[str]):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc}", EXIT_IO) from exc


def cmd_compile(args) -> int:
    cfg = _config(args)
    program = lower(_blocks(args, cfg), cfg)
    text = program.to_json() + "\n" if args.format == "json" else program.to_text()
    _emit(text, args.out)
    if args.out:
        print(f"{len(program.pulses)} pulses ({program.q_pulse_count} Q-pulses) written to {args.out}")
    return EXIT_OK


def _load_program(path: str, cfg: ChainConfig, gate: Optional[str]) -> PulseProgram:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read program: {exc}", EXIT_IO) from exc
    try:
        program = PulseProgram.from_json(text) if text.lstrip().startswith("{") else PulseProgram.from_text(text)
    except (ValueError, KeyError) as exc:
        raise CliError(f"invalid program file: {exc}", EXIT_IO) from exc
    if gate is None:
        raise CliError("--gate is required to build the ideal reference", EXIT_USAGE)
    blocks = parse_gate(gate, cfg.L, cfg.k)
    program.gates = list(blocks)
    return program


def _report_text(report, cfg: ChainConfig, gate: str, seed: int) -> str:
    lines = [
        f"# {UNITS}",
        f"gate = {gate}",
        f"L = {cfg.L}",
        f"delta_omega = {cfg.delta_omega!r}",
        f"k = {cfg.k}",
        f"seed = {seed}",
        report.summary(),
        f"norm_drift = {report.norm_drift:.3g}",
        f"min_weight = {report.min_weight:g} ({len(report.undefined)} states excluded from phase metrics)",
        "series = " + " ".join(f"{x:.6g}" for x in report.phase_error_series),
    ]
    return "\n".join(lines) + "\n"


def _report_json(report, cfg: ChainConfig, gate: str, seed: int) -> str:
    def clean(arr):
        return [None if np.isnan(x) else float(x) for x in np.asarray(arr, dtype=float)]

    data = {
        "units": UNITS,
        "gate": gate,
        "config": {"L": cfg.L, "w": cfg.w, "delta_omega": cfg.delta_omega, "J": cfg.J, "k": cfg.k},
        "seed": seed,
        "max_phase_error": report.max_phase_error,
        "phase_spread": report.phase_spread,
        "global_phase": report.global_phase,
        "mu": report.mu,
        "q_pulse_count": report.q_pulse_count,
        "norm_drift": report.norm_drift,
        "min_weight": report.min_weight,
        "excluded_states": list(report.undefined),
        "phase_error_series": list(report.phase_error_series),
        "per_state_phase_dev": clean(report.per_state_phase_dev),
        "prob_errors": clean(report.prob_errors),
        "relative_prob_errors": clean(report.relative_prob_errors),
    }
    return json.dumps(data, indent=1) + "\n"


def cmd_simulate(args) -> int:
    cfg = _config(args)
    if args.program:
        program = _load_program(args.program, cfg, args.gate)
    else:
        program = lower(_blocks(args, cfg), cfg)
    result = run_program(program, cfg, random_superposition(cfg.L, args.seed), args.min_weight)
    report = result.report
    if args.format == "json":
        text = _report_json(report, cfg, args.gate, args.seed)
    elif args.format == "csv":
        from spinchain.experiments import SweepRow

        row = SweepRow(cfg.L, cfg.delta_omega, cfg.k, args.seed, args.gate, report,
                       probabilities=(np.abs(result.ideal) ** 2, np.abs(result.final.amplitudes) ** 2))
        text = states_csv([row])
    else:
        text = _report_text(report, cfg, args.gate, args.seed)
    _emit(text, args.out)
    if args.out:
        print(report.summary())
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        grid = SweepConfig.parse(args.grid) if args.grid else SweepConfig()
    except (ValueError, TypeError) as exc:
        raise CliError(f"bad grid: {exc}", EXIT_USAGE) from exc
    base = _config(args) if args.config else None
    rows = sweep(grid, base, args.min_weight)
    if args.out is None:
        sys.stdout.write(summary_csv(rows))
        return EXIT_OK
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "states.csv").write_text(states_csv(rows))
        (out / "summary.csv").write_text(summary_csv(rows))
        (out / "series.csv").write_text(series_csv(rows))
    except OSError as exc:
        raise CliError(f"cannot write sweep output: {exc}", EXIT_IO) from exc
    failed = sum(r.error is not None for r in rows)
    print(f"{len(rows)} grid points, {failed} failed; CSV files in {out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _config(args)
    blocks = _blocks(args, cfg)
    sequence = [q for b in blocks for q in b.qpulses]
    ideals = [b.ideal for b in blocks]
    report = symbolic_verify(sequence, ideals, cfg.L, cfg.k)
    expected = sum((b.overall_phase for b in blocks), start=SymbolicPhase())
    lines = [f"# phases in radians; qubits {' '.join(map(str, reversed(report.qubits)))} (most significant first)"]
    for row in report.rows:
        status = "ok" if row.map_ok else "WRONG MAP"
        phases = ", ".join(str(p.reduced()) for p in row.relative_phases)
        lines.append(f"{row.bits(report.qubits)}  {phases}  {status}")
    lines.extend(report.unverifiable)
    passed = report.passed and report.common_phase.equals_mod_2pi(expected)
    summary = report.summary()
    if report.passed and not passed:
        summary += f" (expected {expected.reduced()}), FAIL"
    lines.append(summary)
    text = "\n".join(lines) + "\n"
    if args.format == "json":
        text = json.dumps(
            {
                "gate": args.gate,
                "passed": passed,
                "common_phase": str(report.common_phase) if report.common_phase is not None else None,
                "expected_phase": str(expected.reduced()),
                "rows": [
                    {"config": r.bits(report.qubits), "map_ok": r.map_ok,
                     "phases": [str(p.reduced()) for p in r.relative_phases]}
                    for r in report.rows
                ],
                "unverifiable": report.unverifiable,
            },
            indent=1,
        ) + "\n"
    _emit(text, args.out)
    if args.out:
        print(summary)
    return EXIT_OK if passed else EXIT_VERIFY_FAILED


def cmd_inspect(args) -> int:
    cfg = _config(args)
    try:
        params = composite_params(cfg.k, args.rho, 2.0 * cfg.J)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    _emit(f"# {UNITS}\n" + params.dumps(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinchain", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="chain configuration file (key = value)")
    common.add_argument("--L", type=int, help="chain length (overrides the config)")
    common.add_argument("--delta-omega", type=float, help="Larmor frequency step, units of J")
    common.add_argument("--k", type=int, help="integer of the 2*pi*k condition")
    common.add_argument("--out", help="output path (stdout if omitted)")
    common.add_argument("--format", choices=("csv", "json", "text"), default="text")
    common.add_argument(
        "--min-weight",
        type=float,
        default=MIN_WEIGHT,
        help="exclude states below this fraction of the uniform weight from phase metrics (0 keeps all)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", parents=[common], help="lower a gate to a pulse program")
    p.add_argument("--gate", required=True, help='e.g. "cn 0 6", "not 3", "rot 2 0.5 0.0"')
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("simulate", parents=[common], help="run a gate on a random superposition")
    p.add_argument("--gate", required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--program", help="simulate this program file instead of compiling")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common], help="parameter sweep, CSV output")
    p.add_argument("--grid", help='e.g. "L=4,5,6,7;delta_omega=1e4;seed=1,2;gate=cn 0 {last}"')
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", parents=[common], help="symbolic phase verification")
    p.add_argument("--gate", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("inspect-params", parents=[common], help="composite-pulse parameters")
    p.add_argument("--rho", type=float, default=1.0)
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except CompileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
