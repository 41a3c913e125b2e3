"""Random-superposition experiments, error metrics and parameter sweeps.

Random states use numpy's ``PCG64`` bit generator: amplitudes are
``1 - rng.random(2**L)`` normalized, so they are strictly positive and the
same seed gives the same state on every platform.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from spinchain.chain import ChainConfig
from spinchain.compiler import CompileError, PulseProgram, lower, parse_gate
from spinchain.dynamics import QuantumState, propagate, wrap_phase
from spinchain.gates import IdealGate

AMPLITUDE_FLOOR = 1e-12
# States holding less than this fraction of the uniform weight 1/2**L have
# phases dominated by leaked amplitude; they are excluded from phase metrics.
MIN_WEIGHT = 0.1


def random_superposition(L: int, seed: int) -> QuantumState:
    """Real, strictly positive, normalized amplitudes drawn from ``PCG64(seed)``."""
    if L < 2:
        raise ValueError("L must be at least 2")
    rng = np.random.Generator(np.random.PCG64(seed))
    amps = 1.0 - rng.random(2**L)
    return QuantumState(amps / np.linalg.norm(amps), 0.0)


def ideal_apply(gate: IdealGate, state: QuantumState) -> QuantumState:
    """Apply the ideal map of ``gate`` (without its overall phase)."""
    if state.amplitudes.size != 2 ** state.L:
        raise ValueError("state dimension is not a power of two")
    return QuantumState(gate.apply(state.amplitudes), state.time)


@dataclass(frozen=True)
class ErrorReport:
    per_state_phase_dev: np.ndarray
    max_phase_error: float
    phase_spread: float
    global_phase: float
    prob_errors: np.ndarray
    relative_prob_errors: np.ndarray
    phase_error_series: tuple[float, ...] = ()
    mu: float = float("nan")
    q_pulse_count: int = 0
    norm_drift: float = 0.0
    undefined: tuple[int, ...] = ()
    min_weight: float = 0.0

    @property
    def final_amplitudes_ok(self) -> bool:
        return bool(np.all(self.prob_errors >= 0))

    def summary(self) -> str:
        return (
            f"max_phase_error={self.max_phase_error:.6g} phase_spread={self.phase_spread:.6g} "
            f"max_P={self.prob_errors.max():.3g} mu={self.mu:.3g} q_pulses={self.q_pulse_count}"
        )


def _phase_devs(simulated: np.ndarray, ideal: np.ndarray, floor: float):
    mask = np.abs(ideal) > floor
    overlap = np.vdot(ideal[mask], simulated[mask])
    big_phi = float(np.angle(overlap))
    devs = np.full(ideal.shape, np.nan)
    devs[mask] = wrap_phase(np.angle(simulated[mask]) - np.angle(ideal[mask]) - big_phi)
    return devs, big_phi


def amplitude_floor(dim: int, min_weight: float) -> float:
    return max(AMPLITUDE_FLOOR, math.sqrt(min_weight / dim))


def error_metrics(
    simulated: QuantumState | np.ndarray,
    ideal_reference: QuantumState | np.ndarray,
    min_weight: float = 0.0,
    **extra,
) -> ErrorReport:
    """Phase and probability errors of ``simulated`` against ``ideal_reference``.

    The common phase is ``arg sum_j conj(B_j) B'_j``; per-state deviations are
    measured from it.  States with ``|B_j|**2 < min_weight / 2**L`` (or a
    vanishing ideal amplitude) get no phase or relative error and are listed
    in ``undefined``.
    """
    sim = np.asarray(getattr(simulated, "amplitudes", simulated), dtype=complex)
    ref = np.asarray(getattr(ideal_reference, "amplitudes", ideal_reference), dtype=complex)
    if sim.shape != ref.shape:
        raise ValueError("simulated and ideal states differ in dimension")
    devs, big_phi = _phase_devs(sim, ref, amplitude_floor(ref.size, min_weight))
    defined = ~np.isnan(devs)
    p_ideal = np.abs(ref) ** 2
    prob = np.abs(p_ideal - np.abs(sim) ** 2)
    rel = np.full(prob.shape, np.nan)
    rel[defined] = prob[defined] / p_ideal[defined]
    d = devs[defined]
    return ErrorReport(
        per_state_phase_dev=devs,
        max_phase_error=float(np.max(np.abs(d))) if d.size else 0.0,
        phase_spread=float(d.max() - d.min()) if d.size else 0.0,
        global_phase=big_phi,
        prob_errors=prob,
        relative_prob_errors=rel,
        undefined=tuple(int(j) for j in np.flatnonzero(~defined)),
        min_weight=min_weight,
        **extra,
    )


def program_mu(program: PulseProgram, config: ChainConfig) -> float:
    """``Omega / (2 delta_omega)`` for the strongest pulse of ``program``."""
    omega = max((p.omega_rabi for p in program.pulses), default=0.0)
    return omega / (2.0 * config.delta_omega)


@dataclass(frozen=True)
class ExperimentResult:
    report: ErrorReport
    program: PulseProgram
    initial: QuantumState
    final: QuantumState
    ideal: np.ndarray


def run_program(
    program: PulseProgram, config: ChainConfig, initial: QuantumState, min_weight: float = MIN_WEIGHT
) -> ExperimentResult:
    """Simulate ``program`` from ``initial`` and compare with the ideal gates.

    The phase error is sampled after every completed gate block.
    """
    floor = amplitude_floor(initial.amplitudes.size, min_weight)
    if program.pulses and not math.isclose(initial.time, program.t_start, abs_tol=1e-9):
        initial = QuantumState(initial.amplitudes, program.t_start)
    amps = initial.amplitudes.astype(complex)
    ideal = amps.copy()
    series = []
    start = 0
    for block, end in zip(program.gates, program.gate_boundaries()):
        for pulse in program.pulses[start:end]:
            amps = propagate(amps, config, pulse)
        ideal = block.ideal.apply(ideal)
        devs, _ = _phase_devs(amps, ideal, floor)
        series.append(float(np.nanmax(np.abs(devs))))
        start = end
    for pulse in program.pulses[start:]:
        amps = propagate(amps, config, pulse)
    t_end = program.pulses[-1].t_end if program.pulses else initial.time
    final = QuantumState(amps, t_end)
    report = error_metrics(
        final,
        ideal,
        min_weight,
        phase_error_series=tuple(series),
        mu=program_mu(program, config),
        q_pulse_count=program.q_pulse_count,
        norm_drift=abs(float(np.linalg.norm(amps)) - float(np.linalg.norm(initial.amplitudes))),
    )
    return ExperimentResult(report, program, initial, final, ideal)


def compile_gate(config: ChainConfig, gate: str) -> PulseProgram:
    return lower(parse_gate(gate, config.L, config.k), config)


def run_protocol_experiment(config: ChainConfig, gate: str, seed: int, min_weight: float = MIN_WEIGHT) -> ErrorReport:
    """Compile ``gate`` (descriptor string), run it on a random superposition, report errors."""
    program = compile_gate(config, gate)
    return run_program(program, config, random_superposition(config.L, seed), min_weight).report


# -- sweeps --------------------------------------------------------------------


@dataclass(frozen=True)
class SweepConfig:
    L: tuple[int, ...] = (7,)
    delta_omega: tuple[float, ...] = (1e4,)
    k: tuple[int, ...] = (2,)
    seed: tuple[int, ...] = (1,)
    gate: tuple[str, ...] = ("cn 0 {last}",)

    def __post_init__(self):
        for name in ("L", "delta_omega", "k", "seed", "gate"):
            if not getattr(self, name):
                raise ValueError(f"sweep grid axis {name!r} is empty")

    def points(self) -> list[tuple[int, float, int, int, str]]:
        out = []
        for L, dw, k, seed, gate in itertools.product(self.L, self.delta_omega, self.k, self.seed, self.gate):
            out.append((L, dw, k, seed, gate.format(last=L - 1)))
        return out

    @classmethod
    def parse(cls, spec: str) -> "SweepConfig":
        """Grid spec such as ``L=4,5,6;delta_omega=1e4,2e4;seed=1,2;gate=cn 0 {last}``."""
        casts = {"L": int, "delta_omega": float, "k": int, "seed": int, "gate": str.strip}
        kwargs = {}
        for part in filter(None, (p.strip() for p in spec.split(";"))):
            key, sep, values = part.partition("=")
            key = key.strip()
            if not sep or key not in casts:
                raise ValueError(f"bad grid entry {part!r}")
            kwargs[key] = tuple(casts[key](v) for v in values.split(",") if v.strip())
        return cls(**kwargs)


@dataclass
class SweepRow:
    L: int
    delta_omega: float
    k: int
    seed: int
    gate: str
    report: Optional[ErrorReport] = None
    error: Optional[str] = None
    probabilities: Optional[tuple[np.ndarray, np.ndarray]] = field(default=None, repr=False)


def sweep(grid: SweepConfig, base: Optional[ChainConfig] = None, min_weight: float = MIN_WEIGHT) -> list[SweepRow]:
    """One report per grid point, in grid order; failing points are recorded and skipped."""
    rows = []
    for L, dw, k, seed, gate in grid.points():
        row = SweepRow(L, dw, k, seed, gate)
        try:
            cfg = (base or ChainConfig(L=L)).replace(L=L, delta_omega=dw, k=k)
            result = run_program(compile_gate(cfg, gate), cfg, random_superposition(L, seed), min_weight)
            row.report = result.report
            row.probabilities = (np.abs(result.ideal) ** 2, np.abs(result.final.amplitudes) ** 2)
        except (CompileError, ValueError) as exc:
            row.error = str(exc)
        rows.append(row)
    return rows


_HEADER = "# units: frequencies in J, phases in radians\n"


def _write(rows: Iterable[Sequence], header: Sequence[str]) -> str:
    buf = io.StringIO()
    buf.write(_HEADER)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def states_csv(rows: Sequence[SweepRow]) -> str:
    header = ["L", "delta_omega", "k", "seed", "j", "B_j^2", "Bp_j^2", "phase_dev", "P_j", "rel_P_j"]
    out = []
    for r in rows:
        if r.report is None:
            continue
        b2, bp2 = r.probabilities
        rep = r.report
        for j in range(b2.size):
            out.append(
                [r.L, r.delta_omega, r.k, r.seed, j, f"{b2[j]:.17g}", f"{bp2[j]:.17g}",
                 f"{rep.per_state_phase_dev[j]:.17g}", f"{rep.prob_errors[j]:.17g}",
                 f"{rep.relative_prob_errors[j]:.17g}"]
            )
    return _write(out, header)


def summary_csv(rows: Sequence[SweepRow]) -> str:
    header = ["L", "delta_omega", "k", "seed", "gate", "max_phase_error", "phase_spread", "mu", "q_pulse_count", "error"]
    out = []
    for r in rows:
        if r.report is None:
            out.append([r.L, r.delta_omega, r.k, r.seed, r.gate, "", "", "", "", r.error])
        else:
            rep = r.report
            out.append([r.L, r.delta_omega, r.k, r.seed, r.gate, f"{rep.max_phase_error:.17g}",
                        f"{rep.phase_spread:.17g}", f"{rep.mu:.17g}", rep.q_pulse_count, ""])
    return _write(out, header)


def series_csv(rows: Sequence[SweepRow]) -> str:
    header = ["L", "delta_omega", "k", "seed", "gate_index", "max_phase_error"]
    out = []
    for r in rows:
        if r.report is None:
            continue
        for n, value in enumerate(r.report.phase_error_series):
            out.append([r.L, r.delta_omega, r.k, r.seed, n, f"{value:.17g}"])
    return _write(out, header)
