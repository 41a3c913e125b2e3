"""Lowering of logical gates to timed rectangular-pulse programs.

Gates are first expressed as sequences of symbolic Q pulses (in application
order, i.e. the reverse of the operator-product notation), then lowered to
:class:`PulseSpec` lists with phases evaluated for a given chain.  Pulses abut
with no free evolution in between.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Optional, Sequence

from spinchain.chain import ChainConfig, Edge, Interior, transition_frequency
from spinchain.dynamics import PulseSpec, wrap_phase
from spinchain.gates import IdealGate
from spinchain.pulses import QPulse, composite_params, correcting_pulse_spec, symbol_values
from spinchain.symbolic import (
    BIG_THETA as Th,
    GAMMA as g,
    THETA as t,
    BIG_THETA_R as Thr,
    GAMMA_R as gr,
    THETA_R as tr,
    SymbolicPhase,
    pi,
    sym,
)

F = Fraction
PHI = sym("phi")


class CompileError(ValueError):
    pass


@dataclass(frozen=True)
class GateBlock:
    """One logical gate: its Q-pulse sequence, ideal action and expected overall phase."""

    ideal: IdealGate
    qpulses: tuple[QPulse, ...]

    @property
    def name(self) -> str:
        return self.ideal.name

    @property
    def overall_phase(self) -> SymbolicPhase:
        return self.ideal.overall_phase


@dataclass(frozen=True)
class PulseAnnotation:
    gate_index: int
    gate: str
    q_index: int
    q_label: str
    role: str  # "single", "main" or "corr"

    def __str__(self):
        return f"g{self.gate_index} {self.gate} q{self.q_index} {self.q_label} {self.role}"

    @classmethod
    def parse(cls, text: str) -> "PulseAnnotation":
        g_idx, gate, q_idx, label, role = text.split()
        return cls(int(g_idx[1:]), gate, int(q_idx[1:]), label, role)


@dataclass
class PulseProgram:
    pulses: list[PulseSpec]
    annotations: list[PulseAnnotation]
    gates: list[GateBlock] = field(default_factory=list)

    def __post_init__(self):
        if len(self.pulses) != len(self.annotations):
            raise ValueError("every pulse needs an annotation")
        for prev, nxt in zip(self.pulses, self.pulses[1:]):
            if not math.isclose(prev.t_end, nxt.t0, rel_tol=1e-12, abs_tol=1e-9):
                raise ValueError(f"pulses not contiguous: {prev.t_end} -> {nxt.t0}")

    @property
    def t_start(self) -> float:
        return self.pulses[0].t0 if self.pulses else 0.0

    @property
    def total_duration(self) -> float:
        return self.pulses[-1].t_end - self.t_start if self.pulses else 0.0

    @property
    def q_pulse_count(self) -> int:
        return len({(a.gate_index, a.q_index) for a in self.annotations})

    def gate_boundaries(self) -> list[int]:
        """Index one past the last pulse of each gate, in program order."""
        ends: dict[int, int] = {}
        for n, ann in enumerate(self.annotations):
            ends[ann.gate_index] = n + 1
        return [ends[key] for key in sorted(ends)]

    def qpulse_sequence(self) -> list[QPulse]:
        return [q for block in self.gates for q in block.qpulses]

    def overall_phase(self) -> SymbolicPhase:
        return reduce(lambda a, b: a + b, (blk.overall_phase for blk in self.gates), SymbolicPhase())

    # -- serialization ----------------------------------------------------

    def to_text(self) -> str:
        lines = [
            "# spinchain pulse program; frequencies in units of J, times in 1/J, phases in radians",
            "# t0 tau nu omega_rabi phi # gate-index gate q-index q-pulse role",
        ]
        for p, ann in zip(self.pulses, self.annotations):
            lines.append(f"{p.t0:.17g} {p.tau:.17g} {p.nu:.17g} {p.omega_rabi:.17g} {p.phi:.17g} # {ann}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PulseProgram":
        pulses, anns = [], []
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            data, _, note = line.partition("#")
            t0, tau, nu, om, phi = (float(x) for x in data.split())
            pulses.append(PulseSpec(nu=nu, omega_rabi=om, phi=phi, tau=tau, t0=t0))
            anns.append(PulseAnnotation.parse(note.strip()))
        return cls(pulses, anns)

    def to_json(self) -> str:
        return json.dumps(
            {
                "units": {"frequency": "J", "time": "1/J", "phase": "rad"},
                "q_pulse_count": self.q_pulse_count,
                "total_duration": self.total_duration,
                "gates": [{"name": b.name, "overall_phase": str(b.overall_phase)} for b in self.gates],
                "pulses": [
                    {
                        "t0": p.t0,
                        "tau": p.tau,
                        "nu": p.nu,
                        "omega_rabi": p.omega_rabi,
                        "phi": p.phi,
                        "annotation": str(a),
                    }
                    for p, a in zip(self.pulses, self.annotations)
                ],
            },
            indent=1,
        )

    @classmethod
    def from_json(cls, text: str) -> "PulseProgram":
        data = json.loads(text)
        pulses = [PulseSpec(p["nu"], p["omega_rabi"], p["phi"], p["tau"], p["t0"]) for p in data["pulses"]]
        return cls(pulses, [PulseAnnotation.parse(p["annotation"]) for p in data["pulses"]])


# -- Q-pulse sequences --------------------------------------------------------


def _q(i, cls, phase=SymbolicPhase(), rho=1):
    return QPulse(i, cls, phase, rho)


def _check_qubit(i: int, L: int):
    if not 0 <= i < L:
        raise CompileError(f"qubit {i} out of range for L={L}")


def _is_edge(i: int, L: int) -> bool:
    return i == 0 or i == L - 1


def _odd(k: int) -> SymbolicPhase:
    """``pi`` for odd ``k``: the nulled transitions then leave a sign behind."""
    return pi(k % 2)


def not_block(i: int, L: int, k: int = 2) -> GateBlock:
    _check_qubit(i, L)
    if _is_edge(i, L):
        seq = (_q(i, "edge0", t + _odd(k)), _q(i, "edge1", t + _odd(k)))
    else:
        seq = (_q(i, "00", 2 * g + 2 * t), _q(i, "01", t + 2 * Th), _q(i, "11", 2 * t))
    return GateBlock(IdealGate("not", (i,), overall_phase=pi(F(1, 2))), seq)


# Phases of the interior CN; phi_9 = phi_10 = 0.
CN_PHASES = {
    1: -5 * t - 2 * g,
    2: F(5, 2) * t - Th + g,
    3: pi(F(3, 4)) + 2 * t - 4 * Th + 2 * g,
    4: pi(F(3, 4)),
    5: pi(F(3, 4)),
    6: -2 * Th,
    7: -F(5, 2) * t + Th - g,
    8: 2 * t - 4 * Th + 2 * g,
}


def cn_interior_sequence(a: int, b: int, phases=None, k: int = 2) -> tuple[QPulse, ...]:
    """Twelve-pulse CN with interior target ``b``, control ``a`` (application order)."""
    p = CN_PHASES if phases is None else phases
    zero = SymbolicPhase()
    return (
        _q(b, "11", p[1] + _odd(k)),
        _q(b, "01", p[2]),
        _q(b, "01", zero),
        _q(a, "00", p[3]),
        _q(a, "01", p[4]),
        _q(a, "11", p[5]),
        _q(b, "00", p[6] + _odd(k)),
        _q(b, "01", p[7]),
        _q(b, "01", zero),
        _q(a, "00", p[8]),
        _q(a, "01", p.get(9, zero)),
        _q(a, "11", p.get(10, zero)),
    )


def cn_block(a: int, b: int, L: int, k: int = 2) -> GateBlock:
    _check_qubit(a, L)
    _check_qubit(b, L)
    if abs(a - b) != 1:
        raise CompileError(f"CN({a},{b}) needs adjacent qubits; use a long-range CN")
    zero = SymbolicPhase()
    q4 = pi(F(1, 4))
    if _is_edge(b, L):
        if _is_edge(a, L):
            raise CompileError("CN between two edge qubits needs L >= 3")
        seq = (
            _q(b, "edge1", -2 * t),
            _q(b, "edge0", -t + _odd(k)),
            _q(b, "edge0", zero),
            _q(a, "00", q4),
            _q(a, "01", q4),
            _q(a, "11", q4),
            _q(a, "00", zero),
            _q(a, "01", zero),
            _q(a, "11", zero),
        )
        phase = pi(F(-1, 4))
    elif _is_edge(a, L):
        q3 = pi(F(3, 4))
        seq = (
            _q(b, "11", -2 * Th + _odd(k)),
            _q(b, "01", 5 * t - 2 * Th + 2 * g),
            _q(b, "01", zero),
            _q(a, "edge0", q3 - F(5, 2) * t + Th - g),
            _q(a, "edge1", q3 + F(5, 2) * t - Th + g),
            _q(b, "00", -6 * t + 2 * Th - 2 * g + _odd(k)),
            _q(b, "01", zero),
            _q(b, "01", zero),
            _q(a, "edge0", zero),
            _q(a, "edge1", zero),
        )
        phase = pi(F(1, 4))
    else:
        seq = cn_interior_sequence(a, b, k=k)
        phase = pi(F(1, 4))
    return GateBlock(IdealGate("cn", (a, b), overall_phase=phase), seq)


def rotation_block(j: int, rho, L: int, phi: float = 0.0, k: int = 2) -> GateBlock:
    """x rotation by ``rho*pi`` with phase ``phi`` (symbol ``phi`` in the sequence).

    A lone resonant pulse with phase ``x`` gives the excited state the factor
    ``i e^{-ix}``, so the rotation phase enters the pulse arguments as ``-phi``.
    """
    _check_qubit(j, L)
    rho = F(rho).limit_denominator(10**6) if isinstance(rho, float) else F(rho)
    if not 0 < rho <= 1:
        raise CompileError("rho must lie in (0, 1]")
    zero = SymbolicPhase()
    neg = -PHI
    if _is_edge(j, L):
        seq = (
            _q(j, "edge0", zero),
            _q(j, "edge1", zero),
            _q(j, "edge0", tr + _odd(k)),
            _q(j, "edge1", -tr + _odd(k)),
            _q(j, "edge0", neg + 2 * tr, rho),
            _q(j, "edge1", neg, rho),
        )
    else:
        seq = (
            _q(j, "01", zero),
            _q(j, "01", zero),
            _q(j, "11", 4 * t + neg, rho),
            _q(j, "11", zero),
            _q(j, "11", -2 * (g + 2 * t + gr + tr)),
            _q(j, "00", -4 * g - 8 * t + neg - 2 * gr - 2 * tr, rho),
            _q(j, "00", zero),
            _q(j, "00", 2 * (g + 2 * t + gr + tr)),
            _q(j, "01", neg, rho),
        )
    if rho == 1:
        # full rotations use the ordinary pulse parameters
        same = {"theta_r": t, "Theta_r": Th, "gamma_r": g}
        seq = tuple(QPulse(q.qubit, q.cls, q.phase.substitute(same), q.rho) for q in seq)
    return GateBlock(IdealGate("rot", (j,), rho=rho, phi=phi, overall_phase=pi(1)), seq)


def swap_blocks(i: int, L: int, k: int = 2) -> list[GateBlock]:
    """``S_{i,i+1} = CN_{i,i+1} CN_{i+1,i} CN_{i,i+1}``."""
    return [cn_block(i, i + 1, L, k), cn_block(i + 1, i, L, k), cn_block(i, i + 1, L, k)]


def long_range_cn_blocks(a: int, b: int, L: int, k: int = 2) -> list[GateBlock]:
    """CN between distant qubits: swap the control next to the target and back."""
    _check_qubit(a, L)
    _check_qubit(b, L)
    if a == b:
        raise CompileError("control and target must differ")
    if abs(a - b) == 1:
        return [cn_block(a, b, L, k)]
    if a < b:
        swaps = list(range(a, b - 1))
        middle = cn_block(b - 1, b, L, k)
    else:
        swaps = list(range(a - 1, b, -1))
        middle = cn_block(b + 1, b, L, k)
    out = []
    for i in swaps:
        out += swap_blocks(i, L, k)
    out.append(middle)
    for i in reversed(swaps):
        out += swap_blocks(i, L, k)
    return out


# -- lowering -----------------------------------------------------------------


def lower_qpulse(q: QPulse, phase: float, t_start: float, config: ChainConfig) -> list[PulseSpec]:
    """Physical pulses realizing ``q`` with numeric phase ``phase`` starting at ``t_start``."""
    i = q.qubit
    if not 0 <= i < config.L:
        raise CompileError(f"qubit {i} out of range for L={config.L}")
    edge = config.is_edge(i)
    if q.cls.startswith("edge") != edge:
        kind = "edge" if edge else "interior"
        raise CompileError(f"pulse class {q.cls} cannot drive {kind} qubit {i}")
    params = composite_params(config.k, float(q.rho), 2.0 * config.J)
    phase = float(wrap_phase(phase))
    if edge:
        nu = transition_frequency(config, i, Edge(0 if q.cls == "edge0" else 1))
        return [PulseSpec(nu, params.omega_single, phase, params.tau_single, t_start)]
    if q.cls == "01":
        nu = transition_frequency(config, i, Interior(1, 0))
        return [PulseSpec(nu, params.omega_single, phase, params.tau_single, t_start)]
    ctx = Interior(0, 0) if q.cls == "00" else Interior(1, 1)
    main = PulseSpec(transition_frequency(config, i, ctx), params.omega_main, phase, params.tau_main, t_start)
    corr = correcting_pulse_spec(q.cls, phase, t_start, i, config, params)
    return [main, corr]


def lower(blocks: Sequence[GateBlock], config: ChainConfig, t_start: float = 0.0, phi: Optional[float] = None) -> PulseProgram:
    pulses: list[PulseSpec] = []
    anns: list[PulseAnnotation] = []
    t_now = t_start
    for g_idx, block in enumerate(blocks):
        rho = block.ideal.rho if block.ideal.kind == "rot" else None
        rphi = block.ideal.phi if block.ideal.kind == "rot" else phi
        values = symbol_values(config, float(rho) if rho is not None else None, rphi)
        for q_idx, q in enumerate(block.qpulses):
            lowered = lower_qpulse(q, q.phase.evaluate(values), t_now, config)
            roles = ["single"] if len(lowered) == 1 else ["main", "corr"]
            for p, role in zip(lowered, roles):
                pulses.append(p)
                anns.append(PulseAnnotation(g_idx, block.name.replace(" ", ""), q_idx, q.label().replace(" ", ""), role))
            t_now = lowered[-1].t_end
    return PulseProgram(pulses, anns, list(blocks))


# -- public compile entry points ----------------------------------------------


def compile_q_pulse(i: int, cls: str, phi: float, rho: float, t_start: float, config: ChainConfig) -> PulseProgram:
    q = QPulse(i, cls, SymbolicPhase(), F(rho).limit_denominator(10**6))
    lowered = lower_qpulse(q, phi, t_start, config)
    roles = ["single"] if len(lowered) == 1 else ["main", "corr"]
    label = q.label().replace("(0)", f"({phi:g})")
    anns = [PulseAnnotation(0, "Q", 0, label, r) for r in roles]
    return PulseProgram(lowered, anns)


def compile_not(i: int, config: ChainConfig, t_start: float = 0.0) -> PulseProgram:
    return lower([not_block(i, config.L, config.k)], config, t_start)


def compile_cn(a: int, b: int, config: ChainConfig, t_start: float = 0.0) -> PulseProgram:
    return lower([cn_block(a, b, config.L, config.k)], config, t_start)


def compile_rotation(j: int, rho, phi: float, config: ChainConfig, t_start: float = 0.0) -> PulseProgram:
    return lower([rotation_block(j, rho, config.L, phi, config.k)], config, t_start)


def compile_swap(i: int, config: ChainConfig, t_start: float = 0.0) -> PulseProgram:
    if not 0 <= i < config.L - 1:
        raise CompileError(f"swap({i},{i + 1}) out of range for L={config.L}")
    return lower(swap_blocks(i, config.L, config.k), config, t_start)


def compile_long_range_cn(a: int, b: int, config: ChainConfig, t_start: float = 0.0) -> PulseProgram:
    if config.L < 3:
        raise CompileError("long-range CN needs L >= 3")
    return lower(long_range_cn_blocks(a, b, config.L, config.k), config, t_start)


def parse_gate(descriptor: str, L: int, k: int = 2) -> list[GateBlock]:
    """Blocks for ``not <i>``, ``cn <a> <b>``, ``swap <i>`` or ``rot <j> <rho> <phi>``."""
    parts = descriptor.split()
    if not parts:
        raise CompileError("empty gate descriptor")
    op, args = parts[0].lower(), parts[1:]
    try:
        if op == "not" and len(args) == 1:
            return [not_block(int(args[0]), L, k)]
        if op == "cn" and len(args) == 2:
            return long_range_cn_blocks(int(args[0]), int(args[1]), L, k)
        if op == "swap" and len(args) == 1:
            i = int(args[0])
            if not 0 <= i < L - 1:
                raise CompileError(f"swap({i},{i + 1}) out of range for L={L}")
            return swap_blocks(i, L, k)
        if op == "rot" and len(args) == 3:
            return [rotation_block(int(args[0]), F(args[1]), L, float(args[2]), k)]
    except ValueError as exc:
        raise CompileError(f"bad gate descriptor {descriptor!r}: {exc}") from exc
    raise CompileError(f"bad gate descriptor {descriptor!r}")
