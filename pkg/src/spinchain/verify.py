"""Exact propagation of basis configurations through Q-pulse sequences.

Every relevant configuration (bits of the driven qubits and their
neighbours) is pushed through the ledger pulse by pulse.  Resonant partial
rotations split a configuration into two paths weighted by
``cos(rho pi/2)`` and ``sin(rho pi/2)``.  A sequence realizes a gate when
every path lands where the ideal gate sends it and all paths carry the same
phase relative to the ideal one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

import sympy
from sympy.matrices.normalforms import smith_normal_decomp

from spinchain.gates import IdealGate
from spinchain.pulses import EDGE_CLASSES, QPulse, ledger_phase
from spinchain.symbolic import SymbolicPhase

KNOWN_SYMBOLS = frozenset({"theta", "Theta", "gamma", "theta_r", "Theta_r", "gamma_r", "phi"})


@dataclass(frozen=True)
class Path:
    index: int
    phase: SymbolicPhase
    cos_power: int = 0
    sin_power: int = 0


@dataclass(frozen=True)
class VerifyRow:
    config: int
    outputs: tuple[Path, ...]
    expected: tuple[tuple[int, SymbolicPhase, int, int], ...]
    relative_phases: tuple[SymbolicPhase, ...]
    map_ok: bool

    def bits(self, qubits: Sequence[int]) -> str:
        return "".join(str((self.config >> q) & 1) for q in sorted(qubits, reverse=True))


@dataclass
class VerifyReport:
    qubits: tuple[int, ...]
    rows: list[VerifyRow]
    unverifiable: list[str] = field(default_factory=list)

    @property
    def map_ok(self) -> bool:
        return not self.unverifiable and all(r.map_ok for r in self.rows)

    @property
    def phases(self) -> list[SymbolicPhase]:
        return [p for r in self.rows for p in r.relative_phases]

    @property
    def phases_equal(self) -> bool:
        ph = self.phases
        return bool(ph) and all(p.equals_mod_2pi(ph[0]) for p in ph[1:])

    @property
    def common_phase(self) -> Optional[SymbolicPhase]:
        return self.phases[0].reduced() if self.phases_equal else None

    @property
    def passed(self) -> bool:
        return self.map_ok and self.phases_equal

    def summary(self) -> str:
        n = len(self.rows)
        if self.unverifiable:
            return f"{len(self.unverifiable)} unverifiable rows, FAIL"
        if not self.map_ok:
            bad = sum(not r.map_ok for r in self.rows)
            return f"{bad} of {n} configurations map incorrectly, FAIL"
        if self.phases_equal:
            return f"all {n} configurations: phase = {self.common_phase}, PASS"
        distinct = {str(p.reduced()) for p in self.phases}
        return f"{n} configurations carry {len(distinct)} distinct phases, FAIL"


def relevant_qubits(sequence: Sequence[QPulse], L: int) -> tuple[int, ...]:
    touched = {q.qubit for q in sequence}
    qubits = set(touched)
    for i in touched:
        qubits.update(n for n in (i - 1, i + 1) if 0 <= n < L)
    return tuple(sorted(qubits))


def _neighbors(q: QPulse, index: int, L: int) -> tuple[int, ...]:
    i = q.qubit
    if q.cls in EDGE_CLASSES:
        if i not in (0, L - 1):
            raise ValueError(f"edge pulse on interior qubit {i}")
        n = 1 if i == 0 else L - 2
        return ((index >> n) & 1,)
    if i in (0, L - 1):
        raise ValueError(f"interior pulse on edge qubit {i}")
    return ((index >> (i + 1)) & 1, (index >> (i - 1)) & 1)


def step(paths: list[Path], q: QPulse, L: int, k: int) -> list[Path]:
    out = []
    for path in paths:
        bit = (path.index >> q.qubit) & 1
        row = ledger_phase(q, bit, _neighbors(q, path.index, L), k)
        if not row.flips:
            out.append(Path(path.index, path.phase + row.phase, path.cos_power, path.sin_power))
            continue
        flipped = path.index ^ (1 << q.qubit)
        if row.stay_phase is not None:
            out.append(Path(path.index, path.phase + row.stay_phase, path.cos_power + 1, path.sin_power))
            out.append(Path(flipped, path.phase + row.phase, path.cos_power, path.sin_power + 1))
        else:
            out.append(Path(flipped, path.phase + row.phase, path.cos_power, path.sin_power))
    return out


def trace(sequence: Sequence[QPulse], config: int, L: int, k: int = 2) -> list[tuple[int, SymbolicPhase]]:
    """State and accumulated phase after every pulse, for a non-branching trajectory."""
    paths = [Path(config, SymbolicPhase())]
    rows = []
    for q in sequence:
        paths = step(paths, q, L, k)
        if len(paths) != 1:
            raise ValueError("trace mode needs a non-branching trajectory")
        rows.append((paths[0].index, paths[0].phase))
    return rows


def ideal_outputs(ideals: Sequence[IdealGate], index: int) -> list[tuple[int, SymbolicPhase, int, int]]:
    """Symbolic outputs of a chain of ideal gates applied in order."""
    outs = [(index, SymbolicPhase(), 0, 0)]
    for gate in ideals:
        nxt = []
        for idx, ph, cp, sp in outs:
            for o, p2, c2, s2 in gate.symbolic_outputs(idx):
                nxt.append((o, ph + p2, cp + c2, sp + s2))
        outs = nxt
    return outs


def symbolic_verify(
    sequence: Sequence[QPulse], ideal: IdealGate | Sequence[IdealGate], L: int, k: int = 2
) -> VerifyReport:
    """Propagate every relevant configuration and compare with ``ideal``.

    ``ideal`` may be a list of gates, applied in order.
    """
    ideals = [ideal] if isinstance(ideal, IdealGate) else list(ideal)
    qubits = relevant_qubits(sequence, L)
    rows: list[VerifyRow] = []
    unverifiable: list[str] = []
    for bits in product((0, 1), repeat=len(qubits)):
        config = sum(b << q for b, q in zip(bits, qubits))
        try:
            paths = [Path(config, SymbolicPhase())]
            for q in sequence:
                paths = step(paths, q, L, k)
        except ValueError as exc:
            unverifiable.append(f"config {config:0{L}b}: {exc}")
            continue
        merged = {}
        for p in paths:
            merged.setdefault(p.index, []).append(p)
        if any(len(v) > 1 for v in merged.values()):
            unverifiable.append(f"config {config:0{L}b}: interfering paths")
            continue
        expected = tuple(ideal_outputs(ideals, config))
        got = {p.index: p for p in paths}
        map_ok = set(got) == {e[0] for e in expected} and all(
            (got[e[0]].cos_power, got[e[0]].sin_power) == (e[2], e[3]) for e in expected
        )
        rel = tuple(got[e[0]].phase - e[1] for e in expected if e[0] in got)
        rows.append(VerifyRow(config, tuple(paths), expected, rel, map_ok))
    return VerifyReport(qubits, rows, unverifiable)


def free_symbols(report: VerifyReport) -> list[str]:
    names = set()
    for p in report.phases:
        names |= p.symbols - KNOWN_SYMBOLS
    return sorted(names)


@dataclass(frozen=True)
class Equalization:
    solvable: Optional[bool]
    unknowns: tuple[str, ...]
    solution: Optional[dict[str, SymbolicPhase]] = None
    reason: str = ""


def _fraction(x) -> Fraction:
    r = sympy.Rational(x)
    return Fraction(int(r.p), int(r.q))


def _two_pi_shift(A: sympy.Matrix, b: sympy.Matrix) -> Optional[sympy.Matrix]:
    """Integer vector ``n`` with ``b + 2n`` in the column space of ``A``, if any.

    Every left null vector ``y`` of ``A`` must annihilate ``b + 2n``; the
    resulting integer system is solved through a Smith decomposition.
    """
    null = A.T.nullspace()
    if not null:
        return sympy.zeros(b.rows, 1)
    rows = []
    for v in null:
        scale = sympy.ilcm(*[sympy.Rational(x).q for x in v])
        rows.append([int(x * scale) for x in v])
    Y = sympy.Matrix(rows)
    c = -(Y * b) / 2
    S, U, V = smith_normal_decomp(Y, domain=sympy.ZZ)
    Uc = U * c
    z = []
    for i in range(V.rows):
        d = S[i, i] if i < S.rows else 0
        if d == 0:
            z.append(0)
            continue
        q = sympy.Rational(Uc[i]) / d
        if q.q != 1:
            return None
        z.append(q)
    if any(Uc[i] != 0 for i in range(min(S.rows, S.cols), S.rows)):
        return None
    for i in range(S.rows):
        if all(S[i, j] == 0 for j in range(S.cols)) and Uc[i] != 0:
            return None
    return V * sympy.Matrix(z)


def equalize(report: VerifyReport) -> Equalization:
    """Decide whether the free pulse phases can make every final phase equal.

    The angle symbols are independent, so equality must hold separately in
    each of them; the ``pi`` component only has to agree modulo ``2*pi``.
    The solution sets leftover free parameters to zero; ``common`` is the
    resulting shared phase.
    """
    unknowns = tuple(free_symbols(report))
    phases = report.phases
    if not phases:
        return Equalization(None, unknowns, reason="no rows")
    basis = sorted({s for p in phases for s in p.symbols} - set(unknowns))
    # rows: sum_u a_u x_u - common = -(constant part of the phase)
    A = sympy.Matrix([[p.coeff(u) for u in unknowns] + [-1] for p in phases])
    B = sympy.Matrix([[-p.pi_coeff] + [-p.coeff(s) for s in basis] for p in phases])
    columns = ["pi"] + basis
    rank = A.rank()
    bad = [name for n, name in enumerate(columns[1:], 1) if A.row_join(B[:, n]).rank() != rank]
    if bad:
        return Equalization(False, unknowns, reason="inconsistent in " + ", ".join(bad))
    shift = _two_pi_shift(A, B[:, 0])
    if shift is None:
        return Equalization(False, unknowns, reason="inconsistent in pi, even modulo 2*pi")
    B[:, 0] = B[:, 0] + 2 * shift
    sol, params = A.gauss_jordan_solve(B)
    sol = sol.subs({t: 0 for t in params})
    solution = {}
    for n, name in enumerate(unknowns + ("common",)):
        solution[name] = SymbolicPhase(
            _fraction(sol[n, 0]), {s: _fraction(sol[n, m + 1]) for m, s in enumerate(basis)}
        )
    return Equalization(True, unknowns, solution)
