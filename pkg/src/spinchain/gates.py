"""Ideal gate semantics used as references for verification and experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from spinchain.symbolic import SymbolicPhase, pi, sym


@dataclass(frozen=True)
class IdealGate:
    """Ideal action of a logical gate.

    ``kind`` is one of ``not``, ``cn``, ``swap``, ``rot`` or ``lrcn`` (a CN on
    non-adjacent qubits).  ``qubits`` holds ``(i,)``, ``(control, target)``,
    ``(i, i+1)`` or ``(j,)``.  Rotations ``rot`` map
    ``|0_j> -> cos(rho pi/2)|0_j> + i e^{i phi} sin(rho pi/2)|1_j>`` and
    ``|1_j> -> cos(rho pi/2)|1_j> + i e^{-i phi} sin(rho pi/2)|0_j>``.
    """

    kind: str
    qubits: tuple[int, ...]
    rho: Fraction = Fraction(1)
    phi: Optional[float] = None
    overall_phase: SymbolicPhase = SymbolicPhase()

    @property
    def name(self) -> str:
        if self.kind == "rot":
            return f"U{self.qubits[0]}(rho={self.rho})"
        label = {"not": "Not", "cn": "CN", "swap": "S", "lrcn": "CN"}[self.kind]
        return f"{label}({','.join(map(str, self.qubits))})"

    def permute(self, index: int) -> int:
        """Output basis index for permutation gates."""
        if self.kind == "not":
            return index ^ (1 << self.qubits[0])
        if self.kind in ("cn", "lrcn"):
            a, b = self.qubits
            return index ^ (((index >> a) & 1) << b)
        if self.kind == "swap":
            i, j = self.qubits
            bi, bj = (index >> i) & 1, (index >> j) & 1
            if bi != bj:
                index ^= (1 << i) | (1 << j)
            return index
        raise ValueError(f"{self.kind} is not a permutation gate")

    def symbolic_outputs(self, index: int) -> list[tuple[int, SymbolicPhase, int, int]]:
        """``(out_index, phase, cos_power, sin_power)`` for every output component.

        Rotation phases use the symbol ``phi``; amplitudes are
        ``cos(rho pi/2)**cos_power * sin(rho pi/2)**sin_power``.
        """
        if self.kind != "rot":
            return [(self.permute(index), SymbolicPhase(), 0, 0)]
        j = self.qubits[0]
        flipped = index ^ (1 << j)
        sign = 1 if (index >> j) & 1 == 0 else -1
        flip_phase = pi(Fraction(1, 2)) + sym("phi", sign)
        if self.rho == 1:
            return [(flipped, flip_phase, 0, 0)]
        return [(index, SymbolicPhase(), 1, 0), (flipped, flip_phase, 0, 1)]

    def apply(self, amplitudes: np.ndarray, with_overall_phase: bool = False, values=None) -> np.ndarray:
        amps = np.asarray(amplitudes, dtype=complex)
        idx = np.arange(amps.shape[0])
        if self.kind == "rot":
            j = self.qubits[0]
            angle = 0.5 * math.pi * float(self.rho)
            c, s = math.cos(angle), math.sin(angle)
            phi = self.phi or 0.0
            bit = (idx >> j) & 1
            partner = idx ^ (1 << j)
            # amplitude arriving at bit 1 comes from bit 0 with i e^{i phi}, and vice versa
            factor = np.where(bit == 1, 1j * np.exp(1j * phi), 1j * np.exp(-1j * phi))
            if amps.ndim == 2:
                factor = factor[:, None]
            out = c * amps + s * factor * amps[partner]
        else:
            out = np.zeros_like(amps)
            out[[self.permute(int(n)) for n in idx]] = amps
        if with_overall_phase:
            vals = dict(values or {})
            if self.phi is not None:
                vals.setdefault("phi", self.phi)
            out = out * np.exp(1j * self.overall_phase.evaluate(vals))
        return out

    def matrix(self, L: int) -> np.ndarray:
        return self.apply(np.eye(1 << L, dtype=complex))
