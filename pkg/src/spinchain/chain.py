"""Static model of the Ising spin chain.

Conventions
-----------
* Qubit ``i`` is bit ``i`` of a basis index (qubit 0 is the least significant
  bit), so index ``j`` reads as ``|n_{L-1} ... n_1 n_0>``.
* Bit 0 is the spin-up state with ``I_z = +1/2``; bit 1 has ``I_z = -1/2``.
  With ``H_0 = -sum_k w_k I_k^z - 2J sum_k I_k^z I_{k+1}^z`` this makes the
  bit-1 state the upper level of every single-spin transition.
* ``J`` is the unit of frequency; times are in units of ``1/J``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Union

import numpy as np


@dataclass(frozen=True)
class ChainConfig:
    """Chain of ``L`` spins with Larmor frequencies ``w + k * delta_omega``."""

    L: int
    w: float = 0.0
    delta_omega: float = 1.0e4
    J: float = 1.0
    k: int = 2

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 2:
            raise ValueError(f"L must be an integer >= 2, got {self.L!r}")
        if not self.J > 0:
            raise ValueError(f"J must be positive, got {self.J!r}")
        if not self.delta_omega > 0:
            raise ValueError(f"delta_omega must be positive, got {self.delta_omega!r}")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be an integer >= 1, got {self.k!r}")
        object.__setattr__(self, "L", int(self.L))
        object.__setattr__(self, "k", int(self.k))
        if self.delta_omega < 100 * self.J:
            warnings.warn(
                f"delta_omega/J = {self.delta_omega / self.J:g} is small; "
                "non-resonant errors will be large",
                stacklevel=2,
            )

    @property
    def dim(self) -> int:
        return 1 << self.L

    def larmor(self, i: int) -> float:
        return self.w + i * self.delta_omega

    def is_edge(self, i: int) -> bool:
        return i == 0 or i == self.L - 1

    def replace(self, **changes) -> "ChainConfig":
        fields = asdict(self)
        fields.update(changes)
        return ChainConfig(**fields)

    # -- plain-text "key = value" files ------------------------------------

    def dumps(self) -> str:
        lines = ["# Ising chain configuration (frequencies in units of J)"]
        lines += [f"{key} = {value!r}" for key, value in asdict(self).items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "ChainConfig":
        values: dict[str, Union[int, float]] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in ("L", "w", "delta_omega", "J", "k"):
                raise ValueError(f"line {lineno}: unknown key {key!r}")
            values[key] = int(value) if key in ("L", "k") else float(value)
        if "L" not in values:
            raise ValueError("configuration must define L")
        return cls(**values)

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ChainConfig":
        return cls.loads(Path(path).read_text())


@dataclass(frozen=True)
class Interior:
    """Neighbour context of an interior qubit: bits of qubits ``i+1`` and ``i-1``."""

    left: int
    right: int

    def canonical(self) -> "Interior":
        # nu^{10} == nu^{01}; the mixed class is stored as (1, 0)
        if self.left != self.right:
            return Interior(1, 0)
        return self

    @property
    def label(self) -> str:
        c = self.canonical()
        return f"{c.left}{c.right}"


@dataclass(frozen=True)
class Edge:
    """Neighbour context of an edge qubit: the bit of its only neighbour."""

    neighbor: int

    @property
    def label(self) -> str:
        return str(self.neighbor)


NeighborContext = Union[Interior, Edge]


def bit(index: int, i: int) -> int:
    return (index >> i) & 1


def spin_values(L: int) -> np.ndarray:
    """``(2**L, L)`` array of ``I_z`` eigenvalues, +1/2 for bit 0 and -1/2 for bit 1."""
    idx = np.arange(1 << L)
    bits = (idx[:, None] >> np.arange(L)) & 1
    return 0.5 - bits


def energies(config: ChainConfig) -> np.ndarray:
    """All eigenvalues of ``H_0`` indexed by basis state."""
    s = spin_values(config.L)
    omegas = config.w + config.delta_omega * np.arange(config.L)
    return -(s * omegas).sum(axis=1) - 2.0 * config.J * (s[:, :-1] * s[:, 1:]).sum(axis=1)


def energy(config: ChainConfig, state: int) -> float:
    """Energy ``E_p`` of basis state ``state`` in units of J."""
    if not 0 <= state < config.dim:
        raise ValueError(f"basis index {state} out of range for L={config.L}")
    s = [0.5 - bit(state, i) for i in range(config.L)]
    zeeman = sum(config.larmor(i) * s[i] for i in range(config.L))
    ising = sum(s[i] * s[i + 1] for i in range(config.L - 1))
    return -zeeman - 2.0 * config.J * ising


def neighbor_context(config: ChainConfig, i: int, state: int) -> NeighborContext:
    """Context of qubit ``i`` read off a basis state."""
    if i == 0:
        return Edge(bit(state, 1))
    if i == config.L - 1:
        return Edge(bit(state, config.L - 2))
    return Interior(bit(state, i + 1), bit(state, i - 1))


def transition_frequency(config: ChainConfig, i: int, ctx: NeighborContext) -> float:
    """Energy needed to flip qubit ``i`` from 0 to 1 given its neighbours.

    Interior qubits: ``w_i + 2J`` (both neighbours 0), ``w_i`` (mixed),
    ``w_i - 2J`` (both 1).  Edge qubits: ``w_i + J`` or ``w_i - J``.
    """
    if not 0 <= i < config.L:
        raise ValueError(f"qubit {i} out of range for L={config.L}")
    edge = config.is_edge(i)
    if isinstance(ctx, Interior):
        if edge:
            raise ValueError(f"qubit {i} is an edge qubit; use an Edge context")
        return config.larmor(i) + config.J * (2 - 2 * (ctx.left + ctx.right))
    if isinstance(ctx, Edge):
        if not edge:
            raise ValueError(f"qubit {i} is interior; use an Interior context")
        return config.larmor(i) + config.J * (1 - 2 * ctx.neighbor)
    raise TypeError(f"unknown neighbour context {ctx!r}")


# Physical constants (CODATA 2018) for the donor exchange estimate.
_E2_OVER_4PI_EPS0_EV_NM = 1.439964548  # e^2 / (4 pi eps0) in eV nm
_PLANCK_EV_S = 4.135667696e-15


def exchange_constant(r: float, epsilon: float, a0: float) -> float:
    """Exchange constant of two donor electrons, in MHz.

    ``J(r) = 0.8 e^2/(epsilon a0) (r/a0)^(5/2) exp(-2 r/a0)``, with ``r`` and
    ``a0`` in nanometres; the energy is converted to a frequency with ``h``.
    """
    if r <= 0 or a0 <= 0 or epsilon <= 0:
        raise ValueError("r, epsilon and a0 must be positive")
    x = r / a0
    energy_ev = 0.8 * _E2_OVER_4PI_EPS0_EV_NM / (epsilon * a0) * x**2.5 * math.exp(-2.0 * x)
    return energy_ev / _PLANCK_EV_S / 1.0e6
