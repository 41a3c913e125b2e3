"""Exact evolution of the chain state under rectangular rf pulses.

Amplitudes are interaction-picture coefficients ``C_p(t)`` defined by
``Psi(t) = sum_p C_p(t) exp(-i E_p t) |p>``.  A pulse of carrier ``nu`` is
time independent in the frame rotating with ``exp(-i nu t sum_k I_k^z)``,
where the Hamiltonian becomes

    H_rot = diag(-sum_k (w_k - nu) s_k - 2J sum_k s_k s_{k+1})
            - (Omega/2) sum_k (I_k^- e^{-i phi} + I_k^+ e^{i phi}).

Composing the frame changes gives ``C(t0 + tau) = e^{i h (t0+tau)} U e^{-i h t0} C(t0)``
with ``h`` the diagonal of ``H_rot`` and ``U = exp(-i H_rot tau)``; ``w`` drops out.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from spinchain.chain import ChainConfig, spin_values

NORM_TOLERANCE = 1e-9
PHASE_FLOOR = 1e-12


@dataclass(frozen=True)
class PulseSpec:
    """One rectangular rf pulse; frequencies in J, times in 1/J, phase in radians."""

    nu: float
    omega_rabi: float
    phi: float
    tau: float
    t0: float = 0.0

    def __post_init__(self):
        if not self.omega_rabi > 0:
            raise ValueError(f"Rabi frequency must be positive, got {self.omega_rabi}")
        if not self.tau > 0:
            raise ValueError(f"pulse duration must be positive, got {self.tau}")
        if self.t0 < 0:
            raise ValueError(f"start time must be non-negative, got {self.t0}")

    @property
    def t_end(self) -> float:
        return self.t0 + self.tau


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Interaction-picture amplitudes of a ``2**L`` dimensional register at ``time``."""

    amplitudes: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size < 2 or amps.size & (amps.size - 1):
            raise ValueError(f"expected a power-of-two length vector, got shape {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, L: int, index: int, time: float = 0.0) -> "QuantumState":
        amps = np.zeros(1 << L, dtype=complex)
        amps[index] = 1.0
        return cls(amps, time)

    @property
    def L(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_records(self) -> list[tuple[int, float, float]]:
        return [(j, float(c.real), float(c.imag)) for j, c in enumerate(self.amplitudes)]

    @classmethod
    def from_records(cls, records, time: float = 0.0) -> "QuantumState":
        records = list(records)
        size = 1 << max(1, (max(int(r[0]) for r in records)).bit_length())
        amps = np.zeros(size, dtype=complex)
        for index, re, im in records:
            amps[int(index)] = complex(re, im)
        return cls(amps, time)


def rotating_frame_diagonal(config: ChainConfig, nu: float) -> np.ndarray:
    """Diagonal of ``H_0 + nu * sum_k I_k^z``."""
    return _diagonal(config.L, config.J, config.delta_omega, config.w - nu)


@lru_cache(maxsize=64)
def _diagonal(L: int, J: float, delta_omega: float, offset: float) -> np.ndarray:
    s = spin_values(L)
    detunings = offset + delta_omega * np.arange(L)
    h = -(s * detunings).sum(axis=1) - 2.0 * J * (s[:, :-1] * s[:, 1:]).sum(axis=1)
    h.setflags(write=False)
    return h


def _flip_pairs(L: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(1 << L)
    lower, upper = [], []
    for q in range(L):
        m = idx[((idx >> q) & 1) == 0]
        lower.append(m)
        upper.append(m | (1 << q))
    return np.concatenate(lower), np.concatenate(upper)


def rotating_hamiltonian(config: ChainConfig, nu: float, omega_rabi: float, phi: float = 0.0) -> np.ndarray:
    """Dense ``H_rot`` for one pulse."""
    return _hamiltonian(config.L, config.J, config.delta_omega, config.w - nu, omega_rabi, phi)


def _hamiltonian(L, J, delta_omega, offset, omega_rabi, phi) -> np.ndarray:
    h = _diagonal(L, J, delta_omega, offset)
    H = np.diag(h).astype(complex)
    lower, upper = _flip_pairs(L)
    # I^- raises the bit (spin down is the upper level): <p|H|m> = -(Omega/2) e^{-i phi}
    H[upper, lower] = -0.5 * omega_rabi * cmath.exp(-1j * phi)
    H[lower, upper] = -0.5 * omega_rabi * cmath.exp(1j * phi)
    return H


@lru_cache(maxsize=256)
def _eigensystem(L, J, delta_omega, offset, omega_rabi):
    evals, evecs = np.linalg.eigh(_hamiltonian(L, J, delta_omega, offset, omega_rabi, 0.0))
    return evals, evecs


def propagate(amplitudes: np.ndarray, config: ChainConfig, pulse: PulseSpec) -> np.ndarray:
    """Map ``C(t0)`` to ``C(t0 + tau)`` for one pulse, without any checks.

    Linear in ``amplitudes``; a 2-D array is treated as a batch of column vectors.
    """
    offset = config.w - pulse.nu
    h = _diagonal(config.L, config.J, config.delta_omega, offset)
    evals, evecs = _eigensystem(config.L, config.J, config.delta_omega, offset, pulse.omega_rabi)
    # phase phi enters as H(phi) = P H(0) P^dagger with P = exp(i phi N)
    n_up = spin_values(config.L).sum(axis=1)
    frame_in = np.exp(-1j * (h * pulse.t0 + pulse.phi * n_up))
    frame_out = np.exp(1j * (h * pulse.t_end + pulse.phi * n_up))
    amps = np.asarray(amplitudes, dtype=complex)
    vec = amps if amps.ndim == 2 else amps[:, None]
    x = frame_in[:, None] * vec
    x = evecs.conj().T @ x
    x = np.exp(-1j * evals * pulse.tau)[:, None] * x
    x = frame_out[:, None] * (evecs @ x)
    return x if amps.ndim == 2 else x[:, 0]


def apply_pulse(state: QuantumState, config: ChainConfig, pulse: PulseSpec) -> QuantumState:
    """Evolve ``state`` exactly through ``pulse`` (no resonance approximation)."""
    if state.amplitudes.size != config.dim:
        raise ValueError(f"state has {state.amplitudes.size} amplitudes, chain needs {config.dim}")
    if abs(state.norm - 1.0) > NORM_TOLERANCE:
        raise ValueError(f"state is not normalized (norm = {state.norm!r})")
    if not math.isclose(state.time, pulse.t0, rel_tol=1e-12, abs_tol=1e-9):
        raise ValueError(f"state time {state.time} does not match pulse start {pulse.t0}")
    return QuantumState(propagate(state.amplitudes, config, pulse), pulse.t_end)


def apply_pulses(state: QuantumState, config: ChainConfig, pulses) -> QuantumState:
    for pulse in pulses:
        state = apply_pulse(state, config, pulse)
    return state


def two_level_evolution(delta, omega_rabi, phi, tau, t0, c_lower, c_upper):
    """Closed-form two-level solution for a pulse detuned by ``delta = E_p - E_m - nu``.

    Returns ``(c_lower, c_upper)`` at ``t0 + tau`` for arbitrary initial
    amplitudes, by superposing the solutions started in either level.
    """
    lam = math.hypot(delta, omega_rabi)
    if lam == 0.0:
        return complex(c_lower), complex(c_upper)
    half = 0.5 * lam * tau
    c, s = math.cos(half), math.sin(half)
    stay_lower = (c + 1j * (delta / lam) * s) * cmath.exp(-0.5j * tau * delta)
    stay_upper = (c - 1j * (delta / lam) * s) * cmath.exp(0.5j * tau * delta)
    up = 1j * (omega_rabi / lam) * s * cmath.exp(1j * (t0 * delta + 0.5 * tau * delta - phi))
    down = 1j * (omega_rabi / lam) * s * cmath.exp(-1j * (t0 * delta + 0.5 * tau * delta - phi))
    return stay_lower * c_lower + down * c_upper, up * c_lower + stay_upper * c_upper


def wrap_phase(x):
    """Reduce angles to ``(-pi, pi]``."""
    y = np.mod(np.asarray(x, dtype=float) + np.pi, 2.0 * np.pi) - np.pi
    y = np.where(y == -np.pi, np.pi, y)
    return float(y) if np.ndim(y) == 0 else y


@dataclass(frozen=True)
class StateComparison:
    fidelity: float
    global_phase: float
    max_phase_dev: float
    max_prob_dev: float
    phase_devs: np.ndarray = field(repr=False)


def compare_states(a, b, floor: float = PHASE_FLOOR) -> StateComparison:
    """Compare ``a`` against reference ``b``.

    ``global_phase`` is the phase of ``a`` relative to ``b`` (so ``a = e^{ix} b``
    gives ``x``); phase deviations are taken on components of ``b`` above ``floor``.
    """
    a = a.amplitudes if isinstance(a, QuantumState) else np.asarray(a, dtype=complex)
    b = b.amplitudes if isinstance(b, QuantumState) else np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    overlap = np.vdot(b, a)
    gp = float(np.angle(overlap))
    mask = np.abs(b) ** 2 > floor
    devs = wrap_phase(np.angle(a[mask]) - np.angle(b[mask]) - gp)
    devs = np.atleast_1d(devs)
    return StateComparison(
        fidelity=float(abs(overlap) ** 2),
        global_phase=gp,
        max_phase_dev=float(np.max(np.abs(devs))) if devs.size else 0.0,
        max_prob_dev=float(np.max(np.abs(np.abs(a) ** 2 - np.abs(b) ** 2))),
        phase_devs=devs,
    )
