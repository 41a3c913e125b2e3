"""Rabi frequencies, composite-pulse parameters and the per-configuration phase ledger.

Composite (probability-corrected) pulses ``Q^{00}`` and ``Q^{11}`` consist of a
main pulse at ``nu^{00}``/``nu^{11}`` followed by a correcting pulse at
``nu^{10}`` that removes the amplitude the main pulse leaks into the
mixed-neighbour transition.  For a rotation fraction ``rho`` (rotation angle
``rho*pi``) and the 2*pi*k integer ``k``:

* single pulse: ``Omega_rho = Delta rho / sqrt(4k^2 - rho^2)``, ``tau = rho pi / Omega_rho``
* main pulse: ``Omega_2 = 2 Omega_rho``, ``tau_2 = rho pi / Omega_2``
* ``theta = Delta tau_2``, ``alpha = lambda tau_2 / 2``, ``f = Delta/lambda``,
  ``g = Omega_2/lambda`` with ``lambda = sqrt(Delta^2 + Omega_2^2)``
* ``tan Theta = -f tan alpha``, ``tan beta = -g tan alpha cos Theta``,
  ``beta* = beta + pi``, ``gamma = sqrt((pi k)^2 - beta*^2)``
* correcting pulse: ``Omega_c = Delta beta*/gamma``, ``tau_c = 2 gamma / Delta``

Both ``Theta`` and ``Theta + pi`` solve the tangent equation.  The branch is
fixed so that after the correcting pulse the mixed-neighbour state carries
``-exp(-i theta/2 - i Theta)``, which is what the ledger below assumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Optional

from spinchain.chain import ChainConfig, Edge, Interior, transition_frequency
from spinchain.dynamics import PulseSpec, wrap_phase
from spinchain.symbolic import (
    BIG_THETA,
    BIG_THETA_R,
    GAMMA,
    GAMMA_R,
    THETA,
    THETA_R,
    SymbolicPhase,
    as_phase,
    pi,
)

INTERIOR_CLASSES = ("01", "00", "11")
EDGE_CLASSES = ("edge0", "edge1")
_ALIASES = {"10": "01", "e0": "edge0", "e1": "edge1", "0": "edge0", "1": "edge1"}


def rabi_for_pi_pulse(k: int, delta: float, rho: float = 1.0) -> float:
    """Rabi frequency that nulls a transition detuned by ``delta`` during a ``rho*pi`` pulse."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0 < rho <= 1:
        raise ValueError("rho must lie in (0, 1]")
    if not delta > 0:
        raise ValueError("delta must be positive")
    return delta * rho / math.sqrt(4 * k * k - rho * rho)


@dataclass(frozen=True)
class CompositeParams:
    k: int
    rho: float
    delta: float
    theta: float
    alpha: float
    f: float
    g: float
    Theta: float
    beta: float
    beta_star: float
    gamma: float
    omega_single: float
    omega_main: float
    omega_corr: float
    tau_single: float
    tau_main: float
    tau_corr: float

    def dumps(self) -> str:
        lines = [f"# composite pulse parameters (k={self.k}, rho={self.rho:g}); units of J, 1/J, radians"]
        for fld in fields(self):
            value = getattr(self, fld.name)
            lines.append(f"{fld.name} = {value!r}" if isinstance(value, int) else f"{fld.name} = {value:.17g}")
        return "\n".join(lines) + "\n"


def _corrected_sign(alpha, f, g, Theta, beta_star) -> float:
    """Real factor multiplying ``exp(-i theta/2 - i Theta)`` on the corrected state."""
    c = (complex(math.cos(alpha), f * math.sin(alpha)) * complex(math.cos(Theta), math.sin(Theta))).real
    return c * math.cos(beta_star) - g * math.sin(alpha) * math.sin(beta_star)


def composite_params(k: int, rho: float = 1.0, delta: float = 2.0) -> CompositeParams:
    """All parameters of the ``rho``-rotation pulses for detuning step ``delta`` (= 2J)."""
    omega_single = rabi_for_pi_pulse(k, delta, rho)
    omega_main = 2.0 * omega_single
    tau_main = rho * math.pi / omega_main
    theta = math.pi * math.sqrt(k * k - rho * rho / 4.0)
    alpha = 0.5 * math.pi * math.sqrt(k * k + 0.75 * rho * rho)
    lam = math.hypot(delta, omega_main)
    f, g = delta / lam, omega_main / lam

    principal = math.atan(-f * math.tan(alpha))
    choice = None
    for Theta in (principal, principal + math.pi):
        beta = math.atan(-g * math.tan(alpha) * math.cos(Theta))
        beta_star = beta + math.pi
        if _corrected_sign(alpha, f, g, Theta, beta_star) < 0:
            choice = (float(wrap_phase(Theta)), beta, beta_star)
    Theta, beta, beta_star = choice
    radicand = (math.pi * k) ** 2 - beta_star**2
    if radicand <= 0:
        raise ValueError(f"no real gamma for k={k}, rho={rho}: beta* = {beta_star:.6g} exceeds pi*k")
    gamma = math.sqrt(radicand)
    return CompositeParams(
        k=k,
        rho=rho,
        delta=delta,
        theta=theta,
        alpha=alpha,
        f=f,
        g=g,
        Theta=Theta,
        beta=beta,
        beta_star=beta_star,
        gamma=gamma,
        omega_single=omega_single,
        omega_main=omega_main,
        omega_corr=delta * beta_star / gamma,
        tau_single=rho * math.pi / omega_single,
        tau_main=tau_main,
        tau_corr=2.0 * gamma / delta,
    )


def symbol_values(config: ChainConfig, rho: Optional[float] = None, phi: Optional[float] = None) -> dict[str, float]:
    """Numeric values of the ledger symbols for ``config`` (and a partial rotation)."""
    full = composite_params(config.k, 1.0, 2.0 * config.J)
    values = {"theta": full.theta, "Theta": full.Theta, "gamma": full.gamma}
    if rho is not None:
        part = composite_params(config.k, rho, 2.0 * config.J)
        values.update(theta_r=part.theta, Theta_r=part.Theta, gamma_r=part.gamma)
    if phi is not None:
        values["phi"] = phi
    return values


def correcting_pulse_spec(
    kind: str,
    main_phase: float,
    t_main: float,
    i: int,
    config: ChainConfig,
    params: CompositeParams,
) -> PulseSpec:
    """Correcting pulse that follows a main pulse of class ``kind`` started at ``t_main``.

    The phase references the *main* pulse's start time: the leaked amplitude
    carries ``exp(i Delta t_main)`` and the corrector must match it.  The
    corrector itself starts when the main pulse ends.
    """
    if kind not in ("00", "11"):
        raise ValueError(f"correcting pulses follow 00 or 11 main pulses, not {kind!r}")
    shift = params.theta + params.delta * t_main + params.Theta
    phase = main_phase - shift if kind == "11" else main_phase + shift
    return PulseSpec(
        nu=transition_frequency(config, i, Interior(1, 0)),
        omega_rabi=params.omega_corr,
        phi=float(wrap_phase(phase)),
        tau=params.tau_corr,
        t0=t_main + params.tau_main,
    )


# -- ledger -------------------------------------------------------------------


@dataclass(frozen=True)
class QPulse:
    """Symbolic descriptor of one probability-corrected pulse ``Q_{i,rho}^{class}(phase)``."""

    qubit: int
    cls: str
    phase: SymbolicPhase = SymbolicPhase()
    rho: Fraction = Fraction(1)

    def __post_init__(self):
        cls = _ALIASES.get(self.cls, self.cls)
        if cls not in INTERIOR_CLASSES + EDGE_CLASSES:
            raise ValueError(f"unknown pulse class {self.cls!r}")
        object.__setattr__(self, "cls", cls)
        object.__setattr__(self, "phase", as_phase(self.phase))
        rho = Fraction(self.rho)
        if not 0 < rho <= 1:
            raise ValueError("rho must lie in (0, 1]")
        object.__setattr__(self, "rho", rho)

    @property
    def partial(self) -> bool:
        return self.rho != 1

    @property
    def composite(self) -> bool:
        return self.cls in ("00", "11")

    def label(self) -> str:
        r = "" if not self.partial else f",ρ={self.rho}"
        cls = self.cls[-1] if self.cls.startswith("edge") else self.cls
        return f"Q_{self.qubit}^{cls}{r}({self.phase})"


@dataclass(frozen=True)
class LedgerRow:
    """Effect of one Q pulse on a basis state.

    ``phase`` is the phase carried by the output state (the flipped state when
    ``flips``).  For a resonant partial rotation the state splits: the flipped
    component has amplitude ``sin(rho pi/2)`` and ``phase``, the unflipped one
    ``cos(rho pi/2)`` and ``stay_phase``.
    """

    flips: bool
    phase: SymbolicPhase
    stay_phase: Optional[SymbolicPhase] = None

    def component_phase(self, target_bit_out: int, target_bit_in: int) -> SymbolicPhase:
        """Phase of the output component whose target bit is ``target_bit_out``."""
        if target_bit_out == target_bit_in:
            if self.flips and self.stay_phase is None:
                raise ValueError("a full resonant rotation leaves no unflipped component")
            return self.stay_phase if self.flips else self.phase
        if not self.flips:
            raise ValueError("pulse does not flip this configuration")
        return self.phase


def ledger_phase(pulse: QPulse, target_bit: int, neighbors: tuple[int, ...], k: int = 2) -> LedgerRow:
    """Phase acquired by a basis state under ``pulse`` (near-resonant dynamics only).

    ``neighbors`` is ``(bit_{i+1}, bit_{i-1})`` for interior classes and the
    single neighbour bit for edge classes.  Terms ``k*pi`` from the nulled
    near-resonant transitions are kept, so the rows are exact for any ``k``.
    """
    if pulse.partial:
        T, H, G = THETA_R, BIG_THETA_R, GAMMA_R
    else:
        T, H, G = THETA, BIG_THETA, GAMMA
    phi = pulse.phase
    s = 1 if target_bit == 0 else -1
    kpi = pi(k)
    half = pi(Fraction(1, 2))
    partial = pulse.partial

    if pulse.cls in EDGE_CLASSES:
        if len(neighbors) != 1:
            raise ValueError("edge pulses take exactly one neighbour bit")
        m = 0 if pulse.cls == "edge0" else 1
        (n,) = neighbors
        if n == m:
            return LedgerRow(True, half - phi * s, SymbolicPhase() if partial else None)
        return LedgerRow(False, (T if m == 0 else -T) * s + kpi)

    if len(neighbors) != 2:
        raise ValueError("interior pulses take (bit_{i+1}, bit_{i-1})")
    left, right = neighbors
    config = "10" if left != right else f"{left}{right}"

    if pulse.cls == "01":
        if config == "10":
            return LedgerRow(True, half - phi * s, SymbolicPhase() if partial else None)
        return LedgerRow(False, (-T if config == "00" else T) * s + kpi)

    if pulse.cls == "00":
        if config == "00":
            return LedgerRow(True, half + (G - phi) * s + kpi, -G * s + kpi if partial else None)
        if config == "10":
            return LedgerRow(False, pi(1) + (T * Fraction(1, 2) + H) * s)
        return LedgerRow(False, (T + G) * s)

    # class 11
    if config == "11":
        return LedgerRow(True, half - (phi + G) * s + kpi, G * s + kpi if partial else None)
    if config == "10":
        return LedgerRow(False, pi(1) - (T * Fraction(1, 2) + H) * s)
    return LedgerRow(False, -(T + G) * s)
