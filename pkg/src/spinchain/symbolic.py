"""Exact phase bookkeeping.

A :class:`SymbolicPhase` is ``c*pi + sum_s a_s * s`` with rational ``c`` and
``a_s``.  Symbols are plain names: the composite-pulse angles ``theta``,
``Theta``, ``gamma`` (and their partial-rotation versions ``theta_r``,
``Theta_r``, ``gamma_r``) plus free pulse phases such as ``phi1``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping, Union

Number = Union[int, Fraction]

PRETTY = {
    "theta": "θ",
    "Theta": "Θ",
    "gamma": "γ",
    "theta_r": "θ_ρ",
    "Theta_r": "Θ_ρ",
    "gamma_r": "γ_ρ",
    "phi": "φ",
}


def _frac(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("SymbolicPhase coefficients must be exact (int or Fraction)")
    return Fraction(x)


class SymbolicPhase:
    """Immutable rational linear form over ``pi`` and named angle symbols."""

    __slots__ = ("_pi", "_terms")

    def __init__(self, pi: Number = 0, terms: Mapping[str, Number] | None = None):
        self._pi = _frac(pi)
        self._terms = {k: _frac(v) for k, v in sorted((terms or {}).items()) if v != 0}

    @classmethod
    def symbol(cls, name: str, coeff: Number = 1) -> "SymbolicPhase":
        return cls(0, {name: coeff})

    @classmethod
    def pi(cls, coeff: Number = 1) -> "SymbolicPhase":
        return cls(coeff)

    @property
    def pi_coeff(self) -> Fraction:
        return self._pi

    @property
    def terms(self) -> dict[str, Fraction]:
        return dict(self._terms)

    def coeff(self, name: str) -> Fraction:
        return self._terms.get(name, Fraction(0))

    @property
    def symbols(self) -> frozenset[str]:
        return frozenset(self._terms)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        if not isinstance(other, SymbolicPhase):
            return NotImplemented
        terms = dict(self._terms)
        for k, v in other._terms.items():
            terms[k] = terms.get(k, 0) + v
        return SymbolicPhase(self._pi + other._pi, terms)

    __radd__ = __add__

    def __neg__(self):
        return SymbolicPhase(-self._pi, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, SymbolicPhase):
            return NotImplemented
        return self + (-other)

    def __mul__(self, factor):
        if isinstance(factor, float) or not isinstance(factor, (int, Fraction)):
            return NotImplemented
        return SymbolicPhase(self._pi * factor, {k: v * factor for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, SymbolicPhase):
            return NotImplemented
        return self._pi == other._pi and self._terms == other._terms

    def __hash__(self):
        return hash((self._pi, tuple(self._terms.items())))

    def reduced(self) -> "SymbolicPhase":
        """Same phase with the ``pi`` coefficient brought into ``[0, 2)``."""
        return SymbolicPhase(self._pi % 2, self._terms)

    def equals_mod_2pi(self, other: "SymbolicPhase") -> bool:
        diff = self - other
        return not diff._terms and diff._pi % 2 == 0

    def is_constant(self) -> bool:
        return not self._terms

    def substitute(self, values: Mapping[str, "SymbolicPhase"]) -> "SymbolicPhase":
        """Replace symbols by other symbolic phases."""
        out = SymbolicPhase(self._pi)
        for name, c in self._terms.items():
            out = out + (values[name] * c if name in values else SymbolicPhase.symbol(name, c))
        return out

    def evaluate(self, values: Mapping[str, float] | None = None) -> float:
        values = values or {}
        missing = self.symbols - set(values)
        if missing:
            raise KeyError(f"no numeric value for {sorted(missing)}")
        return float(self._pi) * math.pi + sum(float(c) * values[k] for k, c in self._terms.items())

    def __repr__(self):
        return f"SymbolicPhase({str(self)!r})"

    def __str__(self):
        parts = []
        if self._pi:
            parts.append((self._pi, "π"))
        for name, c in self._terms.items():
            parts.append((c, PRETTY.get(name, name)))
        if not parts:
            return "0"
        out = []
        for n, (c, sym) in enumerate(parts):
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if sym == "π" and mag.denominator != 1:
                num = "" if mag.numerator == 1 else str(mag.numerator)
                text = f"{num}π/{mag.denominator}"
            else:
                text = sym if mag == 1 else f"{mag}{sym}" if mag.denominator == 1 else f"({mag}){sym}"
            if n == 0:
                out.append(("-" if c < 0 else "") + text)
            else:
                out.append(f" {sign} {text}")
        return "".join(out)


def pi(coeff: Number = 1) -> SymbolicPhase:
    return SymbolicPhase.pi(coeff)


def sym(name: str, coeff: Number = 1) -> SymbolicPhase:
    return SymbolicPhase.symbol(name, coeff)


ZERO = SymbolicPhase()
THETA = sym("theta")
BIG_THETA = sym("Theta")
GAMMA = sym("gamma")
THETA_R = sym("theta_r")
BIG_THETA_R = sym("Theta_r")
GAMMA_R = sym("gamma_r")


def as_phase(value) -> SymbolicPhase:
    """Coerce ints, Fractions and symbol names into a :class:`SymbolicPhase`."""
    if isinstance(value, SymbolicPhase):
        return value
    if isinstance(value, str):
        return sym(value)
    if isinstance(value, (int, Fraction)) and value == 0:
        return ZERO
    raise TypeError(f"cannot interpret {value!r} as an exact phase")
