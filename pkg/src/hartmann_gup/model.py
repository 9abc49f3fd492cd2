"""Hartmann ring-shaped potential: parameters, quantum numbers, eigenfunctions.

Bound states are labelled by ``(N, n, m)``: radial, polar and magnetic
quantum numbers. The effective angular parameters are

    k  = sqrt(m^2 + q eta hbar^2 sigma^2 / (2 mu))
    l  = n + k
    n' = N + l + 1

and the energy is ``E0 = -mu (eta sigma^2)^2 e^4 / (2 hbar^2 n'^2)``.

The potential
-------------
The eigenfunctions below solve the Schrodinger equation with

    V(r, theta) = -eta sigma^2 e^2 / r + hbar^2 (k^2 - m^2) / (2 mu r^2 sin^2 theta)

i.e. an attractive Coulomb term and a ring term whose strength is fixed by
``k``. The literature form ``eta sigma^2 (e^2/r + q hbar^2 / (2 mu r^2 sin^2))``
differs in the sign of the Coulomb term and, unless ``hbar^2 = 2 mu``, in the
ring strength. It is available as ``eval_potential(..., printed=True)`` but
every matrix element uses the consistent form, otherwise ``p^4 = 4 mu^2
(H0 - V)^2`` would not hold on these states.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .specfun import gegenbauer, laguerre, lgamma

__all__ = [
    "UnitSystem",
    "ATOMIC",
    "SI",
    "HartmannModel",
    "QuantumState",
    "ImaginaryKError",
    "derive_state",
    "scan_states",
    "angular_norm",
    "printed_angular_norm",
    "theta_function",
    "radial_function",
    "radial_log_envelope",
    "eval_wavefunction",
    "eval_potential",
    "is_degenerate",
    "DEGENERACY_RTOL",
]

DEGENERACY_RTOL = 1e-12


@dataclass(frozen=True)
class UnitSystem:
    """Scale factors converting model units to SI."""

    name: str = "atomic"
    length: float = 5.29177210903e-11
    energy: float = 4.3597447222071e-18
    mass: float = 9.1093837015e-31
    action: float = 1.054571817e-34

    def __post_init__(self):
        if self.name not in ("atomic", "SI", "custom"):
            raise ValueError(f"unknown unit system {self.name!r}")
        for attr in ("length", "energy", "mass", "action"):
            if not getattr(self, attr) > 0:
                raise ValueError(f"unit scale {attr} must be positive")


ATOMIC = UnitSystem()
SI = UnitSystem("SI", 1.0, 1.0, 1.0, 1.0)


class ImaginaryKError(ValueError):
    """``m^2 + q eta hbar^2 sigma^2 / (2 mu)`` is negative."""


@dataclass(frozen=True)
class HartmannModel:
    mu: float = 1.0
    e2: float = 1.0
    hbar: float = 1.0
    eta: float = 1.0
    sigma: float = 1.0
    q: float = 0.0
    beta: float = 0.0
    units: UnitSystem = field(default=ATOMIC)

    def __post_init__(self):
        for name in ("mu", "e2", "hbar", "eta", "sigma"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        for name in ("eta", "sigma"):
            v = getattr(self, name)
            if not 1.0 <= v <= 10.0:
                warnings.warn(f"{name}={v} outside the usual range [1, 10]", stacklevel=3)

    @property
    def coupling(self) -> float:
        """``eta sigma^2``; plays the role of Z."""
        return self.eta * self.sigma**2

    @property
    def inverse_bohr(self) -> float:
        """``mu eta sigma^2 e^2 / hbar^2``."""
        return self.mu * self.coupling * self.e2 / self.hbar**2

    @property
    def ring_shift(self) -> float:
        """``q eta hbar^2 sigma^2 / (2 mu)``, added to ``m^2`` inside ``k``."""
        return self.q * self.eta * self.hbar**2 * self.sigma**2 / (2.0 * self.mu)

    @property
    def k0(self) -> float:
        if self.ring_shift < 0:
            raise ImaginaryKError("k(m=0) is imaginary for q < 0")
        return math.sqrt(self.ring_shift)

    @property
    def rydberg(self) -> float:
        """``mu (eta sigma^2)^2 e^4 / (2 hbar^2)``."""
        return self.mu * self.coupling**2 * self.e2**2 / (2.0 * self.hbar**2)

    def potential_coefficients(self, printed: bool = False) -> tuple[float, float]:
        """``(C, B)`` with ``V = C / r + B / (r^2 sin^2 theta)``."""
        if printed:
            return self.coupling * self.e2, self.coupling * self.q * self.hbar**2 / (2.0 * self.mu)
        return -self.coupling * self.e2, self.hbar**2 * self.ring_shift / (2.0 * self.mu)

    @property
    def minimal_length(self) -> float:
        return self.hbar * math.sqrt(self.beta)


@dataclass(frozen=True)
class QuantumState:
    model: HartmannModel = field(repr=False)
    N: int
    n: int
    m: int
    k: float
    l: float
    n_prime: float
    a: float
    E0: float

    @property
    def label(self) -> tuple[int, int, int]:
        return (self.N, self.n, self.m)

    def __str__(self) -> str:
        return f"|{self.N}{self.n}{self.m}>"


def derive_state(model: HartmannModel, N: int, n: int, m: int) -> QuantumState:
    if N < 0 or n < 0:
        raise ValueError("N and n must be non-negative")
    if int(m) != m:
        raise ValueError("m must be an integer")
    radicand = m * m + model.ring_shift
    if radicand < 0:
        raise ImaginaryKError(f"k^2 = {radicand} < 0 for m={m}, q={model.q}")
    k = math.sqrt(radicand)
    l = n + k
    n_prime = N + l + 1.0
    a = 2.0 * model.inverse_bohr / n_prime
    E0 = -model.rydberg / n_prime**2
    return QuantumState(model, int(N), int(n), int(m), k, l, n_prime, a, E0)


def scan_states(model: HartmannModel, cap_level: int, cap_m: int) -> list[QuantumState]:
    """All states with ``N + n <= cap_level`` and ``|m| <= cap_m``, sorted by
    ``(E0, N, n, m)``."""
    if cap_level < 0 or cap_m < 0:
        raise ValueError("caps must be >= 0")
    states = [
        derive_state(model, N, level - N, m)
        for level in range(cap_level + 1)
        for N in range(level + 1)
        for m in range(-cap_m, cap_m + 1)
    ]
    return sorted(states, key=lambda st: (st.E0, st.label))


def is_degenerate(e1: float, e2: float, rtol: float = DEGENERACY_RTOL) -> bool:
    return abs(e1 - e2) <= rtol * abs(e1)


def angular_log_norm(n: int, k: float) -> float:
    return 0.5 * (
        lgamma(n + 1)
        + math.log(n + k + 0.5)
        + 2.0 * lgamma(k + 0.5)
        + 2.0 * k * math.log(2.0)
        - math.log(math.pi)
        - lgamma(n + 2.0 * k + 1.0)
    )


def angular_norm(n: int, k: float) -> float:
    """Normalization of ``(1-x^2)^(k/2) C_n^(k+1/2)(x)`` on (-1, 1)."""
    return math.exp(angular_log_norm(n, k))


def printed_angular_norm(n: int, k: float) -> float:
    """Literature normalization constant; lacks ``sqrt(n!)`` and so is only
    correct for ``n <= 1``."""
    return math.exp(
        lgamma(2 * k + 1) - lgamma(k + 1)
        + 0.5 * (math.log(2 * n + 2 * k + 1) - (2 * k + 1) * math.log(2.0) - lgamma(n + 2 * k + 1))
    )


def theta_function(n: int, k: float, x, w=None):
    """Normalized polar factor ``Theta_{n,k}(x)``, ``x = cos(theta)``.

    ``w`` may carry ``1 - x^2`` computed more accurately than from ``x``.
    """
    x = np.asarray(x, dtype=float)
    if w is None:
        w = (1.0 - x) * (1.0 + x)
    return angular_norm(n, k) * np.power(w, 0.5 * k) * gegenbauer(n, k + 0.5, x)


def radial_log_envelope(state: QuantumState, r):
    """``(log|R(r) / L(a r)|, L_N^(2l+1)(a r))``; ``R`` is their product."""
    r = np.asarray(r, dtype=float)
    N, l, npr, a = state.N, state.l, state.n_prime, state.a
    z = a * r
    log_pref = 0.5 * (
        math.log(state.model.inverse_bohr / npr) + lgamma(N + 1) - math.log(npr) - lgamma(npr + l + 1)
    )
    with np.errstate(divide="ignore"):
        logz = np.log(z)
    return log_pref + (l + 1.0) * logz - 0.5 * z, laguerre(N, 2.0 * l + 1.0, z)


def radial_function(state: QuantumState, r):
    """``R(r)`` with ``psi = R Theta Phi / r`` and ``int R^2 dr = 1``."""
    log_env, lag = radial_log_envelope(state, r)
    return np.exp(log_env) * lag


def eval_wavefunction(state: QuantumState, r, x, phi):
    r = np.asarray(r, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(r <= 0):
        raise ValueError("r must be positive")
    if np.any(np.abs(x) > 1):
        raise ValueError("|cos theta| must not exceed 1")
    Phi = np.exp(1j * state.m * np.asarray(phi, dtype=float)) / math.sqrt(2.0 * math.pi)
    return radial_function(state, r) * theta_function(state.n, state.k, x) * Phi / r


def eval_potential(model: HartmannModel, r, x, printed: bool = False):
    """Potential at ``(r, cos theta)``; see the module docstring for conventions."""
    r = np.asarray(r, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(r <= 0):
        raise ValueError("r must be positive")
    coulomb, ring = model.potential_coefficients(printed)
    w = (1.0 - x) * (1.0 + x)
    if ring != 0.0 and np.any(w <= 0):
        raise ValueError("ring term is singular on the z axis (|x| = 1)")
    out = coulomb / r
    if ring != 0.0:
        out = out + ring / (r * r * w)
    return out
