"""Classical radiation-reaction spin-down of a rotating dipole.

The rotor obeys dOmega/dt = -tau Omega^3, which has the closed form
Omega(t) = Omega0 / sqrt(1 + 2 Omega0^2 tau t). The radiated power is
d^2 Omega^4 / (6 pi eps0 c^3), the same number Larmor's formula gives for an
effective single charge q accelerated at Omega^2 d / q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .constants import (
    CODATA2018,
    MoleculeParams,
    PhysicalConstants,
    transition_frequency,
)
from .rates import decay_rate

__all__ = [
    "ClassicalState",
    "ClassicalTrajectory",
    "classical_evolve",
    "classical_omega",
    "classical_power",
    "larmor_power",
    "larmor_acceleration",
    "level_power",
    "classical_limit_ratio",
]


@dataclass(frozen=True)
class ClassicalState:
    t: float
    omega: float

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError("angular velocity must be non-negative")


@dataclass(frozen=True)
class ClassicalTrajectory:
    """Closed-form and integrated angular velocity on the same grid."""

    times: np.ndarray
    omega: np.ndarray
    omega_rk: np.ndarray
    omega0: float
    tau: float

    @property
    def states(self) -> list[ClassicalState]:
        return [ClassicalState(t, w) for t, w in zip(self.times, self.omega)]

    def max_relative_deviation(self) -> float:
        return float(np.max(np.abs(self.omega_rk / self.omega - 1.0)))


def classical_omega(omega0: float, tau: float, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return omega0 / np.sqrt(1.0 + 2.0 * omega0 * omega0 * tau * t)


def classical_evolve(omega0: float, tau: float, t_grid, rtol: float = 1e-12) -> ClassicalTrajectory:
    """Spin-down from ``omega0`` sampled on ``t_grid`` (seconds, starting at 0).

    The numerical solution is integrated in the scaled variables
    u = Omega / Omega0, s = Omega0^2 tau t so that the tolerances are
    independent of the unit system.
    """
    if omega0 <= 0 or tau <= 0:
        raise ValueError("omega0 and tau must be positive")
    times = np.asarray(t_grid, dtype=float)
    if times[0] != 0.0 or np.any(np.diff(times) <= 0):
        raise ValueError("time grid must start at 0 and increase strictly")
    scale = omega0 * omega0 * tau
    s = times * scale
    sol = integrate.solve_ivp(
        lambda _, u: -u**3, (0.0, s[-1]), [1.0],
        method="DOP853", t_eval=s, rtol=rtol, atol=1e-300,
    )
    if sol.status != 0:
        raise RuntimeError(f"classical integration failed: {sol.message}")
    return ClassicalTrajectory(
        times=times,
        omega=classical_omega(omega0, tau, times),
        omega_rk=omega0 * sol.y[0],
        omega0=omega0,
        tau=tau,
    )


def classical_power(omega, m: MoleculeParams, k: PhysicalConstants = CODATA2018):
    """Radiated power d^2 Omega^4 / (6 pi eps0 c^3) of the rotating dipole."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("angular velocity must be non-negative")
    out = m.d**2 * omega**4 / (6.0 * math.pi * k.eps0 * k.c**3)
    return float(out) if out.ndim == 0 else out


def larmor_power(accel_mag, charge: float, k: PhysicalConstants = CODATA2018):
    """Larmor power (2/3) q^2 |a|^2 / (4 pi eps0 c^3) of one nonrelativistic charge."""
    accel_mag = np.asarray(accel_mag, dtype=float)
    if np.any(accel_mag < 0):
        raise ValueError("acceleration magnitude must be non-negative")
    out = 2.0 / 3.0 * charge**2 / (4.0 * math.pi * k.eps0 * k.c**3) * accel_mag**2
    return float(out) if out.ndim == 0 else out


def larmor_acceleration(omega, m: MoleculeParams):
    """Effective single-charge acceleration Omega^2 d / q of the rotating dipole."""
    return np.asarray(omega, dtype=float) ** 2 * m.d / m.q


def level_power(l: int, m: MoleculeParams, k: PhysicalConstants = CODATA2018) -> float:
    """Photon power hbar omega_{l,l-1} Gamma_{l,l-1} of a rotor in level l."""
    return k.hbar * transition_frequency(l, m, k) * decay_rate(l, m, k)


def classical_limit_ratio(l: int, m: MoleculeParams, k: PhysicalConstants = CODATA2018) -> float:
    """Quantum level power over the classical power at L = hbar l.

    Equals 2l / (2l + 1) and tends to 1 as l grows.
    """
    if int(l) != l or l < 1:
        raise ValueError("classical limit needs l >= 1")
    omega = k.hbar * l / m.I
    return level_power(l, m, k) / classical_power(omega, m, k)
