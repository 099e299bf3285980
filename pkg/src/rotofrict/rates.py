"""Spontaneous-emission rates between adjacent rotor levels.

Zero- and finite-temperature Markovian rates, the free-space Green-function
factor, the short-time (cutoff-regularised) decay law and the quantum
correction factor relating level power to Omega_l**4.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from .angular import averaged_dyad
from .errors import CutoffError
from .constants import (
    CODATA2018,
    MoleculeParams,
    PhysicalConstants,
    gamma0,
    transition_frequency,
)

__all__ = [
    "RegimeWarning",
    "PerturbationBreakdown",
    "CutoffSpec",
    "RateTable",
    "free_space_im_green",
    "decay_rate",
    "decay_rate_from_green",
    "bose_einstein",
    "thermal_rates",
    "rate_table",
    "short_time_beta",
    "short_time_excited_probability",
    "transition_probability_integral",
    "quantum_correction",
]


class RegimeWarning(UserWarning):
    """A closed form is being used outside the regime it was derived for."""


class PerturbationBreakdown(RegimeWarning):
    """Short-time survival probability went negative and was clamped."""


def _level(l) -> int:
    if int(l) != l or l < 0:
        raise ValueError(f"rotational level must be a non-negative integer, got {l!r}")
    return int(l)


@dataclass(frozen=True)
class CutoffSpec:
    """Ultraviolet frequency cutoff for the short-time regime."""

    omega_c: float

    def __post_init__(self):
        if not self.omega_c > 0:
            raise ValueError("omega_c must be positive")

    @classmethod
    def default(cls, k: PhysicalConstants = CODATA2018) -> "CutoffSpec":
        """Pair-creation scale 2 m_e c^2 / hbar."""
        return cls(2.0 * k.m_e * k.c**2 / k.hbar)

    def check(self, l_max: int, m: MoleculeParams, k: PhysicalConstants = CODATA2018,
              min_ratio: float = 1e3) -> None:
        """Require omega_c to exceed every modeled transition frequency by ``min_ratio``."""
        top = transition_frequency(max(l_max, 1), m, k)
        if self.omega_c < min_ratio * top:
            raise CutoffError(
                f"omega_c / omega_(l,l-1) = {self.omega_c / top:.3g} "
                f"< {min_ratio:g} at l = {l_max}"
            )


def free_space_im_green(omega: float, k: PhysicalConstants = CODATA2018) -> float:
    """Isotropic diagonal of Im G(r, r, omega) in vacuum, omega / (6 pi c)."""
    if omega < 0:
        raise ValueError("omega must be non-negative")
    return omega / (6.0 * math.pi * k.c)


def decay_rate(l: int, m: MoleculeParams, k: PhysicalConstants = CODATA2018) -> float:
    """Gamma_{l,l-1} = gamma0 * l**4 / (2l + 1); zero for l = 0."""
    l = _level(l)
    if l == 0:
        return 0.0
    return gamma0(m, k) * l**4 / (2 * l + 1)


def decay_rate_from_green(l: int, m: MoleculeParams, k: PhysicalConstants = CODATA2018) -> float:
    """Same rate assembled from (2 mu0 / hbar) omega^2 Tr[dyad . Im G]."""
    l = _level(l)
    if l == 0:
        return 0.0
    w = transition_frequency(l, m, k)
    dyad = averaged_dyad(l, m.d).matrix.real
    green = free_space_im_green(w, k) * np.eye(3)
    return 2.0 * k.mu0 / k.hbar * w**2 * float(np.trace(dyad @ green))


def bose_einstein(omega: float, T: float, k: PhysicalConstants = CODATA2018) -> float:
    """Mean photon number 1 / (exp(hbar omega / kB T) - 1); 0 at T = 0."""
    if T < 0:
        raise ValueError("temperature must be non-negative")
    if T == 0:
        return 0.0
    x = k.hbar * omega / (k.kB * T)
    if x == 0:
        return math.inf
    if x > 700.0:
        # expm1 overflows near 710; 1 / (e^x - 1) = e^-x to double precision here
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def thermal_rates(l: int, T: float, m: MoleculeParams,
                  k: PhysicalConstants = CODATA2018) -> tuple[float, float]:
    """Return (l -> l-1, l-1 -> l) rates in a bath at temperature T.

    Both branches use |omega_{l,l-1}|, so the pair obeys
    up / down = exp(-hbar omega / kB T).
    """
    l = _level(l)
    if l < 1:
        raise ValueError("thermal rates need l >= 1")
    if T < 0:
        raise ValueError("temperature must be non-negative")
    base = decay_rate(l, m, k)
    if T == 0:
        return base, 0.0
    n = bose_einstein(transition_frequency(l, m, k), T, k)
    return base * (n + 1.0), base * n


@dataclass(frozen=True)
class RateTable:
    """Adjacent-level rates for levels 0..l_max.

    ``down[l]`` is Gamma_{l,l-1} and ``up[l]`` the l-1 -> l rate; index 0
    holds zeros so arrays line up with level numbers.
    """

    l_max: int
    down: np.ndarray
    up: np.ndarray
    temperature: float
    molecule: MoleculeParams
    constants: PhysicalConstants

    def __post_init__(self):
        object.__setattr__(self, "down", np.array(self.down, dtype=float))
        object.__setattr__(self, "up", np.array(self.up, dtype=float))
        n = self.l_max + 1
        if self.down.shape != (n,) or self.up.shape != (n,):
            raise ValueError("rate arrays must have length l_max + 1")
        if np.any(self.down < 0) or np.any(self.up < 0):
            raise ValueError("rates must be non-negative")
        if self.down[0] != 0 or self.up[0] != 0:
            raise ValueError("index 0 of the rate arrays must be zero")
        if self.temperature == 0 and np.any(self.up != 0):
            raise ValueError("upward rates must vanish at zero temperature")
        self.down.setflags(write=False)
        self.up.setflags(write=False)

    def generator(self) -> np.ndarray:
        """Master-equation matrix A with dp/dt = A p.

        Birth-death chain with no transitions out of 0..l_max at either end.
        """
        n = self.l_max + 1
        A = np.zeros((n, n))
        for l in range(1, n):
            A[l - 1, l] += self.down[l]
            A[l, l] -= self.down[l]
            A[l, l - 1] += self.up[l]
            A[l - 1, l - 1] -= self.up[l]
        return A


def rate_table(l_max: int, m: MoleculeParams, k: PhysicalConstants = CODATA2018,
               T: float = 0.0) -> RateTable:
    l_max = _level(l_max)
    down = np.zeros(l_max + 1)
    up = np.zeros(l_max + 1)
    for l in range(1, l_max + 1):
        down[l], up[l] = thermal_rates(l, T, m, k)
    return RateTable(l_max, down, up, float(T), m, k)


def short_time_beta(l: int, cutoff: CutoffSpec, m: MoleculeParams,
                    k: PhysicalConstants = CODATA2018) -> float:
    """Curvature beta of the survival probability 1 - beta t^2."""
    l = _level(l)
    return (m.d**2 * cutoff.omega_c**4 / (24.0 * math.pi**2 * k.hbar * k.eps0 * k.c**3)
            * l / (2 * l + 1))


def _regime_guard(t: float, cutoff: CutoffSpec) -> None:
    if t < 0:
        raise ValueError("time must be non-negative")
    if cutoff.omega_c * t > 0.1:
        warnings.warn(
            f"short_time_regime: omega_c * t = {cutoff.omega_c * t:.3g} > 0.1",
            RegimeWarning,
            stacklevel=3,
        )


def short_time_excited_probability(l: int, t: float, cutoff: CutoffSpec, m: MoleculeParams,
                                   k: PhysicalConstants = CODATA2018) -> float:
    """Survival probability p_l(t) = 1 - beta t^2 of a freshly prepared level.

    Emits ``RegimeWarning`` once omega_c t exceeds 0.1 and
    ``PerturbationBreakdown`` (returning 0) if beta t^2 exceeds 1.
    """
    _regime_guard(t, cutoff)
    decayed = short_time_beta(l, cutoff, m, k) * t * t
    if decayed > 1.0:
        warnings.warn(
            f"perturbation_breakdown: beta t^2 = {decayed:.3g} > 1; probability clamped to 0",
            PerturbationBreakdown,
            stacklevel=2,
        )
        return 0.0
    return 1.0 - decayed


def transition_probability_integral(l: int, t: float, cutoff: CutoffSpec, m: MoleculeParams,
                                    k: PhysicalConstants = CODATA2018) -> float:
    """Total decayed probability from the sin^2-kernel frequency integral.

    Integrates omega^3 sin^2((w0 - omega) t / 2) / (w0 - omega)^2 over
    [0, omega_c] by adaptive quadrature, split at the transition frequency
    w0 where the kernel has a removable singularity.
    """
    l = _level(l)
    if t < 0:
        raise ValueError("time must be non-negative")
    if l == 0 or t == 0:
        return 0.0
    w0 = transition_frequency(l, m, k)
    wc = cutoff.omega_c
    half_t = 0.5 * t

    def integrand(w):
        # sin^2(x t/2) / x^2 = (t/2)^2 sinc^2(x t / 2 pi) in numpy's convention
        return w**3 * half_t**2 * np.sinc((w0 - w) * half_t / math.pi) ** 2

    # scale to the cutoff so quad works on O(1) numbers
    def scaled(u):
        return integrand(u * wc) * wc

    pieces = [(0.0, min(w0 / wc, 1.0)), (min(w0 / wc, 1.0), 1.0)]
    total = 0.0
    for lo, hi in pieces:
        if hi > lo:
            value, _ = integrate.quad(scaled, lo, hi, epsabs=0.0, epsrel=1e-12, limit=400)
            total += value
    pref = 2.0 * k.mu0 * m.d**2 / (3.0 * math.pi**2 * k.hbar * k.c) * l / (2 * l + 1)
    return pref * total


def quantum_correction(l: int) -> float:
    """Ratio l^3 / ((l + 1)^2 (l + 1/2)), evaluated exactly before rounding."""
    l = _level(l)
    return float(Fraction(2 * l**3, (l + 1) ** 2 * (2 * l + 1)))
