"""Physical constants and rotor parameters.

Defaults are the CODATA 2018 recommended values, hard-coded so that results
do not drift with the installed scipy version.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

__all__ = [
    "PhysicalConstants",
    "MoleculeParams",
    "CODATA2018",
    "NATURAL",
    "NATURAL_MOLECULE",
    "ELEMENTARY_CHARGE",
    "radiation_reaction_time",
    "gamma0",
    "level_frequency",
    "transition_frequency",
    "angular_velocity",
    "load_config",
]

ELEMENTARY_CHARGE = 1.602176634e-19  # C, exact


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants consumed by every other module.

    The natural-unit set (``NATURAL``) pairs with ``NATURAL_MOLECULE`` so
    that hbar/I = 1 and the base rate gamma0 = 1.
    """

    hbar: float = 1.054571817e-34
    c: float = 299792458.0
    eps0: float = 8.8541878128e-12
    mu0: float = 1.25663706212e-6
    kB: float = 1.380649e-23
    m_e: float = 9.1093837015e-31
    natural: bool = field(default=False, compare=False)

    def __post_init__(self):
        for name in ("hbar", "c", "eps0", "mu0", "kB", "m_e"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        consistency = self.mu0 * self.eps0 * self.c**2
        if abs(consistency - 1.0) > 1e-12:
            raise ValueError(
                f"mu0*eps0*c^2 = {consistency!r}; electromagnetic constants are inconsistent"
            )


@dataclass(frozen=True)
class MoleculeParams:
    """Rigid polar rotor: dipole norm d, inertia I, pole charge q, reduced mass mu.

    The four values must satisfy ``I = mu * d**2 / q**2``. Use
    :meth:`from_charges` when the classical parameters are known, or
    :meth:`from_dipole_inertia` for spectroscopic input.
    """

    d: float
    I: float
    q: float
    mu: float

    def __post_init__(self):
        for name in ("d", "I", "q", "mu"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        implied = self.mu * self.d**2 / self.q**2
        if abs(implied - self.I) > 1e-12 * self.I:
            raise ValueError(
                f"inconsistent rotor: mu*d^2/q^2 = {implied!r} but I = {self.I!r}"
            )

    @classmethod
    def from_charges(cls, mu: float, d: float, q: float) -> "MoleculeParams":
        if mu <= 0 or d <= 0 or q <= 0:
            raise ValueError("mu, d and q must be positive")
        return cls(d=d, I=mu * d**2 / q**2, q=q, mu=mu)

    @classmethod
    def from_dipole_inertia(
        cls, d: float, I: float, q: float = ELEMENTARY_CHARGE
    ) -> "MoleculeParams":
        """Build from (d, I); the reduced mass is inferred from the charge."""
        if d <= 0 or I <= 0 or q <= 0:
            raise ValueError("d, I and q must be positive")
        return cls(d=d, I=I, q=q, mu=I * q**2 / d**2)


CODATA2018 = PhysicalConstants()

# hbar = I = 1 and d^2 / (3 pi eps0 c^3) = 1 give gamma0 = 1.
# m_e is chosen so the UV cutoff 2 m_e c^2 / hbar sits at 1e9 hbar/I.
NATURAL = PhysicalConstants(
    hbar=1.0,
    c=1.0,
    eps0=1.0 / (3.0 * math.pi),
    mu0=3.0 * math.pi,
    kB=1.0,
    m_e=5.0e8,
    natural=True,
)
NATURAL_MOLECULE = MoleculeParams(d=1.0, I=1.0, q=1.0, mu=1.0)


def radiation_reaction_time(m: MoleculeParams, k: PhysicalConstants = CODATA2018) -> float:
    """tau = q^2 / (6 pi eps0 mu c^3), in seconds."""
    return m.q**2 / (6.0 * math.pi * k.eps0 * m.mu * k.c**3)


def gamma0(m: MoleculeParams, k: PhysicalConstants = CODATA2018) -> float:
    """Base decay rate hbar^2 d^2 / (3 pi eps0 I^3 c^3), in 1/s."""
    return k.hbar**2 * m.d**2 / (3.0 * math.pi * k.eps0 * m.I**3 * k.c**3)


def _check_level(l) -> int:
    if int(l) != l or l < 0:
        raise ValueError(f"rotational level must be a non-negative integer, got {l!r}")
    return int(l)


def level_frequency(l: int, m: MoleculeParams, k: PhysicalConstants = CODATA2018) -> float:
    """Angular frequency E_l / hbar = hbar l (l + 1) / (2 I)."""
    l = _check_level(l)
    return k.hbar * l * (l + 1) / (2.0 * m.I)


def transition_frequency(l: int, m: MoleculeParams, k: PhysicalConstants = CODATA2018) -> float:
    """omega_{l,l-1} = hbar l / I; zero for the ground state."""
    l = _check_level(l)
    return k.hbar * l / m.I


def angular_velocity(l: int, m: MoleculeParams, k: PhysicalConstants = CODATA2018) -> float:
    """Quantized rotation speed Omega_l = (hbar / I) sqrt(l (l + 1))."""
    l = _check_level(l)
    return k.hbar / m.I * math.sqrt(l * (l + 1))


_MOLECULE_KEYS = ("dipole_cm", "inertia_kgm2", "charge_c", "reduced_mass_kg")
_CONSTANT_KEYS = ("hbar", "c", "eps0", "mu0", "kB", "m_e")


def load_config(path: str | Path | None = None, text: str | None = None):
    """Read ``key = value`` configuration and return ``(molecule, constants)``.

    Recognised keys are ``units`` (``si`` or ``natural``), ``dipole_cm``,
    ``inertia_kgm2``, ``charge_c``, ``reduced_mass_kg`` and optional
    overrides of the constants (``hbar``, ``c``, ``eps0``, ``mu0``, ``kB``,
    ``m_e``). Lines starting with ``#`` are comments. An absent or empty
    configuration selects natural units.

    In SI mode the rotor is given either by (dipole_cm, inertia_kgm2[,
    charge_c]) or by (reduced_mass_kg, dipole_cm, charge_c).
    """
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str
    parser.read_string("[rotor]\n" + (text or ""))
    raw = {key: value.strip().strip('"').strip("'") for key, value in parser["rotor"].items()}

    known = set(_MOLECULE_KEYS) | set(_CONSTANT_KEYS) | {"units"}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ValueError(f"unknown configuration keys: {', '.join(unknown)}")

    units = raw.get("units", "natural").lower()
    if units not in ("si", "natural"):
        raise ValueError(f"units must be 'si' or 'natural', got {units!r}")

    try:
        numbers = {key: float(value) for key, value in raw.items() if key != "units"}
    except ValueError as exc:
        raise ValueError(f"non-numeric configuration value: {exc}") from None

    if units == "natural":
        if any(key in numbers for key in _MOLECULE_KEYS + _CONSTANT_KEYS):
            raise ValueError("natural units fix the rotor and constants; remove numeric keys")
        return NATURAL_MOLECULE, NATURAL

    constants = replace(CODATA2018, **{key: numbers[key] for key in _CONSTANT_KEYS if key in numbers})
    d = numbers.get("dipole_cm")
    if d is None:
        raise ValueError("SI configuration requires dipole_cm")
    if "inertia_kgm2" in numbers:
        q = numbers.get("charge_c", ELEMENTARY_CHARGE)
        molecule = MoleculeParams.from_dipole_inertia(d, numbers["inertia_kgm2"], q)
        if "reduced_mass_kg" in numbers:
            # all four given: let the constructor enforce consistency
            molecule = MoleculeParams(d, numbers["inertia_kgm2"], q, numbers["reduced_mass_kg"])
    elif "reduced_mass_kg" in numbers and "charge_c" in numbers:
        molecule = MoleculeParams.from_charges(numbers["reduced_mass_kg"], d, numbers["charge_c"])
    else:
        raise ValueError("SI configuration requires inertia_kgm2 or (reduced_mass_kg, charge_c)")
    return molecule, constants
