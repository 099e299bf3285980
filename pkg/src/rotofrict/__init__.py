"""Rotational quantum friction of a polar rotor via spontaneous emission."""

from .constants import (
    CODATA2018,
    NATURAL,
    NATURAL_MOLECULE,
    MoleculeParams,
    PhysicalConstants,
    gamma0,
    level_frequency,
    radiation_reaction_time,
)
from .dynamics import PopulationState, Trajectory, evolve, three_level_reference
from .rates import RateTable, decay_rate, rate_table

__version__ = "0.1.0"
