import math
from dataclasses import replace

import pytest

from rotofrict.constants import (
    CODATA2018,
    NATURAL,
    NATURAL_MOLECULE,
    MoleculeParams,
    PhysicalConstants,
    gamma0,
    level_frequency,
    load_config,
    radiation_reaction_time,
    transition_frequency,
)

# (length, time, mass, charge, temperature) exponents of each field
DIMENSIONS = {
    "hbar": (2, -1, 1, 0, 0),
    "c": (1, -1, 0, 0, 0),
    "eps0": (-3, 2, -1, 2, 0),
    "mu0": (1, 0, 1, -2, 0),
    "kB": (2, -2, 1, 0, -1),
    "m_e": (0, 0, 1, 0, 0),
    "d": (1, 0, 0, 1, 0),
    "I": (2, 0, 1, 0, 0),
    "q": (0, 0, 0, 1, 0),
    "mu": (0, 0, 1, 0, 0),
}


def rescale(obj, length=10.0, time=10.0):
    """Re-express every field in units where lengths and times read `length`/`time` times larger."""
    changes = {}
    for name in DIMENSIONS:
        if hasattr(obj, name):
            a_l, a_t, *_ = DIMENSIONS[name]
            changes[name] = getattr(obj, name) * length**a_l * time**a_t
    return replace(obj, **changes)


def test_codata_consistency():
    k = CODATA2018
    assert abs(k.mu0 * k.eps0 * k.c**2 - 1) < 1e-12
    assert all(v > 0 for v in (k.hbar, k.c, k.eps0, k.mu0, k.kB, k.m_e))


def test_constants_reject_nonpositive_and_inconsistent():
    with pytest.raises(ValueError):
        replace(CODATA2018, hbar=-1.0)
    with pytest.raises(ValueError):
        replace(CODATA2018, mu0=2 * CODATA2018.mu0)


def test_molecule_from_charges_derives_inertia():
    m = MoleculeParams.from_charges(mu=1.6e-27, d=2e-29, q=1.6e-19)
    assert m.I == 1.6e-27 * (2e-29) ** 2 / (1.6e-19) ** 2


def test_molecule_validation():
    with pytest.raises(ValueError):
        MoleculeParams.from_dipole_inertia(-1.0, 1.0)
    with pytest.raises(ValueError):
        MoleculeParams(d=1.0, I=2.0, q=1.0, mu=1.0)


def test_tau_electron_like():
    m = MoleculeParams.from_charges(mu=9.109e-31, d=1e-30, q=1.602e-19)
    assert radiation_reaction_time(m) == pytest.approx(6.266e-24, rel=1e-3)


def test_tau_scalings():
    m = MoleculeParams.from_charges(mu=2e-27, d=3e-30, q=1.6e-19)
    tau = radiation_reaction_time(m)
    assert radiation_reaction_time(MoleculeParams.from_charges(2e-27, 3e-30, 3.2e-19)) == pytest.approx(4 * tau, rel=1e-14)
    assert radiation_reaction_time(MoleculeParams.from_charges(4e-27, 3e-30, 1.6e-19)) == pytest.approx(tau / 2, rel=1e-14)


def test_gamma0_scalings(hcl_like):
    g = gamma0(hcl_like)
    doubled_d = MoleculeParams.from_dipole_inertia(2 * hcl_like.d, hcl_like.I)
    doubled_i = MoleculeParams.from_dipole_inertia(hcl_like.d, 2 * hcl_like.I)
    assert gamma0(doubled_d) == pytest.approx(4 * g, rel=1e-14)
    assert gamma0(doubled_i) == pytest.approx(g / 8, rel=1e-14)


def test_gamma0_matches_power_prefactor(hcl_like):
    k, m = CODATA2018, hcl_like
    prefactor = m.d**2 / (3 * math.pi * k.eps0 * k.c**3) * (k.hbar / m.I) ** 4
    assert k.hbar**2 * gamma0(m) / m.I == pytest.approx(prefactor, rel=1e-14)


def test_level_frequencies(hcl_like):
    w = CODATA2018.hbar / hcl_like.I
    assert level_frequency(0, hcl_like) == 0
    assert level_frequency(1, hcl_like) == pytest.approx(w, rel=1e-15)
    assert level_frequency(2, hcl_like) == pytest.approx(3 * w, rel=1e-15)
    assert level_frequency(2, hcl_like) - level_frequency(1, hcl_like) == pytest.approx(2 * w, rel=1e-14)
    with pytest.raises(ValueError):
        level_frequency(-1, hcl_like)


def test_transition_frequency_linear_in_l(hcl_like):
    base = transition_frequency(1, hcl_like)
    for l in range(1, 50):
        assert transition_frequency(l, hcl_like) / l == pytest.approx(base, rel=1e-14)
        gap = level_frequency(l, hcl_like) - level_frequency(l - 1, hcl_like)
        assert gap == pytest.approx(transition_frequency(l, hcl_like), rel=1e-12)


def test_dimensional_scaling(hcl_like):
    k2, m2 = rescale(CODATA2018), rescale(hcl_like)
    assert radiation_reaction_time(m2, k2) == pytest.approx(10 * radiation_reaction_time(hcl_like), rel=1e-12)
    assert gamma0(m2, k2) == pytest.approx(gamma0(hcl_like) / 10, rel=1e-12)
    for l in (1, 2, 7):
        assert level_frequency(l, m2, k2) == pytest.approx(level_frequency(l, hcl_like) / 10, rel=1e-12)


def test_natural_units():
    assert gamma0(NATURAL_MOLECULE, NATURAL) == pytest.approx(1.0, rel=1e-15)
    assert NATURAL.hbar / NATURAL_MOLECULE.I == 1.0


def test_load_config_defaults_to_natural():
    assert load_config() == (NATURAL_MOLECULE, NATURAL)
    assert load_config(text="# nothing here\n") == (NATURAL_MOLECULE, NATURAL)


def test_load_config_si(tmp_path):
    path = tmp_path / "rotor.cfg"
    path.write_text("units = si\ndipole_cm = 3.6e-30\ninertia_kgm2 = 2.6e-47  # HCl-ish\n", encoding="utf-8")
    m, k = load_config(path)
    assert k == CODATA2018
    assert (m.d, m.I) == (3.6e-30, 2.6e-47)


def test_load_config_charges_and_overrides():
    m, k = load_config(text="units = si\nreduced_mass_kg = 1e-27\ndipole_cm = 1e-29\ncharge_c = 1e-19\n")
    assert m.I == pytest.approx(1e-27 * 1e-58 / 1e-38, rel=1e-15)
    with pytest.raises(ValueError):
        load_config(text="units = si\ndipole_cm = 1e-29\n")
    with pytest.raises(ValueError):
        load_config(text="units = natural\ndipole_cm = 1e-29\n")
    with pytest.raises(ValueError):
        load_config(text="units = si\ncolour = blue\n")
