"""Independent reference implementations used only by the tests.

Nothing here imports the package's own evaluation paths.
"""

from __future__ import annotations

import decimal
import math

import numpy as np


def _m_values(j):
    return [j - i for i in range(int(round(2 * j)) + 1)]


def clebsch_gordan_table(j1, j2):
    """<j1 m1 j2 m2 | J M> for all J, M by lowering from stretched states.

    Builds each multiplet in the product basis: the top state of every J is
    orthogonalised against the higher multiplets with the Condon-Shortley
    phase (coefficient with m1 = j1 positive), then J_- walks down in M.
    """
    basis = [(m1, m2) for m1 in _m_values(j1) for m2 in _m_values(j2)]
    index = {b: i for i, b in enumerate(basis)}
    n = len(basis)

    def lower(vec):
        out = np.zeros(n)
        for (m1, m2), i in index.items():
            c = vec[i]
            if c == 0:
                continue
            if m1 > -j1:
                out[index[(m1 - 1, m2)]] += c * math.sqrt(j1 * (j1 + 1) - m1 * (m1 - 1))
            if m2 > -j2:
                out[index[(m1, m2 - 1)]] += c * math.sqrt(j2 * (j2 + 1) - m2 * (m2 - 1))
        return out

    states = {}  # (J, M) -> vector
    J = j1 + j2
    while J >= abs(j1 - j2) - 1e-9:
        sub = [i for (m1, m2), i in index.items() if abs(m1 + m2 - J) < 1e-9]
        # Gram-Schmidt against the already built states with the same M
        top = None
        for i in sub:
            trial = np.zeros(n)
            trial[i] = 1.0
            for (Jp, Mp), v in states.items():
                if abs(Mp - J) < 1e-9:
                    trial -= (v @ trial) * v
            if np.linalg.norm(trial) > 1e-8:
                top = trial / np.linalg.norm(trial)
                break
        lead = index[(j1, J - j1)]
        if top[lead] < 0:
            top = -top
        states[(J, J)] = top
        vec, M = top, J
        while M > -J + 1e-9:
            vec = lower(vec)
            vec /= np.linalg.norm(vec)
            M -= 1
            states[(J, M)] = vec
        J -= 1

    def coefficient(m1, m2, J, M):
        if (J, M) not in states or (m1, m2) not in index:
            return 0.0
        return float(states[(J, M)][index[(m1, m2)]])

    return coefficient


def wigner_3j_from_cg(j1, j2, j3, m1, m2, m3):
    cg = clebsch_gordan_table(j1, j2)
    phase = (-1) ** int(round(j1 - j2 - m3))
    return phase / math.sqrt(2 * j3 + 1) * cg(m1, m2, j3, -m3)


def cascade_three_level(t, g21, g10):
    """Hand-integrated populations (p0, p1, p2) starting from l = 2."""
    p2 = np.exp(-g21 * t)
    p1 = g21 / (g21 - g10) * (np.exp(-g10 * t) - np.exp(-g21 * t))
    return 1.0 - p1 - p2, p1, p2


def bose_einstein(x):
    """Mean occupation at hbar omega / kB T = x, straight from the definition.

    Evaluated in 40-digit decimal arithmetic so the subtraction does not
    cancel at small x.
    """
    with decimal.localcontext() as ctx:
        ctx.prec = 40
        return float(1 / (decimal.Decimal(x).exp() - 1))
