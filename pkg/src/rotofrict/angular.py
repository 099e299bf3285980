"""Angular-momentum algebra for the rigid rotor.

Wigner 3j symbols are evaluated with the Racah sum in exact rational
arithmetic. Transition dipoles between rotor eigenstates come in two
flavours: the closed form built from the f1/f2/f3 factors, and a direct
Gauss-Legendre x trapezoid quadrature over explicit spherical harmonics that
serves as an independent check on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import QuadratureError

__all__ = [
    "wigner_3j",
    "spherical_harmonic",
    "TransitionDipole",
    "DipoleDyad",
    "QuadratureGrid",
    "QuadratureError",
    "transition_dipole",
    "transition_dipole_quadrature",
    "averaged_dyad",
    "summed_dyad",
]


def _twice(x) -> int:
    """Return 2x as an int, rejecting anything that is not a half-integer."""
    doubled = 2 * x
    if doubled != int(doubled):
        raise ValueError(f"{x!r} is not an integer or half-integer")
    return int(doubled)


def wigner_3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3j symbol (j1 j2 j3; m1 m2 m3).

    Arguments may be integers, half-integers (as floats or Fractions).
    Labels violating |m| <= j or mixing integer j with half-integer m raise
    ``ValueError``; valid labels that break the triangle rule or
    m1 + m2 + m3 = 0 give 0.

    >>> round(wigner_3j(1, 1, 0, 0, 0, 0), 12)
    -0.57735026919
    """
    J = [_twice(j1), _twice(j2), _twice(j3)]
    M = [_twice(m1), _twice(m2), _twice(m3)]
    for j, m in zip(J, M):
        if j < 0:
            raise ValueError("angular momenta must be non-negative")
        if abs(m) > j:
            raise ValueError(f"|m| > j for j={j / 2}, m={m / 2}")
        if (j - m) % 2:
            raise ValueError(f"j={j / 2} and m={m / 2} differ by a non-integer")

    if sum(M) != 0:
        return 0.0
    a, b, c = J
    if c < abs(a - b) or c > a + b or (a + b + c) % 2:
        return 0.0

    a2, b2, c2 = a, b, c  # doubled labels; the halved combinations below are integral
    ma, mb, mc = M
    fact = math.factorial
    triangle = Fraction(
        fact((a2 + b2 - c2) // 2) * fact((a2 - b2 + c2) // 2) * fact((-a2 + b2 + c2) // 2),
        fact((a2 + b2 + c2) // 2 + 1),
    )
    prod = 1
    for j, m in zip(J, M):
        prod *= fact((j + m) // 2) * fact((j - m) // 2)

    kmin = max(0, (b2 - c2 - ma) // 2, (a2 - c2 + mb) // 2)
    kmax = min((a2 + b2 - c2) // 2, (a2 - ma) // 2, (b2 + mb) // 2)
    total = Fraction(0)
    for k in range(kmin, kmax + 1):
        denom = (
            fact(k)
            * fact((c2 - b2 + ma) // 2 + k)
            * fact((c2 - a2 - mb) // 2 + k)
            * fact((a2 + b2 - c2) // 2 - k)
            * fact((a2 - ma) // 2 - k)
            * fact((b2 + mb) // 2 - k)
        )
        total += Fraction((-1) ** k, denom)
    if total == 0:
        return 0.0

    phase = -1 if ((a2 - b2 - mc) // 2) % 2 else 1
    sign = phase * (1 if total > 0 else -1)
    return sign * math.sqrt(float(triangle * prod * total * total))


def _legendre_normalized(l: int, x: np.ndarray) -> np.ndarray:
    """Orthonormal associated Legendre functions for m = 0..l at cos(theta) = x.

    Rows are indexed by m and include the Condon-Shortley phase, so that
    Y_lm = row[m] * exp(i m phi).
    """
    x = np.asarray(x, dtype=float)
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    out = np.zeros((l + 1,) + x.shape)
    for m in range(l + 1):
        # P_mm, then the upward recurrence in degree to reach P_lm
        pmm = np.full_like(x, math.sqrt(1.0 / (4.0 * math.pi)))
        for i in range(1, m + 1):
            pmm = -pmm * s * math.sqrt((2 * i + 1) / (2.0 * i))
        if l == m:
            out[m] = pmm
            continue
        prev, cur = pmm, x * math.sqrt(2 * m + 3) * pmm
        for n in range(m + 2, l + 1):
            a = math.sqrt((4.0 * n * n - 1.0) / (n * n - m * m))
            b = math.sqrt(((n - 1.0) ** 2 - m * m) / (4.0 * (n - 1.0) ** 2 - 1.0))
            prev, cur = cur, a * (x * cur - b * prev)
        out[m] = cur
    return out


def spherical_harmonic(l: int, m: int, theta, phi) -> np.ndarray:
    """Y_lm(theta, phi) with the Condon-Shortley phase convention."""
    if l < 0 or abs(m) > l:
        raise ValueError(f"invalid (l, m) = ({l}, {m})")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    plm = _legendre_normalized(l, np.cos(theta))[abs(m)]
    y = plm * np.exp(1j * abs(m) * phi)
    if m < 0:
        y = (-1) ** abs(m) * np.conj(y)
    return y


def _check_state(l, m):
    if int(l) != l or l < 0:
        raise ValueError(f"l must be a non-negative integer, got {l!r}")
    if int(m) != m or abs(m) > l:
        raise ValueError(f"invalid magnetic number m={m!r} for l={l!r}")
    return int(l), int(m)


@dataclass(frozen=True)
class TransitionDipole:
    """Matrix element <l m| d e_r |l' m'> as a Cartesian complex 3-vector."""

    l: int
    m: int
    lp: int
    mp: int
    vector: np.ndarray

    def conj(self) -> "TransitionDipole":
        return TransitionDipole(self.lp, self.mp, self.l, self.m, np.conj(self.vector))


@dataclass(frozen=True)
class DipoleDyad:
    """Rotationally averaged dyad for the l -> l-1 transition."""

    l: int
    matrix: np.ndarray

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def anisotropy(self) -> float:
        """Largest off-diagonal magnitude."""
        off = self.matrix - np.diag(np.diag(self.matrix))
        return float(np.max(np.abs(off)))


def _downward(l: int, m: int, mp: int, d: float) -> np.ndarray:
    # <l m| d e_r |l-1 m'>; f1, f2, f3 take m' as their argument
    f1 = math.sqrt((l - mp) * (l - mp + 1))
    f2 = math.sqrt(max((l + mp) * (l + mp + 1), 0))
    f3 = math.sqrt(max((l - mp) * (l + mp), 0))
    pref = 0.5 * d * (-1) ** (m - mp) / math.sqrt((2 * l + 1) * (2 * l - 1))
    vec = np.zeros(3, dtype=complex)
    if mp == m + 1:
        vec[0] = -f1
        vec[1] = -1j * f1
    elif mp == m - 1:
        vec[0] = f2
        vec[1] = -1j * f2
    elif mp == m:
        vec[2] = 2 * f3
    return pref * vec


def transition_dipole(l, m, lp, mp, d: float = 1.0) -> TransitionDipole:
    """Closed-form transition dipole <l m| d e_r |l' m'>.

    Only l' = l +/- 1 couples; any other pair returns the zero vector. The
    upward element is the complex conjugate of the matching downward one.
    """
    l, m = _check_state(l, m)
    lp, mp = _check_state(lp, mp)
    if d <= 0:
        raise ValueError("dipole norm must be positive")
    if lp == l - 1:
        vec = _downward(l, m, mp, d)
    elif lp == l + 1:
        vec = np.conj(_downward(lp, mp, m, d))
    else:
        vec = np.zeros(3, dtype=complex)
    return TransitionDipole(l, m, lp, mp, vec)


@dataclass(frozen=True)
class QuadratureGrid:
    """Gauss-Legendre nodes in cos(theta) times a uniform trapezoid in phi."""

    n_theta: int = 64
    n_phi: int = 64
    tol: float = 1e-8

    def __post_init__(self):
        if self.n_theta < 2 or self.n_phi < 2:
            raise ValueError("quadrature needs at least two nodes per angle")


@lru_cache(maxsize=256)
def _grid(n_theta: int, n_phi: int):
    x, w = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    s = np.sqrt(1.0 - x * x)
    rhat = np.stack([
        np.outer(s, np.cos(phi)),
        np.outer(s, np.sin(phi)),
        np.outer(x, np.ones_like(phi)),
    ])
    weights = np.outer(w, np.full(n_phi, 2.0 * np.pi / n_phi))
    return x, phi, rhat, weights


@lru_cache(maxsize=1024)
def _ylm_on_grid(l: int, n_theta: int, n_phi: int) -> np.ndarray:
    """All Y_lm for m = -l..l on the grid; index [m + l, i_theta, i_phi]."""
    x, phi, _, _ = _grid(n_theta, n_phi)
    plm = _legendre_normalized(l, x)
    table = np.empty((2 * l + 1, n_theta, n_phi), dtype=complex)
    for m in range(0, l + 1):
        ym = plm[m][:, None] * np.exp(1j * m * phi)[None, :]
        table[l + m] = ym
        table[l - m] = (-1) ** m * np.conj(ym)
    return table


def _integrate(l, m, lp, mp, d, n_theta, n_phi) -> np.ndarray:
    _, _, rhat, weights = _grid(n_theta, n_phi)
    ya = _ylm_on_grid(l, n_theta, n_phi)[m + l]
    yb = _ylm_on_grid(lp, n_theta, n_phi)[mp + lp]
    kernel = np.conj(ya) * yb * weights
    return d * np.einsum("kij,ij->k", rhat, kernel)


def transition_dipole_quadrature(
    l, m, lp, mp, d: float = 1.0, grid: QuadratureGrid = QuadratureGrid()
) -> TransitionDipole:
    """Transition dipole by direct integration over the unit sphere.

    The error estimate compares the result with a half-resolution grid;
    ``QuadratureError`` is raised when it exceeds ``grid.tol`` (in units of d).
    """
    l, m = _check_state(l, m)
    lp, mp = _check_state(lp, mp)
    if d <= 0:
        raise ValueError("dipole norm must be positive")
    fine = _integrate(l, m, lp, mp, d, grid.n_theta, grid.n_phi)
    coarse = _integrate(l, m, lp, mp, d, max(grid.n_theta // 2, 2), max(grid.n_phi // 2, 2))
    err = float(np.max(np.abs(fine - coarse))) / d
    if err > grid.tol:
        raise QuadratureError(
            f"under-resolved grid for (l={l}, m={m}) -> (l'={lp}, m'={mp}): "
            f"estimated error {err:.3e} > {grid.tol:.1e}"
        )
    return TransitionDipole(l, m, lp, mp, fine)


def averaged_dyad(l, d: float = 1.0) -> DipoleDyad:
    """Closed-form averaged dyad d^2 l / (3 (2l + 1)) * identity."""
    if int(l) != l or l < 0:
        raise ValueError(f"l must be a non-negative integer, got {l!r}")
    l = int(l)
    if l == 0:
        return DipoleDyad(0, np.zeros((3, 3), dtype=complex))
    return DipoleDyad(l, d * d * l / (3.0 * (2 * l + 1)) * np.eye(3, dtype=complex))


def summed_dyad(l, d: float = 1.0, element=transition_dipole) -> DipoleDyad:
    """Brute-force (1/(2l+1)) sum over m, m' of d_{l,m,l-1,m'} (x) conj(same).

    ``element`` is any callable with the signature of :func:`transition_dipole`,
    so the quadrature oracle can be substituted.
    """
    l = int(l)
    if l < 1:
        return DipoleDyad(0, np.zeros((3, 3), dtype=complex))
    acc = np.zeros((3, 3), dtype=complex)
    for m in range(-l, l + 1):
        for mp in range(-(l - 1), l):
            v = element(l, m, l - 1, mp, d).vector
            acc += np.outer(v, np.conj(v))
    return DipoleDyad(l, acc / (2 * l + 1))
