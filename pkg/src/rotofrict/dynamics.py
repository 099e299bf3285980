"""Markovian population dynamics of the rotor and the observables built on it.

Three propagators are available:

``cascade``
    Closed-form sum of exponentials for the zero-temperature chain, where
    the generator is bidiagonal with distinct eigenvalues -Gamma_l.
``rk``
    Adaptive explicit Runge-Kutta (Dormand-Prince 5(4)) on dp/dt = A p.
``expm``
    Interval-by-interval matrix exponential; valid at any temperature.

``auto`` picks ``cascade`` at T = 0 (falling back to ``rk`` for nearly
degenerate rates) and ``expm`` otherwise.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import integrate, linalg

from .constants import (
    CODATA2018,
    MoleculeParams,
    PhysicalConstants,
    angular_velocity,
    gamma0,
    level_frequency,
)
from .errors import StiffnessError, TruncationError
from .rates import CutoffSpec, RateTable, _regime_guard, decay_rate, rate_table, short_time_beta

__all__ = [
    "PopulationState",
    "Trajectory",
    "TruncationError",
    "StiffnessError",
    "time_grid",
    "pure_state",
    "evolve",
    "stationary_state",
    "level_energies",
    "level_velocities",
    "omega_observable",
    "energy_observable",
    "power_observable",
    "torque_observable",
    "markovian_torque_pure",
    "short_time_torque",
    "three_level_reference",
]

log = logging.getLogger(__name__)

NORM_TOL = 1e-10
# integration noise below this is clipped (and logged); anything larger is an error
NEG_TOL = 1e-10
TAIL_TOL = 1e-8
DEGENERACY_TOL = 1e-9
CASCADE_TOL = 1e-10
RK_RTOL = 1e-10
RK_ATOL = 1e-12


def _clip_small_negatives(p: np.ndarray, where: str) -> np.ndarray:
    low = p.min()
    if low < -NEG_TOL:
        raise ValueError(f"negative population {low:.3e} at {where}")
    if low < 0:
        log.info("clipped negative population %.3e at %s", low, where)
        p = np.clip(p, 0.0, None)
    return p


@dataclass(frozen=True)
class PopulationState:
    """Level populations p_0..p_lmax at time t."""

    t: float
    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("populations must be a non-empty vector")
        total = p.sum()
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"populations sum to {total!r}, not 1")
        p = _clip_small_negatives(p, f"t={self.t}")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def l_max(self) -> int:
        return self.p.size - 1


def pure_state(l: int, l_max: int, t: float = 0.0) -> PopulationState:
    if not 0 <= l <= l_max:
        raise ValueError(f"initial level {l} outside 0..{l_max}")
    p = np.zeros(l_max + 1)
    p[l] = 1.0
    return PopulationState(t, p)


def time_grid(t_max: float, n: int, kind: str = "geometric", t_min: float | None = None) -> np.ndarray:
    """Time samples starting at 0.

    ``geometric`` places n - 1 log-spaced points between ``t_min`` (default
    t_max * 1e-6) and ``t_max`` after the leading zero.
    """
    if t_max <= 0 or n < 2:
        raise ValueError("need t_max > 0 and at least two points")
    if kind == "linear":
        return np.linspace(0.0, t_max, n)
    if kind == "geometric":
        t_min = t_max * 1e-6 if t_min is None else t_min
        if not 0 < t_min < t_max:
            raise ValueError("geometric grid needs 0 < t_min < t_max")
        return np.concatenate([[0.0], np.geomspace(t_min, t_max, n - 1)])
    raise ValueError(f"unknown grid kind {kind!r}")


def level_energies(l_max: int, m: MoleculeParams, k: PhysicalConstants = CODATA2018) -> np.ndarray:
    return np.array([k.hbar * level_frequency(l, m, k) for l in range(l_max + 1)])


def level_velocities(l_max: int, m: MoleculeParams, k: PhysicalConstants = CODATA2018) -> np.ndarray:
    return np.array([angular_velocity(l, m, k) for l in range(l_max + 1)])


@dataclass(frozen=True)
class Trajectory:
    """Populations on a time grid with their derived observables.

    ``omega`` is sum p_l Omega_l, ``omega4`` is sum p_l Omega_l**4 (not the
    fourth power of ``omega``). ``power`` and ``torque`` use dp/dt taken from
    the master-equation right-hand side.
    """

    times: np.ndarray
    populations: np.ndarray
    omega: np.ndarray
    omega4: np.ndarray
    energy: np.ndarray
    power: np.ndarray
    torque: np.ndarray
    rates: RateTable | None = None
    engine: str = ""

    @property
    def states(self) -> list[PopulationState]:
        return [PopulationState(t, p) for t, p in zip(self.times, self.populations)]

    @property
    def l_max(self) -> int:
        return self.populations.shape[1] - 1


def _observables(P: np.ndarray, rates: RateTable):
    m, k = rates.molecule, rates.constants
    E_l = level_energies(rates.l_max, m, k)
    W_l = level_velocities(rates.l_max, m, k)
    Pdot = P @ rates.generator().T
    return dict(
        omega=P @ W_l,
        omega4=P @ W_l**4,
        energy=P @ E_l,
        power=-(Pdot @ E_l),
        torque=m.I * (Pdot @ W_l),
    )


def _cascade(p0: np.ndarray, down: np.ndarray, times: np.ndarray) -> np.ndarray | None:
    """Sum-of-exponentials solution; ``None`` if rounding would exceed CASCADE_TOL.

    The coefficients alternate in sign and grow quickly with l_max, so the
    sum is formed in extended precision.
    """
    L = p0.size - 1
    g = down.astype(np.longdouble)
    C = np.zeros((L + 1, L + 1), dtype=np.longdouble)
    C[L, L] = p0[L]
    for l in range(L - 1, -1, -1):
        for k in range(l + 1, L + 1):
            C[l, k] = g[l + 1] * C[l + 1, k] / (g[l] - g[k])
        C[l, l] = p0[l] - C[l, l + 1:].sum()
    amplification = float(np.abs(C).sum(axis=1).max())
    if amplification * float(np.finfo(np.longdouble).eps) > CASCADE_TOL:
        return None
    modes = np.exp(-np.outer(g, times.astype(np.longdouble)))
    return (C @ modes).T.astype(float)


def _nearly_degenerate(down: np.ndarray, scale: float) -> bool:
    d = np.sort(down)
    return bool(np.any(np.diff(d) < DEGENERACY_TOL * scale))


def _rk(p0: np.ndarray, A: np.ndarray, times: np.ndarray) -> np.ndarray:
    sol = integrate.solve_ivp(
        lambda t, p: A @ p,
        (times[0], times[-1]),
        p0,
        method="RK45",
        t_eval=times,
        rtol=RK_RTOL,
        atol=RK_ATOL,
    )
    if sol.status != 0:
        raise StiffnessError(f"stiffness guard: integrator stopped: {sol.message}")
    return sol.y.T


def _expm(p0: np.ndarray, A: np.ndarray, times: np.ndarray) -> np.ndarray:
    out = np.empty((times.size, p0.size))
    out[0] = p0
    p = p0
    for i in range(1, times.size):
        p = linalg.expm(A * (times[i] - times[i - 1])) @ p
        out[i] = p
    return out


def evolve(initial: PopulationState, rates: RateTable, t_grid, engine: str = "auto") -> Trajectory:
    """Propagate level populations through ``t_grid`` under ``rates``.

    Raises ``TruncationError`` when, at T > 0, the top level carries more
    than 1e-8 of the probability at any grid time.
    """
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or times.size < 1 or times[0] != 0.0:
        raise ValueError("time grid must start at 0")
    if np.any(np.diff(times) <= 0):
        raise ValueError("time grid must be strictly increasing")
    if initial.l_max != rates.l_max:
        raise ValueError("initial state and rate table disagree on l_max")
    p0 = initial.p

    chosen = engine
    if engine == "auto":
        chosen = "cascade" if rates.temperature == 0 else "expm"
    if chosen == "cascade":
        if rates.temperature != 0:
            raise ValueError("the cascade engine is exact only at zero temperature")
        if _nearly_degenerate(rates.down, gamma0(rates.molecule, rates.constants)):
            log.warning("nearly degenerate rates; falling back from cascade to rk")
            chosen = "rk"
    P = None
    if chosen == "cascade":
        P = _cascade(p0, rates.down, times)
        if P is None:
            log.warning("cascade coefficients too ill-conditioned; falling back to rk")
            chosen = "rk"
    if chosen == "rk":
        P = _rk(p0, rates.generator(), times)
    elif chosen == "expm":
        P = _expm(p0, rates.generator(), times)
    elif chosen != "cascade":
        raise ValueError(f"unknown engine {engine!r}")

    P = _clip_small_negatives(P, f"engine {chosen}")
    drift = np.max(np.abs(P.sum(axis=1) - 1.0))
    if drift > NORM_TOL:
        raise RuntimeError(f"normalization drift {drift:.3e} from engine {chosen}")
    if rates.temperature > 0 and rates.l_max > 0:
        tail = P[:, -1].max()
        if tail >= TAIL_TOL:
            raise TruncationError(
                f"tail_mass guard: p_lmax reached {tail:.3e} >= {TAIL_TOL:g}; raise l_max"
            )
    P.setflags(write=False)
    return Trajectory(times, P, rates=rates, engine=chosen, **_observables(P, rates))


def stationary_state(rates: RateTable) -> np.ndarray:
    """Detailed-balance distribution p_l / p_{l-1} = up_l / down_l."""
    if rates.temperature == 0:
        p = np.zeros(rates.l_max + 1)
        p[0] = 1.0
        return p
    logs = np.concatenate([[0.0], np.cumsum(np.log(rates.up[1:]) - np.log(rates.down[1:]))])
    w = np.exp(logs - logs.max())
    return w / w.sum()


def omega_observable(s: PopulationState, m: MoleculeParams,
                     k: PhysicalConstants = CODATA2018) -> tuple[float, float]:
    """Return (sum p_l Omega_l, sum p_l Omega_l**4)."""
    W = level_velocities(s.l_max, m, k)
    return float(s.p @ W), float(s.p @ W**4)


def energy_observable(s: PopulationState, m: MoleculeParams,
                      k: PhysicalConstants = CODATA2018) -> float:
    return float(s.p @ level_energies(s.l_max, m, k))


def power_observable(traj: Trajectory, m: MoleculeParams | None = None,
                     k: PhysicalConstants | None = None) -> np.ndarray:
    """P(t) = -sum_l hbar omega_l dp_l/dt along a trajectory.

    ``m`` and ``k`` default to the ones attached to the trajectory's rates.
    """
    if traj.rates is None:
        raise ValueError("trajectory carries no rate table")
    m = m or traj.rates.molecule
    k = k or traj.rates.constants
    Pdot = traj.populations @ traj.rates.generator().T
    return -(Pdot @ level_energies(traj.l_max, m, k))


def torque_observable(s: PopulationState, rates: RateTable, m: MoleculeParams | None = None,
                      k: PhysicalConstants | None = None) -> float:
    """N = I sum_l (dp_l/dt) Omega_l from the master equation."""
    m = m or rates.molecule
    k = k or rates.constants
    pdot = rates.generator() @ s.p
    return float(m.I * (pdot @ level_velocities(s.l_max, m, k)))


def markovian_torque_pure(l: int, m: MoleculeParams, k: PhysicalConstants = CODATA2018) -> float:
    """Early-time torque -I Gamma_{l,l-1} Omega_l for a rotor prepared in level l.

    Written out this is -(d^2 / 3 pi eps0 c^3) l^3 / ((2l+1)(l+1)) Omega_l^3.
    It keeps only the loss term of level l; :func:`torque_observable` also
    counts the gain of level l-1 and exceeds this by I Gamma Omega_{l-1}.
    """
    return -m.I * decay_rate(l, m, k) * angular_velocity(l, m, k)


def short_time_torque(l: int, t: float, cutoff: CutoffSpec, m: MoleculeParams,
                      k: PhysicalConstants = CODATA2018) -> float:
    """Torque -2 I beta Omega_l t in the non-Markovian short-time regime."""
    _regime_guard(t, cutoff)
    return -2.0 * m.I * short_time_beta(l, cutoff, m, k) * angular_velocity(l, m, k) * t


def three_level_reference(t_grid, m: MoleculeParams, k: PhysicalConstants = CODATA2018) -> Trajectory:
    """Analytic cascade from l = 2 in a three-level rotor.

    ``omega4`` and ``power`` are evaluated from their closed forms, not from
    the populations, so the result can serve as an oracle for :func:`evolve`.
    """
    t = np.asarray(t_grid, dtype=float)
    g0 = gamma0(m, k)
    w = k.hbar / m.I
    slow = np.exp(-g0 * t / 3.0)
    fast = np.exp(-16.0 * g0 * t / 5.0)
    p2 = fast
    p1 = 48.0 / 43.0 * (slow - fast)
    p0 = 1.0 - p1 - p2
    P = np.column_stack([p0, p1, p2])
    P.setflags(write=False)
    omega4 = w**4 * (192.0 / 43.0 * slow + (36.0 - 192.0 / 43.0) * fast)
    power = k.hbar**2 * g0 / m.I * (16.0 / 43.0 * slow + 1296.0 / 215.0 * fast)
    rates = rate_table(2, m, k)
    obs = _observables(P, rates)
    obs.update(omega4=omega4, power=power)
    return Trajectory(t, P, rates=rates, engine="analytic", **obs)
