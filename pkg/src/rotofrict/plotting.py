"""Matplotlib figures written next to the CSV output.

Figures are built on ``matplotlib.figure.Figure`` directly so no GUI
backend is ever selected.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib import rcParams
from matplotlib.figure import Figure

golden_mean = (np.sqrt(5) - 1.0) / 2.0
fig_width = 3.4  # single column
fig_size = [fig_width, fig_width * golden_mean]

params = {
    "axes.labelsize": 9,
    "font.family": "serif",
    "font.size": 8,
    "mathtext.fontset": "stix",
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.2,
    "savefig.dpi": 200,
}


def _new_figure(ncols: int = 1) -> tuple[Figure, list]:
    rcParams.update(params)
    fig = Figure(figsize=(fig_size[0] * ncols, fig_size[1]), constrained_layout=True)
    axes = [fig.add_subplot(1, ncols, i + 1) for i in range(ncols)]
    return fig, axes


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    # deterministic PNG metadata
    fig.savefig(path, metadata={"Software": None})
    return path


def plot_fig2(times, omega4, power, path):
    """Omega^4 and radiated power against time, in the natural units of the run."""
    fig, (ax,) = _new_figure()
    ax.plot(times, omega4, label=r"$\Omega^4\ [(\hbar/I)^4]$")
    ax.plot(times, power, "--", label=r"$P\ [\hbar^2\Gamma_0/I]$")
    ax.set_xlabel(r"$\Gamma_0 t$")
    ax.set_yscale("log")
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_populations(times, populations, path, omega4=None, power=None):
    ncols = 2 if omega4 is not None else 1
    fig, axes = _new_figure(ncols)
    ax = axes[0]
    t = np.asarray(times)
    mask = t > 0
    for l in range(populations.shape[1]):
        if populations[:, l].max() > 1e-3:
            ax.plot(t[mask], populations[mask, l], label=f"$l={l}$")
    ax.set_xscale("log")
    ax.set_xlabel("$t$")
    ax.set_ylabel("$p_l$")
    ax.legend(frameon=False, ncol=2)
    if omega4 is not None:
        ax = axes[1]
        ax.loglog(t[mask], np.asarray(omega4)[mask], label=r"$\Omega^4$")
        if power is not None:
            ax.loglog(t[mask], np.clip(np.asarray(power)[mask], 1e-300, None), "--", label="$P$")
        ax.set_xlabel("$t$")
        ax.legend(frameon=False)
    return _save(fig, path)


def plot_classical(times, omega, omega_rk, path):
    fig, (ax,) = _new_figure()
    t = np.asarray(times)
    mask = t > 0
    ax.loglog(t[mask], np.asarray(omega)[mask], label="closed form")
    ax.loglog(t[mask], np.asarray(omega_rk)[mask], ":", label="integrated")
    ax.set_xlabel("$t$")
    ax.set_ylabel(r"$\Omega$")
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_climit(ls, ratio, path):
    fig, (ax,) = _new_figure()
    ax.semilogx(ls, ratio, "o-", ms=2)
    ax.axhline(1.0, color="0.5", lw=0.6)
    ax.set_xlabel("$l$")
    ax.set_ylabel(r"$P_l / P_\mathrm{cl}$")
    return _save(fig, path)
