"""Figure rendering for the CLI report path.

Figures are written next to the delimited output; data files remain the
primary artifact. Uses the Agg backend so headless runs work.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .spectrum import Spectrum


def plot_spectrum(spectrum: Spectrum, path: str, reference: Spectrum | None = None) -> None:
    """Absorption vs detuning in units of omega_m; optional overlay."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    wm = spectrum.omega_m
    if reference is not None:
        ax.plot(reference.delta / reference.omega_m, reference.absorption,
                color="tab:green", lw=1.2, label="no coupling")
    label = _label(spectrum)
    ax.plot(spectrum.delta / wm, spectrum.absorption, color="tab:red", lw=1.2,
            ls="--" if reference is not None else "-", label=label)
    ax.set_xlabel(r"$\Delta / \omega_m$")
    ax.set_ylabel("absorption" + (" (normalized)" if spectrum.snapshot.get("normalized") else " (arb. units)"))
    nuclide = spectrum.snapshot.get("nuclide", {}).get("name", "")
    ax.set_title(f"{nuclide} absorption, n = {spectrum.snapshot.get('n_phonon'):g}")
    ax.axhline(0.0, color="0.7", lw=0.6)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _label(spectrum: Spectrum) -> str:
    cfg = spectrum.snapshot.get("config", {})
    power = cfg.get("power_w")
    if power:
        return f"P = {power * 1e9:g} nW"
    g = spectrum.snapshot.get("line_params", {}).get("g", 0.0)
    return f"G = {g:g} rad/s" if g else "no coupling"


def plot_sweep(rows: list[dict], sweep_variable: str, path: str) -> None:
    """Two panels: spectra per sweep value, and dip contrast vs value."""
    values = sorted({r["sweep_value"] for r in rows})
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10.5, 4.0))
    cmap = plt.get_cmap("viridis")
    for i, val in enumerate(values):
        sel = [r for r in rows if r["sweep_value"] == val]
        x = np.array([r["delta_over_omega_m"] for r in sel])
        y = np.array([r["absorption"] for r in sel])
        ax1.plot(x, y, lw=1.0, color=cmap(i / max(len(values) - 1, 1)), label=f"{val:g}")
    ax1.set_xlabel(r"$\Delta / \omega_m$")
    ax1.set_ylabel("absorption")
    ax1.legend(title=sweep_variable, fontsize=7, loc="upper right")

    contrasts = []
    for val in values:
        sel = next(r for r in rows if r["sweep_value"] == val)
        contrasts.append(sel["dip_contrast"])
    ax2.plot(values, contrasts, "o-", color="tab:blue")
    ax2.set_xlabel(sweep_variable)
    ax2.set_ylabel("dip contrast")
    ax2.set_ylim(-0.02, 1.02)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
