"""Figure rendering for the CLI report path.

Uses the Agg backend so the CLI never needs a display. Figures land next
to the delimited output with matching stems.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_fringe_plot(path: str, result, title: str = "") -> str:
    """Expected and oracle curves plus sampled counts if present."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.plot(result.alphas, result.expected, "-", color="tab:blue", label="simulated")
    ax.plot(result.alphas, result.oracle, "--", color="tab:orange", label="closed form")
    if result.counts is not None and result.counts.sum() > 0:
        scale = float(result.expected.mean() / result.counts.mean())
        ax.plot(result.alphas, result.counts * scale, ".", color="tab:gray",
                markersize=4, label="counts (rescaled)")
    dense = np.linspace(result.alphas[0], result.alphas[-1], 400)
    fit = result.fit
    ax.plot(
        dense,
        fit.constant + fit.cos_amp * np.cos(4 * dense) + fit.sin_amp * np.sin(4 * dense),
        ":",
        color="tab:green",
        label="fit",
    )
    ax.set_xlabel("alpha (rad)")
    ax.set_ylabel("coincidence probability per pair")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_density_matrix_plot(path: str, rho: np.ndarray, title: str = "") -> str:
    """Side-by-side bar maps of Re(rho) and Im(rho)."""
    rho = np.asarray(rho, dtype=complex)
    n = rho.shape[0]
    labels = [format(i, f"0{max(1, n.bit_length() - 1)}b") for i in range(n)]
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 4.0))
    vmax = max(float(np.abs(rho).max()), 1e-12)
    for ax, part, name in ((axes[0], rho.real, "Re"), (axes[1], rho.imag, "Im")):
        im = ax.imshow(part, vmin=-vmax, vmax=vmax, cmap="RdBu_r")
        ax.set_title(f"{name}(rho)")
        ax.set_xticks(range(n), labels, fontsize=7)
        ax.set_yticks(range(n), labels, fontsize=7)
        fig.colorbar(im, ax=ax, fraction=0.046)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
