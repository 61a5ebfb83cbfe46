"""Figure rendering for reports: written to files, never shown."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .characterization import DiagnosticReport, UFunctionParams, u
from .density import GridDensity

__all__ = [
    "plot_diagnostics",
    "plot_u_function",
    "plot_density_pair",
    "plot_limit_check",
]

_DPI = 150


def plot_diagnostics(report: DiagnosticReport, path: str | Path) -> Path:
    """Ratio and |defect| versus theta for a scan report."""
    fig, (ax_ratio, ax_defect) = plt.subplots(1, 2, figsize=(10, 4))
    gamma = UFunctionParams.from_triple(report.triple).gamma

    ax_ratio.semilogx(report.thetas, report.ratios, lw=1.5)
    ax_ratio.axhline(gamma, color="tab:red", ls="--", lw=1,
                     label=f"gamma = {gamma:.4g}")
    ax_ratio.set_xlabel("theta")
    ax_ratio.set_ylabel("B(t) / (t B'(t))")
    ax_ratio.set_ylim(-0.05, 1.05)
    ax_ratio.legend(loc="best", fontsize=8)

    mags = np.maximum(np.abs(report.defects), 1e-18)
    ax_defect.loglog(report.thetas, mags, lw=1.5)
    ax_defect.axhline(report.eps, color="tab:red", ls="--", lw=1,
                      label=f"eps = {report.eps:g}")
    ax_defect.set_xlabel("theta")
    ax_defect.set_ylabel("|defect|")
    ax_defect.legend(loc="best", fontsize=8)

    fig.suptitle(f"{report.generator}  triple=({report.triple.a0:g}, "
                 f"{report.triple.a1:g}, {report.triple.a2:g})  -> {report.verdict}")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def plot_u_function(params: UFunctionParams, path: str | Path, n: int = 1001) -> Path:
    """u(x) over [0, 1] with the maximizer gamma and cap c0 marked."""
    x = np.linspace(0.0, 1.0, n)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(x, u(x, params), lw=1.5)
    ax.axvline(params.gamma, color="tab:red", ls="--", lw=1,
               label=f"gamma = {params.gamma:.4g}")
    ax.axhline(params.c0, color="tab:gray", ls=":", lw=1,
               label=f"c0 = {params.c0:.6g}")
    ax.set_xlabel("x")
    ax.set_ylabel(f"(1-x)^{params.a0:g} x^{params.a2:g}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def plot_density_pair(f: GridDensity, g: GridDensity, path: str | Path,
                      labels: tuple[str, str] = ("f", "g")) -> Path:
    """Overlay of two densities on their grid."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(f.x, f.values, lw=1.5, label=labels[0])
    ax.plot(g.x, g.values, lw=1.5, ls="--", label=labels[1])
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def plot_limit_check(alphas, dpd_gaps, ldpd_gaps, path: str | Path) -> Path:
    """|divergence - KL| versus alpha on log-log axes."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(alphas, dpd_gaps, "o-", lw=1.5, label="|dpd - kl|")
    ax.loglog(alphas, ldpd_gaps, "s--", lw=1.5, label="|ldpd - kl|")
    ax.set_xlabel("alpha")
    ax.set_ylabel("gap to KL")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path
