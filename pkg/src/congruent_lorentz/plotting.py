"""Static figures: empirical survival step curves over theory curves."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# 800 x 500 in SVG user units (points)
FIGSIZE = (800 / 72, 500 / 72)


def _save(fig, path):
    fig.savefig(path)  # format from the file extension
    plt.close(fig)


def plot_distribution(table, path, title=None, label="empirical"):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.step(table.lambdas, table.empirical, where="post", lw=1.2, label=label)
    ax.plot(table.lambdas, table.theory, "--", lw=1.2, label="theory")
    ax.set_xlabel(r"$\lambda$")
    ax.set_ylabel(r"P($\varepsilon\tau > \lambda$)")
    ax.set_ylim(-0.02, 1.02)
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def plot_sweep(tables, path, title=None):
    """Several eps on one axis, sharing the theory curve of the first table."""
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for eps, t in tables:
        ax.step(t.lambdas, t.empirical, where="post", lw=1.0, label=f"eps={eps:g}")
    first = tables[0][1]
    ax.plot(first.lambdas, first.theory, "k--", lw=1.2, label="theory")
    ax.set_xlabel(r"$\lambda$")
    ax.set_ylabel(r"P($\varepsilon\tau > \lambda$)")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def plot_limit(curve, path):
    fig, (a1, a2) = plt.subplots(1, 2, figsize=FIGSIZE)
    a1.plot(curve.lambdas, curve.G)
    a1.set_title(f"G, ell={curve.modulus.ell}")
    a2.plot(curve.lambdas, curve.g)
    a2.set_title("density g")
    for ax in (a1, a2):
        ax.set_xlabel(r"$\lambda$")
    fig.tight_layout()
    _save(fig, path)
