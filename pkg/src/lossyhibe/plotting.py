"""Figures for the CLI report commands.  Files only; never opens a window."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, plot_dir: str, name: str) -> str:
    os.makedirs(plot_dir, exist_ok=True)
    path = os.path.join(plot_dir, name)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def _label(identity) -> str:
    return "/".join(",".join(str(c) for c in level) for level in identity)


def plot_image_sizes(demo, plot_dir: str, name: str = "image_sizes.png") -> str:
    """Bar chart of measured image sizes with the ``p`` and ``2^n`` reference lines."""
    fig, ax = plt.subplots(figsize=(max(4, 1.2 * len(demo.rows)), 3.5))
    colors = {"target": "tab:red", "prefix": "tab:orange", "non-prefix": "tab:blue"}
    labels = [_label(r.identity) for r in demo.rows]
    ax.bar(range(len(labels)), [r.image_size for r in demo.rows],
           color=[colors.get(r.relation, "gray") for r in demo.rows])
    ax.axhline(demo.p, ls="--", c="k", lw=1, label=f"p = {demo.p}")
    ax.axhline(2**demo.n, ls=":", c="k", lw=1, label=f"2^n = {2**demo.n}")
    ax.set_yscale("log", base=2)
    ax.set_xticks(range(len(labels)), labels, rotation=30, ha="right")
    ax.set_ylabel("|image|")
    ax.set_title(f"image size per identity (n={demo.n})")
    ax.legend(fontsize=8)
    return _save(fig, plot_dir, name)


def plot_non_abort(reports, plot_dir: str, name: str = "eta_vs_bound.png") -> str:
    """Empirical non-abort probability (3 sigma bars) against the lower bound, per ``q``."""
    fig, ax = plt.subplots(figsize=(4.5, 3.5))
    qs = [r.q for r in reports]
    ax.errorbar(qs, [r.empirical for r in reports], yerr=[3 * r.sigma for r in reports],
                fmt="o", capsize=3, label="empirical")
    ax.plot(qs, [float(r.eta_low) for r in reports], "s--", label="lower bound")
    exact = [(r.q, float(r.exact)) for r in reports if r.exact is not None]
    if exact:
        ax.plot(*zip(*exact), "x", ms=9, label="exact")
    ax.set_xlabel("q (revealed keys)")
    ax.set_ylabel("Pr[no abort]")
    ax.set_xticks(qs)
    ax.legend(fontsize=8)
    return _save(fig, plot_dir, name)


def plot_timings(rows, plot_dir: str, name: str = "bench.png") -> str:
    """Horizontal bars of mean seconds per operation."""
    fig, ax = plt.subplots(figsize=(5, 0.5 * len(rows) + 1.5))
    ax.barh([r[0] for r in rows], [r[1] for r in rows])
    ax.set_xlabel("seconds")
    return _save(fig, plot_dir, name)
