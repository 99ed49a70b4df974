"""Render figures from the delimited run artifacts.

Presentation layer only: everything here re-reads losses.csv / edits.csv /
labels.csv and writes PNGs next to them; the clustering pipeline itself
never touches matplotlib.
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .artifacts import read_label_csv


def _read_losses(path) -> dict[str, np.ndarray]:
    cols: dict[str, list[float]] = {}
    with open(path, "r", encoding="ascii") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            for key, val in row.items():
                cols.setdefault(key, []).append(float(val))
    return {k: np.asarray(v) for k, v in cols.items()}


def render_loss_figure(losses_csv, out_png) -> None:
    data = _read_losses(losses_csv)
    if not data.get("iter", np.zeros(0)).size:
        return
    fig, (ax, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    it = data["iter"]
    ax.plot(it, data["loss_total"], label="total", color="black")
    ax.plot(it, data["loss_c"], label="self-training", color="tab:blue")
    ax.plot(it, data["loss_g"], label="reconstruction", color="tab:orange")
    ax.set_xlabel("iteration")
    ax.set_ylabel("loss")
    ax.legend(frameon=False)
    ax.set_title("objective")
    ax2.plot(it, data["mu"], color="tab:green")
    ax2.set_xlabel("iteration")
    ax2.set_ylabel("filter mix")
    ax2.set_ylim(0, 1)
    ax2.set_title("low-pass share")
    fig.tight_layout()
    fig.savefig(out_png, dpi=120)
    plt.close(fig)


def render_rewiring_figure(losses_csv, out_png) -> None:
    data = _read_losses(losses_csv)
    if not data.get("iter", np.zeros(0)).size:
        return
    fig, (ax, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    it = data["iter"]
    ax.plot(it, data["n_recovered"], label="recovered", color="tab:blue")
    ax.plot(it, data["n_removed"], label="removed", color="tab:red")
    ax.set_xlabel("iteration")
    ax.set_ylabel("edges")
    ax.legend(frameon=False)
    ax.set_title("edge edits")
    hom = data["homophily_pseudo"]
    ax2.plot(it, hom, color="tab:purple")
    ax2.set_xlabel("iteration")
    ax2.set_ylabel("edge homophily vs pseudo-labels")
    ax2.set_ylim(0, 1.02)
    ax2.set_title("homophily")
    fig.tight_layout()
    fig.savefig(out_png, dpi=120)
    plt.close(fig)


def render_label_map(labels_csv, out_png, title: str = "cluster map") -> None:
    grid = read_label_csv(labels_csv)
    fig, ax = plt.subplots(figsize=(6, 6 * grid.shape[0] / max(grid.shape[1], 1)))
    ax.imshow(grid, cmap="tab20", interpolation="nearest")
    ax.set_title(title)
    ax.axis("off")
    fig.tight_layout()
    fig.savefig(out_png, dpi=120)
    plt.close(fig)


def render_run_figures(outdir) -> list[str]:
    """Render every figure the artifacts in ``outdir`` support."""
    written = []
    losses = os.path.join(outdir, "losses.csv")
    if os.path.exists(losses):
        for name, render in (
            ("losses.png", render_loss_figure),
            ("rewiring.png", render_rewiring_figure),
        ):
            out = os.path.join(outdir, name)
            render(losses, out)
            if os.path.exists(out):
                written.append(out)
    labels = os.path.join(outdir, "labels.csv")
    if os.path.exists(labels):
        out = os.path.join(outdir, "labels.png")
        render_label_map(labels, out)
        written.append(out)
    return written
