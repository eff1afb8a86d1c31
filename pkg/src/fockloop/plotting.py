"""Figure rendering for the command-line reports.

Every function takes data already computed by the corresponding command and
writes a single PNG.  The Agg backend is forced so rendering works headless,
and PNG metadata is stripped for reproducible bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE_OPTS = {"dpi": 150, "metadata": {"Software": None}}


def _finish(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def plot_qubit_sweep(q_mags, designs, path: str) -> None:
    """Optimal reflectance, drive magnitude, and probability against |q|."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(q_mags, [d.probability for d in designs], label="probability")
    ax.plot(q_mags, [d.refl_mag for d in designs], label="|R|")
    ax.plot(q_mags, [d.alpha_mag for d in designs], label="|alpha|")
    ax.set_xscale("log")
    ax.set_xlabel("|q|")
    ax.legend()
    _finish(fig, path)


def plot_fock_run(result, path: str, n_show: int = 13) -> None:
    """Final photon-number distribution with the run's headline numbers."""
    probs = result.state.normalized().probs[:n_show]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.bar(np.arange(probs.size), probs, color="tab:blue")
    ax.set_xlabel("n")
    ax.set_ylabel("probability")
    ax.set_title(
        f"trips {result.total_trips}, mean {result.state.mean():.3f}, "
        f"Q {result.mandel:.3f}"
    )
    _finish(fig, path)


def plot_synthesis(target_probs, achieved_probs, path: str) -> None:
    """Target and synthesized photon-number distributions side by side."""
    n = max(len(target_probs), len(achieved_probs))
    idx = np.arange(n)
    want = np.zeros(n)
    want[: len(target_probs)] = target_probs
    got = np.zeros(n)
    got[: len(achieved_probs)] = achieved_probs
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.bar(idx - 0.2, want, width=0.4, label="target")
    ax.bar(idx + 0.2, got, width=0.4, label="synthesized")
    ax.set_xlabel("n")
    ax.set_ylabel("probability")
    ax.legend()
    _finish(fig, path)


def plot_operator(matrix: np.ndarray, path: str) -> None:
    """Magnitude map of a conditional operator in the number basis."""
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    image = ax.imshow(np.abs(matrix), origin="lower", cmap="viridis")
    ax.set_xlabel("input n")
    ax.set_ylabel("output n")
    fig.colorbar(image, ax=ax, label="|Y|")
    _finish(fig, path)


def plot_metric_deviations(deviations, path: str) -> None:
    """Per-draw metric-preservation error of sampled network matrices."""
    devs = np.asarray(deviations, dtype=float)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogy(np.arange(1, devs.size + 1), np.maximum(devs, 1e-20), ".")
    ax.set_xlabel("draw")
    ax.set_ylabel("max |MGM+ - G|")
    _finish(fig, path)
