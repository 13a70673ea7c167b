"""Figure rendering for the reporting paths: bar charts of bad-attribute
rates and line plots of kNN chance against K, written straight to files."""

from __future__ import annotations

from typing import Dict, List, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def plot_rates(rates: Dict[str, float], path: str, title: str = "Bad-attribute rates"):
    items = sorted(rates.items(), key=lambda kv: -kv[1])
    names = [k for k, _ in items]
    values = [v for _, v in items]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.bar(names, values, color="#4878a8")
    ax.set_ylabel("share of positives with a bad value")
    ax.set_title(title)
    ax.set_ylim(0, 1)
    ax.tick_params(axis="x", rotation=45)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_sweep(
    k_values: Sequence[int],
    per_sample: Dict[str, List[float]],
    averages: Sequence[float],
    path: str,
    title: str = "kNN chance by K",
):
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for rid, chances in per_sample.items():
        ax.plot(k_values, chances, color="#999999", linewidth=0.8, alpha=0.6)
    ax.plot(k_values, averages, color="#c03028", linewidth=2.2, marker="o", label="average")
    ax.set_xlabel("K")
    ax.set_ylabel("chance of positive")
    ax.set_ylim(0, 1.02)
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
