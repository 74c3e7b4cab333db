"""Matplotlib figures written next to report and matrix outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_rule_accuracy_figure(per_rule: dict, path: str | Path, title: str = "") -> Path:
    """Bar chart of per-rule accuracy in [0, 1]."""
    rules = list(per_rule)
    accuracies = [per_rule[r]["accuracy"] for r in rules]
    fig, ax = plt.subplots(figsize=(max(6, 1.3 * len(rules)), 4))
    ax.bar(range(len(rules)), accuracies, color="#4878a8")
    ax.set_xticks(range(len(rules)))
    ax.set_xticklabels([r.replace("_", "\n") for r in rules], fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("accuracy")
    if title:
        ax.set_title(title)
    for x, acc in enumerate(accuracies):
        ax.text(x, acc + 0.02, f"{acc:.2f}", ha="center", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def save_outcome_figure(totals: dict, path: str | Path, title: str = "") -> Path:
    """Correct / incorrect / unparseable counts as a bar chart."""
    labels = ["correct", "incorrect", "unparseable"]
    counts = [totals[label] for label in labels]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.bar(labels, counts, color=["#4a8c55", "#b4533c", "#8a8a8a"])
    ax.set_ylabel("questions")
    if title:
        ax.set_title(title)
    for x, count in enumerate(counts):
        ax.text(x, count, str(count), ha="center", va="bottom", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def save_attention_heatmap(matrix, tokens, path: str | Path, title: str = "") -> Path:
    """Plain heatmap of one head's n-by-n weights with token tick labels."""
    weights = np.asarray(matrix, dtype=float)
    n = weights.shape[0]
    size = max(4.0, 0.3 * n)
    fig, ax = plt.subplots(figsize=(size, size))
    image = ax.imshow(weights, cmap="viridis", aspect="equal")
    ax.set_xticks(range(n))
    ax.set_yticks(range(n))
    ax.set_xticklabels(tokens, rotation=90, fontsize=7)
    ax.set_yticklabels(tokens, fontsize=7)
    ax.set_xlabel("key")
    ax.set_ylabel("query")
    if title:
        ax.set_title(title)
    fig.colorbar(image, ax=ax, fraction=0.046)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)
