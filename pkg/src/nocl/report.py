"""Figure rendering for the stats and score report paths.

Figures are written next to the delimited outputs; everything uses the Agg
backend so the CLI works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .budget import BudgetStats
from .scoring import MetricsReport


def save_budget_figure(rows: list[BudgetStats], path) -> None:
    """Grouped bars: average question tokens, concept vs full description."""
    labels = [f"{r.dataset}\n{r.task}" for r in rows]
    concept = [r.avg_question_tokens for r in rows]
    full = [r.paired_avg_tokens for r in rows]
    x = np.arange(len(rows))
    width = 0.38

    fig, ax = plt.subplots(figsize=(max(6.0, 1.6 * len(rows) + 2), 4.5))
    ax.bar(x - width / 2, full, width, label="full description", color="#ba4a4f")
    bars = ax.bar(x + width / 2, concept, width, label="node concept", color="#3b7ea1")
    for bar, r in zip(bars, rows):
        ax.annotate(
            f"-{100 * r.reduction_ratio:.1f}%",
            xy=(bar.get_x() + bar.get_width() / 2, bar.get_height()),
            xytext=(0, 3),
            textcoords="offset points",
            ha="center",
            fontsize=8,
        )
    ax.set_xticks(x)
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_ylabel("avg question tokens")
    ax.set_title("Question length: node concepts vs full descriptions")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150, format="png")
    plt.close(fig)


def save_score_figure(reports: list[MetricsReport], path) -> None:
    """Bar chart of accuracy and ROC_AUC per task."""
    labels = [r.task for r in reports]
    x = np.arange(len(reports))
    width = 0.38

    fig, ax = plt.subplots(figsize=(max(6.0, 1.4 * len(reports) + 2), 4.0))
    acc = [r.accuracy if r.accuracy is not None else 0.0 for r in reports]
    ax.bar(x - width / 2, acc, width, label="accuracy", color="#3b7ea1")
    auc = [r.roc_auc if r.roc_auc is not None else 0.0 for r in reports]
    ax.bar(x + width / 2, auc, width, label="roc_auc", color="#5aa469")
    ax.set_xticks(x)
    ax.set_xticklabels(labels, fontsize=9)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("metric value")
    ax.set_title("Evaluation metrics by task")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150, format="png")
    plt.close(fig)
