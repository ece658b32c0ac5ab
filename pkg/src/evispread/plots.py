"""Render PCC report figures to image files.

Companions to the report CSV: the per-level PCC-vs-noise curves for each
classifier, and the head-to-head comparison of both classifiers at the
deepest level.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .experiment import PccReport

CLASSIFIER_LABELS = {"prob": "Probabilistic", "bba": "Evidential"}


def plot_level_impact(report: PccReport, classifier: str, path) -> None:
    """One PCC-vs-noise curve per propagation level, with 95% CI bars."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for level in range(1, report.levels + 1):
        means = [report.mean(n, classifier, level) for n in report.noise_rates]
        cis = [report.ci_halfwidth(n, classifier, level) for n in report.noise_rates]
        ax.errorbar(
            report.noise_rates, means, yerr=cis,
            marker="o", capsize=3, label=f"level {level}",
        )
    ax.set_xlabel("noise rate")
    ax.set_ylabel("PCC (%)")
    ax.set_ylim(0, 105)
    ax.set_title(f"{CLASSIFIER_LABELS[classifier]} classifier")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_classifier_comparison(report: PccReport, level: int, path) -> None:
    """Probabilistic vs evidential PCC at one level, with 95% CI bars."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for classifier in ("prob", "bba"):
        means = [report.mean(n, classifier, level) for n in report.noise_rates]
        cis = [report.ci_halfwidth(n, classifier, level) for n in report.noise_rates]
        ax.errorbar(
            report.noise_rates, means, yerr=cis,
            marker="o", capsize=3, label=CLASSIFIER_LABELS[classifier],
        )
    ax.set_xlabel("noise rate")
    ax.set_ylabel("PCC (%)")
    ax.set_ylim(0, 105)
    ax.set_title(f"Classifier comparison (level {level})")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_report_figures(report: PccReport, out_dir) -> list[Path]:
    """Write the standard three figures next to the report; returns their paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [
        out_dir / "pcc_levels_prob.png",
        out_dir / "pcc_levels_bba.png",
        out_dir / f"pcc_comparison_level{report.levels}.png",
    ]
    plot_level_impact(report, "prob", paths[0])
    plot_level_impact(report, "bba", paths[1])
    plot_classifier_comparison(report, report.levels, paths[2])
    return paths
