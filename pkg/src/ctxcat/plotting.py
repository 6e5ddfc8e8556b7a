"""Figures written next to the experiment's CSV output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .experiment import ExperimentResult  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 120,
}


def accuracy_vs_top_n(result: ExperimentResult, path) -> None:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3.0))
        curve = result.curve("icm")
        if curve:
            xs, ys = zip(*curve)
            ax.plot(xs, [100 * y for y in ys], marker="o", label="contextual (ICM)")
            ax.set_xticks(xs)
        try:
            base = result.accuracy("appearance-only")
            ax.axhline(100 * base, color="0.4", linestyle="--", linewidth=1, label="appearance only")
        except KeyError:
            pass
        ax.set_xlabel("candidate labels per region (top n)")
        ax.set_ylabel("accuracy (%)")
        ax.legend(frameon=False, loc="center right")
        fig.tight_layout()
        fig.savefig(path, metadata={"Software": None})
        plt.close(fig)


def per_concept_bars(result: ExperimentResult, path, top_n=None) -> None:
    vocab = result.config.generator.vocabulary
    rows = [r for r in result.rows if r.method == "appearance-only"]
    rows += [r for r in result.rows if r.method == "icm" and (top_n is None or r.top_n == top_n)][-1:]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.5, 3.0))
        width = 0.8 / max(len(rows), 1)
        for n, row in enumerate(rows):
            vals = [100 * row.report.per_concept.get(c, 0.0) for c in vocab]
            xs = [i + (n - (len(rows) - 1) / 2) * width for i in range(len(vocab))]
            label = row.method if row.method == "appearance-only" else f"{row.method}, top {row.top_n}"
            ax.bar(xs, vals, width=width, label=label)
        ax.set_xticks(range(len(vocab)))
        ax.set_xticklabels(vocab, rotation=30, ha="right")
        ax.set_ylabel("accuracy (%)")
        ax.set_ylim(0, 105)
        ax.legend(frameon=False, loc="lower left")
        fig.tight_layout()
        fig.savefig(path, metadata={"Software": None})
        plt.close(fig)
