"""Figure and table rendering for models, grids, and projects.

Everything renders to files through the Agg backend, so reports work in
headless runs. render_report bundles the individual renderers and
writes a manifest of what it produced.
"""

from __future__ import annotations

import csv
import io
import json
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .lda import TopicModel, theta_csv, top_words
from .topicsim import ComparisonGrid, select_k
from .workflow import CODE_STATUSES, Project, export_tables

DEFAULT_MAX_TOPIC_FIGURES = 16


def render_loglik_figure(model: TopicModel, path) -> str:
    path = os.fspath(path)
    fig, ax = plt.subplots(figsize=(7, 4))
    trace = model.log_likelihood_trace
    ax.plot(range(1, len(trace) + 1), trace, linewidth=1.2)
    ax.set_xlabel("sweep")
    ax.set_ylabel("joint log likelihood")
    ax.set_title(f"Sampling trace, K={model.num_topics}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_topic_bars(
    model: TopicModel, out_dir, topics=None, n_words: int | None = None
) -> list[str]:
    """One horizontal bar chart of top-word weights per topic."""
    os.makedirs(out_dir, exist_ok=True)
    if topics is None:
        topics = range(min(model.num_topics, DEFAULT_MAX_TOPIC_FIGURES))
    n = n_words if n_words is not None else max(model.params.top_n_words, 1)
    paths = []
    word_index = {w: i for i, w in enumerate(model.words)}
    for k in topics:
        words = top_words(model, k, n)
        weights = [model.phi[k, word_index[w]] for w in words]
        fig, ax = plt.subplots(figsize=(6, 0.4 * len(words) + 1.2))
        ax.barh(range(len(words)), weights, color="#4878cf")
        ax.set_yticks(range(len(words)))
        ax.set_yticklabels(words)
        ax.invert_yaxis()
        ax.set_xlabel("word probability")
        ax.set_title(f"topic_{k}")
        fig.tight_layout()
        path = os.path.join(os.fspath(out_dir), f"topic_{k:03d}.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths.append(path)
    return paths


def render_theta_heatmap(model: TopicModel, path) -> str:
    path = os.fspath(path)
    fig, ax = plt.subplots(figsize=(8, 6))
    image = ax.imshow(model.theta, aspect="auto", cmap="viridis", vmin=0.0)
    ax.set_xlabel("topic")
    ax.set_ylabel("document")
    ax.set_title("Document-topic weights")
    fig.colorbar(image, ax=ax, label="theta")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_funnel_figure(project: Project, path) -> str:
    """Code counts by status, plus category and dimension totals."""
    path = os.fspath(path)
    status_counts = {s: 0 for s in CODE_STATUSES}
    for code in project.codes:
        status_counts[code.status] += 1
    labels = list(status_counts) + ["categories", "dimensions"]
    values = list(status_counts.values()) + [
        len(project.categories),
        len(project.dimensions),
    ]
    fig, ax = plt.subplots(figsize=(7, 4))
    bars = ax.bar(range(len(labels)), values, color="#6aa84f")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=20, ha="right")
    ax.set_ylabel("count")
    ax.set_title(f"Project {project.project_id} at {project.stage}")
    ax.bar_label(bars)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_coverage_heatmap(grid: ComparisonGrid, path) -> str:
    path = os.fspath(path)
    ks = grid.k_list
    matrix = np.full((len(ks), len(ks)), np.nan)
    for i, a in enumerate(ks):
        for j, b in enumerate(ks):
            if a != b:
                matrix[i, j] = grid.reports[(a, b)].coverage_percent
    fig, ax = plt.subplots(figsize=(1.2 * len(ks) + 3, 1.0 * len(ks) + 2))
    image = ax.imshow(matrix, cmap="YlGn", vmin=0.0, vmax=100.0)
    ax.set_xticks(range(len(ks)))
    ax.set_xticklabels(ks)
    ax.set_yticks(range(len(ks)))
    ax.set_yticklabels(ks)
    ax.set_xlabel("covered by K")
    ax.set_ylabel("topic set of K")
    ax.set_title(f"Directional coverage, threshold {grid.threshold}")
    for i in range(len(ks)):
        for j in range(len(ks)):
            if not np.isnan(matrix[i, j]):
                ax.text(j, i, f"{matrix[i, j]:.1f}", ha="center", va="center")
    fig.colorbar(image, ax=ax, label="coverage %")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def topics_csv(model: TopicModel, n: int | None = None) -> str:
    n = model.params.top_n_words if n is None else n
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["topic_id", "words"])
    for k in range(model.num_topics):
        writer.writerow([f"topic_{k}", " ".join(top_words(model, k, n))])
    return buf.getvalue()


def render_report(
    out_dir,
    model: TopicModel | None = None,
    project: Project | None = None,
    grid: ComparisonGrid | None = None,
    max_topics: int = DEFAULT_MAX_TOPIC_FIGURES,
) -> dict:
    """Render every applicable figure and table into out_dir.

    Figures are PNG; tabular companions are CSV. Returns the manifest,
    which is also written as report.json.
    """
    out_dir = os.fspath(out_dir)
    os.makedirs(out_dir, exist_ok=True)
    manifest: dict = {"figures": [], "tables": []}

    def _write(name: str, text: str) -> str:
        path = os.path.join(out_dir, name)
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
        manifest["tables"].append(path)
        return path

    if model is not None:
        manifest["figures"].append(
            render_loglik_figure(model, os.path.join(out_dir, "log_likelihood.png"))
        )
        manifest["figures"].extend(
            render_topic_bars(
                model,
                os.path.join(out_dir, "topics"),
                topics=range(min(model.num_topics, max_topics)),
            )
        )
        manifest["figures"].append(
            render_theta_heatmap(model, os.path.join(out_dir, "theta_heatmap.png"))
        )
        _write("theta.csv", theta_csv(model))
        _write("topics.csv", topics_csv(model))

    if project is not None:
        manifest["figures"].append(
            render_funnel_figure(project, os.path.join(out_dir, "funnel.png"))
        )
        tables = export_tables(project, format="csv")
        _write("table2.csv", tables["table2"])
        _write("table3.csv", tables["table3"])

    if grid is not None:
        manifest["figures"].append(
            render_coverage_heatmap(grid, os.path.join(out_dir, "coverage.png"))
        )
        _write("coverage_matrix.csv", grid.to_csv())
        selection = select_k(grid)
        _write(
            "selection.json",
            json.dumps(selection.to_dict(), indent=2, sort_keys=True) + "\n",
        )

    manifest_path = os.path.join(out_dir, "report.json")
    with open(manifest_path, "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
    manifest["manifest_path"] = manifest_path
    return manifest
