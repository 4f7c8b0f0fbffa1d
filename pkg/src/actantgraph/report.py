"""Figures and delimited tables rendered from pipeline artifacts.

Each stage writes JSON; this module turns those documents into PNG figures
(score distribution with the resolved cutoff, per-pair distortion-vs-k
curves, the network diagram) and flat CSV files suitable for spreadsheets.
Rendering is deterministic so repeated runs produce identical bytes.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .graph import KIND_META, KIND_UNCLASSIFIED, NarrativeNetwork

_FIG_DPI = 110
_PNG_METADATA = {"Software": "actantgraph"}

_NODE_COLORS = {
    "actant": "#4878a8",
    KIND_META: "#3f8f4f",
    KIND_UNCLASSIFIED: "#9a9a9a",
}


def _save(fig, path: Path) -> None:
    fig.savefig(path, dpi=_FIG_DPI, metadata=_PNG_METADATA)
    plt.close(fig)


def write_score_figure(scores: list[float], alpha: float, path: str | Path) -> None:
    """Box plot of the non-zero mention similarity scores with the alpha line."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5, 6))
    if scores:
        ax.boxplot([scores], widths=0.5, showfliers=True)
    if math.isfinite(alpha):
        ax.axhline(alpha, color="firebrick", linestyle="--", linewidth=1.2)
        ax.annotate(
            f"alpha = {alpha:.2f}",
            xy=(0.98, alpha),
            xycoords=("axes fraction", "data"),
            ha="right",
            va="bottom",
            fontsize=9,
            color="firebrick",
        )
    ax.set_ylabel("pairwise similarity score")
    ax.set_xticks([])
    ax.set_title("Non-zero mention similarity scores")
    fig.tight_layout()
    _save(fig, path)


def write_elbow_figure(pairs: list[dict], path: str | Path) -> None:
    """Distortion curves per actant pair with the chosen k marked."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, 5))
    for entry in sorted(pairs, key=lambda e: (e["source"], e["target"])):
        distortions = entry.get("distortions") or []
        if not distortions:
            continue
        ks = list(range(1, len(distortions) + 1))
        label = f'{entry["source"]} -> {entry["target"]}'
        (line,) = ax.plot(ks, distortions, marker="o", markersize=3, linewidth=1, label=label)
        chosen = entry.get("chosen_k")
        if chosen and 1 <= chosen <= len(distortions):
            ax.plot(
                [chosen],
                [distortions[chosen - 1]],
                marker="s",
                markersize=7,
                color=line.get_color(),
                fillstyle="none",
            )
    ax.set_xlabel("number of clusters")
    ax.set_ylabel("within-cluster distortion")
    ax.set_title("Cluster count selection per actant pair")
    if len(pairs) <= 12:
        ax.legend(fontsize=7)
    fig.tight_layout()
    _save(fig, path)


def write_network_figure(net: NarrativeNetwork, path: str | Path) -> None:
    """Circular-layout rendering of the narrative network."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(8, 8))
    nodes = sorted(net.nodes, key=lambda n: (-n.total_frequency, n.label))
    n = max(1, len(nodes))
    positions = {}
    for i, node in enumerate(nodes):
        angle = 2 * math.pi * i / n
        positions[node.label] = (math.cos(angle), math.sin(angle))

    for edge in sorted(net.active_edges(), key=lambda e: (e.source, e.target)):
        x1, y1 = positions[edge.source]
        x2, y2 = positions[edge.target]
        width = 0.5 + 0.6 * math.log1p(edge.instance_count)
        if edge.source == edge.target:
            ax.add_patch(
                plt.Circle((x1 * 1.12, y1 * 1.12), 0.06, fill=False, color="#777777")
            )
            continue
        ax.annotate(
            "",
            xy=(x2, y2),
            xytext=(x1, y1),
            arrowprops=dict(
                arrowstyle="-|>",
                color="#777777",
                lw=width,
                shrinkA=16,
                shrinkB=16,
                connectionstyle="arc3,rad=0.08",
            ),
        )
        ax.annotate(
            str(edge.instance_count),
            xy=((x1 + x2) / 2, (y1 + y2) / 2),
            fontsize=7,
            color="#555555",
            ha="center",
        )

    freqs = np.asarray([node.total_frequency for node in nodes], dtype=float)
    top = freqs.max() if len(freqs) and freqs.max() > 0 else 1.0
    for node in nodes:
        x, y = positions[node.label]
        size = 200 + 1200 * (node.total_frequency / top)
        color = _NODE_COLORS.get(node.kind, _NODE_COLORS[KIND_UNCLASSIFIED])
        ax.scatter([x], [y], s=size, color=color, zorder=3, edgecolors="white")
        ax.annotate(
            node.label, xy=(x, y * 1.0 + 0.09), ha="center", fontsize=9, zorder=4
        )
    ax.set_xlim(-1.4, 1.4)
    ax.set_ylim(-1.4, 1.4)
    ax.set_aspect("equal")
    ax.axis("off")
    ax.set_title("Consensus narrative network")
    _save(fig, path)


def write_scores_csv(scores: list[dict], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["mention_a", "mention_b", "score"])
        for entry in scores:
            writer.writerow([entry["pair"][0], entry["pair"][1], repr(entry["score"])])


def write_groups_csv(groups: list[dict], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["label", "mention", "frequency"])
        for group in groups:
            for mention in group["members"]:
                writer.writerow([group["label"], mention, group["frequencies"][mention]])


def write_edges_csv(net: NarrativeNetwork, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["source", "target", "instance_count", "clusters", "pruned", "phrases"]
        )
        for edge in sorted(net.edges, key=lambda e: (e.source, e.target)):
            writer.writerow(
                [
                    edge.source,
                    edge.target,
                    edge.instance_count,
                    len(edge.clusters.clusters),
                    "yes" if edge.pruned else "no",
                    "; ".join(edge.phrases()),
                ]
            )


def write_metrics_csv(metrics: dict, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["metric", "value"])
        for name in sorted(metrics):
            writer.writerow([name, repr(metrics[name])])


def render_all(
    out_dir: str | Path,
    groups_doc: dict | None = None,
    clusters_doc: dict | None = None,
    net: NarrativeNetwork | None = None,
    eval_doc: dict | None = None,
) -> list[Path]:
    """Render every figure and table the available artifacts allow."""
    out_dir = Path(out_dir)
    figures = out_dir / "figures"
    tables = out_dir / "tables"
    figures.mkdir(parents=True, exist_ok=True)
    tables.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    if groups_doc is not None:
        scores = groups_doc.get("scores", [])
        target = figures / "mention_scores.png"
        write_score_figure(
            [entry["score"] for entry in scores],
            float(groups_doc.get("alpha", math.inf)),
            target,
        )
        written.append(target)
        target = tables / "scores.csv"
        write_scores_csv(scores, target)
        written.append(target)
        target = tables / "groups.csv"
        write_groups_csv(groups_doc.get("groups", []), target)
        written.append(target)

    if clusters_doc is not None:
        target = figures / "cluster_elbow.png"
        write_elbow_figure(clusters_doc.get("pairs", []), target)
        written.append(target)

    if net is not None:
        target = figures / "network.png"
        write_network_figure(net, target)
        written.append(target)
        target = tables / "edges.csv"
        write_edges_csv(net, target)
        written.append(target)

    if eval_doc is not None:
        target = tables / "metrics.csv"
        write_metrics_csv(eval_doc.get("metrics", {}), target)
        written.append(target)

    return written


def load_json(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
