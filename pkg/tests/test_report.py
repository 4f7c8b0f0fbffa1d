from __future__ import annotations

import numpy as np

from actantgraph.clustering import ClusterSet, RelationCluster
from actantgraph.graph import assemble_network, classify_meta_actants
from actantgraph.grouping import EntityMentionGroup, GroupingResult
from actantgraph.report import render_all, write_score_figure


def sample_inputs():
    groups_doc = {
        "alpha": 2.0,
        "groups": [
            {"label": "bilbo", "members": ["baggins", "bilbo"], "frequencies": {"bilbo": 9, "baggins": 4}},
            {"label": "ring", "members": ["ring"], "frequencies": {"ring": 6}},
        ],
        "scores": [
            {"pair": ["baggins", "bilbo"], "score": 12.5},
            {"pair": ["bilbo", "ring"], "score": 0.4},
        ],
    }
    clusters_doc = {
        "pairs": [
            {
                "source": "bilbo",
                "target": "ring",
                "chosen_k": 2,
                "distortions": [10.0, 2.0, 1.5],
                "clusters": [],
            }
        ]
    }
    grouping = GroupingResult(
        groups=[
            EntityMentionGroup("bilbo", frozenset(["bilbo", "baggins"]), {"bilbo": 9, "baggins": 4}),
            EntityMentionGroup("ring", frozenset(["ring"]), {"ring": 6}),
        ]
    )
    cluster = RelationCluster(
        members=["found", "kept"],
        member_counts={"found": 5, "kept": 2},
        centroid=np.array([1.0, 0.0]),
        dispersion=0.93,
    )
    clusters = {("bilbo", "ring"): ClusterSet("bilbo", "ring", [cluster], 1, [0.5])}
    net = classify_meta_actants(assemble_network(grouping, clusters))
    eval_doc = {"metrics": {"recall_pct": 75.0, "edge_detection_rate_pct": 66.67}}
    return groups_doc, clusters_doc, net, eval_doc


def test_render_all_writes_expected_files(tmp_path):
    groups_doc, clusters_doc, net, eval_doc = sample_inputs()
    written = render_all(tmp_path, groups_doc, clusters_doc, net, eval_doc)
    names = sorted(p.relative_to(tmp_path).as_posix() for p in written)
    assert names == [
        "figures/cluster_elbow.png",
        "figures/mention_scores.png",
        "figures/network.png",
        "tables/edges.csv",
        "tables/groups.csv",
        "tables/metrics.csv",
        "tables/scores.csv",
    ]
    for path in written:
        assert path.stat().st_size > 0
    scores_csv = (tmp_path / "tables" / "scores.csv").read_text()
    assert scores_csv.splitlines()[0] == "mention_a,mention_b,score"
    assert "baggins,bilbo,12.5" in scores_csv
    metrics_csv = (tmp_path / "tables" / "metrics.csv").read_text()
    assert "recall_pct,75.0" in metrics_csv


def test_figures_are_byte_deterministic(tmp_path):
    groups_doc, clusters_doc, net, eval_doc = sample_inputs()
    first = tmp_path / "one"
    second = tmp_path / "two"
    render_all(first, groups_doc, clusters_doc, net, eval_doc)
    render_all(second, groups_doc, clusters_doc, net, eval_doc)
    for name in ("figures/mention_scores.png", "figures/cluster_elbow.png", "figures/network.png"):
        assert (first / name).read_bytes() == (second / name).read_bytes(), name


def test_score_figure_handles_empty_scores(tmp_path):
    target = tmp_path / "scores.png"
    write_score_figure([], float("inf"), target)
    assert target.stat().st_size > 0
