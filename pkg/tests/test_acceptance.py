"""Acceptance suite: one test per release criterion, each printing a verdict.

Criteria cover oracle equivalence of the mention-similarity scores, planted
structure recovery on the synthetic benchmark, the absoluteness of the
incompatibility rule, threshold boundary behaviour, metric arithmetic, the
meta-actant structural rule and end-to-end determinism.
"""

from __future__ import annotations

import filecmp
import json
import random
import shutil
import time
from pathlib import Path

import numpy as np
import pytest

from actantgraph.cli import main
from actantgraph.clustering import (
    ClusterSet,
    RelationBundle,
    RelationCluster,
    cluster_all_pairs,
    cluster_relations,
    filter_valid_clusters,
)
from actantgraph.embeddings import FileEmbeddingGateway, write_embedding_file
from actantgraph.evaluation import (
    compute_metrics,
    map_all_edges,
    map_clusters_to_ground_truth,
    singleton_baseline_grouping,
)
from actantgraph.graph import (
    KIND_ACTANT,
    KIND_META,
    assemble_network,
    classify_meta_actants,
)
from actantgraph.grouping import (
    GroupingConfig,
    form_groups,
    incompatible,
    score_matrix,
)
from actantgraph.synth import (
    SynthConfig,
    demo_narrative,
    derive_ground_truth,
    generate_corpus,
    recovery_report,
    synthetic_embeddings,
    write_tuple_file,
)
from actantgraph.tuples import RelationTuple, TupleCorpus, build_relation_index, filter_and_dedup

from conftest import StubGateway
from oracles import brute_force_label_mapping, brute_force_scores, random_index

BENCHMARK_CONFIG = SynthConfig(
    n_reviews=3000, tuples_min=1, tuples_max=3, noise_rate=0.05, seed=7
)


def report_pass(name: str) -> None:
    print(f"PASS: {name}")


@pytest.fixture(scope="module")
def benchmark_run(tmp_path_factory):
    """Full pipeline over the synthetic benchmark, shared across criteria."""
    started = time.monotonic()
    hidden = demo_narrative()
    corpus, answer = generate_corpus(hidden, BENCHMARK_CONFIG)
    filtered, vocabulary = filter_and_dedup(corpus, 50)
    index = build_relation_index(filtered, vocabulary)
    config = GroupingConfig()
    matrix = score_matrix(index, config)
    grouping = form_groups(matrix, index, config)

    emb_dir = tmp_path_factory.mktemp("bench-emb")
    emb_path = emb_dir / "embeddings.jsonl"
    dim, records = synthetic_embeddings(hidden, BENCHMARK_CONFIG)
    write_embedding_file(emb_path, dim, records)
    gateway = FileEmbeddingGateway(emb_path)
    clusters = cluster_all_pairs(grouping, index, gateway, seed=BENCHMARK_CONFIG.seed)
    elapsed = time.monotonic() - started
    return {
        "hidden": hidden,
        "answer": answer,
        "index": index,
        "grouping": grouping,
        "gateway": gateway,
        "clusters": clusters,
        "vocabulary": vocabulary,
        "elapsed": elapsed,
    }


def test_score_matrix_oracle_equivalence():
    """Criterion 1: exact agreement with brute force on 200 random indexes."""
    started = time.monotonic()
    rng = random.Random(1803)
    config = GroupingConfig()
    checked_pairs = 0
    for _ in range(200):
        index = random_index(rng, max_mentions=8, max_heads_per_pair=5)
        matrix = score_matrix(index, config)
        expected = brute_force_scores(index, gamma=config.gamma)
        assert set(matrix.scores) == set(expected)
        for pair, value in expected.items():
            assert abs(matrix.scores[pair] - float(value)) <= 1e-12
        checked_pairs += len(expected)
    elapsed = time.monotonic() - started
    assert elapsed < 10.0, f"oracle sweep took {elapsed:.1f}s"
    assert checked_pairs > 0
    report_pass(
        f"score-matrix oracle equivalence ({checked_pairs} pairs, {elapsed:.1f}s)"
    )


def test_planted_alias_recovery(benchmark_run):
    """Criterion 2: benchmark purity >= 0.95 and completeness >= 0.90."""
    report = recovery_report(
        benchmark_run["answer"], benchmark_run["grouping"], benchmark_run["clusters"]
    )
    assert benchmark_run["elapsed"] < 60.0
    assert report.purity >= 0.95, report.per_group_purity
    assert report.completeness >= 0.90, report.per_actant_completeness
    report_pass(
        "planted-alias recovery "
        f"(purity={report.purity:.3f}, completeness={report.completeness:.3f}, "
        f"{benchmark_run['elapsed']:.1f}s)"
    )


def test_incompatibility_invariant_on_random_corpora():
    """Criterion 3: no emitted group contains a directly-related pair."""
    rng = random.Random(65537)
    mentions = [f"m{i}" for i in range(8)]
    heads = ["find", "love", "hate", "serve"]
    config = GroupingConfig()  # gamma = 3
    checked_groups = 0
    for _ in range(60):
        tuples = []
        for t_i in range(rng.randint(30, 120)):
            a, b = rng.choice(mentions), rng.choice(mentions)
            head = rng.choice(heads)
            tuples.append(
                RelationTuple(
                    review_id=f"r{t_i % 17}",
                    sentence_id=t_i % 5,
                    arg1=a,
                    arg1_head=a,
                    rel=head + "s",
                    rel_head=head,
                    arg2=b,
                    arg2_head=b,
                    pattern="SVO",
                )
            )
        corpus = TupleCorpus.from_tuples(tuples)
        filtered, vocabulary = filter_and_dedup(corpus, 1)
        if len(vocabulary) < 3:
            continue
        index = build_relation_index(filtered, vocabulary)
        matrix = score_matrix(index, config)
        grouping = form_groups(matrix, index, config)
        for group in grouping.groups:
            members = sorted(group.members)
            checked_groups += 1
            for i, m_i in enumerate(members):
                for m_j in members[i + 1 :]:
                    assert not incompatible(index, m_i, m_j, config.gamma), (
                        m_i,
                        m_j,
                        group.label,
                    )
    assert checked_groups > 0
    report_pass(f"incompatibility invariant over random corpora ({checked_groups} groups)")


def test_planted_cluster_recovery():
    """Criterion 4: elbow finds the planted k in >= 95/100 seeded trials."""
    k_true = 3
    successes = 0
    for trial in range(100):
        rng = np.random.default_rng(trial + 1)
        dim = 32
        ortho, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
        table: dict[str, np.ndarray] = {}
        counts: dict[str, int] = {}
        for c in range(k_true):
            for i in range(int(rng.integers(4, 9))):
                name = f"p{c}_{i}"
                direction = rng.normal(size=dim)
                direction /= np.linalg.norm(direction)
                radius = 0.1 * rng.random() ** (1.0 / dim)
                table[name] = ortho[:, c] + radius * direction
                counts[name] = int(rng.integers(1, 11))
        bundle = RelationBundle("a", "b", counts)
        result = cluster_relations(bundle, StubGateway(table), k_max=8, seed=trial)
        surviving = filter_valid_clusters(result, 0.8)
        if (
            result.chosen_k == k_true
            and len(surviving.clusters) == k_true
            and all(c.dispersion >= 0.8 for c in result.clusters)
        ):
            successes += 1
    assert successes >= 95, f"only {successes}/100 trials recovered k={k_true}"
    report_pass(f"planted-cluster recovery ({successes}/100 trials)")


def test_threshold_faithfulness_and_argmax():
    """Criterion 5: inclusive boundaries at 0.79/0.80/0.81 and exact argmax."""
    # dispersion boundary: inclusive >= on the exact stored values
    clusters = [
        RelationCluster(members=[f"p{i}"], member_counts={f"p{i}": 1}, centroid=None, dispersion=d)
        for i, d in enumerate((0.79, 0.80, 0.81))
    ]
    survivors = filter_valid_clusters(
        ClusterSet("a", "b", clusters, chosen_k=3), min_dispersion=0.8
    )
    assert [c.dispersion for c in survivors.clusters] == [0.80, 0.81]

    # similarity boundary: vectors engineered so the cosine computes to the
    # exact named value against the label vector (1, 0)
    exact = {
        0.79: np.array([0.79, float.fromhex("0x1.39e923d8bd1d2p-1")]),
        0.80: np.array([0.80, float.fromhex("0x1.3333333333333p-1")]),
        0.81: np.array([0.81, float.fromhex("0x1.2c4089698cdb4p-1")]),
    }
    table = {"label": np.array([1.0, 0.0])}
    table.update({f"p{v}": vec for v, vec in exact.items()})
    gateway = StubGateway(table)
    outcomes = {}
    for value in (0.79, 0.80, 0.81):
        cluster_set = ClusterSet(
            "a",
            "b",
            [
                RelationCluster(
                    members=[f"p{value}"],
                    member_counts={f"p{value}": 1},
                    centroid=None,
                    dispersion=1.0,
                )
            ],
            chosen_k=1,
        )
        result = map_clusters_to_ground_truth(cluster_set, ["label"], gateway, sim_min=0.8)
        key = (("a", "b"), "label")
        assert result.per_label_similarity[key] == value
        outcomes[value] = result.assignments[key] is not None
    assert outcomes == {0.79: False, 0.80: True, 0.81: True}

    # dispersion gate beats any similarity
    gated = ClusterSet(
        "a",
        "b",
        [
            RelationCluster(
                members=["label"], member_counts={"label": 1}, centroid=None, dispersion=0.75
            )
        ],
        chosen_k=1,
    )
    result = map_clusters_to_ground_truth(gated, ["label"], gateway, sim_min=0.8)
    assert result.assignments[(("a", "b"), "label")] is None

    # argmax against exhaustive enumeration on up to five clusters
    rng = random.Random(5151)
    npr = np.random.default_rng(5151)
    trials = 0
    for _ in range(80):
        n_clusters = rng.randint(1, 5)
        table = {}
        clusters = []
        for c in range(n_clusters):
            members = [f"c{c}m{i}" for i in range(rng.randint(1, 3))]
            for m in members:
                v = npr.normal(size=5)
                table[m] = v / np.linalg.norm(v)
            clusters.append(
                RelationCluster(
                    members=members,
                    member_counts={m: 1 for m in members},
                    centroid=None,
                    dispersion=round(rng.uniform(0.6, 1.0), 3),
                )
            )
        label_vec = npr.normal(size=5)
        table["label"] = label_vec / np.linalg.norm(label_vec)
        gateway = StubGateway(table)
        cluster_set = ClusterSet("a", "b", clusters, chosen_k=n_clusters)
        result = map_clusters_to_ground_truth(
            cluster_set, ["label"], gateway, sim_min=0.8, dispersion_min=0.8
        )
        mapped = result.assignments[(("a", "b"), "label")]
        expected = brute_force_label_mapping(clusters, table["label"], table, 0.8, 0.8)
        assert (mapped[2] if mapped else None) == expected
        trials += 1
    assert trials == 80
    report_pass("threshold faithfulness and argmax enumeration")


def test_ablation_direction(benchmark_run):
    """Criterion 6: recall and edge detection after grouping >= before."""
    gt = derive_ground_truth(benchmark_run["hidden"])
    gateway = benchmark_run["gateway"]

    mapping_after, _ = map_all_edges(
        benchmark_run["grouping"], gt, benchmark_run["clusters"], gateway
    )
    after = compute_metrics(mapping_after, gt, benchmark_run["clusters"])

    baseline = singleton_baseline_grouping(gt, benchmark_run["vocabulary"].counts)
    baseline_clusters = cluster_all_pairs(
        baseline, benchmark_run["index"], gateway, seed=BENCHMARK_CONFIG.seed
    )
    mapping_before, _ = map_all_edges(baseline, gt, baseline_clusters, gateway)
    before = compute_metrics(mapping_before, gt, baseline_clusters)

    assert after.recall_pct >= before.recall_pct
    assert after.edge_detection_rate_pct >= before.edge_detection_rate_pct
    assert after.avg_relationships >= before.avg_relationships
    report_pass(
        "ablation direction "
        f"(recall {after.recall_pct:.2f} >= {before.recall_pct:.2f}, "
        f"edges {after.edge_detection_rate_pct:.2f} >= {before.edge_detection_rate_pct:.2f}, "
        f"volume {after.avg_relationships:.1f} >= {before.avg_relationships:.1f})"
    )


def test_metric_arithmetic():
    """Criterion 7: the 3-edge fixture gives recall 75.0, edge detection 66.67."""
    from test_evaluation import three_edge_fixture

    gt, mapping, clusters = three_edge_fixture()
    metrics = compute_metrics(mapping, gt, clusters)
    assert metrics.recall_pct == 75.0
    assert round(metrics.edge_detection_rate_pct, 2) == 66.67
    report_pass("metric arithmetic on the 3-edge fixture")


def test_meta_actant_structural_rule():
    """Criterion 8: exactly the isolated nodes are marked as meta-actants."""
    from test_graph import cluster_set, grouping_from

    labels = {
        "tolkien": ["tolkien", "author"],
        "book": ["book", "novel"],
        "bilbo": ["bilbo"],
        "gandalf": ["gandalf"],
    }
    clusters = {
        # the author only acts on story actants
        ("tolkien", "bilbo"): cluster_set("tolkien", "bilbo", {"wrote": 12}),
        ("tolkien", "gandalf"): cluster_set("tolkien", "gandalf", {"imagined": 6}),
        # the book receives only preposition-induced phrases
        ("bilbo", "book"): cluster_set("bilbo", "book", {"portrayed in": 8, "in": 2}),
        ("book", "bilbo"): cluster_set("book", "bilbo", {"features": 5}),
        # story actants relate in both directions
        ("bilbo", "gandalf"): cluster_set("bilbo", "gandalf", {"follows": 7}),
        ("gandalf", "bilbo"): cluster_set("gandalf", "bilbo", {"guides": 9}),
    }
    net = classify_meta_actants(
        assemble_network(grouping_from(labels), clusters),
        preposition_patterns=("in", "of", "by", "from", "about", "portrayed in"),
    )
    kinds = {n.label: n.kind for n in net.nodes}
    assert kinds == {
        "tolkien": KIND_META,
        "book": KIND_META,
        "bilbo": KIND_ACTANT,
        "gandalf": KIND_ACTANT,
    }
    report_pass("meta-actant structural rule (author and book isolated)")


def test_end_to_end_determinism(tmp_path):
    """Criterion 9: repeated run-all with identical config is byte-identical."""
    hidden = demo_narrative()
    corpus, _ = generate_corpus(hidden, BENCHMARK_CONFIG)
    tuples_path = tmp_path / "tuples.jsonl"
    write_tuple_file(corpus, tuples_path)
    dim, records = synthetic_embeddings(hidden, BENCHMARK_CONFIG)
    emb_path = tmp_path / "embeddings.jsonl"
    write_embedding_file(emb_path, dim, records)
    gt_path = tmp_path / "gt.json"
    derive_ground_truth(hidden).save(gt_path)

    out_dir = tmp_path / "run"
    argv = [
        "run-all",
        "--tuples", str(tuples_path),
        "--embeddings", str(emb_path),
        "--ground-truth", str(gt_path),
        "--out-dir", str(out_dir),
        "--seed", "7",
    ]
    assert main(argv) == 0
    snapshot = tmp_path / "snapshot"
    shutil.copytree(out_dir, snapshot)
    assert main(argv) == 0

    first = sorted(p.relative_to(snapshot) for p in snapshot.rglob("*") if p.is_file())
    second = sorted(p.relative_to(out_dir) for p in out_dir.rglob("*") if p.is_file())
    assert first == second
    different = [
        str(rel)
        for rel in first
        if not filecmp.cmp(snapshot / rel, out_dir / rel, shallow=False)
    ]
    assert different == [], f"artifacts differ: {different}"
    report = json.loads((out_dir / "report.json").read_text())
    assert report["metrics"]["recall_pct"] > 0.0
    report_pass(f"end-to-end determinism ({len(first)} identical artifacts)")
