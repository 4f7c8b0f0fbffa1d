"""Scoring an extracted network against an expert ground-truth graph.

Alignment happens at two levels: actant groups are matched to ground-truth
actants through shared labels or aliases, and each ground-truth relationship
label is mapped to the extracted cluster whose members are closest in
embedding space, subject to dispersion and similarity floors.  The summary
metrics count mapped labels (recall) and detected edges.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from pathlib import Path

from .clustering import ClusterSet
from .embeddings import EmbeddingGateway, cosine_similarity
from .errors import AmbiguousAlignmentError, UndefinedMetricError
from .grouping import EntityMentionGroup, GroupingResult

GROUND_TRUTH_FORMAT_VERSION = 1

DEFAULT_SIM_MIN = 0.8
DEFAULT_DISPERSION_MIN = 0.8


@dataclass(frozen=True)
class GroundTruthActant:
    id: str
    label: str
    aliases: tuple[str, ...] = ()

    def name_set(self) -> frozenset:
        return frozenset(
            s.lower() for s in (self.label, *self.aliases) if s
        )


@dataclass(frozen=True)
class GroundTruthEdge:
    source_id: str
    target_id: str
    labels: tuple[str, ...]

    @property
    def key(self) -> tuple[str, str]:
        return (self.source_id, self.target_id)


@dataclass
class GroundTruth:
    """Expert-coded actants, aliases and directed relationship labels."""

    actants: list[GroundTruthActant]
    edges: list[GroundTruthEdge]

    def __post_init__(self) -> None:
        ids = [a.id for a in self.actants]
        if len(ids) != len(set(ids)):
            raise ValueError("ground truth actant ids must be unique")
        known = set(ids)
        for edge in self.edges:
            if edge.source_id not in known or edge.target_id not in known:
                raise ValueError(
                    f"ground truth edge references unknown actant: {edge.key}"
                )
            if not edge.labels:
                raise ValueError(f"ground truth edge {edge.key} has no labels")

    def actant(self, actant_id: str) -> GroundTruthActant:
        for a in self.actants:
            if a.id == actant_id:
                return a
        raise KeyError(actant_id)

    def all_labels(self) -> list[str]:
        return [label for edge in self.edges for label in edge.labels]

    def to_dict(self) -> dict:
        return {
            "format_version": GROUND_TRUTH_FORMAT_VERSION,
            "actants": [
                {"id": a.id, "label": a.label, "aliases": list(a.aliases)}
                for a in self.actants
            ],
            "edges": [
                {
                    "source_id": e.source_id,
                    "target_id": e.target_id,
                    "labels": list(e.labels),
                }
                for e in self.edges
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GroundTruth":
        return cls(
            actants=[
                GroundTruthActant(
                    id=str(a["id"]),
                    label=str(a["label"]),
                    aliases=tuple(a.get("aliases", [])),
                )
                for a in data["actants"]
            ],
            edges=[
                GroundTruthEdge(
                    source_id=str(e["source_id"]),
                    target_id=str(e["target_id"]),
                    labels=tuple(e["labels"]),
                )
                for e in data["edges"]
            ],
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "GroundTruth":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass
class ActantAlignment:
    """Group label → ground-truth actant id, plus the leftovers on both sides."""

    assignments: dict[str, str]
    unmatched_groups: list[str]
    unmatched_actants: list[str]

    def groups_for(self, actant_id: str) -> list[str]:
        return sorted(g for g, a in self.assignments.items() if a == actant_id)


def match_group_to_actants(
    group_names: frozenset, gt: GroundTruth
) -> GroundTruthActant | None:
    """The unique ground-truth actant sharing a name with the group, if any."""
    hits = [a for a in gt.actants if a.name_set() & group_names]
    if len(hits) > 1:
        listing = ", ".join(a.id for a in hits)
        raise AmbiguousAlignmentError(
            f"group {sorted(group_names)} matches several actants: {listing}"
        )
    return hits[0] if hits else None


def _group_names(group: EntityMentionGroup) -> frozenset:
    return frozenset(m.lower() for m in group.members) | {group.label.lower()}


def align_actants(grouping: GroupingResult, gt: GroundTruth) -> ActantAlignment:
    """Match extracted groups to ground-truth actants by label or alias overlap."""
    assignments: dict[str, str] = {}
    unmatched_groups: list[str] = []
    for group in grouping.groups:
        hit = match_group_to_actants(_group_names(group), gt)
        if hit is None:
            unmatched_groups.append(group.label)
        else:
            assignments[group.label] = hit.id
    matched_ids = set(assignments.values())
    unmatched_actants = [a.id for a in gt.actants if a.id not in matched_ids]
    return ActantAlignment(
        assignments=assignments,
        unmatched_groups=sorted(unmatched_groups),
        unmatched_actants=sorted(unmatched_actants),
    )


@dataclass
class MappingResult:
    """Ground-truth labels mapped onto extracted clusters, edge by edge.

    Keys are ``(gt edge key, label)``.  A mapped label points at
    ``(source group, target group, cluster position)``; an unmapped label
    stores ``None``.  ``per_label_similarity`` records the best similarity
    seen for the label whether or not it cleared the floor.
    """

    assignments: dict[tuple[tuple[str, str], str], tuple[str, str, int] | None] = field(
        default_factory=dict
    )
    per_label_similarity: dict[tuple[tuple[str, str], str], float] = field(
        default_factory=dict
    )
    edge_pairs: dict[tuple[str, str], list[tuple[str, str]]] = field(default_factory=dict)

    def mapped_count(self) -> int:
        return sum(1 for v in self.assignments.values() if v is not None)

    def merge(self, other: "MappingResult") -> None:
        self.assignments.update(other.assignments)
        self.per_label_similarity.update(other.per_label_similarity)
        for key, pairs in other.edge_pairs.items():
            self.edge_pairs.setdefault(key, []).extend(pairs)


def map_clusters_to_ground_truth(
    clusters: ClusterSet,
    gt_labels: list[str],
    gateway: EmbeddingGateway,
    sim_min: float = DEFAULT_SIM_MIN,
    dispersion_min: float = DEFAULT_DISPERSION_MIN,
    edge_key: tuple[str, str] | None = None,
) -> MappingResult:
    """Assign each ground-truth label to its best-matching cohesive cluster.

    A label's similarity to a cluster is the maximum cosine similarity
    between the label vector and any member phrase vector.  Only clusters
    with dispersion at or above the floor are eligible; the label maps to
    the argmax cluster when its similarity meets ``sim_min`` (inclusive).
    Ties prefer the more cohesive, then the larger cluster.
    """
    key = edge_key if edge_key is not None else (clusters.source, clusters.target)
    result = MappingResult()
    result.edge_pairs[key] = [(clusters.source, clusters.target)]
    eligible = [
        (position, cluster)
        for position, cluster in enumerate(clusters.clusters)
        if cluster.dispersion >= dispersion_min
    ]
    for label in gt_labels:
        best: tuple[float, float, int, int] | None = None  # sim, dispersion, size, -pos
        if eligible:
            label_vec = gateway.get_vector(label)
            for position, cluster in eligible:
                member_vecs = gateway.get_vectors(cluster.members)
                sim = max(cosine_similarity(v, label_vec) for v in member_vecs)
                rank = (sim, cluster.dispersion, len(cluster.members), -position)
                if best is None or rank > best:
                    best = rank
        if best is not None:
            result.per_label_similarity[(key, label)] = best[0]
        if best is not None and best[0] >= sim_min:
            result.assignments[(key, label)] = (
                clusters.source,
                clusters.target,
                -best[3],
            )
        else:
            result.assignments[(key, label)] = None
    return result


def map_all_edges(
    grouping: GroupingResult,
    gt: GroundTruth,
    clusters: dict[tuple[str, str], ClusterSet],
    gateway: EmbeddingGateway,
    sim_min: float = DEFAULT_SIM_MIN,
    dispersion_min: float = DEFAULT_DISPERSION_MIN,
) -> tuple[MappingResult, ActantAlignment]:
    """Run the label mapping for every ground-truth edge.

    A ground-truth edge is looked up through the actant alignment: every
    ordered pair of groups aligned to its endpoints contributes its cluster
    set.  Edges whose endpoints have no aligned groups stay unmapped.
    """
    alignment = align_actants(grouping, gt)
    mapping = MappingResult()
    for edge in gt.edges:
        source_groups = alignment.groups_for(edge.source_id)
        target_groups = alignment.groups_for(edge.target_id)
        candidate_sets = [
            clusters[(s, t)]
            for s in source_groups
            for t in target_groups
            if (s, t) in clusters
        ]
        if not candidate_sets:
            for label in edge.labels:
                mapping.assignments[(edge.key, label)] = None
            mapping.edge_pairs.setdefault(edge.key, [])
            continue
        partial = MappingResult()
        partial.edge_pairs[edge.key] = []
        for cluster_set in candidate_sets:
            one = map_clusters_to_ground_truth(
                cluster_set,
                list(edge.labels),
                gateway,
                sim_min=sim_min,
                dispersion_min=dispersion_min,
                edge_key=edge.key,
            )
            partial.edge_pairs[edge.key].extend(one.edge_pairs[edge.key])
            for assign_key, value in one.assignments.items():
                current = partial.assignments.get(assign_key)
                sim_new = one.per_label_similarity.get(assign_key, -2.0)
                sim_old = partial.per_label_similarity.get(assign_key, -2.0)
                if assign_key not in partial.assignments or (
                    value is not None and (current is None or sim_new > sim_old)
                ):
                    partial.assignments[assign_key] = value
                if sim_new > sim_old:
                    partial.per_label_similarity[assign_key] = sim_new
        mapping.merge(partial)
    return mapping, alignment


@dataclass
class EvalMetrics:
    """Headline comparison numbers against the ground truth."""

    recall_pct: float
    edge_detection_rate_pct: float
    avg_relationships: float
    median_relationships: float

    def to_dict(self) -> dict:
        return {
            "recall_pct": self.recall_pct,
            "edge_detection_rate_pct": self.edge_detection_rate_pct,
            "avg_relationships": self.avg_relationships,
            "median_relationships": self.median_relationships,
        }


def compute_metrics(
    mapping: MappingResult,
    gt: GroundTruth,
    clusters: dict[tuple[str, str], ClusterSet],
) -> EvalMetrics:
    """Label recall, edge detection rate and per-edge relationship volume.

    Recall counts mapped labels over all ground-truth labels; an edge is
    detected when at least one of its labels mapped.  Relationship volume
    for a detected edge is the total phrase instance count over the
    surviving clusters of its aligned group pairs.
    """
    total_labels = len(gt.all_labels())
    if total_labels == 0:
        raise UndefinedMetricError("ground truth carries no relationship labels")

    mapped_labels = 0
    detected_edges = 0
    volumes: list[float] = []
    for edge in gt.edges:
        edge_mapped = 0
        for label in edge.labels:
            if mapping.assignments.get((edge.key, label)) is not None:
                edge_mapped += 1
        mapped_labels += edge_mapped
        if edge_mapped > 0:
            detected_edges += 1
            pairs = set(mapping.edge_pairs.get(edge.key, []))
            volume = sum(
                cluster.total_instances
                for pair in pairs
                if pair in clusters
                for cluster in clusters[pair].clusters
            )
            volumes.append(float(volume))

    recall = 100.0 * mapped_labels / total_labels
    edge_rate = 100.0 * detected_edges / len(gt.edges) if gt.edges else 0.0
    avg = float(statistics.fmean(volumes)) if volumes else 0.0
    median = float(statistics.median(volumes)) if volumes else 0.0
    return EvalMetrics(
        recall_pct=recall,
        edge_detection_rate_pct=edge_rate,
        avg_relationships=avg,
        median_relationships=median,
    )


def singleton_baseline_grouping(gt: GroundTruth, vocabulary_counts: dict[str, int]) -> GroupingResult:
    """Grouping with one single-mention group per ground-truth actant.

    Used to measure how much mention grouping itself contributes: each
    actant keeps only the vocabulary mention equal to its label (or, failing
    that, its first alias present in the vocabulary).
    """
    groups = []
    for actant in gt.actants:
        candidates = [actant.label.lower()] + [a.lower() for a in actant.aliases]
        mention = next((c for c in candidates if c in vocabulary_counts), None)
        if mention is None:
            continue
        groups.append(
            EntityMentionGroup(
                label=mention,
                members=frozenset([mention]),
                member_frequencies={mention: vocabulary_counts[mention]},
            )
        )
    groups.sort(key=lambda g: (-g.total_frequency, g.label))
    return GroupingResult(groups=groups)


def build_report(
    mapping: MappingResult,
    alignment: ActantAlignment,
    gt: GroundTruth,
    clusters: dict[tuple[str, str], ClusterSet],
    metrics: EvalMetrics,
    sim_min: float,
    dispersion_min: float,
) -> dict:
    """Assemble the JSON evaluation report with per-edge detail."""
    edges = []
    for edge in gt.edges:
        labels = []
        for label in edge.labels:
            assignment = mapping.assignments.get((edge.key, label))
            entry: dict = {
                "label": label,
                "mapped": assignment is not None,
            }
            similarity = mapping.per_label_similarity.get((edge.key, label))
            if similarity is not None:
                entry["similarity"] = similarity
            if assignment is not None:
                entry["cluster"] = {
                    "source": assignment[0],
                    "target": assignment[1],
                    "position": assignment[2],
                }
            labels.append(entry)
        pairs = sorted(set(mapping.edge_pairs.get(edge.key, [])))
        volume = sum(
            cluster.total_instances
            for pair in pairs
            if pair in clusters
            for cluster in clusters[pair].clusters
        )
        edges.append(
            {
                "source_id": edge.source_id,
                "target_id": edge.target_id,
                "detected": any(entry["mapped"] for entry in labels),
                "labels": labels,
                "aligned_pairs": [list(p) for p in pairs],
                "instance_count": volume,
            }
        )
    return {
        "format_version": 1,
        "config": {"sim_min": sim_min, "dispersion_min": dispersion_min},
        "metrics": metrics.to_dict(),
        "alignment": {
            "assignments": dict(sorted(alignment.assignments.items())),
            "unmatched_groups": alignment.unmatched_groups,
            "unmatched_actants": alignment.unmatched_actants,
        },
        "edges": edges,
    }
