"""Inter-actant relationship clustering.

The relation phrases collected between two actant groups usually mix several
distinct relationships (create/destroy/deny between a maker and its
creation).  Phrases are embedded, L2-normalized and split with k-means; the
number of clusters comes from an elbow scan of the distortion curve.  Each
cluster carries a dispersion score, the mean cosine similarity of its member
vectors to the centroid, and only cohesive clusters survive downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .embeddings import EmbeddingGateway, cosine_similarity
from .errors import ZeroVectorError
from .grouping import GroupingResult
from .tuples import RelationIndex

CLUSTERS_FORMAT_VERSION = 1

DEFAULT_K_MAX = 8
DEFAULT_MIN_DISPERSION = 0.8
ELBOW_IMPROVEMENT = 0.15
_KMEANS_MAX_ITER = 100
_KMEANS_TOL = 1e-6
_KMEANS_INITS = 4


@dataclass
class RelationBundle:
    """All relation phrase instances from one actant group to another."""

    source: str
    target: str
    phrase_counts: dict[str, int]

    @property
    def total_instances(self) -> int:
        return sum(self.phrase_counts.values())

    def __bool__(self) -> bool:
        return bool(self.phrase_counts)


def aggregate_relations(
    grouping: GroupingResult, index: RelationIndex, source: str, target: str
) -> RelationBundle:
    """Union of directed relation phrases over every member pair of two groups.

    Direction is preserved (source members as subjects).  When source and
    target name the same group, the union runs over all ordered member pairs
    including self-loops.
    """
    src_group = grouping.by_label(source)
    tgt_group = grouping.by_label(target)
    phrase_counts: dict[str, int] = {}
    for p in sorted(src_group.members):
        for q in sorted(tgt_group.members):
            for phrase, count in index.phrases(p, q).items():
                phrase_counts[phrase] = phrase_counts.get(phrase, 0) + count
    return RelationBundle(source=source, target=target, phrase_counts=phrase_counts)


@dataclass(eq=False)
class RelationCluster:
    """One semantic group of relation phrases between two actants."""

    members: list[str]
    member_counts: dict[str, int]
    centroid: np.ndarray | None
    dispersion: float

    @property
    def total_instances(self) -> int:
        return sum(self.member_counts.values())

    def to_dict(self, emit_centroid: bool = False) -> dict:
        doc = {
            "members": sorted(self.members),
            "member_counts": {m: self.member_counts[m] for m in sorted(self.member_counts)},
            "dispersion": self.dispersion,
        }
        if emit_centroid and self.centroid is not None:
            doc["centroid"] = [float(x) for x in self.centroid]
        return doc

    @classmethod
    def from_dict(cls, data: dict) -> "RelationCluster":
        centroid = data.get("centroid")
        return cls(
            members=list(data["members"]),
            member_counts={m: int(c) for m, c in data["member_counts"].items()},
            centroid=np.asarray(centroid, dtype=np.float64) if centroid else None,
            dispersion=float(data["dispersion"]),
        )


@dataclass(eq=False)
class ClusterSet:
    """Clustering outcome for one ordered actant pair."""

    source: str
    target: str
    clusters: list[RelationCluster]
    chosen_k: int
    distortions: list[float] = field(default_factory=list)

    def to_dict(self, emit_centroids: bool = False) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "chosen_k": self.chosen_k,
            "distortions": list(self.distortions),
            "clusters": [c.to_dict(emit_centroids) for c in self.clusters],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ClusterSet":
        return cls(
            source=data["source"],
            target=data["target"],
            clusters=[RelationCluster.from_dict(c) for c in data["clusters"]],
            chosen_k=int(data["chosen_k"]),
            distortions=[float(d) for d in data.get("distortions", [])],
        )


def _normalize_rows(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1)
    if np.any(norms == 0.0):
        raise ZeroVectorError("cannot cluster a zero embedding vector")
    return vectors / norms[:, None]


def _weighted_kmeans_once(
    points: np.ndarray, weights: np.ndarray, centers: np.ndarray
) -> tuple[np.ndarray, np.ndarray, float]:
    """Lloyd iterations from fixed initial centers; deterministic throughout."""
    k = centers.shape[0]
    for _ in range(_KMEANS_MAX_ITER):
        distances = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        assignment = distances.argmin(axis=1)
        new_centers = centers.copy()
        for c in range(k):
            mask = assignment == c
            if mask.any():
                w = weights[mask]
                new_centers[c] = (points[mask] * w[:, None]).sum(axis=0) / w.sum()
            else:
                # Re-seed an empty cluster on the point farthest from its center.
                far = (distances.min(axis=1) * weights).argmax()
                new_centers[c] = points[far]
        movement = float(np.abs(new_centers - centers).max())
        centers = new_centers
        if movement < _KMEANS_TOL:
            break
    distances = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    assignment = distances.argmin(axis=1)
    distortion = float((distances[np.arange(len(points)), assignment] * weights).sum())
    return assignment, centers, distortion


def _plusplus_init(
    points: np.ndarray, weights: np.ndarray, k: int, rng: np.random.Generator
) -> np.ndarray:
    centers = np.empty((k, points.shape[1]))
    probs = weights / weights.sum()
    first = rng.choice(len(points), p=probs)
    centers[0] = points[first]
    for c in range(1, k):
        d2 = ((points[:, None, :] - centers[None, :c, :]) ** 2).sum(axis=2).min(axis=1)
        scores = d2 * weights
        total = scores.sum()
        if total <= 0.0:
            centers[c] = points[rng.choice(len(points), p=probs)]
        else:
            centers[c] = points[rng.choice(len(points), p=scores / total)]
    return centers


def _run_kmeans(
    points: np.ndarray,
    weights: np.ndarray,
    k: int,
    seed: int,
    warm_centers: np.ndarray | None,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Best of several seeded inits plus a warm start extending the k-1 result.

    The warm start (previous centers plus the farthest point) guarantees the
    distortion curve never increases with k.
    """
    best: tuple[np.ndarray, np.ndarray, float] | None = None
    inits = []
    for i in range(_KMEANS_INITS):
        rng = np.random.default_rng([abs(seed), k, i])
        inits.append(_plusplus_init(points, weights, k, rng))
    if warm_centers is not None and warm_centers.shape[0] == k - 1:
        d2 = ((points[:, None, :] - warm_centers[None, :, :]) ** 2).sum(axis=2).min(axis=1)
        far = int((d2 * weights).argmax())
        inits.append(np.vstack([warm_centers, points[far][None, :]]))
    for centers in inits:
        result = _weighted_kmeans_once(points, weights, centers)
        if best is None or result[2] < best[2]:
            best = result
    assert best is not None
    return best


def _choose_elbow(distortions: list[float], improvement: float = ELBOW_IMPROVEMENT) -> int:
    """Smallest k after which adding a cluster stops paying for itself.

    An extra cluster pays when it removes at least ``improvement`` of the
    total (k=1) distortion.  Normalizing against the total rather than the
    previous step keeps the rule stable for small clusters, where splitting
    n points always removes about 1/(n-1) of their residual distortion no
    matter how cohesive they are.
    """
    total = distortions[0]
    if total <= 1e-12:
        return 1
    for k in range(2, len(distortions) + 1):
        if (distortions[k - 2] - distortions[k - 1]) / total < improvement:
            return k - 1
    return len(distortions)


def _cluster_dispersion(
    vectors: np.ndarray, weights: np.ndarray, centroid: np.ndarray
) -> float:
    """Instance-weighted mean cosine similarity of members to the centroid.

    Weighting matches the centroid definition: every phrase instance counts,
    so a heavy coherent cluster is not discarded over one stray phrase.
    Singletons are exactly 1.0.
    """
    if vectors.shape[0] == 1:
        return 1.0
    sims = np.asarray([cosine_similarity(v, centroid) for v in vectors])
    return float((sims * weights).sum() / weights.sum())


def cluster_relations(
    bundle: RelationBundle,
    gateway: EmbeddingGateway,
    k_max: int = DEFAULT_K_MAX,
    seed: int = 0,
) -> ClusterSet:
    """Split a phrase bundle into semantically distinct relationship clusters.

    Distinct phrases are embedded once; duplicates weight the centroid but
    appear once in the member list.  k runs from 1 to min(k_max, number of
    distinct phrases) and the elbow criterion picks the final clustering.
    """
    if not bundle:
        raise ValueError(
            f"empty relation bundle for {bundle.source!r} -> {bundle.target!r}"
        )
    phrases = sorted(bundle.phrase_counts)
    weights = np.asarray([bundle.phrase_counts[p] for p in phrases], dtype=np.float64)
    raw = np.vstack(gateway.get_vectors(phrases))
    points = _normalize_rows(raw)

    if len(phrases) == 1:
        cluster = RelationCluster(
            members=[phrases[0]],
            member_counts=dict(bundle.phrase_counts),
            centroid=points[0].copy(),
            dispersion=1.0,
        )
        return ClusterSet(
            source=bundle.source,
            target=bundle.target,
            clusters=[cluster],
            chosen_k=1,
            distortions=[0.0],
        )

    k_limit = max(1, min(k_max, len(phrases)))
    runs: list[tuple[np.ndarray, np.ndarray, float]] = []
    distortions: list[float] = []
    warm: np.ndarray | None = None
    for k in range(1, k_limit + 1):
        assignment, centers, distortion = _run_kmeans(points, weights, k, seed, warm)
        runs.append((assignment, centers, distortion))
        distortions.append(distortion)
        warm = centers

    chosen_k = _choose_elbow(distortions)
    assignment, _, _ = runs[chosen_k - 1]

    clusters: list[RelationCluster] = []
    for c in range(chosen_k):
        member_idx = [i for i in range(len(phrases)) if assignment[i] == c]
        if not member_idx:
            continue
        members = [phrases[i] for i in member_idx]
        vectors = points[member_idx]
        w = weights[member_idx]
        centroid = (vectors * w[:, None]).sum(axis=0) / w.sum()
        clusters.append(
            RelationCluster(
                members=members,
                member_counts={m: bundle.phrase_counts[m] for m in members},
                centroid=centroid,
                dispersion=_cluster_dispersion(vectors, w, centroid),
            )
        )
    clusters.sort(key=lambda cl: (-cl.total_instances, cl.members[0]))
    return ClusterSet(
        source=bundle.source,
        target=bundle.target,
        clusters=clusters,
        chosen_k=chosen_k,
        distortions=distortions,
    )


def filter_valid_clusters(
    cluster_set: ClusterSet, min_dispersion: float = DEFAULT_MIN_DISPERSION
) -> ClusterSet:
    """Keep clusters whose dispersion meets the floor (inclusive), in order."""
    return ClusterSet(
        source=cluster_set.source,
        target=cluster_set.target,
        clusters=[c for c in cluster_set.clusters if c.dispersion >= min_dispersion],
        chosen_k=cluster_set.chosen_k,
        distortions=list(cluster_set.distortions),
    )


def cluster_all_pairs(
    grouping: GroupingResult,
    index: RelationIndex,
    gateway: EmbeddingGateway,
    k_max: int = DEFAULT_K_MAX,
    min_dispersion: float = DEFAULT_MIN_DISPERSION,
    seed: int = 0,
) -> dict[tuple[str, str], ClusterSet]:
    """Cluster every ordered group pair with at least one relation instance.

    Returns surviving (dispersion-filtered) cluster sets keyed by
    (source label, target label); pairs whose clusters all fall below the
    floor keep an empty cluster list so callers can tell "no phrases" from
    "no cohesive clusters".
    """
    labels = grouping.labels()
    results: dict[tuple[str, str], ClusterSet] = {}
    for source in labels:
        for target in labels:
            bundle = aggregate_relations(grouping, index, source, target)
            if not bundle:
                continue
            clusters = cluster_relations(bundle, gateway, k_max=k_max, seed=seed)
            results[(source, target)] = filter_valid_clusters(clusters, min_dispersion)
    return results


def save_cluster_map(
    path: str | Path,
    clusters: dict[tuple[str, str], ClusterSet],
    seed: int,
    k_max: int,
    min_dispersion: float,
    emit_centroids: bool = False,
) -> None:
    doc = {
        "format_version": CLUSTERS_FORMAT_VERSION,
        "seed": seed,
        "k_max": k_max,
        "min_dispersion": min_dispersion,
        "pairs": [clusters[key].to_dict(emit_centroids) for key in sorted(clusters)],
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_cluster_map(path: str | Path) -> dict[tuple[str, str], ClusterSet]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    version = data.get("format_version")
    if version != CLUSTERS_FORMAT_VERSION:
        raise ValueError(f"unsupported clusters format_version: {version!r}")
    out: dict[tuple[str, str], ClusterSet] = {}
    for entry in data["pairs"]:
        cluster_set = ClusterSet.from_dict(entry)
        out[(cluster_set.source, cluster_set.target)] = cluster_set
    return out
