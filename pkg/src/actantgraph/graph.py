"""Assembly, thresholding and export of the consensus narrative network.

Nodes are actant groups; edges are directed and carry the surviving
relationship clusters for their ordered group pair, weighted by phrase
instance counts.  Meta-actants (author, book, film) are recognized purely
structurally: they act on the story but nothing acts on them, once
preposition-induced phrases such as "portrayed in" are discounted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .clustering import ClusterSet
from .errors import ConsistencyError
from .evaluation import GroundTruth, match_group_to_actants
from .grouping import GroupingResult

NETWORK_FORMAT_VERSION = 1

KIND_ACTANT = "actant"
KIND_META = "meta_actant"
KIND_UNCLASSIFIED = "unclassified"

DEFAULT_VERIFIED_MIN = 5
DEFAULT_UNVERIFIED_MIN = 10
DEFAULT_PREPOSITION_PATTERNS = ("in", "of", "by", "from", "about")

_DOT_COLORS = {
    KIND_ACTANT: "steelblue",
    KIND_META: "forestgreen",
    KIND_UNCLASSIFIED: "gray60",
}


@dataclass
class NetworkNode:
    label: str
    members: tuple[str, ...]
    total_frequency: int
    kind: str = KIND_UNCLASSIFIED
    in_ground_truth: bool | None = None


@dataclass(eq=False)
class NetworkEdge:
    source: str
    target: str
    clusters: ClusterSet
    instance_count: int
    ignorable: bool = False
    pruned: bool = False
    verified: bool | None = None

    def phrases(self) -> list[str]:
        seen: set = set()
        out = []
        for cluster in self.clusters.clusters:
            for member in cluster.members:
                if member not in seen:
                    seen.add(member)
                    out.append(member)
        return out


@dataclass(eq=False)
class NarrativeNetwork:
    nodes: list[NetworkNode]
    edges: list[NetworkEdge]

    def node(self, label: str) -> NetworkNode:
        for n in self.nodes:
            if n.label == label:
                return n
        raise KeyError(label)

    def active_edges(self) -> list[NetworkEdge]:
        return [e for e in self.edges if not e.pruned]

    def to_dict(self) -> dict:
        return {
            "format_version": NETWORK_FORMAT_VERSION,
            "nodes": [
                {
                    "label": n.label,
                    "members": list(n.members),
                    "total_frequency": n.total_frequency,
                    "kind": n.kind,
                    "in_ground_truth": n.in_ground_truth,
                }
                for n in self.nodes
            ],
            "edges": [
                {
                    "source": e.source,
                    "target": e.target,
                    "instance_count": e.instance_count,
                    "ignorable": e.ignorable,
                    "pruned": e.pruned,
                    "verified": e.verified,
                    "clusters": e.clusters.to_dict(),
                }
                for e in self.edges
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NarrativeNetwork":
        version = data.get("format_version")
        if version != NETWORK_FORMAT_VERSION:
            raise ValueError(f"unsupported network format_version: {version!r}")
        nodes = [
            NetworkNode(
                label=n["label"],
                members=tuple(n["members"]),
                total_frequency=int(n["total_frequency"]),
                kind=n["kind"],
                in_ground_truth=n.get("in_ground_truth"),
            )
            for n in data["nodes"]
        ]
        edges = [
            NetworkEdge(
                source=e["source"],
                target=e["target"],
                clusters=ClusterSet.from_dict(e["clusters"]),
                instance_count=int(e["instance_count"]),
                ignorable=bool(e.get("ignorable", False)),
                pruned=bool(e.get("pruned", False)),
                verified=e.get("verified"),
            )
            for e in data["edges"]
        ]
        return cls(nodes=nodes, edges=edges)


def assemble_network(
    grouping: GroupingResult, clusters: dict[tuple[str, str], ClusterSet]
) -> NarrativeNetwork:
    """One node per group; one edge per ordered pair with a surviving cluster."""
    labels = set(grouping.labels())
    for (source, target) in clusters:
        if source not in labels or target not in labels:
            raise ConsistencyError(
                f"cluster set references unknown group: ({source!r}, {target!r})"
            )
    nodes = [
        NetworkNode(
            label=g.label,
            members=tuple(sorted(g.members)),
            total_frequency=g.total_frequency,
        )
        for g in grouping.groups
    ]
    edges = []
    for key in sorted(clusters):
        cluster_set = clusters[key]
        if not cluster_set.clusters:
            continue
        count = sum(c.total_instances for c in cluster_set.clusters)
        edges.append(
            NetworkEdge(
                source=key[0],
                target=key[1],
                clusters=cluster_set,
                instance_count=count,
            )
        )
    return NarrativeNetwork(nodes=nodes, edges=edges)


def apply_thresholds(
    net: NarrativeNetwork,
    verified_min: int = DEFAULT_VERIFIED_MIN,
    unverified_min: int = DEFAULT_UNVERIFIED_MIN,
    gt: GroundTruth | None = None,
    keep_pruned: bool = False,
) -> NarrativeNetwork:
    """Drop low-frequency edges; nodes always stay.

    Edges between two ground-truth-matched nodes only need ``verified_min``
    instances, anything touching an unverifiable node needs
    ``unverified_min``.  Without a ground truth every edge is held to
    ``verified_min``.  With ``keep_pruned`` the failing edges stay, flagged,
    for visualization.
    """
    if verified_min < 0 or unverified_min < 0:
        raise ValueError("thresholds must be >= 0")
    matched: set = set()
    nodes = []
    for n in net.nodes:
        node = replace(n)
        if gt is not None:
            names = frozenset(m.lower() for m in n.members) | {n.label.lower()}
            hit = match_group_to_actants(names, gt)
            node.in_ground_truth = hit is not None
            if hit is not None:
                matched.add(n.label)
        nodes.append(node)

    edges = []
    for e in net.edges:
        verified = gt is None or (e.source in matched and e.target in matched)
        floor = verified_min if verified else unverified_min
        keep = e.instance_count >= floor
        if keep or keep_pruned:
            edges.append(
                replace(e, verified=verified if gt is not None else None, pruned=not keep)
            )
    return NarrativeNetwork(nodes=nodes, edges=edges)


def _matches_pattern(phrase: str, patterns: tuple[str, ...]) -> bool:
    # Prefix match at a token boundary: "in", "in the book", "portrayed in ...".
    for pattern in patterns:
        if phrase == pattern or phrase.startswith(pattern + " "):
            return True
    return False


def classify_meta_actants(
    net: NarrativeNetwork,
    preposition_patterns: tuple[str, ...] = DEFAULT_PREPOSITION_PATTERNS,
) -> NarrativeNetwork:
    """Mark directionally isolated nodes as meta-actants.

    Edges whose every phrase is preposition-induced are ignorable; a node
    with at least one outgoing edge and no non-ignorable incoming edge sits
    outside the story world.  All other nodes are actants.
    """
    edges = []
    for e in net.active_edges():
        phrases = e.phrases()
        ignorable = bool(phrases) and all(
            _matches_pattern(p, preposition_patterns) for p in phrases
        )
        edges.append(replace(e, ignorable=ignorable))

    outgoing: dict[str, int] = {}
    incoming: dict[str, int] = {}
    for e in edges:
        outgoing[e.source] = outgoing.get(e.source, 0) + 1
        if not e.ignorable:
            incoming[e.target] = incoming.get(e.target, 0) + 1

    nodes = []
    for n in net.nodes:
        kind = (
            KIND_META
            if outgoing.get(n.label, 0) >= 1 and incoming.get(n.label, 0) == 0
            else KIND_ACTANT
        )
        nodes.append(replace(n, kind=kind))
    pruned = [replace(e) for e in net.edges if e.pruned]
    return NarrativeNetwork(nodes=nodes, edges=edges + pruned)


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_network(net: NarrativeNetwork, format: str = "json") -> bytes:
    """Serialize the network as DOT (for rendering) or JSON (round-trips)."""
    if format == "json":
        return (json.dumps(net.to_dict(), indent=2, sort_keys=True) + "\n").encode("utf-8")
    if format == "dot":
        lines = ["digraph narrative {", "  rankdir=LR;"]
        for n in sorted(net.nodes, key=lambda x: x.label):
            color = _DOT_COLORS.get(n.kind, _DOT_COLORS[KIND_UNCLASSIFIED])
            if n.in_ground_truth is False:
                color = _DOT_COLORS[KIND_META]
            attrs = (
                f"label={_dot_quote(n.label)}, color={color}, "
                f'tooltip={_dot_quote(", ".join(n.members))}'
            )
            lines.append(f"  {_dot_quote(n.label)} [{attrs}];")
        for e in sorted(net.edges, key=lambda x: (x.source, x.target)):
            style = ", style=dashed" if e.pruned else ""
            lines.append(
                f"  {_dot_quote(e.source)} -> {_dot_quote(e.target)} "
                f'[label="{e.instance_count}"{style}];'
            )
        lines.append("}")
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValueError(f"unknown export format: {format!r}")


def save_network(net: NarrativeNetwork, path: str | Path, format: str = "json") -> None:
    Path(path).write_bytes(export_network(net, format))


def load_network(path: str | Path) -> NarrativeNetwork:
    return NarrativeNetwork.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
