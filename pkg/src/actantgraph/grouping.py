"""Entity mention grouping.

Different surface mentions of the same actant (``bilbo``, ``baggins``,
``burglar``) are detected through the relationships they share with third
mentions: two mentions score highly when the headwords of their relation
phrases towards (and from) every other mention overlap strongly.  Pairs that
relate to each other directly too often are incompatible, since a frequent
subject-object link means two different actants.

Scores feed a per-mention ranked candidate scan governed by two cutoffs:
``alpha`` (absolute floor, resolved from a percentile of the non-zero score
distribution) and ``beta`` (a stop rule: scanning a mention's descending
candidate list halts before the first successive pair of scores whose ratio
reaches ``beta``).  Accepted pairs are merged transitively, except where a
merge would pull an incompatible pair into one group.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegenerateInputError, UnknownGroupError, UnknownMentionError
from .tuples import RelationIndex

GROUPS_FORMAT_VERSION = 1


@dataclass(frozen=True)
class GroupingConfig:
    """Hyperparameters for mention grouping.

    gamma: direct-relation instance count at which a pair becomes incompatible.
    alpha_percentile: percentile of the non-zero score distribution that
        resolves the acceptance floor alpha.
    beta: successive-score ratio at which candidate acceptance stops.
    alpha_override: fixed alpha, bypassing the percentile resolution.
    """

    gamma: int = 3
    alpha_percentile: float = 75.0
    beta: float = 2.0
    alpha_override: float | None = None

    def __post_init__(self) -> None:
        if self.gamma < 1:
            raise ValueError(f"gamma must be >= 1, got {self.gamma}")
        if self.beta < 1:
            raise ValueError(f"beta must be >= 1, got {self.beta}")
        if not 0.0 < self.alpha_percentile < 100.0:
            raise ValueError(
                f"alpha_percentile must be in (0, 100), got {self.alpha_percentile}"
            )


def incompatible(index: RelationIndex, m_i: str, m_j: str, gamma: int = 3) -> bool:
    """True when two mentions relate to each other directly at least gamma times."""
    for m in (m_i, m_j):
        if m not in index.vocabulary:
            raise UnknownMentionError(m)
    return index.instance_count(m_i, m_j) + index.instance_count(m_j, m_i) >= gamma


def _conditional_overlap(t_a: frozenset, t_b: frozenset) -> float:
    # |t_a ∩ t_b| / |t_b|; an empty conditioning set contributes nothing.
    if not t_b:
        return 0.0
    return len(t_a & t_b) / len(t_b)


def similarity_component(
    index: RelationIndex, m_i: str, m_j: str, m_k: str
) -> tuple[float, float]:
    """Similarity evidence for (m_i, m_j) contributed by a third mention m_k.

    Returns ``(s_obj, s_subj)``: headword-set overlap with m_k in the object
    role and in the subject role respectively.  Each value lies in [0, 2],
    reaching 2 when the two mentions share exactly the same relation
    headwords with m_k.
    """
    t_ik = index.headwords(m_i, m_k)
    t_jk = index.headwords(m_j, m_k)
    s_obj = _conditional_overlap(t_ik, t_jk) + _conditional_overlap(t_jk, t_ik)
    t_ki = index.headwords(m_k, m_i)
    t_kj = index.headwords(m_k, m_j)
    s_subj = _conditional_overlap(t_ki, t_kj) + _conditional_overlap(t_kj, t_ki)
    return s_obj, s_subj


@dataclass
class ScoreMatrix:
    """Symmetric non-zero similarity scores over compatible mention pairs."""

    scores: dict[tuple[str, str], float]
    alpha: float

    def get(self, m_i: str, m_j: str) -> float:
        return self.scores.get(_pair_key(m_i, m_j), 0.0)

    def nonzero_scores(self) -> list[float]:
        return sorted(self.scores.values())

    def partners(self, mention: str) -> list[tuple[str, float]]:
        out = []
        for (a, b), score in self.scores.items():
            if a == mention:
                out.append((b, score))
            elif b == mention:
                out.append((a, score))
        return out


def _pair_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


def score_matrix(index: RelationIndex, config: GroupingConfig) -> ScoreMatrix:
    """Aggregate similarity over all third mentions for every compatible pair.

    Incompatible pairs are excluded before scoring; zero scores are omitted.
    Alpha resolves to the configured percentile of the non-zero scores
    (linear interpolation) unless overridden.
    """
    mentions = sorted(index.vocabulary.counts)
    if len(mentions) < 3:
        raise DegenerateInputError(
            f"similarity scoring needs at least 3 mentions, got {len(mentions)}"
        )
    scores: dict[tuple[str, str], float] = {}
    for idx, m_i in enumerate(mentions):
        near_i = index.neighbours(m_i)
        for m_j in mentions[idx + 1 :]:
            if incompatible(index, m_i, m_j, config.gamma):
                continue
            # Only third mentions related to either side can contribute.
            third = (near_i | index.neighbours(m_j)) - {m_i, m_j}
            total = 0.0
            for m_k in sorted(third):
                s_obj, s_subj = similarity_component(index, m_i, m_j, m_k)
                total += s_obj + s_subj
            if total > 0.0:
                scores[(m_i, m_j)] = total

    if config.alpha_override is not None:
        alpha = float(config.alpha_override)
    elif scores:
        alpha = float(np.percentile(sorted(scores.values()), config.alpha_percentile))
    else:
        alpha = math.inf  # nothing scored; grouping degenerates to singletons
    return ScoreMatrix(scores=scores, alpha=alpha)


@dataclass
class EntityMentionGroup:
    """A set of mentions resolved to one actant, labeled by its most frequent member."""

    label: str
    members: frozenset
    member_frequencies: dict[str, int]

    @property
    def total_frequency(self) -> int:
        return sum(self.member_frequencies.values())


@dataclass
class GroupingResult:
    """A partition of the vocabulary into labeled actant groups."""

    groups: list[EntityMentionGroup]
    assignment: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.assignment:
            self.assignment = {
                m: i for i, g in enumerate(self.groups) for m in sorted(g.members)
            }

    def group_of(self, mention: str) -> EntityMentionGroup:
        try:
            return self.groups[self.assignment[mention]]
        except KeyError:
            raise UnknownMentionError(mention) from None

    def by_label(self, label: str) -> EntityMentionGroup:
        for g in self.groups:
            if g.label == label:
                return g
        raise UnknownGroupError(label)

    def labels(self) -> list[str]:
        return [g.label for g in self.groups]

    def to_dict(self, scores: ScoreMatrix | None = None, config: GroupingConfig | None = None) -> dict:
        doc: dict = {
            "format_version": GROUPS_FORMAT_VERSION,
            "groups": [
                {
                    "label": g.label,
                    "members": sorted(g.members),
                    "frequencies": {m: g.member_frequencies[m] for m in sorted(g.members)},
                }
                for g in self.groups
            ],
        }
        if scores is not None:
            doc["alpha"] = scores.alpha
            doc["scores"] = [
                {"pair": [a, b], "score": s}
                for (a, b), s in sorted(
                    scores.scores.items(), key=lambda kv: (-kv[1], kv[0])
                )
            ]
        if config is not None:
            doc["config"] = {
                "gamma": config.gamma,
                "alpha_percentile": config.alpha_percentile,
                "beta": config.beta,
                "alpha_override": config.alpha_override,
            }
        return doc

    @classmethod
    def from_dict(cls, data: dict) -> "GroupingResult":
        groups = [
            EntityMentionGroup(
                label=entry["label"],
                members=frozenset(entry["members"]),
                member_frequencies={m: int(c) for m, c in entry["frequencies"].items()},
            )
            for entry in data["groups"]
        ]
        return cls(groups=groups)

    def save(self, path: str | Path, scores: ScoreMatrix | None = None,
             config: GroupingConfig | None = None) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(scores, config), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path: str | Path) -> "GroupingResult":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


class UnionFind:
    """Disjoint sets over mention strings with path compression."""

    def __init__(self, items):
        self.parent = {item: item for item in items}
        self.size = {item: 1 for item in items}

    def find(self, x: str) -> str:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: str, y: str) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        if self.size[rx] < self.size[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]

    def members(self, x: str) -> set:
        root = self.find(x)
        return {item for item in self.parent if self.find(item) == root}


def form_groups(
    matrix: ScoreMatrix, index: RelationIndex, config: GroupingConfig
) -> GroupingResult:
    """Turn pairwise accept decisions into labeled groups.

    Each mention scans its candidates in descending score order, accepting
    while the score stays at or above alpha and no successive ratio reaches
    beta.  Accepted pairs are merged strongest-first; a merge is vetoed when
    any cross pair of the two components is incompatible, which keeps the
    incompatibility rule absolute regardless of scores.
    """
    freq = index.vocabulary.counts
    mentions = sorted(freq)

    accepted: dict[tuple[str, str], float] = {}
    for m_i in mentions:
        ranked = sorted(
            matrix.partners(m_i), key=lambda ps: (-ps[1], -freq.get(ps[0], 0), ps[0])
        )
        previous: float | None = None
        for m_j, score in ranked:
            if score < matrix.alpha:
                break
            if previous is not None and previous / score >= config.beta:
                break
            key = _pair_key(m_i, m_j)
            accepted[key] = max(accepted.get(key, 0.0), score)
            previous = score

    uf = UnionFind(mentions)
    components: dict[str, set] = {m: {m} for m in mentions}
    for (a, b), _ in sorted(accepted.items(), key=lambda kv: (-kv[1], kv[0])):
        ra, rb = uf.find(a), uf.find(b)
        if ra == rb:
            continue
        vetoed = any(
            incompatible(index, x, y, config.gamma)
            for x in components[ra]
            for y in components[rb]
        )
        if vetoed:
            continue
        uf.union(a, b)
        root = uf.find(a)
        merged = components.pop(ra) | components.pop(rb)
        components[root] = merged

    groups = []
    for members in components.values():
        frequencies = {m: freq[m] for m in members}
        # Most frequent member labels the group; ties break lexicographically.
        label = sorted(members, key=lambda m: (-frequencies[m], m))[0]
        groups.append(
            EntityMentionGroup(
                label=label, members=frozenset(members), member_frequencies=frequencies
            )
        )
    groups.sort(key=lambda g: (-g.total_frequency, g.label))
    return GroupingResult(groups=groups)
