"""Generative story model for synthetic benchmark corpora.

A hidden narrative fixes actants with alias distributions and a set of
contexts, each holding an actant recall distribution and per-edge relation
phrase distributions.  Reviews are sampled context-first, then actant pair,
then relation phrase, then surface aliases, with optional uniform distractor
noise.  Because the hidden structure is known, pipeline output can be scored
for group purity, group completeness and edge recovery, and the generator
also emits a synthetic embedding file in which each phrase vector sits
within a bounded perturbation of its relation group's basis vector.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .clustering import ClusterSet
from .errors import SynthesisError
from .evaluation import GroundTruth, GroundTruthActant, GroundTruthEdge
from .grouping import GroupingResult
from .tuples import RelationTuple, TupleCorpus

MODEL_FORMAT_VERSION = 1
ANSWER_FORMAT_VERSION = 1

_DISTRIBUTION_TOL = 1e-9


def _check_distribution(name: str, dist: dict[str, float]) -> None:
    if not dist:
        raise ValueError(f"{name}: empty distribution")
    if any(p < 0 for p in dist.values()):
        raise ValueError(f"{name}: negative probability")
    total = sum(dist.values())
    if abs(total - 1.0) > _DISTRIBUTION_TOL:
        raise ValueError(f"{name}: probabilities sum to {total}, expected 1")


@dataclass(frozen=True)
class RelationGroup:
    """One semantic relationship on a hidden edge, with its phrase distribution."""

    label: str
    weight: float
    phrases: dict[str, float]


@dataclass(frozen=True)
class HiddenEdge:
    source: str
    target: str
    groups: tuple[RelationGroup, ...]

    def phrase_set(self) -> frozenset:
        return frozenset(p for g in self.groups for p in g.phrases)


@dataclass(frozen=True)
class HiddenContext:
    id: str
    weight: float
    actant_recall: dict[str, float]
    edges: dict[tuple[str, str], HiddenEdge]


@dataclass(frozen=True)
class HiddenActant:
    id: str
    alias_distribution: dict[str, float]


@dataclass
class HiddenNarrative:
    """The latent actant-relationship structure reviews are sampled from."""

    actants: list[HiddenActant]
    contexts: list[HiddenContext]

    def __post_init__(self) -> None:
        seen_aliases: dict[str, str] = {}
        actant_ids = set()
        for actant in self.actants:
            if actant.id in actant_ids:
                raise ValueError(f"duplicate actant id {actant.id!r}")
            actant_ids.add(actant.id)
            _check_distribution(f"actant {actant.id} aliases", actant.alias_distribution)
            for alias in actant.alias_distribution:
                if alias in seen_aliases:
                    raise ValueError(
                        f"alias {alias!r} belongs to both {seen_aliases[alias]!r} "
                        f"and {actant.id!r}"
                    )
                seen_aliases[alias] = actant.id
        _check_distribution(
            "context weights", {c.id: c.weight for c in self.contexts}
        )
        phrase_group: dict[str, str] = {}
        for context in self.contexts:
            _check_distribution(f"context {context.id} recall", context.actant_recall)
            for aid in context.actant_recall:
                if aid not in actant_ids:
                    raise ValueError(f"context {context.id} recalls unknown actant {aid!r}")
            for (source, target), edge in context.edges.items():
                if source not in actant_ids or target not in actant_ids:
                    raise ValueError(f"edge ({source}, {target}) uses unknown actant")
                _check_distribution(
                    f"edge ({source},{target}) groups",
                    {g.label: g.weight for g in edge.groups},
                )
                for group in edge.groups:
                    _check_distribution(
                        f"edge ({source},{target}) group {group.label}", group.phrases
                    )
                    for phrase in group.phrases:
                        previous = phrase_group.setdefault(phrase, group.label)
                        if previous != group.label:
                            raise ValueError(
                                f"phrase {phrase!r} appears in groups "
                                f"{previous!r} and {group.label!r}"
                            )

    # -- derived views -----------------------------------------------------

    def alias_owner(self) -> dict[str, str]:
        return {
            alias: actant.id
            for actant in self.actants
            for alias in actant.alias_distribution
        }

    def phrase_group(self) -> dict[str, str]:
        mapping: dict[str, str] = {}
        for context in self.contexts:
            for edge in context.edges.values():
                for group in edge.groups:
                    for phrase in group.phrases:
                        mapping[phrase] = group.label
        return mapping

    def hidden_edges(self) -> list[dict]:
        """Union of edges over all contexts with their labels and phrases."""
        merged: dict[tuple[str, str], dict] = {}
        for context in self.contexts:
            for key, edge in context.edges.items():
                entry = merged.setdefault(
                    key,
                    {"source": key[0], "target": key[1], "labels": set(), "phrases": set()},
                )
                for group in edge.groups:
                    entry["labels"].add(group.label)
                    entry["phrases"].update(group.phrases)
        return [
            {
                "source": merged[key]["source"],
                "target": merged[key]["target"],
                "labels": sorted(merged[key]["labels"]),
                "phrases": sorted(merged[key]["phrases"]),
            }
            for key in sorted(merged)
        ]

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "actants": [
                {"id": a.id, "aliases": dict(sorted(a.alias_distribution.items()))}
                for a in self.actants
            ],
            "contexts": [
                {
                    "id": c.id,
                    "weight": c.weight,
                    "actant_recall": dict(sorted(c.actant_recall.items())),
                    "edges": [
                        {
                            "source": key[0],
                            "target": key[1],
                            "relations": [
                                {
                                    "label": g.label,
                                    "weight": g.weight,
                                    "phrases": dict(sorted(g.phrases.items())),
                                }
                                for g in c.edges[key].groups
                            ],
                        }
                        for key in sorted(c.edges)
                    ],
                }
                for c in self.contexts
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HiddenNarrative":
        actants = [
            HiddenActant(id=str(a["id"]), alias_distribution={
                str(k): float(v) for k, v in a["aliases"].items()
            })
            for a in data["actants"]
        ]
        contexts = []
        for c in data["contexts"]:
            edges: dict[tuple[str, str], HiddenEdge] = {}
            for e in c["edges"]:
                key = (str(e["source"]), str(e["target"]))
                groups = tuple(
                    RelationGroup(
                        label=str(g["label"]),
                        weight=float(g["weight"]),
                        phrases={str(p): float(w) for p, w in g["phrases"].items()},
                    )
                    for g in e["relations"]
                )
                edges[key] = HiddenEdge(source=key[0], target=key[1], groups=groups)
            contexts.append(
                HiddenContext(
                    id=str(c["id"]),
                    weight=float(c["weight"]),
                    actant_recall={str(k): float(v) for k, v in c["actant_recall"].items()},
                    edges=edges,
                )
            )
        return cls(actants=actants, contexts=contexts)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "HiddenNarrative":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class SynthConfig:
    n_reviews: int = 3000
    tuples_min: int = 2
    tuples_max: int = 6
    noise_rate: float = 0.05
    seed: int = 7
    embedding_dim: int = 32
    perturbation: float = 0.1

    def __post_init__(self) -> None:
        if self.n_reviews < 0:
            raise ValueError("n_reviews must be >= 0")
        if not 0 <= self.tuples_min <= self.tuples_max:
            raise ValueError("need 0 <= tuples_min <= tuples_max")
        if not 0.0 <= self.noise_rate < 1.0:
            raise ValueError("noise_rate must be in [0, 1)")


@dataclass
class AnswerKey:
    """Per-tuple hidden assignments plus the model summary used for scoring."""

    entries: list[dict]
    alias_owner: dict[str, str]
    phrase_group: dict[str, str]
    edges: list[dict]
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "format_version": ANSWER_FORMAT_VERSION,
            "seed": self.seed,
            "alias_owner": dict(sorted(self.alias_owner.items())),
            "phrase_group": dict(sorted(self.phrase_group.items())),
            "edges": self.edges,
            "entries": self.entries,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AnswerKey":
        return cls(
            entries=list(data["entries"]),
            alias_owner=dict(data["alias_owner"]),
            phrase_group=dict(data["phrase_group"]),
            edges=list(data["edges"]),
            seed=int(data.get("seed", 0)),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "AnswerKey":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _weighted_choice(rng: random.Random, dist: dict[str, float]) -> str:
    items = sorted(dist.items())
    return rng.choices([k for k, _ in items], weights=[w for _, w in items], k=1)[0]


def generate_corpus(
    hidden: HiddenNarrative, config: SynthConfig
) -> tuple[TupleCorpus, AnswerKey]:
    """Sample a tuple corpus from the hidden narrative, fully seed-deterministic."""
    rng = random.Random(config.seed)
    actants = {a.id: a for a in hidden.actants}
    context_weights = {c.id: c.weight for c in hidden.contexts}
    contexts = {c.id: c for c in hidden.contexts}
    alias_universe = sorted(hidden.alias_owner())
    phrase_universe = sorted(hidden.phrase_group())

    tuples: list[RelationTuple] = []
    entries: list[dict] = []
    for r in range(config.n_reviews):
        review_id = f"r{r:05d}"
        context = contexts[_weighted_choice(rng, context_weights)]
        outgoing: dict[str, list[str]] = {}
        for (source, target) in context.edges:
            outgoing.setdefault(source, []).append(target)
        n_tuples = rng.randint(config.tuples_min, config.tuples_max)
        for sentence_id in range(n_tuples):
            subject = None
            for _ in range(20):
                candidate = _weighted_choice(rng, context.actant_recall)
                if candidate in outgoing:
                    subject = candidate
                    break
            if subject is None:
                raise SynthesisError(
                    f"context {context.id!r}: could not sample an actant with "
                    "an outgoing edge after 20 tries"
                )
            partners = sorted(outgoing[subject])
            partner_recall = {
                p: context.actant_recall.get(p, 0.0) for p in partners
            }
            if sum(partner_recall.values()) <= 0.0:
                partner_recall = {p: 1.0 for p in partners}
            target = _weighted_choice(rng, partner_recall)
            edge = context.edges[(subject, target)]
            group = edge.groups[
                rng.choices(
                    range(len(edge.groups)), weights=[g.weight for g in edge.groups], k=1
                )[0]
            ]
            phrase = _weighted_choice(rng, group.phrases)
            alias1 = _weighted_choice(rng, actants[subject].alias_distribution)
            alias2 = _weighted_choice(rng, actants[target].alias_distribution)

            noised: str | None = None
            if config.noise_rate > 0.0 and rng.random() < config.noise_rate:
                noised = rng.choice(["rel", "arg1", "arg2"])
                if noised == "rel":
                    phrase = rng.choice(phrase_universe)
                elif noised == "arg1":
                    alias1 = rng.choice(alias_universe)
                else:
                    alias2 = rng.choice(alias_universe)

            tuples.append(
                RelationTuple(
                    review_id=review_id,
                    sentence_id=sentence_id,
                    arg1=alias1,
                    arg1_head=alias1,
                    rel=phrase,
                    rel_head=phrase.split()[0],
                    arg2=alias2,
                    arg2_head=alias2,
                    pattern="SVO",
                )
            )
            entries.append(
                {
                    "review_id": review_id,
                    "sentence_id": sentence_id,
                    "context": context.id,
                    "source": subject,
                    "target": target,
                    "group": group.label,
                    "phrase": phrase,
                    "noised": noised,
                }
            )

    key = AnswerKey(
        entries=entries,
        alias_owner=hidden.alias_owner(),
        phrase_group=hidden.phrase_group(),
        edges=hidden.hidden_edges(),
        seed=config.seed,
    )
    return TupleCorpus.from_tuples(tuples), key


def _phrase_rng(seed: int, phrase: str) -> np.random.Generator:
    digest = hashlib.sha256(f"{seed}:{phrase}".encode("utf-8")).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "big"))


def synthetic_embeddings(
    hidden: HiddenNarrative, config: SynthConfig
) -> tuple[int, dict[str, np.ndarray]]:
    """Planted phrase vectors: group basis plus a perturbation of norm <= bound.

    Group labels themselves get the exact basis vector so ground-truth
    labels can be embedded through the same file.
    """
    phrase_group = hidden.phrase_group()
    labels = sorted({label for label in phrase_group.values()})
    dim = config.embedding_dim
    if dim < len(labels):
        raise ValueError(
            f"embedding_dim {dim} is smaller than the {len(labels)} relation groups"
        )
    rng = np.random.default_rng(config.seed)
    ortho, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    basis = {label: ortho[:, i].copy() for i, label in enumerate(labels)}

    records: dict[str, np.ndarray] = {label: vec for label, vec in basis.items()}
    for phrase in sorted(phrase_group):
        prng = _phrase_rng(config.seed, phrase)
        direction = prng.normal(size=dim)
        direction /= np.linalg.norm(direction)
        radius = config.perturbation * prng.random() ** (1.0 / dim)
        records[phrase] = basis[phrase_group[phrase]] + radius * direction
    return dim, records


def derive_ground_truth(hidden: HiddenNarrative) -> GroundTruth:
    """Expert-style ground truth implied by the hidden model."""
    actants = []
    for actant in hidden.actants:
        label = sorted(
            actant.alias_distribution, key=lambda a: (-actant.alias_distribution[a], a)
        )[0]
        actants.append(
            GroundTruthActant(
                id=actant.id,
                label=label,
                aliases=tuple(sorted(actant.alias_distribution)),
            )
        )
    edges = [
        GroundTruthEdge(
            source_id=entry["source"],
            target_id=entry["target"],
            labels=tuple(entry["labels"]),
        )
        for entry in hidden.hidden_edges()
    ]
    return GroundTruth(actants=actants, edges=edges)


@dataclass
class RecoveryReport:
    """How well the pipeline recovered the planted structure."""

    purity: float
    completeness: float
    edge_recovery: float
    per_group_purity: dict[str, float] = field(default_factory=dict)
    per_actant_completeness: dict[str, float] = field(default_factory=dict)
    missing_actants: list[str] = field(default_factory=list)
    unrecovered_edges: list[list[str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "purity": self.purity,
            "completeness": self.completeness,
            "edge_recovery": self.edge_recovery,
            "per_group_purity": dict(sorted(self.per_group_purity.items())),
            "per_actant_completeness": dict(sorted(self.per_actant_completeness.items())),
            "missing_actants": self.missing_actants,
            "unrecovered_edges": self.unrecovered_edges,
        }


def recovery_report(
    answer: AnswerKey,
    grouping: GroupingResult,
    clusters: dict[tuple[str, str], ClusterSet],
) -> RecoveryReport:
    """Score grouping and clustering output against the planted answer key.

    Purity: per group, the mention-mass fraction owned by its majority
    actant (mass = corpus frequency).  Completeness: per actant, the
    fraction of its alias mass concentrated in a single group.  Edge
    recovery: fraction of hidden edges with at least one surviving cluster
    containing a true relation phrase.  Aggregates are mass-weighted means.
    """
    owner = answer.alias_owner

    group_mass = []
    per_group_purity: dict[str, float] = {}
    actant_group_mass: dict[str, dict[int, int]] = {}
    for position, group in enumerate(grouping.groups):
        by_actant: dict[str, int] = {}
        total = 0
        for mention in group.members:
            mass = group.member_frequencies[mention]
            total += mass
            actant = owner.get(mention)
            if actant is None:
                continue
            by_actant[actant] = by_actant.get(actant, 0) + mass
            actant_masses = actant_group_mass.setdefault(actant, {})
            actant_masses[position] = actant_masses.get(position, 0) + mass
        majority = max(by_actant.values(), default=0)
        purity = majority / total if total else 0.0
        per_group_purity[group.label] = purity
        group_mass.append((purity, total))
    total_mass = sum(mass for _, mass in group_mass)
    purity = (
        sum(p * mass for p, mass in group_mass) / total_mass if total_mass else 0.0
    )

    per_actant_completeness: dict[str, float] = {}
    missing: list[str] = []
    main_group: dict[str, int] = {}
    weighted = 0.0
    weight_total = 0
    for actant_id in sorted({a for a in owner.values()}):
        masses = actant_group_mass.get(actant_id)
        if not masses:
            missing.append(actant_id)
            continue
        best_position = sorted(masses, key=lambda pos: (-masses[pos], pos))[0]
        total = sum(masses.values())
        completeness = masses[best_position] / total
        per_actant_completeness[actant_id] = completeness
        main_group[actant_id] = best_position
        weighted += completeness * total
        weight_total += total
    completeness = weighted / weight_total if weight_total else 0.0

    recovered = 0
    unrecovered: list[list[str]] = []
    for edge in answer.edges:
        phrases = set(edge["phrases"])
        source_pos = main_group.get(edge["source"])
        target_pos = main_group.get(edge["target"])
        hit = False
        if source_pos is not None and target_pos is not None:
            key = (
                grouping.groups[source_pos].label,
                grouping.groups[target_pos].label,
            )
            cluster_set = clusters.get(key)
            if cluster_set:
                hit = any(
                    member in phrases
                    for cluster in cluster_set.clusters
                    for member in cluster.members
                )
        if hit:
            recovered += 1
        else:
            unrecovered.append([edge["source"], edge["target"]])
    edge_recovery = recovered / len(answer.edges) if answer.edges else 1.0

    return RecoveryReport(
        purity=purity,
        completeness=completeness,
        edge_recovery=edge_recovery,
        per_group_purity=per_group_purity,
        per_actant_completeness=per_actant_completeness,
        missing_actants=missing,
        unrecovered_edges=unrecovered,
    )


def write_tuple_file(corpus: TupleCorpus, path: str | Path) -> None:
    """Write tuples in the JSON-lines exchange format."""
    with Path(path).open("w", encoding="utf-8") as handle:
        for t in corpus.tuples:
            handle.write(json.dumps(t.to_record(), sort_keys=True) + "\n")


def _alias_dist(*aliases: str) -> dict[str, float]:
    shares = {2: (0.6, 0.4), 3: (0.5, 0.3, 0.2), 4: (0.4, 0.3, 0.2, 0.1)}
    return dict(zip(aliases, shares[len(aliases)]))


def _edge(source: str, target: str, *groups: tuple[str, list[str]]) -> HiddenEdge:
    weight = 1.0 / len(groups)
    built = tuple(
        RelationGroup(
            label=label,
            weight=weight,
            phrases={p: 1.0 / len(phrases) for p in phrases},
        )
        for label, phrases in groups
    )
    return HiddenEdge(source=source, target=target, groups=built)


def demo_narrative() -> HiddenNarrative:
    """A ten-actant fairy-tale model used by the benchmark suite and docs.

    Each actant carries two to four aliases; five contexts cover different
    corners of the story, and every edge uses its own relation group so that
    alias grouping is recoverable from shared relationship headwords alone.
    """
    actants = [
        HiddenActant("knight", _alias_dist("knight", "rider", "galen")),
        HiddenActant("princess", _alias_dist("princess", "lady")),
        HiddenActant("dragon", _alias_dist("dragon", "wyrm", "beast", "smolder")),
        HiddenActant("wizard", _alias_dist("wizard", "sage")),
        HiddenActant("king", _alias_dist("king", "ruler", "crown")),
        HiddenActant("thief", _alias_dist("thief", "rogue", "shadow", "fingers")),
        HiddenActant("queen", _alias_dist("queen", "regent")),
        HiddenActant("giant", _alias_dist("giant", "ogre", "brute")),
        HiddenActant("witch", _alias_dist("witch", "crone", "hag", "morgana")),
        HiddenActant("bard", _alias_dist("bard", "minstrel")),
    ]

    def ctx(cid, weight, recall, edges):
        return HiddenContext(
            id=cid,
            weight=weight,
            actant_recall=recall,
            edges={(e.source, e.target): e for e in edges},
        )

    contexts = [
        ctx(
            "quest",
            0.25,
            {"knight": 0.3, "dragon": 0.25, "princess": 0.25, "wizard": 0.2},
            [
                _edge("knight", "dragon", ("attack", ["slay", "strike", "battle"])),
                _edge("princess", "dragon", ("fear", ["fear", "dread"])),
                _edge("dragon", "princess", ("capture", ["capture", "seize", "imprison"])),
                _edge("princess", "knight", ("love", ["love", "adore", "cherish"])),
                _edge("wizard", "knight", ("teach", ["teach", "guide", "train"])),
            ],
        ),
        ctx(
            "court",
            0.2,
            {"king": 0.3, "queen": 0.25, "princess": 0.25, "bard": 0.2},
            [
                _edge("king", "queen", ("love", ["love", "adore", "cherish"])),
                _edge("queen", "king", ("advise", ["advise", "counsel"])),
                _edge("bard", "king", ("serve", ["serve", "entertain"])),
                _edge("king", "princess", ("protect", ["protect", "shelter"])),
                _edge("princess", "king", ("obey", ["obey", "honor"])),
            ],
        ),
        ctx(
            "heist",
            0.2,
            {"thief": 0.35, "king": 0.2, "giant": 0.25, "wizard": 0.2},
            [
                _edge("thief", "king", ("steal", ["steal", "rob", "plunder"])),
                _edge("king", "thief", ("judge", ["judge", "sentence", "condemn"])),
                _edge("giant", "thief", ("chase", ["chase", "pursue", "hunt"])),
                _edge("thief", "giant", ("trick", ["trick", "deceive", "fool"])),
                _edge("wizard", "thief", ("curse", ["curse", "hex", "jinx"])),
            ],
        ),
        ctx(
            "war",
            0.2,
            {"king": 0.25, "giant": 0.3, "knight": 0.25, "witch": 0.2},
            [
                _edge("giant", "king", ("siege", ["siege", "storm", "raze"])),
                _edge("knight", "giant", ("duel", ["duel", "wrestle"])),
                _edge("witch", "knight", ("blight", ["blight", "poison", "wither"])),
                _edge("king", "knight", ("command", ["command", "order", "send"])),
            ],
        ),
        ctx(
            "forest",
            0.15,
            {"witch": 0.3, "bard": 0.2, "princess": 0.25, "thief": 0.25},
            [
                _edge("witch", "princess", ("envy", ["envy", "resent"])),
                _edge("bard", "princess", ("praise", ["praise", "flatter"])),
                _edge("thief", "witch", ("spy", ["spy", "stalk", "watch"])),
                _edge("bard", "witch", ("mock", ["mock", "taunt"])),
                _edge("princess", "witch", ("plead", ["plead", "beg"])),
            ],
        ),
    ]
    return HiddenNarrative(actants=actants, contexts=contexts)
