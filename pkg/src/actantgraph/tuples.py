"""Loading, filtering and indexing of relationship tuples.

A tuple is one extracted ``(arg1, rel, arg2)`` instance from a single review
sentence.  Mentions are identified by their lemmatized head token; the full
noun phrases are kept only as provenance.  The relation index groups tuples
by directed mention pair and is the read-only structure every later stage
consumes.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConsistencyError, TupleFormatError, UnknownMentionError

logger = logging.getLogger(__name__)

PATTERNS = ("SVO", "SVP", "APPOS", "SVCOP", "SRL")

INDEX_FORMAT_VERSION = 1

_REQUIRED_FIELDS = (
    "review_id",
    "sentence_id",
    "arg1",
    "arg1_head",
    "rel",
    "rel_head",
    "arg2",
    "arg2_head",
    "pattern",
)


@dataclass(frozen=True)
class RelationTuple:
    """One extracted subject-relation-object instance."""

    review_id: str
    sentence_id: int
    arg1: str
    arg1_head: str
    rel: str
    rel_head: str
    arg2: str
    arg2_head: str
    pattern: str

    def __post_init__(self) -> None:
        if self.sentence_id < 0:
            raise TupleFormatError(f"sentence_id must be >= 0, got {self.sentence_id}")
        for name in ("arg1", "arg2", "arg1_head", "arg2_head", "rel_head"):
            value = getattr(self, name)
            if not isinstance(value, str) or not value.strip():
                raise TupleFormatError(f"field {name} must be a non-empty string")
            if value != value.strip():
                raise TupleFormatError(f"field {name} has surrounding whitespace: {value!r}")
        if self.pattern not in PATTERNS:
            raise TupleFormatError(
                f"pattern must be one of {PATTERNS}, got {self.pattern!r}"
            )

    @classmethod
    def from_record(cls, record: dict) -> "RelationTuple":
        """Build from a parsed JSON object; unknown extra fields are ignored."""
        missing = [name for name in _REQUIRED_FIELDS if name not in record]
        if missing:
            raise TupleFormatError(f"missing fields: {', '.join(missing)}")
        sentence_id = record["sentence_id"]
        if not isinstance(sentence_id, int) or isinstance(sentence_id, bool):
            raise TupleFormatError(f"sentence_id must be an integer, got {sentence_id!r}")
        return cls(
            review_id=str(record["review_id"]),
            sentence_id=sentence_id,
            arg1=str(record["arg1"]),
            arg1_head=str(record["arg1_head"]),
            rel=str(record["rel"]),
            rel_head=str(record["rel_head"]),
            arg2=str(record["arg2"]),
            arg2_head=str(record["arg2_head"]),
            pattern=str(record["pattern"]),
        )

    def to_record(self) -> dict:
        return {
            "review_id": self.review_id,
            "sentence_id": self.sentence_id,
            "arg1": self.arg1,
            "arg1_head": self.arg1_head,
            "rel": self.rel,
            "rel_head": self.rel_head,
            "arg2": self.arg2,
            "arg2_head": self.arg2_head,
            "pattern": self.pattern,
        }


@dataclass
class TupleCorpus:
    """An ordered collection of tuples plus per-mention occurrence counts."""

    tuples: list[RelationTuple]
    mention_counts: Counter
    skipped: list[tuple[int, str]] = field(default_factory=list)

    @classmethod
    def from_tuples(
        cls, tuples: list[RelationTuple], skipped: list[tuple[int, str]] | None = None
    ) -> "TupleCorpus":
        counts: Counter = Counter()
        for t in tuples:
            counts[t.arg1_head] += 1
            counts[t.arg2_head] += 1
        return cls(tuples=tuples, mention_counts=counts, skipped=list(skipped or []))

    def __len__(self) -> int:
        return len(self.tuples)


@dataclass(frozen=True)
class MentionVocabulary:
    """Mentions that survived the frequency floor, with their corpus counts."""

    counts: dict[str, int]
    min_count: int

    @property
    def mentions(self) -> frozenset:
        return frozenset(self.counts)

    def __contains__(self, mention: str) -> bool:
        return mention in self.counts

    def __len__(self) -> int:
        return len(self.counts)


def load_tuples(path: str | Path) -> TupleCorpus:
    """Read a UTF-8 JSON-lines tuple file.

    Malformed lines are skipped and recorded with their line number; more
    than 50% malformed lines is treated as the wrong file format and fails.
    """
    path = Path(path)
    tuples: list[RelationTuple] = []
    skipped: list[tuple[int, str]] = []
    total = 0
    with path.open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            total += 1
            try:
                record = json.loads(line)
                if not isinstance(record, dict):
                    raise TupleFormatError("line is not a JSON object")
                tuples.append(RelationTuple.from_record(record))
            except (json.JSONDecodeError, TupleFormatError) as exc:
                skipped.append((line_no, str(exc)))
    if total and len(skipped) * 2 > total:
        raise TupleFormatError(
            f"{path}: {len(skipped)} of {total} lines malformed; not a tuple file?"
        )
    if skipped:
        logger.warning("%s: skipped %d malformed lines", path, len(skipped))
    return TupleCorpus.from_tuples(tuples, skipped)


def filter_and_dedup(
    corpus: TupleCorpus, min_count: int = 50
) -> tuple[TupleCorpus, MentionVocabulary]:
    """Drop tuples with infrequent argument heads and collapse exact duplicates.

    The floor applies to a head's total occurrence count over the whole
    corpus, subject and object roles combined, iterated to a fixpoint:
    removing a rare mention's tuples lowers other counts, so pruning repeats
    until every surviving mention still meets the floor.  That makes the
    operation idempotent.  Duplicates are tuples that agree on review,
    sentence, both argument heads and the relation head; the same fact
    asserted in different reviews is kept as separate evidence.
    """
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")

    seen: set = set()
    survivors: list[RelationTuple] = []
    for t in corpus.tuples:
        key = (t.review_id, t.sentence_id, t.arg1_head, t.arg2_head, t.rel_head)
        if key in seen:
            continue
        seen.add(key)
        survivors.append(t)

    def recount(tuples: list[RelationTuple]) -> Counter:
        counts: Counter = Counter()
        for t in tuples:
            counts[t.arg1_head] += 1
            counts[t.arg2_head] += 1
        return counts

    # The first qualification uses raw corpus counts, duplicates included.
    counts: Counter = Counter(corpus.mention_counts)
    while True:
        frequent = {m for m, c in counts.items() if c >= min_count}
        kept = [
            t for t in survivors if t.arg1_head in frequent and t.arg2_head in frequent
        ]
        new_counts = recount(kept)
        if len(kept) == len(survivors) and new_counts == counts:
            break
        survivors, counts = kept, new_counts

    vocabulary = MentionVocabulary(
        counts={m: counts[m] for m in sorted(counts)}, min_count=min_count
    )
    return TupleCorpus.from_tuples(survivors), vocabulary


class RelationIndex:
    """Directed mention-pair index over relation phrases.

    ``edges[(a, b)]`` is a multiset of ``(phrase, headword)`` pairs drawn from
    every surviving tuple with subject head ``a`` and object head ``b``.
    Self-loops and parallel entries are legal.  Instances are immutable after
    construction and safe to share across workers.
    """

    def __init__(self, edges: dict, vocabulary: MentionVocabulary):
        self.edges: dict[tuple[str, str], Counter] = edges
        self.vocabulary = vocabulary
        self._out: dict[str, set] = {}
        self._in: dict[str, set] = {}
        for (a, b) in edges:
            self._out.setdefault(a, set()).add(b)
            self._in.setdefault(b, set()).add(a)

    # -- queries -----------------------------------------------------------

    def instance_count(self, a: str, b: str) -> int:
        """Number of relation instances from a to b (multiset size)."""
        counter = self.edges.get((a, b))
        return sum(counter.values()) if counter else 0

    def headwords(self, a: str, b: str) -> frozenset:
        """Distinct relation headwords observed from a to b."""
        counter = self.edges.get((a, b))
        if not counter:
            return frozenset()
        return frozenset(head for (_, head) in counter)

    def phrases(self, a: str, b: str) -> Counter:
        """Relation phrases from a to b with their instance counts."""
        counter = self.edges.get((a, b))
        result: Counter = Counter()
        if counter:
            for (phrase, _), count in counter.items():
                result[phrase] += count
        return result

    def neighbours(self, mention: str) -> set:
        """All mentions directly related to ``mention`` in either direction."""
        if mention not in self.vocabulary:
            raise UnknownMentionError(mention)
        return self._out.get(mention, set()) | self._in.get(mention, set())

    def total_instances(self) -> int:
        return sum(sum(c.values()) for c in self.edges.values())

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        edges = []
        for (a, b) in sorted(self.edges):
            relations = [
                {"phrase": phrase, "head": head, "count": count}
                for (phrase, head), count in sorted(self.edges[(a, b)].items())
            ]
            edges.append({"source": a, "target": b, "relations": relations})
        return {
            "format_version": INDEX_FORMAT_VERSION,
            "min_count": self.vocabulary.min_count,
            "vocabulary": dict(sorted(self.vocabulary.counts.items())),
            "edges": edges,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RelationIndex":
        version = data.get("format_version")
        if version != INDEX_FORMAT_VERSION:
            raise TupleFormatError(f"unsupported index format_version: {version!r}")
        vocabulary = MentionVocabulary(
            counts={str(m): int(c) for m, c in data["vocabulary"].items()},
            min_count=int(data.get("min_count", 1)),
        )
        edges: dict[tuple[str, str], Counter] = {}
        for entry in data["edges"]:
            key = (entry["source"], entry["target"])
            counter: Counter = Counter()
            for rel in entry["relations"]:
                counter[(rel["phrase"], rel["head"])] += int(rel["count"])
            edges[key] = counter
        return cls(edges, vocabulary)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path: str | Path) -> "RelationIndex":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def build_relation_index(corpus: TupleCorpus, vocabulary: MentionVocabulary) -> RelationIndex:
    """Index a filtered corpus by directed (subject head, object head) pair."""
    edges: dict[tuple[str, str], Counter] = {}
    for t in corpus.tuples:
        if t.arg1_head not in vocabulary or t.arg2_head not in vocabulary:
            raise ConsistencyError(
                f"tuple references mention outside the vocabulary: "
                f"({t.arg1_head!r}, {t.arg2_head!r})"
            )
        edges.setdefault((t.arg1_head, t.arg2_head), Counter())[(t.rel, t.rel_head)] += 1
    return RelationIndex(edges, vocabulary)
