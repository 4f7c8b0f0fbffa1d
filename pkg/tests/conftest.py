from __future__ import annotations

import sys
from collections import Counter
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from actantgraph.tuples import MentionVocabulary, RelationIndex


class StubGateway:
    """In-memory embedding provider for tests."""

    def __init__(self, table: dict[str, list | np.ndarray]):
        self.table = {k: np.asarray(v, dtype=np.float64) for k, v in table.items()}
        self.calls = 0

    def get_vectors(self, phrases):
        self.calls += 1
        return [self.table[p].copy() for p in phrases]

    def get_vector(self, phrase):
        return self.get_vectors([phrase])[0]


@pytest.fixture
def stub_gateway_factory():
    return StubGateway


def make_index(edge_spec: dict, counts: dict | None = None, min_count: int = 1) -> RelationIndex:
    """Index from {(a, b): [head, ...]} or {(a, b): [(phrase, head, count), ...]}."""
    edges = {}
    mentions = set()
    for (a, b), entries in edge_spec.items():
        counter: Counter = Counter()
        for entry in entries:
            if isinstance(entry, str):
                counter[(entry, entry)] += 1
            else:
                phrase, head, count = entry
                counter[(phrase, head)] += count
        edges[(a, b)] = counter
        mentions.update((a, b))
    if counts is None:
        counts = {m: 10 for m in sorted(mentions)}
    else:
        for m in mentions:
            counts.setdefault(m, 10)
    vocabulary = MentionVocabulary(counts=dict(sorted(counts.items())), min_count=min_count)
    return RelationIndex(edges, vocabulary)


@pytest.fixture
def index_factory():
    return make_index
