"""Consensus narrative networks from noisy per-review relationship tuples."""

__version__ = "0.1.0"

from .clustering import (
    ClusterSet,
    RelationBundle,
    RelationCluster,
    aggregate_relations,
    cluster_relations,
    filter_valid_clusters,
)
from .embeddings import (
    EmbeddingGateway,
    FileEmbeddingGateway,
    ServiceEmbeddingGateway,
    cosine_similarity,
    open_gateway,
)
from .evaluation import (
    EvalMetrics,
    GroundTruth,
    MappingResult,
    align_actants,
    compute_metrics,
    map_clusters_to_ground_truth,
)
from .graph import (
    NarrativeNetwork,
    apply_thresholds,
    assemble_network,
    classify_meta_actants,
    export_network,
)
from .grouping import (
    EntityMentionGroup,
    GroupingConfig,
    GroupingResult,
    ScoreMatrix,
    form_groups,
    incompatible,
    score_matrix,
    similarity_component,
)
from .synth import (
    AnswerKey,
    HiddenNarrative,
    SynthConfig,
    generate_corpus,
    recovery_report,
)
from .tuples import (
    MentionVocabulary,
    RelationIndex,
    RelationTuple,
    TupleCorpus,
    build_relation_index,
    filter_and_dedup,
    load_tuples,
)

__all__ = [
    "__version__",
    "AnswerKey",
    "ClusterSet",
    "EmbeddingGateway",
    "EntityMentionGroup",
    "EvalMetrics",
    "FileEmbeddingGateway",
    "GroundTruth",
    "GroupingConfig",
    "GroupingResult",
    "HiddenNarrative",
    "MappingResult",
    "MentionVocabulary",
    "NarrativeNetwork",
    "RelationBundle",
    "RelationCluster",
    "RelationIndex",
    "RelationTuple",
    "ScoreMatrix",
    "ServiceEmbeddingGateway",
    "SynthConfig",
    "TupleCorpus",
    "aggregate_relations",
    "align_actants",
    "apply_thresholds",
    "assemble_network",
    "build_relation_index",
    "classify_meta_actants",
    "cluster_relations",
    "compute_metrics",
    "cosine_similarity",
    "export_network",
    "filter_and_dedup",
    "filter_valid_clusters",
    "form_groups",
    "generate_corpus",
    "incompatible",
    "load_tuples",
    "map_clusters_to_ground_truth",
    "open_gateway",
    "recovery_report",
    "score_matrix",
    "similarity_component",
]
