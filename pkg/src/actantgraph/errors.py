"""Exception hierarchy shared across pipeline stages."""


class PipelineError(Exception):
    """Base class for all actantgraph errors."""


class TupleFormatError(PipelineError):
    """A tuple file is unreadable or contains too many malformed records."""


class ConsistencyError(PipelineError):
    """Internal invariant broken, e.g. an index referencing an unknown mention."""


class UnknownMentionError(PipelineError, KeyError):
    """A mention was looked up that is not part of the vocabulary."""


class UnknownGroupError(PipelineError, KeyError):
    """An actant group label was looked up that does not exist."""


class DegenerateInputError(PipelineError):
    """Input too small for the operation (e.g. scoring needs three mentions)."""


class MissingEmbeddingError(PipelineError):
    """A phrase has no vector in a file-backed embedding source."""

    def __init__(self, phrase: str):
        super().__init__(f"no embedding available for phrase: {phrase!r}")
        self.phrase = phrase


class EmbeddingTransportError(PipelineError):
    """The embedding service could not be reached or returned a failure."""


class EmbeddingContractError(PipelineError):
    """The embedding source violated its wire or file contract."""


class ZeroVectorError(PipelineError):
    """Cosine similarity is undefined for an all-zero vector."""


class AmbiguousAlignmentError(PipelineError):
    """One extracted group matches more than one ground-truth actant."""


class UndefinedMetricError(PipelineError):
    """Metrics cannot be computed (e.g. the ground truth carries no labels)."""


class SynthesisError(PipelineError):
    """The generative model could not produce a sample (e.g. edgeless context)."""
