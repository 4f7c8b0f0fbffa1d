"""Phrase-vector lookup from a precomputed file or a remote HTTP service.

Both sources share the cache-first gateway interface; the file source loads
everything up front and fails on misses, the service source batches misses
into one POST per call.  Vectors are held as float64 regardless of the
precision they were written with.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from pathlib import Path

import numpy as np
import requests

from .errors import (
    EmbeddingContractError,
    EmbeddingTransportError,
    MissingEmbeddingError,
    ZeroVectorError,
)

logger = logging.getLogger(__name__)

EMBEDDING_FORMAT_VERSION = 1


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between two vectors, in [-1, 1]."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise EmbeddingContractError(
            f"dimension mismatch: {a.shape} vs {b.shape}"
        )
    norm_a = float(np.dot(a, a))
    norm_b = float(np.dot(b, b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVectorError("cosine similarity is undefined for a zero vector")
    if np.array_equal(a, b):
        return 1.0
    value = float(np.dot(a, b)) / float(np.sqrt(norm_a) * np.sqrt(norm_b))
    return min(1.0, max(-1.0, value))


class EmbeddingGateway:
    """Cache-backed phrase → vector lookup.

    Cache access is lock-protected so one gateway can serve parallel
    clustering jobs; service fetches are serialized under the same lock
    (one in-flight batch per instance).
    """

    def __init__(self) -> None:
        self._cache: dict[str, np.ndarray] = {}
        self._dim: int | None = None
        self._lock = threading.Lock()

    @property
    def dim(self) -> int | None:
        return self._dim

    def get_vectors(self, phrases: list[str]) -> list[np.ndarray]:
        """One vector per phrase, preserving order; cached entries are reused."""
        if not phrases:
            raise ValueError("phrases must be non-empty")
        with self._lock:
            misses = sorted({p for p in phrases if p not in self._cache})
            if misses:
                for phrase, vector in self._fetch(misses):
                    self._store(phrase, vector)
            return [self._cache[p].copy() for p in phrases]

    def get_vector(self, phrase: str) -> np.ndarray:
        return self.get_vectors([phrase])[0]

    def _store(self, phrase: str, vector: np.ndarray) -> None:
        vector = np.asarray(vector, dtype=np.float64)
        if vector.ndim != 1 or vector.size == 0:
            raise EmbeddingContractError(f"vector for {phrase!r} is not 1-dimensional")
        if not np.all(np.isfinite(vector)):
            raise EmbeddingContractError(f"vector for {phrase!r} has non-finite entries")
        if self._dim is None:
            self._dim = int(vector.size)
        elif vector.size != self._dim:
            raise EmbeddingContractError(
                f"vector for {phrase!r} has dim {vector.size}, expected {self._dim}"
            )
        self._cache[phrase] = vector

    def _fetch(self, phrases: list[str]):
        raise NotImplementedError


class FileEmbeddingGateway(EmbeddingGateway):
    """Vectors from a JSON-lines file; any phrase absent from the file fails.

    Format: a header record ``{"dim": N, "format_version": 1}`` followed by
    ``{"text": ..., "vector": [...]}`` records.  A duplicated text keeps the
    last record and logs a warning.
    """

    def __init__(self, path: str | Path):
        super().__init__()
        self.path = Path(path)
        with self.path.open("r", encoding="utf-8") as handle:
            header_line = handle.readline()
            try:
                header = json.loads(header_line)
            except json.JSONDecodeError as exc:
                raise EmbeddingContractError(f"{self.path}: bad header: {exc}") from exc
            if "dim" not in header:
                raise EmbeddingContractError(f"{self.path}: header missing 'dim'")
            if header.get("format_version") != EMBEDDING_FORMAT_VERSION:
                raise EmbeddingContractError(
                    f"{self.path}: unsupported format_version "
                    f"{header.get('format_version')!r}"
                )
            declared = int(header["dim"])
            for line_no, line in enumerate(handle, start=2):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise EmbeddingContractError(
                        f"{self.path}:{line_no}: bad record: {exc}"
                    ) from exc
                text = record.get("text")
                vector = record.get("vector")
                if not isinstance(text, str) or not isinstance(vector, list):
                    raise EmbeddingContractError(
                        f"{self.path}:{line_no}: record needs 'text' and 'vector'"
                    )
                if len(vector) != declared:
                    raise EmbeddingContractError(
                        f"{self.path}:{line_no}: vector dim {len(vector)} != {declared}"
                    )
                if text in self._cache:
                    logger.warning("%s: duplicate text %r, last record wins", self.path, text)
                self._store(text, np.asarray(vector, dtype=np.float64))
        self._dim = declared

    def _fetch(self, phrases: list[str]):
        raise MissingEmbeddingError(phrases[0])


class ServiceEmbeddingGateway(EmbeddingGateway):
    """Vectors from an HTTP service implementing POST <base>/embed.

    Request body ``{"texts": [...]}``; response ``{"dim": N, "vectors":
    [[...], ...]}`` with order preserved.  Failures are retried with
    exponential backoff before giving up.
    """

    def __init__(self, base_url: str, timeout: float = 10.0, retries: int = 2):
        super().__init__()
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.retries = retries
        self._session = requests.Session()

    def _fetch(self, phrases: list[str]):
        payload = {"texts": phrases}
        url = f"{self.base_url}/embed"
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(0.5 * (2 ** (attempt - 1)))
            try:
                response = self._session.post(url, json=payload, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
                continue
            if response.status_code != 200:
                last_error = EmbeddingTransportError(
                    f"{url} returned HTTP {response.status_code}"
                )
                continue
            return self._parse(response, phrases)
        raise EmbeddingTransportError(f"embedding service unreachable: {last_error}")

    def _parse(self, response, phrases: list[str]):
        try:
            body = response.json()
        except ValueError as exc:
            raise EmbeddingContractError(f"service returned non-JSON body: {exc}") from exc
        vectors = body.get("vectors")
        dim = body.get("dim")
        if not isinstance(vectors, list) or not isinstance(dim, int):
            raise EmbeddingContractError("service response needs 'dim' and 'vectors'")
        if len(vectors) != len(phrases):
            raise EmbeddingContractError(
                f"service returned {len(vectors)} vectors for {len(phrases)} texts"
            )
        if self._dim is not None and dim != self._dim:
            raise EmbeddingContractError(
                f"service dim changed from {self._dim} to {dim}"
            )
        out = []
        for phrase, vector in zip(phrases, vectors):
            if not isinstance(vector, list) or len(vector) != dim:
                raise EmbeddingContractError(
                    f"vector for {phrase!r} does not match declared dim {dim}"
                )
            out.append((phrase, np.asarray(vector, dtype=np.float64)))
        return out


def open_gateway(location: str, timeout: float = 10.0) -> EmbeddingGateway:
    """File or service gateway depending on an http(s):// prefix."""
    if location.startswith(("http://", "https://")):
        return ServiceEmbeddingGateway(location, timeout=timeout)
    return FileEmbeddingGateway(location)


def write_embedding_file(path: str | Path, dim: int, records: dict[str, np.ndarray]) -> None:
    """Write vectors in the JSON-lines exchange format (header first)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        handle.write(json.dumps({"dim": dim, "format_version": EMBEDDING_FORMAT_VERSION}) + "\n")
        for text in sorted(records):
            vector = np.asarray(records[text], dtype=np.float64)
            if vector.size != dim:
                raise EmbeddingContractError(
                    f"vector for {text!r} has dim {vector.size}, expected {dim}"
                )
            handle.write(json.dumps({"text": text, "vector": vector.tolist()}) + "\n")
