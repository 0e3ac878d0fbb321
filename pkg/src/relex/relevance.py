"""Embedding backends, contextual relevance, and interestingness.

The interestingness of a connection blends graph-structural relatedness
with how well the connection's text matches the user's context:

    score = alpha * sr + (1 - alpha) * cr

The local backend is a deterministic hashed bag-of-words embedder so the
whole pipeline runs offline and reproducibly; the remote backend calls
any HTTP embedding endpoint with the same interface.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from typing import Optional, Protocol

import httpx
import numpy as np

from .kgstore import KnowledgeGraph
from .patterns import ConnectionInstance

DEFAULT_ALPHA = 0.5
DEFAULT_DIM = 256

_TOKEN_RE = re.compile(r"[a-z0-9]+")


class RelevanceError(Exception):
    pass


class BackendNetworkError(RelevanceError):
    pass


class BackendResponseError(RelevanceError):
    pass


class DimensionMismatchError(RelevanceError):
    pass


@dataclass(frozen=True)
class Embedding:
    values: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


@dataclass
class UserContext:
    search_history: list[str] = field(default_factory=list)
    expertise: str = ""
    interests: list[str] = field(default_factory=list)
    alpha_override: Optional[float] = None

    def __post_init__(self):
        if self.alpha_override is not None and not 0.0 <= self.alpha_override <= 1.0:
            raise ValueError("alpha_override must be in [0, 1]")


@dataclass(frozen=True)
class InterestingnessBreakdown:
    sr: float
    cr: float
    alpha: float
    score: float


class EmbeddingBackend(Protocol):
    dim: int

    def embed(self, text: str) -> Embedding: ...


def tokenize(text: str) -> list[str]:
    """Lowercase tokens split on non-alphanumerics, empties dropped.

    Shared with the text-quality metrics so embeddings and metrics never
    disagree about token boundaries.
    """
    return _TOKEN_RE.findall(text.lower())


class LocalEmbeddingBackend:
    """Deterministic hashed bag-of-words embedder.

    Each token lands in one of `dim` buckets with sign +/-1 from a stable
    hash; the vector is L2-normalized. Text with no tokens maps to the
    zero vector.
    """

    def __init__(self, dim: int = DEFAULT_DIM):
        self.dim = dim
        self._memo: dict[str, Embedding] = {}

    def embed(self, text: str) -> Embedding:
        cached = self._memo.get(text)
        if cached is not None:
            return cached
        vec = np.zeros(self.dim)
        for token in tokenize(text):
            digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
            h = int.from_bytes(digest, "big")
            bucket = (h >> 1) % self.dim
            sign = 1.0 if h & 1 else -1.0
            vec[bucket] += sign
        norm = float(np.linalg.norm(vec))
        if norm > 0:
            vec /= norm
        result = Embedding(tuple(float(x) for x in vec))
        self._memo[text] = result
        return result


class RemoteEmbeddingBackend:
    """Client for a `POST {input} -> {embedding}` HTTP embedding service."""

    def __init__(
        self,
        endpoint: str,
        dim: int,
        auth_token: Optional[str] = None,
        timeout: float = 30.0,
        client: Optional[httpx.Client] = None,
    ):
        self.endpoint = endpoint
        self.dim = dim
        self.auth_token = auth_token
        self.timeout = timeout
        self._client = client or httpx.Client(timeout=timeout)

    def embed(self, text: str) -> Embedding:
        headers = {}
        if self.auth_token:
            headers["Authorization"] = f"Bearer {self.auth_token}"
        try:
            resp = self._client.post(self.endpoint, json={"input": text}, headers=headers)
        except httpx.HTTPError as e:
            raise BackendNetworkError(f"embedding endpoint unreachable: {e}") from e
        if resp.status_code != 200:
            raise BackendResponseError(f"embedding endpoint returned HTTP {resp.status_code}")
        try:
            values = resp.json()["embedding"]
            embedding = Embedding(tuple(float(x) for x in values))
        except (KeyError, TypeError, ValueError) as e:
            raise BackendResponseError(f"malformed embedding response: {e}") from e
        if embedding.dim != self.dim:
            raise DimensionMismatchError(
                f"expected dimension {self.dim}, got {embedding.dim}"
            )
        return embedding


def cosine(a: Embedding, b: Embedding) -> float:
    """Cosine similarity in [-1, 1]; 0 when either vector is zero."""
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")
    va, vb = a.as_array(), b.as_array()
    denom = float(np.linalg.norm(va)) * float(np.linalg.norm(vb))
    if denom == 0.0:
        return 0.0
    return float(np.dot(va, vb) / denom)


def relationship_text(conn: ConnectionInstance, kg: KnowledgeGraph) -> str:
    """Textual description of a connection, used as the embedding input."""
    parts = [
        kg.label(conn.entity1_id),
        conn.explanation_text,
        kg.label(conn.entity2_id),
        conn.relationship_type,
    ]
    for key in sorted(conn.relevant_metadata):
        parts.append(conn.relevant_metadata[key])
    return " ".join(p for p in parts if p)


def user_context_text(u: UserContext) -> str:
    """Fixed-order concatenation: history, expertise, interests."""
    sections = []
    if u.search_history:
        sections.append(" ".join(u.search_history))
    if u.expertise:
        sections.append(u.expertise)
    if u.interests:
        sections.append(" ".join(u.interests))
    return "\n".join(sections)


def contextual_relevance(
    conn: ConnectionInstance,
    u: UserContext,
    backend: EmbeddingBackend,
    kg: KnowledgeGraph,
) -> float:
    v_r = backend.embed(relationship_text(conn, kg))
    v_u = backend.embed(user_context_text(u))
    return cosine(v_r, v_u)


def interestingness(sr: float, cr: float, alpha: float) -> InterestingnessBreakdown:
    if not 0.0 <= sr < 1.0:
        raise RelevanceError(f"sr out of range [0, 1): {sr}")
    if not -1.0 <= cr <= 1.0:
        raise RelevanceError(f"cr out of range [-1, 1]: {cr}")
    if not 0.0 <= alpha <= 1.0:
        raise RelevanceError(f"alpha out of range [0, 1]: {alpha}")
    score = alpha * sr + (1.0 - alpha) * cr
    return InterestingnessBreakdown(sr=sr, cr=cr, alpha=alpha, score=score)


def resolve_alpha(u: Optional[UserContext], requested: Optional[float], default: float = DEFAULT_ALPHA) -> float:
    """User override wins, then the explicit request, then the default."""
    if u is not None and u.alpha_override is not None:
        return u.alpha_override
    if requested is not None:
        return requested
    return default
