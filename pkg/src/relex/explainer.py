"""Scoring plus explanation generation: the end-to-end ranking pipeline.

Candidates are scored (relatedness, contextual relevance, combined
interestingness), sorted with a deterministic tie-break, and explanations
are generated only for the retained top-k. Scores never depend on the
generated text, so truncating before generation leaves the ranking
unchanged while cutting backend cost.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Protocol

import httpx

from .kgstore import KnowledgeGraph
from .paths import PathLimits, semantic_relatedness
from .patterns import ConnectionInstance
from .relevance import (
    EmbeddingBackend,
    InterestingnessBreakdown,
    UserContext,
    contextual_relevance,
    interestingness,
    resolve_alpha,
)

PROMPT_TEMPLATE = (
    "Generate a natural language explanation that connects {entity1_description} "
    "and {entity2_description}.\n"
    "The relationship type is {relationship_type}.\n"
    "The interestingness score is: {interestingness_score}.\n"
    "The user context is: {user_context_description}.\n"
    "Explain this relationship in a way that reflects its interestingness, "
    "and the user context. Be specific, and avoid generic statements that "
    "could apply to other entities."
)

_PROMPT_RE = re.compile(
    r"\AGenerate a natural language explanation that connects (?P<e1>.+?) "
    r"and (?P<e2>.+?)\.\n"
    r"The relationship type is (?P<rtype>.*?)\.\n"
    r"The interestingness score is: (?P<score>-?\d+\.\d{4})\.\n"
    r"The user context is: (?P<ctx>.*?)\.\n"
    r"Explain this relationship in a way that reflects its interestingness, "
    r"and the user context\. Be specific, and avoid generic statements that "
    r"could apply to other entities\.\Z",
    re.DOTALL,
)


class ExplainerError(Exception):
    pass


class GenerationError(ExplainerError):
    pass


@dataclass(frozen=True)
class PromptInput:
    entity1_description: str
    entity2_description: str
    relationship_type: str
    interestingness_score: float
    user_context_description: str

    def __post_init__(self):
        if not self.entity1_description or not self.entity2_description:
            raise ValueError("entity descriptions must be non-empty")


class GenerationBackend(Protocol):
    id: str

    def generate(self, prompt: str) -> str: ...


@dataclass(frozen=True)
class ScoredExplanation:
    connection: ConnectionInstance
    breakdown: InterestingnessBreakdown
    explanation: str
    backend_id: str


@dataclass(frozen=True)
class GenerationFailure:
    connection: ConnectionInstance
    breakdown: InterestingnessBreakdown
    error: str


def build_prompt(p: PromptInput) -> str:
    """Instantiate the explanation prompt; score rendered to 4 decimals."""
    return PROMPT_TEMPLATE.format(
        entity1_description=p.entity1_description,
        entity2_description=p.entity2_description,
        relationship_type=p.relationship_type,
        interestingness_score=f"{p.interestingness_score:.4f}",
        user_context_description=p.user_context_description,
    )


class StubGenerationBackend:
    """Deterministic offline generator: re-reads the prompt fields and
    emits one fixed-form sentence. Keeps tests hermetic."""

    id = "stub"

    def generate(self, prompt: str) -> str:
        m = _PROMPT_RE.match(prompt)
        if m is None:
            raise GenerationError("prompt does not match the explanation template")
        context = m.group("ctx") or "general exploration"
        return (
            f"{m.group('e1')} is connected to {m.group('e2')} through the "
            f"relationship '{m.group('rtype')}' (interestingness {m.group('score')}); "
            f"this is relevant to a user interested in {context}."
        )


class RemoteGenerationBackend:
    """Client for a chat-completion-style HTTP generation endpoint."""

    id = "remote"

    def __init__(
        self,
        endpoint: str,
        auth_token: Optional[str] = None,
        few_shot_examples: Optional[list[dict]] = None,
        max_tokens: int = 512,
        timeout: float = 60.0,
        client: Optional[httpx.Client] = None,
    ):
        self.endpoint = endpoint
        self.auth_token = auth_token
        self.few_shot_examples = few_shot_examples or []
        self.max_tokens = max_tokens
        self._client = client or httpx.Client(timeout=timeout)

    def generate(self, prompt: str) -> str:
        messages = list(self.few_shot_examples) + [{"role": "user", "content": prompt}]
        headers = {}
        if self.auth_token:
            headers["Authorization"] = f"Bearer {self.auth_token}"
        try:
            resp = self._client.post(
                self.endpoint,
                json={"messages": messages, "max_tokens": self.max_tokens},
                headers=headers,
            )
        except httpx.HTTPError as e:
            raise GenerationError(f"generation endpoint unreachable: {e}") from e
        if resp.status_code != 200:
            raise GenerationError(f"generation endpoint returned HTTP {resp.status_code}")
        try:
            text = resp.json()["text"]
        except (KeyError, TypeError, ValueError) as e:
            raise GenerationError(f"malformed generation response: {e}") from e
        if not text:
            raise GenerationError("empty completion")
        return text


@dataclass
class RankResult:
    items: list[ScoredExplanation]
    failures: list[GenerationFailure] = field(default_factory=list)


def score_candidate(
    kg: KnowledgeGraph,
    conn: ConnectionInstance,
    u: UserContext,
    embedding_backend: EmbeddingBackend,
    limits: PathLimits,
    alpha: float,
) -> InterestingnessBreakdown:
    sr = semantic_relatedness(kg, conn.entity1_id, conn.entity2_id, limits)
    cr = contextual_relevance(conn, u, embedding_backend, kg)
    return interestingness(sr, cr, alpha)


def _sort_key(item: tuple[ConnectionInstance, InterestingnessBreakdown]):
    conn, breakdown = item
    return (
        -breakdown.score,
        conn.entity1_id.value,
        conn.entity2_id.value,
        conn.relationship_type,
    )


def rank_candidates(
    kg: KnowledgeGraph,
    candidates: list[ConnectionInstance],
    u: UserContext,
    embedding_backend: EmbeddingBackend,
    limits: PathLimits = PathLimits(),
    alpha: Optional[float] = None,
) -> list[tuple[ConnectionInstance, InterestingnessBreakdown]]:
    """All candidates scored and sorted, best first."""
    resolved = resolve_alpha(u, alpha)
    scored = [
        (conn, score_candidate(kg, conn, u, embedding_backend, limits, resolved))
        for conn in candidates
    ]
    scored.sort(key=_sort_key)
    return scored


def rank_and_explain(
    kg: KnowledgeGraph,
    candidates: list[ConnectionInstance],
    u: UserContext,
    k: int,
    embedding_backend: EmbeddingBackend,
    generation_backend: GenerationBackend,
    limits: PathLimits = PathLimits(),
    alpha: Optional[float] = None,
) -> RankResult:
    """Top-k scored connections with generated explanations.

    A failed generation excludes that item (recorded in failures) and the
    next-ranked candidate takes its slot; only an all-failed batch raises.
    """
    if k < 0:
        raise ExplainerError("k must be >= 0")
    ranked = rank_candidates(kg, candidates, u, embedding_backend, limits, alpha)
    if k == 0 or not ranked:
        return RankResult(items=[])
    context_text_value = _context_description(u)
    items: list[ScoredExplanation] = []
    failures: list[GenerationFailure] = []
    for conn, breakdown in ranked:
        if len(items) >= k:
            break
        prompt = build_prompt(
            PromptInput(
                entity1_description=kg.entity_descriptor(conn.entity1_id).description,
                entity2_description=kg.entity_descriptor(conn.entity2_id).description,
                relationship_type=conn.relationship_type,
                interestingness_score=breakdown.score,
                user_context_description=context_text_value,
            )
        )
        try:
            explanation = generation_backend.generate(prompt)
        except GenerationError as e:
            failures.append(GenerationFailure(conn, breakdown, str(e)))
            continue
        items.append(
            ScoredExplanation(
                connection=conn,
                breakdown=breakdown,
                explanation=explanation,
                backend_id=generation_backend.id,
            )
        )
    if not items and failures:
        raise ExplainerError(
            f"all {len(failures)} generation attempts failed; first error: {failures[0].error}"
        )
    return RankResult(items=items, failures=failures)


def _context_description(u: UserContext) -> str:
    from .relevance import user_context_text

    text = user_context_text(u).replace("\n", " ")
    return text or "general exploration"
