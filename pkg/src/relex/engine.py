"""Engine facade: configuration, backend wiring, and the shared graph
snapshot consumed by both the HTTP service and the CLI.

The snapshot is replaced atomically (plain attribute swap of an immutable
graph), so in-flight readers keep working on the graph they started with.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from . import baselines, evalkit, explainer, patterns
from .kgstore import Iri, KnowledgeGraph, RDFS_LABEL, load_ntriples
from .paths import PathLimits
from .relevance import (
    DEFAULT_ALPHA,
    DEFAULT_DIM,
    LocalEmbeddingBackend,
    RemoteEmbeddingBackend,
    UserContext,
)

ENV_EMBED_ENDPOINT = "RELEX_EMBED_ENDPOINT"
ENV_GEN_ENDPOINT = "RELEX_GEN_ENDPOINT"
ENV_AUTH_TOKEN = "RELEX_AUTH_TOKEN"
ENV_CONFIG = "RELEX_CONFIG"


class EngineError(Exception):
    pass


@dataclass
class EngineConfig:
    alpha: float = DEFAULT_ALPHA
    max_depth: int = 4
    max_paths: int = 1000
    embedding_dim: int = DEFAULT_DIM
    embedding_endpoint: Optional[str] = None
    generation_endpoint: Optional[str] = None
    auth_token: Optional[str] = None
    label_predicate: str = RDFS_LABEL
    few_shot_examples: list[dict] = field(default_factory=list)
    port: int = 8000

    @classmethod
    def load(cls, path: Optional[str] = None) -> "EngineConfig":
        """Config file (JSON) overlaid with environment variables."""
        data: dict = {}
        path = path or os.environ.get(ENV_CONFIG)
        if path:
            with open(path) as f:
                data = json.load(f)
        config = cls(**data)
        config.embedding_endpoint = os.environ.get(ENV_EMBED_ENDPOINT, config.embedding_endpoint)
        config.generation_endpoint = os.environ.get(ENV_GEN_ENDPOINT, config.generation_endpoint)
        config.auth_token = os.environ.get(ENV_AUTH_TOKEN, config.auth_token)
        return config

    def path_limits(self) -> PathLimits:
        return PathLimits(max_depth=self.max_depth, max_paths=self.max_paths)


def fixture_path(name: str) -> str:
    return str(resources.files("relex") / "fixtures" / name)


class Engine:
    """One loaded graph plus query set, templates, and backends."""

    def __init__(self, config: Optional[EngineConfig] = None):
        self.config = config or EngineConfig()
        self._lock = threading.Lock()
        self.graph: KnowledgeGraph = KnowledgeGraph([])
        self.queries: list[patterns.PatternQuery] = []
        self.templates: dict[str, baselines.ExplanationTemplate] = {}
        if self.config.embedding_endpoint:
            self.embedding_backend = RemoteEmbeddingBackend(
                self.config.embedding_endpoint,
                dim=self.config.embedding_dim,
                auth_token=self.config.auth_token,
            )
        else:
            self.embedding_backend = LocalEmbeddingBackend(dim=self.config.embedding_dim)
        if self.config.generation_endpoint:
            self.generation_backend = explainer.RemoteGenerationBackend(
                self.config.generation_endpoint,
                auth_token=self.config.auth_token,
                few_shot_examples=self.config.few_shot_examples,
            )
        else:
            self.generation_backend = explainer.StubGenerationBackend()

    # --- loading ---

    def load_graph_text(self, text: str) -> KnowledgeGraph:
        graph = load_ntriples(text, label_predicate=self.config.label_predicate)
        with self._lock:
            self.graph = graph
        return graph

    def load_graph_file(self, path: str) -> KnowledgeGraph:
        with open(path) as f:
            return self.load_graph_text(f.read())

    def load_queries_file(self, path: str) -> list[patterns.PatternQuery]:
        with open(path) as f:
            self.queries = patterns.parse_query_set(f.read())
        return self.queries

    def load_templates_file(self, path: str) -> dict[str, baselines.ExplanationTemplate]:
        with open(path) as f:
            self.templates = baselines.parse_templates(f.read())
        return self.templates

    def load_fixture(self):
        """Load the shipped desk-scale cultural-heritage fixture."""
        self.load_graph_file(fixture_path("heritage.nt"))
        self.load_queries_file(fixture_path("queries.rql"))
        self.load_templates_file(fixture_path("templates.txt"))

    # --- operations ---

    def discover(self) -> list[patterns.ConnectionInstance]:
        return patterns.discover_connections(self.graph, self.queries)

    def candidates_for(
        self, entity1: Optional[Iri], entity2: Optional[Iri]
    ) -> list[patterns.ConnectionInstance]:
        """Discovered connections filtered by the pinned endpoint(s).

        With only entity1 given, every connection incident to it (either
        end) qualifies; with both given, the pair must match unordered.
        """
        candidates = self.discover()
        if entity1 is None and entity2 is None:
            return candidates
        def incident(conn, e):
            return conn.entity1_id == e or conn.entity2_id == e
        if entity1 is not None and entity2 is not None:
            return [
                c
                for c in candidates
                if {c.entity1_id, c.entity2_id} == {entity1, entity2}
            ]
        pinned = entity1 or entity2
        return [c for c in candidates if incident(c, pinned)]

    def explore(
        self,
        context: UserContext,
        k: int,
        entity1: Optional[Iri] = None,
        entity2: Optional[Iri] = None,
        alpha: Optional[float] = None,
    ) -> explainer.RankResult:
        candidates = self.candidates_for(entity1, entity2)
        return explainer.rank_and_explain(
            self.graph,
            candidates,
            context,
            k,
            self.embedding_backend,
            self.generation_backend,
            limits=self.config.path_limits(),
            alpha=alpha if alpha is not None else self.config.alpha,
        )

    def search_entities(self, text: str, limit: int = 20) -> list[tuple[Iri, str]]:
        """Case-insensitive label substring search."""
        needle = text.lower()
        out = [
            (e, self.graph.label(e))
            for e in self.graph.entities()
            if needle in self.graph.label(e).lower()
        ]
        return out[:limit]

    def facets(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for conn in self.discover():
            counts[conn.relationship_type] = counts.get(conn.relationship_type, 0) + 1
        return dict(sorted(counts.items()))

    def run_system(self, system: str, gold: evalkit.GoldStandard, k: Optional[int] = None, context: Optional[UserContext] = None):
        """(connections, explanations) for one of the three systems."""
        if system == "full":
            ctx = context or self._fixture_context()
            result = self.explore(ctx, k if k is not None else len(gold.entries))
            return (
                [item.connection for item in result.items],
                [item.explanation for item in result.items],
            )
        if system == "knowledge":
            results = baselines.knowledge_baseline(self.graph, self.queries, self.templates)
            return ([r.connection for r in results], [r.explanation for r in results])
        if system == "graph":
            conns, texts = [], []
            for e1_value, e2_value, _ in sorted(gold.entries):
                result = baselines.graph_baseline(self.graph, Iri(e1_value), Iri(e2_value))
                if result is not None:
                    conns.append(result.connection)
                    texts.append(result.explanation)
            return (conns, texts)
        raise EngineError(f"unknown system {system!r}")

    def evaluate(
        self,
        gold: evalkit.GoldStandard,
        system: str = "full",
        k: Optional[int] = None,
        score_pairs=None,
        context: Optional[UserContext] = None,
    ) -> evalkit.MetricsReport:
        conns, texts = self.run_system(system, gold, k=k, context=context)
        return evalkit.evaluate_system(conns, texts, gold, score_pairs=score_pairs)

    @staticmethod
    def _fixture_context() -> UserContext:
        return UserContext(
            search_history=["vincent van gogh paintings", "dutch golden age"],
            expertise="amateur art historian",
            interests=["dutch painters", "museums", "places where artists lived"],
        )
