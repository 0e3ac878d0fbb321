"""relex: embedded knowledge-graph relational exploration.

Discovers candidate connections via declarative graph patterns, scores
their interestingness (path-based relatedness blended with embedding
relevance), and produces ranked natural-language explanations through a
pluggable generation backend.
"""

from .engine import Engine, EngineConfig
from .explainer import (
    GenerationBackend,
    PromptInput,
    RankResult,
    ScoredExplanation,
    StubGenerationBackend,
    build_prompt,
    rank_and_explain,
)
from .kgstore import (
    EntityDescriptor,
    Iri,
    KnowledgeGraph,
    Literal,
    ParseError,
    Triple,
    load_ntriples,
    serialize_ntriples,
)
from .paths import (
    Path,
    PathLimits,
    PathSet,
    enumerate_simple_paths,
    semantic_relatedness,
    shortest_path_bfs,
    shortest_path_dijkstra,
)
from .patterns import (
    ConnectionInstance,
    PatternQuery,
    discover_connections,
    match_pattern,
    parse_pattern,
    parse_query_set,
)
from .relevance import (
    Embedding,
    InterestingnessBreakdown,
    LocalEmbeddingBackend,
    RemoteEmbeddingBackend,
    UserContext,
    contextual_relevance,
    cosine,
    interestingness,
)

__version__ = "0.1.0"
