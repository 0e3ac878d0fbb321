"""Comparison systems: shortest-path verbalization and template filling.

Neither baseline touches an embedding or generation backend; both are
pure functions of the graph and their declarative inputs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .kgstore import Iri, KnowledgeGraph
from .paths import Path, shortest_path_dijkstra
from .patterns import ConnectionInstance, PatternQuery, discover_connections

GRAPH_BASELINE_TYPE = "path"


class BaselineError(Exception):
    pass


class MissingTemplateError(BaselineError):
    pass


@dataclass(frozen=True)
class ExplanationTemplate:
    relationship_type: str
    template: str

    def __post_init__(self):
        if "{entity1}" not in self.template or "{entity2}" not in self.template:
            raise ValueError("template must contain {entity1} and {entity2}")


@dataclass(frozen=True)
class BaselineResult:
    connection: ConnectionInstance
    explanation: str
    method: str  # "graph" | "knowledge"
    path: Optional[Path] = None


def verbalize_path(kg: KnowledgeGraph, path: Path) -> str:
    """Render a path as `A --[p]--> B <--[q]-- C` using entity labels and
    predicate local names."""
    parts = [kg.label(path.nodes[0])]
    for node, (pred, direction) in zip(path.nodes[1:], path.edges):
        arrow = f"--[{pred.local_name}]-->" if direction == "out" else f"<--[{pred.local_name}]--"
        parts.append(arrow)
        parts.append(kg.label(node))
    return " ".join(parts)


def graph_baseline(kg: KnowledgeGraph, e1: Iri, e2: Iri) -> Optional[BaselineResult]:
    """Unit-weight shortest path between the pair, verbalized; None when
    disconnected."""
    path = shortest_path_dijkstra(kg, e1, e2, weight=lambda p: 1.0)
    if path is None:
        return None
    explanation = verbalize_path(kg, path)
    conn = ConnectionInstance(
        entity1_id=e1,
        entity2_id=e2,
        relationship_type=GRAPH_BASELINE_TYPE,
        relevant_metadata={},
        explanation_text=explanation,
    )
    return BaselineResult(connection=conn, explanation=explanation, method="graph", path=path)


def knowledge_baseline(
    kg: KnowledgeGraph,
    queries: list[PatternQuery],
    templates: dict[str, ExplanationTemplate],
) -> list[BaselineResult]:
    """Discovered connections with their templates filled, discovery order."""
    out: list[BaselineResult] = []
    for conn in discover_connections(kg, queries):
        template = templates.get(conn.relationship_type)
        if template is None:
            raise MissingTemplateError(
                f"no template for relationship type {conn.relationship_type!r}"
            )
        text = template.template
        text = text.replace("{entity1}", kg.label(conn.entity1_id))
        text = text.replace("{entity2}", kg.label(conn.entity2_id))
        for key, value in conn.relevant_metadata.items():
            text = text.replace("{" + key + "}", value)
        out.append(BaselineResult(connection=conn, explanation=text, method="knowledge"))
    return out


_TEMPLATE_LINE_RE = re.compile(r'\s*TEMPLATE\s+(\S+)\s+"((?:[^"\\]|\\.)*)"\s*$')


def parse_templates(source: str) -> dict[str, ExplanationTemplate]:
    """Parse `TEMPLATE <type> "<text>"` lines; '#' comments allowed."""
    out: dict[str, ExplanationTemplate] = {}
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _TEMPLATE_LINE_RE.match(line)
        if m is None:
            raise BaselineError(f"template line {lineno}: expected TEMPLATE <type> \"<text>\"")
        rtype, text = m.group(1), m.group(2).replace('\\"', '"')
        out[rtype] = ExplanationTemplate(relationship_type=rtype, template=text)
    return out
