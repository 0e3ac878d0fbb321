"""Simple-path enumeration, semantic relatedness, and shortest paths.

Relatedness between two entities aggregates the inverse lengths of the
simple paths connecting them, normalized by path count plus one:

    SR(e1, e2) = (1 / (|P| + 1)) * sum(1 / dist(p) for p in P)

Edges are walked undirected by default (direction recorded per step);
directed mode restricts traversal to the edge's stated direction.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Optional

from .kgstore import Iri, KnowledgeGraph


class PathError(Exception):
    pass


@dataclass(frozen=True)
class Path:
    nodes: tuple[Iri, ...]
    edges: tuple[tuple[Iri, str], ...]  # (predicate, "out" | "in")

    def __post_init__(self):
        if len(self.edges) != len(self.nodes) - 1 or not self.edges:
            raise ValueError("path needs |edges| = |nodes| - 1 >= 1")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("path revisits a node")

    @property
    def dist(self) -> int:
        return len(self.edges)


@dataclass
class PathSet:
    paths: list[Path]
    truncated: bool = False


@dataclass(frozen=True)
class PathLimits:
    max_depth: int = 4
    max_paths: int = 1000

    def __post_init__(self):
        if self.max_depth < 1 or self.max_paths < 1:
            raise ValueError("limits must be >= 1")


def _adjacent(kg: KnowledgeGraph, node: Iri, directed: bool):
    if directed:
        return [n for n in kg.neighbors(node, "out")]
    return kg.neighbors(node, "both")


def enumerate_simple_paths(
    kg: KnowledgeGraph,
    e1: Iri,
    e2: Iri,
    limits: PathLimits = PathLimits(),
    directed: bool = False,
) -> PathSet:
    """All simple paths from e1 to e2 within the depth bound.

    Enumerates shortest-first (iterative deepening, depth-first within a
    level, neighbors in canonical order). When more than max_paths exist,
    exactly max_paths shortest-first paths are kept and truncated is set.
    """
    if e1 == e2:
        raise PathError("simple paths between an entity and itself are undefined")
    collected: list[Path] = []
    truncated = False
    for depth in range(1, limits.max_depth + 1):
        for path in _paths_of_length(kg, e1, e2, depth, directed):
            if len(collected) >= limits.max_paths:
                truncated = True
                return PathSet(collected, truncated=True)
            collected.append(path)
    return PathSet(collected, truncated=truncated)


def _paths_of_length(kg: KnowledgeGraph, start: Iri, goal: Iri, length: int, directed: bool):
    nodes = [start]
    edges: list[tuple[Iri, str]] = []
    visited = {start}

    def rec(current: Iri, remaining: int):
        for neighbor, pred, direction in _adjacent(kg, current, directed):
            if remaining == 1:
                if neighbor == goal:
                    yield Path(tuple(nodes) + (goal,), tuple(edges) + ((pred, direction),))
                continue
            if neighbor in visited or neighbor == goal:
                continue
            visited.add(neighbor)
            nodes.append(neighbor)
            edges.append((pred, direction))
            yield from rec(neighbor, remaining - 1)
            visited.discard(neighbor)
            nodes.pop()
            edges.pop()

    yield from rec(start, length)


def semantic_relatedness(
    kg: KnowledgeGraph,
    e1: Iri,
    e2: Iri,
    limits: PathLimits = PathLimits(),
    directed: bool = False,
) -> float:
    """Inverse-path-length sum normalized by |P| + 1; in [0, 1)."""
    ps = enumerate_simple_paths(kg, e1, e2, limits, directed=directed)
    if not ps.paths:
        return 0.0
    return sum(1.0 / p.dist for p in ps.paths) / (len(ps.paths) + 1)


def shortest_path_bfs(kg: KnowledgeGraph, e1: Iri, e2: Iri, directed: bool = False) -> Optional[Path]:
    """Minimum-hop path, ties broken by canonical neighbor order."""
    if e1 == e2:
        return None
    parents: dict[Iri, tuple[Iri, Iri, str]] = {}
    frontier = [e1]
    seen = {e1}
    while frontier:
        next_frontier: list[Iri] = []
        for node in frontier:
            for neighbor, pred, direction in _adjacent(kg, node, directed):
                if neighbor in seen:
                    continue
                seen.add(neighbor)
                parents[neighbor] = (node, pred, direction)
                if neighbor == e2:
                    return _reconstruct(e1, e2, parents)
                next_frontier.append(neighbor)
        frontier = next_frontier
    return None


def _reconstruct(start: Iri, end: Iri, parents: dict[Iri, tuple[Iri, Iri, str]]) -> Path:
    nodes = [end]
    edges: list[tuple[Iri, str]] = []
    current = end
    while current != start:
        parent, pred, direction = parents[current]
        edges.append((pred, direction))
        nodes.append(parent)
        current = parent
    nodes.reverse()
    edges.reverse()
    return Path(tuple(nodes), tuple(edges))


def shortest_path_dijkstra(
    kg: KnowledgeGraph,
    e1: Iri,
    e2: Iri,
    weight: Callable[[Iri], float] = lambda p: 1.0,
    directed: bool = False,
) -> Optional[Path]:
    """Minimum total-weight path; tie-broken by canonical node sequence."""
    if e1 == e2:
        return None
    # Heap entries carry the node sequence so equal-cost fronts pop in
    # canonical order, keeping results deterministic.
    heap: list[tuple[float, tuple[str, ...], Iri, Optional[tuple]]] = [(0.0, (e1.value,), e1, None)]
    best: dict[Iri, float] = {}
    parents: dict[Iri, tuple[Iri, Iri, str]] = {}
    while heap:
        cost, _, node, parent = heapq.heappop(heap)
        if node in best:
            continue
        best[node] = cost
        if parent is not None:
            parents[node] = parent
        if node == e2:
            return _reconstruct(e1, e2, parents)
        for neighbor, pred, direction in _adjacent(kg, node, directed):
            w = weight(pred)
            if w <= 0:
                raise PathError(f"non-positive weight for predicate {pred.value}")
            if neighbor not in best:
                heapq.heappush(
                    heap,
                    (cost + w, (neighbor.value, pred.value, direction), neighbor, (node, pred, direction)),
                )
    return None
