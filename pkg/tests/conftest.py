"""Shared fixtures and independent oracles for the suite.

The oracles here deliberately avoid the library's own code paths: linear
scans, nested-loop joins, and recursive path enumeration, so equivalence
tests mean something.
"""

from __future__ import annotations

import random

import pytest

from relex.engine import Engine, fixture_path
from relex.kgstore import Iri, KnowledgeGraph, Literal, Triple, term_text


@pytest.fixture(scope="session")
def fixture_engine() -> Engine:
    engine = Engine()
    engine.load_fixture()
    return engine


@pytest.fixture(scope="session")
def fixture_graph(fixture_engine) -> KnowledgeGraph:
    return fixture_engine.graph


def linear_scan(kg: KnowledgeGraph, s=None, p=None, o=None) -> list[Triple]:
    out = [
        t
        for t in kg.triples
        if (s is None or t.subject == s)
        and (p is None or t.predicate == p)
        and (o is None or term_text(t.object) == term_text(o))
    ]
    out.sort(key=Triple.n3)
    return out


def nested_loop_join(kg: KnowledgeGraph, query) -> set[tuple]:
    """Cross-product-then-filter evaluation of a PatternQuery; returns the
    binding set as frozen tuples keyed on sorted variable names."""
    from relex.patterns import Variable

    bindings = [{}]
    for pat in query.patterns:
        new_bindings = []
        for binding in bindings:
            for t in kg.triples:
                values = (t.subject, t.predicate, t.object)
                candidate = dict(binding)
                ok = True
                for term, value in zip(pat, values):
                    if isinstance(term, Variable):
                        if term.name in candidate and term_text(candidate[term.name]) != term_text(value):
                            ok = False
                            break
                        candidate[term.name] = value
                    elif term_text(term) != term_text(value):
                        ok = False
                        break
                if ok:
                    new_bindings.append(candidate)
        bindings = new_bindings
    result = set()
    for binding in bindings:
        keep = True
        for var, tag in query.lang_filters:
            value = binding.get(var)
            if not isinstance(value, Literal) or value.lang != tag:
                keep = False
                break
        if keep:
            result.add(tuple(sorted((k, term_text(v)) for k, v in binding.items())))
    return result


def brute_force_simple_paths(
    kg: KnowledgeGraph, e1: Iri, e2: Iri, max_depth: int, directed: bool = False
) -> set[tuple]:
    """Recursive enumeration with an explicit visited set; paths keyed as
    (nodes, edges) tuples of canonical text."""
    results: set[tuple] = set()
    adjacency: dict[Iri, list] = {}
    for t in kg.triples:
        if not isinstance(t.object, Iri):
            continue
        adjacency.setdefault(t.subject, []).append((t.object, t.predicate, "out"))
        if not directed:
            adjacency.setdefault(t.object, []).append((t.subject, t.predicate, "in"))

    def adjacent(node):
        return adjacency.get(node, [])

    def rec(node, visited, nodes, edges):
        if len(edges) >= max_depth:
            return
        for neighbor, pred, direction in adjacent(node):
            if neighbor == e2:
                results.add(
                    (
                        tuple(n.value for n in nodes + [neighbor]),
                        tuple((p.value, d) for p, d in edges + [(pred, direction)]),
                    )
                )
                continue
            if neighbor in visited:
                continue
            rec(neighbor, visited | {neighbor}, nodes + [neighbor], edges + [(pred, direction)])

    rec(e1, {e1, e2}, [e1], [])
    return results


def random_graph(rng: random.Random, n_nodes: int, n_edges: int) -> KnowledgeGraph:
    nodes = [Iri(f"http://x/n{i}") for i in range(n_nodes)]
    preds = [Iri(f"http://x/p{i}") for i in range(3)]
    triples = set()
    for _ in range(n_edges):
        s, o = rng.sample(nodes, 2)
        triples.add(Triple(s, rng.choice(preds), o))
    return KnowledgeGraph(triples)
