import pytest

from relex.baselines import (
    BaselineError,
    ExplanationTemplate,
    MissingTemplateError,
    graph_baseline,
    knowledge_baseline,
    parse_templates,
    verbalize_path,
)
from relex.kgstore import Iri, load_ntriples
from relex.paths import shortest_path_bfs
from relex.patterns import discover_connections, parse_pattern


def _iri(name):
    return Iri(f"http://x/{name}")


def test_graph_baseline_disconnected():
    kg = load_ntriples("<http://x/a> <http://x/p> <http://x/b> .")
    assert graph_baseline(kg, _iri("a"), _iri("z")) is None


def test_graph_baseline_single_edge():
    kg = load_ntriples(
        "<http://x/a> <http://x/p> <http://x/b> .\n"
        '<http://x/a> <http://www.w3.org/2000/01/rdf-schema#label> "A"@en .\n'
        '<http://x/b> <http://www.w3.org/2000/01/rdf-schema#label> "B"@en .\n'
    )
    result = graph_baseline(kg, _iri("a"), _iri("b"))
    assert result.explanation == "A --[p]--> B"
    assert result.method == "graph"
    assert result.connection.relationship_type == "path"
    assert result.path.dist == 1


def test_graph_baseline_reverse_edge_arrow():
    kg = load_ntriples("<http://x/a> <http://x/p> <http://x/b> .")
    result = graph_baseline(kg, _iri("b"), _iri("a"))
    assert result.explanation == "b <--[p]-- a"


def test_graph_baseline_two_hop_verbalization(fixture_graph):
    result = graph_baseline(
        fixture_graph,
        Iri("http://www.wikidata.org/entity/Q9871"),
        Iri("http://www.wikidata.org/entity/Q48292"),
    )
    assert result is not None
    assert result.path.dist == 2
    assert result.explanation.startswith("Zundert ")
    assert result.explanation.endswith(" Arles")
    # one hop out, one hop back in: both arrow styles appear
    assert "--[" in result.explanation and "]-->" in result.explanation
    assert "<--[" in result.explanation


def test_graph_baseline_length_matches_bfs(fixture_graph):
    entities = [e for e in fixture_graph.entities()][:12]
    for e1 in entities[:6]:
        for e2 in entities[6:]:
            if e1 == e2:
                continue
            result = graph_baseline(fixture_graph, e1, e2)
            bfs = shortest_path_bfs(fixture_graph, e1, e2)
            if bfs is None:
                assert result is None
            else:
                assert result.path.dist == bfs.dist


def test_knowledge_baseline_empty_queries(fixture_graph):
    assert knowledge_baseline(fixture_graph, [], {}) == []


def test_knowledge_baseline_fills_template(fixture_graph):
    q = parse_pattern(
        'CONNECTION born_in TYPE "born_in" '
        "MATCH (?x <http://www.wikidata.org/prop/direct/P19> ?y) "
        'ENTITIES ?x ?y LABEL "{x} was born in {y}"'
    )
    templates = {"born_in": ExplanationTemplate("born_in", "{entity1} was born in {entity2}.")}
    results = knowledge_baseline(fixture_graph, [q], templates)
    texts = {r.explanation for r in results}
    assert "Vincent van Gogh was born in Zundert." in texts


def test_knowledge_baseline_missing_template(fixture_graph, fixture_engine):
    with pytest.raises(MissingTemplateError):
        knowledge_baseline(fixture_graph, fixture_engine.queries, {})


def test_knowledge_baseline_count_matches_discovery(fixture_graph, fixture_engine):
    results = knowledge_baseline(fixture_graph, fixture_engine.queries, fixture_engine.templates)
    assert len(results) == len(discover_connections(fixture_graph, fixture_engine.queries))
    assert [r.connection for r in results] == discover_connections(
        fixture_graph, fixture_engine.queries
    )


class _CountingBackend:
    """Fails loudly if a baseline ever touches it."""

    id = "counter"
    dim = 4

    def __init__(self):
        self.calls = 0

    def embed(self, text):
        self.calls += 1
        raise AssertionError("baseline called the embedding backend")

    def generate(self, prompt):
        self.calls += 1
        raise AssertionError("baseline called the generation backend")


def test_baselines_never_call_backends(fixture_graph, fixture_engine, monkeypatch):
    counter = _CountingBackend()
    monkeypatch.setattr(fixture_engine, "embedding_backend", counter)
    monkeypatch.setattr(fixture_engine, "generation_backend", counter)
    knowledge_baseline(fixture_graph, fixture_engine.queries, fixture_engine.templates)
    graph_baseline(
        fixture_graph,
        Iri("http://www.wikidata.org/entity/Q5582"),
        Iri("http://www.wikidata.org/entity/Q727"),
    )
    assert counter.calls == 0


def test_template_invariants():
    with pytest.raises(ValueError):
        ExplanationTemplate("t", "missing both placeholders")


def test_parse_templates_file(fixture_engine):
    assert set(fixture_engine.templates) == {
        "born_in",
        "works_in",
        "wrote_about",
        "depicts_place",
        "exhibited_in",
    }


def test_parse_templates_rejects_garbage():
    with pytest.raises(BaselineError):
        parse_templates("TEMPLATE nope")
