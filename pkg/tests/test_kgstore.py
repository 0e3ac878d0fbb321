import io
import random

import pytest
from hypothesis import given, strategies as st

from relex.kgstore import (
    Iri,
    KnowledgeGraph,
    Literal,
    ParseError,
    Triple,
    load_ntriples,
    parse_ntriples,
    serialize_ntriples,
)

from conftest import linear_scan


def test_single_line():
    kg = load_ntriples("<http://x/a> <http://x/p> <http://x/b> .")
    assert len(kg) == 1


def test_duplicate_lines_collapse():
    text = "<http://x/a> <http://x/p> <http://x/b> .\n" * 2
    assert len(load_ntriples(text)) == 1


def test_language_tag_distinguishes():
    text = '<http://x/a> <http://x/p> "x"@en .\n<http://x/a> <http://x/p> "x"@fr .\n'
    kg = load_ntriples(text)
    # oracle: count distinct full canonical statement strings
    distinct = {line.strip() for line in text.splitlines() if line.strip()}
    assert len(kg) == len(distinct) == 2


def test_comments_and_blank_lines_ignored():
    text = "# a comment\n\n<http://x/a> <http://x/p> <http://x/b> .\n"
    assert len(load_ntriples(text)) == 1


def test_literal_escapes_round_trip():
    lexical = 'say "hi"\\\n\ttab'
    t = Triple(Iri("http://x/a"), Iri("http://x/p"), Literal(lexical))
    parsed = parse_ntriples(serialize_ntriples([t]))
    assert parsed == [t]


def test_datatyped_literal():
    kg = load_ntriples('<http://x/a> <http://x/p> "42"^^<http://www.w3.org/2001/XMLSchema#integer> .')
    (t,) = kg.triples
    assert t.object.datatype == Iri("http://www.w3.org/2001/XMLSchema#integer")


@pytest.mark.parametrize(
    "bad",
    [
        "<http://x/a> <http://x/p>",
        "<http://x/a> <http://x/p> <http://x/b>",
        "_:b <http://x/p> <http://x/b> .",
        '<http://x/a> <http://x/p> "unterminated .',
        "<http://x/a> <http://x/p> <http://x/b> . trailing",
        "not a triple at all",
    ],
)
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_ntriples("<http://x/a> <http://x/p> <http://x/b> .\n" + bad)


def test_parse_error_reports_line_number():
    with pytest.raises(ParseError) as exc:
        parse_ntriples("<http://x/a> <http://x/p> <http://x/b> .\n\n_:bad <http://x/p> <http://x/b> .")
    assert exc.value.line == 3
    assert exc.value.token


def test_literal_lang_datatype_exclusive():
    with pytest.raises(ValueError):
        Literal("x", lang="en", datatype=Iri("http://x/t"))


def test_iri_invariants():
    with pytest.raises(ValueError):
        Iri("")
    with pytest.raises(ValueError):
        Iri("has space")


def test_lookup_all_and_empty(fixture_graph):
    assert len(fixture_graph.lookup()) == len(fixture_graph)
    assert KnowledgeGraph([]).lookup() == []


def test_lookup_matches_linear_scan_all_masks(fixture_graph):
    kg = fixture_graph
    rng = random.Random(7)
    triples = sorted(kg.triples, key=Triple.n3)
    for _ in range(50):
        t = rng.choice(triples)
        for mask in range(8):
            s = t.subject if mask & 1 else None
            p = t.predicate if mask & 2 else None
            o = t.object if mask & 4 else None
            assert kg.lookup(s, p, o) == linear_scan(kg, s, p, o)


def test_lookup_absent_term(fixture_graph):
    assert fixture_graph.lookup(s=Iri("http://nowhere/z")) == []


def test_neighbors_isolated_node(fixture_graph):
    assert fixture_graph.neighbors(Iri("http://nowhere/z")) == []


def test_neighbors_single_edge():
    kg = load_ntriples("<http://x/a> <http://x/p> <http://x/b> .")
    assert kg.neighbors(Iri("http://x/a"), "out") == [(Iri("http://x/b"), Iri("http://x/p"), "out")]
    assert kg.neighbors(Iri("http://x/b"), "in") == [(Iri("http://x/a"), Iri("http://x/p"), "in")]


def test_neighbors_both_is_out_plus_in(fixture_graph):
    for e in fixture_graph.entities():
        both = fixture_graph.neighbors(e, "both")
        out = fixture_graph.neighbors(e, "out")
        inc = fixture_graph.neighbors(e, "in")
        assert len(both) == len(out) + len(inc)
        assert sorted(both) == sorted(out + inc)


def test_neighbors_skip_literal_objects():
    kg = load_ntriples('<http://x/a> <http://x/p> "literal" .')
    assert kg.neighbors(Iri("http://x/a"), "out") == []


def test_label_and_fallback(fixture_graph):
    assert fixture_graph.label(Iri("http://www.wikidata.org/entity/Q5582")) == "Vincent van Gogh"
    assert fixture_graph.label(Iri("http://x/Q42")) == "Q42"


def test_label_prefers_english():
    kg = load_ntriples(
        '<http://x/a> <http://www.w3.org/2000/01/rdf-schema#label> "maison"@fr .\n'
        '<http://x/a> <http://www.w3.org/2000/01/rdf-schema#label> "house"@en .\n'
    )
    assert kg.label(Iri("http://x/a")) == "house"


def test_entity_descriptor(fixture_graph):
    d = fixture_graph.entity_descriptor(Iri("http://www.wikidata.org/entity/Q5582"))
    assert d.label == "Vincent van Gogh"
    # occupation fact assembled by hand from the fixture triples
    assert "Vincent van Gogh" in d.description and "painter" in d.description


def test_entity_descriptor_no_label():
    kg = KnowledgeGraph([])
    d = kg.entity_descriptor(Iri("http://x/Q42"))
    assert d.label == "Q42"
    assert d.description


def test_round_trip_idempotence(fixture_graph):
    once = serialize_ntriples(fixture_graph.triples)
    again = serialize_ntriples(load_ntriples(once).triples)
    assert once == again
    assert load_ntriples(once).triples == fixture_graph.triples


def test_duplicate_free_count(fixture_graph):
    distinct = {t.n3() for t in fixture_graph.triples}
    assert len(fixture_graph) == len(distinct)


_iri_values = st.text(
    alphabet=st.characters(whitelist_categories=("Ll", "Nd")), min_size=1, max_size=8
).map(lambda s: Iri("http://x/" + s))
_literals = st.builds(
    Literal,
    lexical=st.text(max_size=12),
    lang=st.one_of(st.none(), st.just("en"), st.just("fr")),
)
_triples = st.builds(Triple, _iri_values, _iri_values, st.one_of(_iri_values, _literals))


@given(st.lists(_triples, max_size=30))
def test_serialize_parse_round_trip_property(triples):
    text = serialize_ntriples(triples)
    assert set(parse_ntriples(text)) == set(triples)
