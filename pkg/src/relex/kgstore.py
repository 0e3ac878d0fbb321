"""In-memory indexed triple store with N-Triples flat-file ingestion.

The graph is immutable after load: every operation reads from prebuilt
SPO/POS/OSP indexes, so concurrent readers never need locking. Replacing
a graph means building a new one and swapping the reference.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable, Optional, Union

RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"

# Predicates whose objects count as "type/occupation" facts for entity
# descriptions, in priority order.
DEFAULT_FACT_PREDICATES = (
    "http://www.wikidata.org/prop/direct/P106",  # occupation
    "http://www.wikidata.org/prop/direct/P31",   # instance of
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#type",
)


class StoreError(Exception):
    pass


class ParseError(StoreError):
    """N-Triples parse failure, carrying the 1-based line and bad token."""

    def __init__(self, line: int, token: str, message: str):
        self.line = line
        self.token = token
        super().__init__(f"line {line}: {message} (at {token!r})")


@dataclass(frozen=True, order=True)
class Iri:
    value: str

    def __post_init__(self):
        if not self.value:
            raise ValueError("IRI must be non-empty")
        if any(c.isspace() for c in self.value) or "<" in self.value or ">" in self.value:
            raise ValueError(f"IRI contains whitespace or angle brackets: {self.value!r}")

    @property
    def local_name(self) -> str:
        """Fragment after the last '#' or '/', used as a label fallback."""
        v = self.value
        for sep in ("#", "/"):
            if sep in v:
                v = v.rsplit(sep, 1)[1]
                break
        return v or self.value

    def n3(self) -> str:
        return f"<{self.value}>"


@dataclass(frozen=True)
class Literal:
    lexical: str
    lang: Optional[str] = None
    datatype: Optional[Iri] = None

    def __post_init__(self):
        if self.lang is not None and self.datatype is not None:
            raise ValueError("literal cannot carry both a language tag and a datatype")

    def n3(self) -> str:
        out = '"' + _escape(self.lexical) + '"'
        if self.lang is not None:
            out += f"@{self.lang}"
        elif self.datatype is not None:
            out += f"^^{self.datatype.n3()}"
        return out


Term = Union[Iri, Literal]


def term_text(t: Term) -> str:
    """Canonical serialized form; the total order used everywhere."""
    return t.n3()


@dataclass(frozen=True)
class Triple:
    subject: Iri
    predicate: Iri
    object: Term

    def n3(self) -> str:
        return f"{self.subject.n3()} {self.predicate.n3()} {self.object.n3()} ."


def _escape(s: str) -> str:
    return (
        s.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\t", "\\t")
    )


@dataclass(frozen=True)
class EntityDescriptor:
    id: Iri
    label: str
    description: str


class KnowledgeGraph:
    """Immutable triple set with SPO/POS/OSP indexes and a label map."""

    def __init__(self, triples: Iterable[Triple], label_predicate: str = RDFS_LABEL):
        self.triples = frozenset(triples)
        self.label_predicate = Iri(label_predicate)
        self._spo: dict[Iri, dict[Iri, list[Term]]] = {}
        self._pos: dict[Iri, dict[str, list[Triple]]] = {}
        self._osp: dict[str, dict[Iri, list[Iri]]] = {}
        by_subject: dict[Iri, list[Triple]] = {}
        for t in self.triples:
            self._spo.setdefault(t.subject, {}).setdefault(t.predicate, []).append(t.object)
            self._pos.setdefault(t.predicate, {}).setdefault(term_text(t.object), []).append(t)
            self._osp.setdefault(term_text(t.object), {}).setdefault(t.subject, []).append(t.predicate)
            by_subject.setdefault(t.subject, []).append(t)
        for p_map in self._spo.values():
            for objs in p_map.values():
                objs.sort(key=term_text)
        for o_map in self._pos.values():
            for ts in o_map.values():
                ts.sort(key=Triple.n3)
        for s_map in self._osp.values():
            for preds in s_map.values():
                preds.sort()
        self.labels: dict[Iri, str] = {}
        for s, ts in by_subject.items():
            label = _pick_label(ts, self.label_predicate)
            if label is not None:
                self.labels[s] = label
        self._adjacency: Optional[dict[Iri, dict[str, list]]] = None

    def __len__(self) -> int:
        return len(self.triples)

    def entities(self) -> list[Iri]:
        """All IRIs occurring in subject or object position, sorted."""
        seen = {t.subject for t in self.triples}
        seen.update(t.object for t in self.triples if isinstance(t.object, Iri))
        return sorted(seen)

    def lookup(
        self,
        s: Optional[Iri] = None,
        p: Optional[Iri] = None,
        o: Optional[Term] = None,
    ) -> list[Triple]:
        """Triples matching every bound position, in canonical text order."""
        if s is not None and s in self._spo:
            candidates = [
                Triple(s, pred, obj)
                for pred, objs in self._spo[s].items()
                for obj in objs
            ]
        elif p is not None and p in self._pos:
            candidates = [t for ts in self._pos[p].values() for t in ts]
        elif o is not None and term_text(o) in self._osp:
            candidates = [
                Triple(subj, pred, o)
                for subj, preds in self._osp[term_text(o)].items()
                for pred in preds
            ]
        elif s is None and p is None and o is None:
            candidates = list(self.triples)
        else:
            return []
        out = [
            t
            for t in candidates
            if (s is None or t.subject == s)
            and (p is None or t.predicate == p)
            and (o is None or term_text(t.object) == term_text(o))
        ]
        out.sort(key=Triple.n3)
        return out

    def neighbors(self, e: Iri, direction: str = "both") -> list[tuple[Iri, Iri, str]]:
        """Adjacent entities as (neighbor, predicate, direction) tuples.

        Literal objects are skipped: paths and relatedness are defined over
        entity-to-entity edges only.
        """
        if self._adjacency is None:
            adjacency: dict[Iri, dict[str, list]] = {}
            for t in self.triples:
                if not isinstance(t.object, Iri):
                    continue
                adjacency.setdefault(t.subject, {"out": [], "in": [], "both": []})["out"].append(
                    (t.object, t.predicate, "out")
                )
                adjacency.setdefault(t.object, {"out": [], "in": [], "both": []})["in"].append(
                    (t.subject, t.predicate, "in")
                )
            for entry in adjacency.values():
                entry["out"].sort(key=lambda n: (n[0].value, n[1].value, n[2]))
                entry["in"].sort(key=lambda n: (n[0].value, n[1].value, n[2]))
                entry["both"] = sorted(
                    entry["out"] + entry["in"], key=lambda n: (n[0].value, n[1].value, n[2])
                )
            self._adjacency = adjacency
        entry = self._adjacency.get(e)
        if entry is None:
            return []
        return entry[direction]

    def label(self, e: Iri) -> str:
        return self.labels.get(e, e.local_name)

    def entity_descriptor(self, e: Iri, max_facts: int = 3) -> EntityDescriptor:
        """Label plus up to `max_facts` type/occupation fact labels."""
        label = self.label(e)
        facts: list[str] = []
        for pred in DEFAULT_FACT_PREDICATES:
            for t in self.lookup(s=e, p=Iri(pred)):
                if isinstance(t.object, Iri):
                    fact = self.label(t.object)
                    if fact not in facts and fact != label:
                        facts.append(fact)
        parts = [label] + facts[:max_facts]
        return EntityDescriptor(id=e, label=label, description=", ".join(parts))


def _pick_label(triples: list[Triple], label_predicate: Iri) -> Optional[str]:
    # Prefer English, then untagged, then lexicographically-first tagged.
    candidates = [
        t.object
        for t in triples
        if t.predicate == label_predicate and isinstance(t.object, Literal)
    ]
    if not candidates:
        return None
    candidates.sort(key=lambda l: (l.lang != "en", l.lang is not None, l.lang or "", l.lexical))
    return candidates[0].lexical


# --- N-Triples subset parsing ---


def parse_ntriples(source: Union[str, IO[str]]) -> list[Triple]:
    """Parse line-oriented N-Triples-subset text into a triple list.

    Accepts IRI and literal terms only; blank nodes are a parse error.
    Comment lines (leading '#') and blank lines are ignored.
    """
    text = source if isinstance(source, str) else source.read()
    lines = text.split("\n")
    triples: list[Triple] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        triples.append(_parse_statement(line, lineno))
    return triples


def load_ntriples(source: Union[str, IO[str]], label_predicate: str = RDFS_LABEL) -> KnowledgeGraph:
    return KnowledgeGraph(parse_ntriples(source), label_predicate=label_predicate)


def serialize_ntriples(triples: Iterable[Triple]) -> str:
    """Canonical serialization: sorted statement lines, one per triple."""
    lines = sorted(t.n3() for t in triples)
    return "".join(line + "\n" for line in lines)


class _LineParser:
    def __init__(self, text: str, lineno: int):
        self.text = text
        self.pos = 0
        self.lineno = lineno

    def error(self, message: str) -> ParseError:
        rest = self.text[self.pos : self.pos + 20] or "<end of line>"
        return ParseError(self.lineno, rest, message)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def parse_iri(self) -> Iri:
        if self.pos >= len(self.text) or self.text[self.pos] != "<":
            if self.text[self.pos : self.pos + 2] == "_:":
                raise self.error("blank nodes are not supported")
            raise self.error("expected IRI")
        end = self.text.find(">", self.pos + 1)
        if end < 0:
            raise self.error("unterminated IRI")
        value = self.text[self.pos + 1 : end]
        self.pos = end + 1
        try:
            return Iri(value)
        except ValueError as e:
            raise self.error(str(e))

    def parse_literal(self) -> Literal:
        assert self.text[self.pos] == '"'
        self.pos += 1
        out: list[str] = []
        while True:
            if self.pos >= len(self.text):
                raise self.error("unterminated literal")
            c = self.text[self.pos]
            if c == '"':
                self.pos += 1
                break
            if c == "\\":
                if self.pos + 1 >= len(self.text):
                    raise self.error("dangling escape")
                esc = self.text[self.pos + 1]
                mapped = {"\\": "\\", '"': '"', "n": "\n", "t": "\t"}.get(esc)
                if mapped is None:
                    raise self.error(f"unknown escape \\{esc}")
                out.append(mapped)
                self.pos += 2
            else:
                out.append(c)
                self.pos += 1
        lexical = "".join(out)
        if self.text[self.pos : self.pos + 1] == "@":
            self.pos += 1
            start = self.pos
            while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "-"):
                self.pos += 1
            tag = self.text[start : self.pos]
            if not tag:
                raise self.error("empty language tag")
            return Literal(lexical, lang=tag)
        if self.text[self.pos : self.pos + 2] == "^^":
            self.pos += 2
            return Literal(lexical, datatype=self.parse_iri())
        return Literal(lexical)

    def parse_object(self) -> Term:
        if self.pos < len(self.text) and self.text[self.pos] == '"':
            return self.parse_literal()
        return self.parse_iri()


def _parse_statement(line: str, lineno: int) -> Triple:
    p = _LineParser(line, lineno)
    p.skip_ws()
    subject = p.parse_iri()
    p.skip_ws()
    predicate = p.parse_iri()
    p.skip_ws()
    obj = p.parse_object()
    p.skip_ws()
    if p.text[p.pos : p.pos + 1] != ".":
        raise p.error("expected terminating '.'")
    p.pos += 1
    p.skip_ws()
    if p.pos != len(p.text):
        raise p.error("trailing content after '.'")
    return Triple(subject, predicate, obj)
