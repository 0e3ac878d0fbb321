"""Declarative connection-pattern DSL: parsing, matching, and discovery.

A query set file holds one or more CONNECTION blocks:

    CONNECTION born_in TYPE "born_in"
    MATCH (?x <http://www.wikidata.org/prop/direct/P19> ?y)
    ENTITIES ?x ?y
    LABEL "{x} was born in {y}"

Matching is a conjunctive index-backed join over the graph; discovery
turns each binding into a ConnectionInstance candidate.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .kgstore import Iri, KnowledgeGraph, Literal, Term, Triple, term_text

VARIABLE_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


class PatternError(Exception):
    pass


class PatternSyntaxError(PatternError):
    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")


class PatternSemanticError(PatternError):
    pass


@dataclass(frozen=True)
class Variable:
    name: str


PatternTerm = Union[Variable, Iri, Literal]
TriplePattern = tuple[PatternTerm, PatternTerm, PatternTerm]
Binding = dict[str, Term]


@dataclass
class PatternQuery:
    name: str
    relationship_type: str
    patterns: list[TriplePattern]
    entity1_var: str
    entity2_var: str
    label_template: str
    metadata_vars: list[str] = field(default_factory=list)
    lang_filters: list[tuple[str, str]] = field(default_factory=list)

    def variables(self) -> set[str]:
        out: set[str] = set()
        for pat in self.patterns:
            for term in pat:
                if isinstance(term, Variable):
                    out.add(term.name)
        return out

    def validate(self) -> None:
        declared = self.variables()
        if not self.patterns:
            raise PatternSemanticError(f"query {self.name}: no MATCH patterns")
        for var in (self.entity1_var, self.entity2_var):
            if var not in declared:
                raise PatternSemanticError(
                    f"query {self.name}: entity variable ?{var} not bound by any pattern"
                )
        for var in self.metadata_vars:
            if var not in declared:
                raise PatternSemanticError(
                    f"query {self.name}: META variable ?{var} not bound by any pattern"
                )
        for var, _ in self.lang_filters:
            if var not in declared:
                raise PatternSemanticError(
                    f"query {self.name}: FILTER variable ?{var} not bound by any pattern"
                )
        for placeholder in re.findall(r"\{([^}]*)\}", self.label_template):
            if placeholder not in declared:
                raise PatternSemanticError(
                    f"query {self.name}: LABEL placeholder {{{placeholder}}} not bound by any pattern"
                )


@dataclass(frozen=True)
class ConnectionInstance:
    entity1_id: Iri
    entity2_id: Iri
    relationship_type: str
    relevant_metadata: dict  # str -> str
    explanation_text: str

    def __post_init__(self):
        if self.entity1_id == self.entity2_id:
            raise ValueError("self-connection")
        if not self.explanation_text:
            raise ValueError("empty explanation_text")

    def key(self) -> tuple[str, str, str]:
        return (self.entity1_id.value, self.entity2_id.value, self.relationship_type)


# --- tokenizer / parser ---


@dataclass
class _Token:
    kind: str  # WORD, VAR, IRI, STRING, LPAREN, RPAREN, COMMA, EQUALS
    value: str
    line: int
    column: int


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    for lineno, raw in enumerate(source.splitlines(), start=1):
        i = 0
        while i < len(raw):
            c = raw[i]
            col = i + 1
            if c in " \t":
                i += 1
                continue
            if c == "#":
                break
            if c == "(":
                tokens.append(_Token("LPAREN", "(", lineno, col))
                i += 1
            elif c == ")":
                tokens.append(_Token("RPAREN", ")", lineno, col))
                i += 1
            elif c == ",":
                tokens.append(_Token("COMMA", ",", lineno, col))
                i += 1
            elif c == "=":
                tokens.append(_Token("EQUALS", "=", lineno, col))
                i += 1
            elif c == "<":
                end = raw.find(">", i + 1)
                if end < 0:
                    raise PatternSyntaxError(lineno, col, "unterminated IRI")
                tokens.append(_Token("IRI", raw[i + 1 : end], lineno, col))
                i = end + 1
            elif c == '"':
                end = i + 1
                out = []
                while end < len(raw) and raw[end] != '"':
                    if raw[end] == "\\" and end + 1 < len(raw):
                        out.append(raw[end + 1])
                        end += 2
                    else:
                        out.append(raw[end])
                        end += 1
                if end >= len(raw):
                    raise PatternSyntaxError(lineno, col, "unterminated string")
                tokens.append(_Token("STRING", "".join(out), lineno, col))
                i = end + 1
            elif c == "?":
                m = re.match(r"\?([A-Za-z_][A-Za-z0-9_]*)", raw[i:])
                if not m:
                    raise PatternSyntaxError(lineno, col, "invalid variable name")
                tokens.append(_Token("VAR", m.group(1), lineno, col))
                i += m.end()
            else:
                m = re.match(r"[A-Za-z_][A-Za-z0-9_]*", raw[i:])
                if not m:
                    raise PatternSyntaxError(lineno, col, f"unexpected character {c!r}")
                tokens.append(_Token("WORD", m.group(0), lineno, col))
                i += m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def error(self, message: str) -> PatternSyntaxError:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            line = last.line if last else 1
            col = (last.column + len(last.value)) if last else 1
            return PatternSyntaxError(line, col, message + " (unexpected end of input)")
        return PatternSyntaxError(tok.line, tok.column, f"{message}, got {tok.value!r}")

    def take(self, kind: str, value: Optional[str] = None) -> _Token:
        tok = self.peek()
        if tok is None or tok.kind != kind or (value is not None and tok.value != value):
            expect = value if value is not None else kind
            raise self.error(f"expected {expect}")
        self.pos += 1
        return tok

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "WORD" and tok.value == word

    def parse_term(self) -> PatternTerm:
        tok = self.peek()
        if tok is None:
            raise self.error("expected term")
        if tok.kind == "VAR":
            self.pos += 1
            return Variable(tok.value)
        if tok.kind == "IRI":
            self.pos += 1
            try:
                return Iri(tok.value)
            except ValueError as e:
                raise PatternSyntaxError(tok.line, tok.column, str(e))
        if tok.kind == "STRING":
            self.pos += 1
            return Literal(tok.value)
        raise self.error("expected ?var, <iri>, or \"literal\"")

    def parse_triple_pattern(self) -> TriplePattern:
        self.take("LPAREN")
        s = self.parse_term()
        p = self.parse_term()
        o = self.parse_term()
        self.take("RPAREN")
        return (s, p, o)

    def parse_query(self) -> PatternQuery:
        self.take("WORD", "CONNECTION")
        name = self.take("WORD").value
        self.take("WORD", "TYPE")
        rtype = self.take("STRING").value
        self.take("WORD", "MATCH")
        patterns = [self.parse_triple_pattern()]
        while self.peek() is not None and self.peek().kind == "COMMA":
            self.pos += 1
            patterns.append(self.parse_triple_pattern())
        lang_filters: list[tuple[str, str]] = []
        while self.at_keyword("FILTER"):
            self.pos += 1
            self.take("WORD", "LANG")
            self.take("LPAREN")
            var = self.take("VAR").value
            self.take("RPAREN")
            self.take("EQUALS")
            tag = self.take("STRING").value
            lang_filters.append((var, tag))
        self.take("WORD", "ENTITIES")
        e1 = self.take("VAR").value
        e2 = self.take("VAR").value
        metadata_vars: list[str] = []
        if self.at_keyword("META"):
            self.pos += 1
            while self.peek() is not None and self.peek().kind == "VAR":
                metadata_vars.append(self.take("VAR").value)
        self.take("WORD", "LABEL")
        template = self.take("STRING").value
        query = PatternQuery(
            name=name,
            relationship_type=rtype,
            patterns=patterns,
            entity1_var=e1,
            entity2_var=e2,
            label_template=template,
            metadata_vars=metadata_vars,
            lang_filters=lang_filters,
        )
        query.validate()
        return query


def parse_pattern(source: str) -> PatternQuery:
    """Parse a single CONNECTION block."""
    parser = _Parser(_tokenize(source))
    query = parser.parse_query()
    if parser.peek() is not None:
        raise parser.error("expected end of input")
    return query


def parse_query_set(source: str) -> list[PatternQuery]:
    """Parse a file of CONNECTION blocks."""
    parser = _Parser(_tokenize(source))
    queries: list[PatternQuery] = []
    while parser.peek() is not None:
        queries.append(parser.parse_query())
    return queries


# --- matching ---


def _pattern_selectivity(kg: KnowledgeGraph, pat: TriplePattern, bound: set[str]) -> tuple[int, int]:
    """Lower is evaluated first: (number of unbound positions, constant-count proxy)."""
    unbound = 0
    for term in pat:
        if isinstance(term, Variable) and term.name not in bound:
            unbound += 1
    return (unbound, len(kg.triples))

def _resolve(term: PatternTerm, binding: Binding) -> Optional[Term]:
    if isinstance(term, Variable):
        return binding.get(term.name)
    return term


def _match_one(kg: KnowledgeGraph, pat: TriplePattern, binding: Binding) -> list[Binding]:
    s = _resolve(pat[0], binding)
    p = _resolve(pat[1], binding)
    o = _resolve(pat[2], binding)
    if isinstance(s, Literal) or isinstance(p, Literal):
        return []
    out: list[Binding] = []
    for t in kg.lookup(s=s, p=p, o=o):
        new = dict(binding)
        ok = True
        for term, value in zip(pat, (t.subject, t.predicate, t.object)):
            if isinstance(term, Variable):
                existing = new.get(term.name)
                if existing is not None and term_text(existing) != term_text(value):
                    ok = False
                    break
                new[term.name] = value
        if ok:
            out.append(new)
    return out


def _passes_lang_filters(binding: Binding, filters: list[tuple[str, str]]) -> bool:
    for var, tag in filters:
        value = binding.get(var)
        if not isinstance(value, Literal) or value.lang != tag:
            return False
    return True


def match_pattern(kg: KnowledgeGraph, q: PatternQuery) -> list[Binding]:
    """All bindings satisfying every triple pattern and language filter.

    Evaluation order picks the pattern with the fewest unbound variables
    at each step; the result set is order-independent, and the returned
    list is sorted canonically for determinism.
    """
    remaining = list(q.patterns)
    bindings: list[Binding] = [{}]
    bound: set[str] = set()
    while remaining:
        remaining.sort(key=lambda pat: _pattern_selectivity(kg, pat, bound))
        pat = remaining.pop(0)
        bindings = [new for b in bindings for new in _match_one(kg, pat, b)]
        for term in pat:
            if isinstance(term, Variable):
                bound.add(term.name)
        if not bindings:
            return []
    bindings = [b for b in bindings if _passes_lang_filters(b, q.lang_filters)]
    var_order = sorted(q.variables())
    bindings.sort(key=lambda b: tuple(term_text(b[v]) for v in var_order))
    return bindings


def _display_text(value: Term, kg: KnowledgeGraph) -> str:
    if isinstance(value, Iri):
        return kg.label(value)
    return value.lexical


def discover_connections(
    kg: KnowledgeGraph, queries: list[PatternQuery]
) -> list[ConnectionInstance]:
    """One candidate per binding, query order then binding order.

    Self-connections are dropped; duplicates on (entity1, entity2,
    relationship_type) keep the first occurrence.
    """
    out: list[ConnectionInstance] = []
    seen: set[tuple[str, str, str]] = set()
    for q in queries:
        for binding in match_pattern(kg, q):
            e1 = binding[q.entity1_var]
            e2 = binding[q.entity2_var]
            if not isinstance(e1, Iri) or not isinstance(e2, Iri) or e1 == e2:
                continue
            label = q.label_template
            for var in q.variables():
                label = label.replace("{" + var + "}", _display_text(binding[var], kg))
            metadata = {
                var: term_text(binding[var]) for var in q.metadata_vars
            }
            conn = ConnectionInstance(
                entity1_id=e1,
                entity2_id=e2,
                relationship_type=q.relationship_type,
                relevant_metadata=metadata,
                explanation_text=label,
            )
            if conn.key() in seen:
                continue
            seen.add(conn.key())
            out.append(conn)
    return out
