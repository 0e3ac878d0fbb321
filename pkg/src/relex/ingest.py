"""Remote extraction: query a SPARQL-protocol endpoint, convert tabular
results to triples, and write N-Triples subsets for the embedded store.

Remote query text is opaque pass-through; only pagination clauses are
appended locally.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import IO, Optional, Union

import httpx

from .kgstore import Iri, Literal, Term, Triple, serialize_ntriples

DEFAULT_PAGE_SIZE = 1000
DEFAULT_USER_AGENT = "relex/0.1 (knowledge-graph extraction)"
RETRY_ATTEMPTS = 3


class IngestError(Exception):
    pass


class RemoteFetchError(IngestError):
    pass


class MalformedResponseError(IngestError):
    pass


@dataclass
class ResultTable:
    variables: list[str]
    rows: list[dict[str, Term]] = field(default_factory=list)

    def validate(self):
        declared = set(self.variables)
        for row in self.rows:
            for var in row:
                if var not in declared:
                    raise IngestError(f"row binds undeclared variable {var!r}")


@dataclass(frozen=True)
class MappingRule:
    subject_var: str
    predicate: Iri
    object: Union[str, Iri, Literal]  # variable name or constant term


@dataclass
class TripleMapping:
    rules: list[MappingRule]

    def validate(self, variables: list[str]):
        declared = set(variables)
        for rule in self.rules:
            if rule.subject_var not in declared:
                raise IngestError(f"mapping rule references undeclared variable {rule.subject_var!r}")
            if isinstance(rule.object, str) and rule.object not in declared:
                raise IngestError(f"mapping rule references undeclared variable {rule.object!r}")


def parse_sparql_json(body: dict) -> ResultTable:
    """Standard SPARQL query-results JSON into a ResultTable."""
    try:
        variables = list(body["head"]["vars"])
        bindings = body["results"]["bindings"]
    except (KeyError, TypeError) as e:
        raise MalformedResponseError(f"missing results structure: {e}") from e
    table = ResultTable(variables=variables)
    for binding in bindings:
        row: dict[str, Term] = {}
        for var, cell in binding.items():
            try:
                kind = cell["type"]
                value = cell["value"]
            except (KeyError, TypeError) as e:
                raise MalformedResponseError(f"bad cell for {var!r}: {e}") from e
            if kind == "uri":
                row[var] = Iri(value)
            elif kind in ("literal", "typed-literal"):
                lang = cell.get("xml:lang")
                datatype = cell.get("datatype")
                row[var] = Literal(
                    value,
                    lang=lang,
                    datatype=Iri(datatype) if (datatype and not lang) else None,
                )
            else:
                raise MalformedResponseError(f"unsupported term type {kind!r}")
        table.rows.append(row)
    table.validate()
    return table


def fetch_remote(
    endpoint: str,
    query: str,
    page_size: int = DEFAULT_PAGE_SIZE,
    max_rows: Optional[int] = None,
    user_agent: str = DEFAULT_USER_AGENT,
    timeout: float = 60.0,
    client: Optional[httpx.Client] = None,
    backoff_base: float = 0.5,
) -> ResultTable:
    """Run a query with LIMIT/OFFSET pagination, concatenating pages.

    Transient failures (network errors, HTTP 5xx/429) are retried up to 3
    attempts per page with exponential backoff.
    """
    own_client = client is None
    http = client or httpx.Client(timeout=timeout)
    table: Optional[ResultTable] = None
    offset = 0
    try:
        while True:
            limit = page_size
            if max_rows is not None:
                limit = min(limit, max_rows - offset)
                if limit <= 0:
                    break
            paged_query = f"{query}\nLIMIT {limit} OFFSET {offset}"
            body = _fetch_page(http, endpoint, paged_query, user_agent, backoff_base)
            page = parse_sparql_json(body)
            if table is None:
                table = page
            else:
                table.rows.extend(page.rows)
            if len(page.rows) < limit:
                break
            offset += len(page.rows)
    finally:
        if own_client:
            http.close()
    return table if table is not None else ResultTable(variables=[])


def _fetch_page(http: httpx.Client, endpoint: str, query: str, user_agent: str, backoff_base: float) -> dict:
    last_error: Optional[Exception] = None
    for attempt in range(RETRY_ATTEMPTS):
        if attempt:
            time.sleep(backoff_base * (2 ** (attempt - 1)))
        try:
            resp = http.post(
                endpoint,
                data={"query": query},
                headers={"User-Agent": user_agent, "Accept": "application/sparql-results+json"},
            )
        except httpx.HTTPError as e:
            last_error = RemoteFetchError(f"network failure: {e}")
            continue
        if resp.status_code >= 500 or resp.status_code == 429:
            last_error = RemoteFetchError(f"HTTP {resp.status_code}")
            continue
        if resp.status_code != 200:
            raise RemoteFetchError(f"HTTP {resp.status_code}")
        try:
            return resp.json()
        except ValueError as e:
            raise MalformedResponseError(f"response body is not valid JSON: {e}") from e
    raise RemoteFetchError(f"giving up after {RETRY_ATTEMPTS} attempts: {last_error}")


def table_to_triples(table: ResultTable, mapping: TripleMapping) -> list[Triple]:
    """One triple per rule per row where both endpoints are bound; rows
    with unbound cells skip only the affected rules. Deduplicated, with
    first-seen order preserved."""
    mapping.validate(table.variables)
    out: list[Triple] = []
    seen: set[str] = set()
    for row in table.rows:
        for rule in mapping.rules:
            subject = row.get(rule.subject_var)
            if not isinstance(subject, Iri):
                continue
            if isinstance(rule.object, str):
                obj = row.get(rule.object)
                if obj is None:
                    continue
            else:
                obj = rule.object
            triple = Triple(subject, rule.predicate, obj)
            line = triple.n3()
            if line in seen:
                continue
            seen.add(line)
            out.append(triple)
    return out


def export_ntriples(triples, sink: IO[str]) -> int:
    """Write canonical N-Triples; returns the statement count written."""
    text = serialize_ntriples(triples)
    sink.write(text)
    return text.count("\n")
