"""Command-line front door.

Exit codes: 0 success, 1 usage error, 2 runtime error. `--format json`
switches every subcommand to machine-readable output.
"""

from __future__ import annotations

import json
import sys
from typing import Optional

import click

from . import baselines, evalkit, ingest
from .engine import Engine, EngineConfig, fixture_path
from .kgstore import Iri, ParseError, StoreError
from .patterns import PatternError
from .relevance import UserContext

USAGE_ERROR = 1
RUNTIME_ERROR = 2


class _Group(click.Group):
    """click.Group with this tool's exit-code convention.

    Click exits 2 on its own usage errors; here bad invocations exit 1 and
    runtime failures exit 2.
    """

    def main(self, *args, **kwargs):
        kwargs["standalone_mode"] = False
        try:
            rv = super().main(*args, **kwargs)
        except click.UsageError as e:
            e.show()
            sys.exit(USAGE_ERROR)
        except click.exceptions.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(RUNTIME_ERROR)
        except click.ClickException as e:
            e.show()
            sys.exit(RUNTIME_ERROR)
        sys.exit(rv if isinstance(rv, int) else 0)


class _Format:
    def __init__(self, as_json: bool):
        self.as_json = as_json

    def emit(self, payload: dict, human: str):
        if self.as_json:
            click.echo(json.dumps(payload, indent=2, sort_keys=True))
        else:
            click.echo(human)


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(RUNTIME_ERROR)


def _build_engine(config_path: Optional[str]) -> Engine:
    return Engine(EngineConfig.load(config_path))


def _load_inputs(engine: Engine, graph: str, queries: Optional[str], templates: Optional[str]):
    try:
        if graph == "fixture":
            engine.load_fixture()
            if queries:
                engine.load_queries_file(queries)
            if templates:
                engine.load_templates_file(templates)
            return
        engine.load_graph_file(graph)
        engine.load_queries_file(queries or fixture_path("queries.rql"))
        engine.load_templates_file(templates or fixture_path("templates.txt"))
    except (ParseError, PatternError, baselines.BaselineError) as e:
        _fail(str(e))
    except OSError as e:
        _fail(f"cannot read input: {e}")


@click.group(cls=_Group)
@click.option("--format", "output_format", type=click.Choice(["table", "json"]), default="table")
@click.option("--config", "config_path", type=click.Path(), default=None, help="Engine config file (JSON)")
@click.pass_context
def main(ctx, output_format, config_path):
    """relex: knowledge-graph relational exploration."""
    ctx.obj = {"format": _Format(output_format == "json"), "config": config_path}


@main.command()
@click.argument("graph")
@click.option("--stats", is_flag=True, help="Print triple and entity counts")
@click.pass_context
def load(ctx, graph, stats):
    """Load and validate an N-Triples graph (or 'fixture')."""
    engine = _build_engine(ctx.obj["config"])
    try:
        if graph == "fixture":
            engine.load_fixture()
        else:
            engine.load_graph_file(graph)
    except (ParseError, StoreError) as e:
        _fail(str(e))
    except OSError as e:
        _fail(f"cannot read graph: {e}")
    triples = len(engine.graph)
    entities = len(engine.graph.entities())
    ctx.obj["format"].emit(
        {"triples": triples, "entities": entities},
        f"triples\t{triples}\nentities\t{entities}",
    )


@main.command()
@click.argument("graph")
@click.option("--queries", type=click.Path(), default=None)
@click.pass_context
def discover(ctx, graph, queries):
    """Run the query set and list candidate connections."""
    engine = _build_engine(ctx.obj["config"])
    _load_inputs(engine, graph, queries, None)
    candidates = engine.discover()
    payload = {
        "candidates": [
            {
                "entity1": c.entity1_id.value,
                "entity2": c.entity2_id.value,
                "relationship_type": c.relationship_type,
                "label": c.explanation_text,
            }
            for c in candidates
        ]
    }
    lines = [
        f"{c.relationship_type}\t{c.entity1_id.value}\t{c.entity2_id.value}\t{c.explanation_text}"
        for c in candidates
    ]
    ctx.obj["format"].emit(payload, "\n".join(lines) if lines else "(no candidates)")


@main.command()
@click.option("--graph", default="fixture", help="Graph file or 'fixture'")
@click.option("--queries", type=click.Path(), default=None)
@click.option("--e1", default=None, help="Pin the first entity IRI")
@click.option("--e2", default=None, help="Pin the second entity IRI")
@click.option("--context", "context_text", default="", help="Interest text for contextual relevance")
@click.option("--alpha", type=click.FloatRange(0.0, 1.0), default=None)
@click.option("--k", type=click.IntRange(0), default=5)
@click.pass_context
def explore(ctx, graph, queries, e1, e2, context_text, alpha, k):
    """Rank connections by interestingness and explain the top k."""
    engine = _build_engine(ctx.obj["config"])
    _load_inputs(engine, graph, queries, None)
    context = UserContext(interests=[context_text] if context_text else [])
    try:
        result = engine.explore(
            context,
            k,
            entity1=Iri(e1) if e1 else None,
            entity2=Iri(e2) if e2 else None,
            alpha=alpha,
        )
    except Exception as e:
        _fail(str(e))
    payload = {
        "results": [
            {
                "entity1": item.connection.entity1_id.value,
                "entity2": item.connection.entity2_id.value,
                "relationship_type": item.connection.relationship_type,
                "sr": item.breakdown.sr,
                "cr": item.breakdown.cr,
                "alpha": item.breakdown.alpha,
                "score": item.breakdown.score,
                "explanation": item.explanation,
            }
            for item in result.items
        ]
    }
    lines = [
        f"{item.breakdown.score:.4f}\t(sr {item.breakdown.sr:.4f} / cr {item.breakdown.cr:.4f})\t"
        f"{item.connection.relationship_type}\t{item.explanation}"
        for item in result.items
    ]
    ctx.obj["format"].emit(payload, "\n".join(lines) if lines else "(no results)")


@main.command()
@click.option("--graph", default="fixture")
@click.option("--queries", type=click.Path(), default=None)
@click.option("--templates", type=click.Path(), default=None)
@click.option("--method", type=click.Choice(["graph", "knowledge"]), required=True)
@click.option("--e1", default=None)
@click.option("--e2", default=None)
@click.pass_context
def baseline(ctx, graph, queries, templates, method, e1, e2):
    """Run a comparison baseline."""
    engine = _build_engine(ctx.obj["config"])
    _load_inputs(engine, graph, queries, templates)
    if method == "graph":
        if not e1 or not e2:
            click.echo("error: --method graph requires --e1 and --e2", err=True)
            sys.exit(USAGE_ERROR)
        result = baselines.graph_baseline(engine.graph, Iri(e1), Iri(e2))
        if result is None:
            ctx.obj["format"].emit({"found": False}, "(no path)")
            return
        ctx.obj["format"].emit(
            {"found": True, "explanation": result.explanation, "path_length": result.path.dist},
            result.explanation,
        )
        return
    try:
        results = baselines.knowledge_baseline(engine.graph, engine.queries, engine.templates)
    except baselines.BaselineError as e:
        _fail(str(e))
    payload = {"results": [{"relationship_type": r.connection.relationship_type, "explanation": r.explanation} for r in results]}
    ctx.obj["format"].emit(payload, "\n".join(r.explanation for r in results) or "(no results)")


@main.command()
@click.option("--graph", default="fixture")
@click.option("--queries", type=click.Path(), default=None)
@click.option("--templates", type=click.Path(), default=None)
@click.option("--gold", type=click.Path(), required=True)
@click.option("--system", type=click.Choice(["full", "graph", "knowledge"]), default="full")
@click.option("--ratings", type=click.Path(), default=None, help="TSV of curated relevance ratings")
@click.option("--k", type=int, default=None)
@click.pass_context
def evaluate(ctx, graph, queries, templates, gold, system, ratings, k):
    """Score a system against a gold standard."""
    engine = _build_engine(ctx.obj["config"])
    _load_inputs(engine, graph, queries, templates)
    try:
        with open(gold) as f:
            gold_standard = evalkit.parse_gold_standard(f.read())
        score_pairs = None
        if ratings:
            score_pairs = _score_pairs(engine, gold_standard, ratings, k)
        report = engine.evaluate(gold_standard, system=system, k=k, score_pairs=score_pairs)
    except (evalkit.EvalError, OSError) as e:
        _fail(str(e))
    ctx.obj["format"].emit(report.to_dict(), report.format_text().rstrip())


def _score_pairs(engine: Engine, gold, ratings_path: str, k: Optional[int]):
    """Pair the full system's scores with curated ratings keyed like gold
    entries."""
    ratings: dict[tuple[str, str, str], float] = {}
    with open(ratings_path) as f:
        for raw in f:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise evalkit.EvalError(f"ratings line must be '<e1> <e2> <type> TAB <rating>': {line!r}")
            e1, e2, rtype = fields[0].split()
            ratings[evalkit.gold_key(e1.strip("<>"), e2.strip("<>"), rtype)] = float(fields[1])
    from .explainer import rank_candidates

    ranked = rank_candidates(
        engine.graph,
        engine.discover(),
        engine._fixture_context(),
        engine.embedding_backend,
        limits=engine.config.path_limits(),
        alpha=engine.config.alpha,
    )
    pairs = []
    for conn, breakdown in ranked:
        rating = ratings.get(evalkit.connection_key(conn))
        if rating is not None:
            pairs.append((breakdown.score, rating))
    return pairs


@main.command()
@click.option("--endpoint", required=True)
@click.option("--query-file", type=click.Path(), required=True)
@click.option("--out", type=click.Path(), required=True, help="Destination N-Triples file")
@click.option("--mapping", "mapping_path", type=click.Path(), required=True, help="JSON mapping rules")
@click.option("--page-size", type=int, default=ingest.DEFAULT_PAGE_SIZE)
@click.option("--max-rows", type=int, default=None)
@click.pass_context
def fetch(ctx, endpoint, query_file, out, mapping_path, page_size, max_rows):
    """Extract triples from a remote query endpoint."""
    try:
        with open(query_file) as f:
            query = f.read()
        with open(mapping_path) as f:
            raw_rules = json.load(f)
        mapping = ingest.TripleMapping(
            rules=[
                ingest.MappingRule(
                    subject_var=r["subject"],
                    predicate=Iri(r["predicate"]),
                    object=r["object"] if not r.get("object_is_iri") else Iri(r["object"]),
                )
                for r in raw_rules
            ]
        )
        table = ingest.fetch_remote(endpoint, query, page_size=page_size, max_rows=max_rows)
        triples = ingest.table_to_triples(table, mapping)
        with open(out, "w") as sink:
            written = ingest.export_ntriples(triples, sink)
    except (ingest.IngestError, OSError, KeyError, ValueError) as e:
        _fail(str(e))
    ctx.obj["format"].emit(
        {"rows": len(table.rows), "triples": written},
        f"rows\t{len(table.rows)}\ntriples\t{written}",
    )


@main.command()
@click.option("--graph", default="fixture")
@click.option("--port", type=int, default=None)
@click.pass_context
def serve(ctx, graph, port):
    """Start the HTTP service."""
    from .server import serve as run_server

    config = EngineConfig.load(ctx.obj["config"])
    if port is not None:
        config.port = port
    engine = Engine(config)
    _load_inputs(engine, graph, None, None)
    run_server(config=config, engine=engine)


if __name__ == "__main__":
    main()
