"""HTTP front door for exploration: thin handlers over the Engine facade.

Every endpoint result equals the corresponding in-process library call on
the same graph snapshot; handlers add no logic of their own beyond input
validation and serialization.
"""

from __future__ import annotations

from typing import Optional

from fastapi import Body, FastAPI, HTTPException, Query
from pydantic import BaseModel, Field

from . import baselines, evalkit
from .engine import Engine, EngineConfig
from .explainer import ExplainerError, ScoredExplanation
from .kgstore import Iri, ParseError
from .relevance import UserContext


class ContextModel(BaseModel):
    search_history: list[str] = Field(default_factory=list)
    expertise: str = ""
    interests: list[str] = Field(default_factory=list)
    alpha_override: Optional[float] = Field(default=None, ge=0.0, le=1.0)

    def to_context(self) -> UserContext:
        return UserContext(
            search_history=self.search_history,
            expertise=self.expertise,
            interests=self.interests,
            alpha_override=self.alpha_override,
        )


class FacetsModel(BaseModel):
    relationship_type: Optional[str] = None
    score_min: Optional[float] = None
    score_max: Optional[float] = None


class ExploreRequestModel(BaseModel):
    entity1: Optional[str] = None
    entity2: Optional[str] = None
    context: ContextModel = Field(default_factory=ContextModel)
    alpha: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    k: int = Field(default=10, ge=0)
    query_set: str = "default"
    facets: Optional[FacetsModel] = None


class GraphModel(BaseModel):
    ntriples: Optional[str] = None
    path: Optional[str] = None


class DiscoverModel(BaseModel):
    query_set: str = "default"


class EvaluateModel(BaseModel):
    gold_path: str
    system: str = "full"
    k: Optional[int] = None
    context: Optional[ContextModel] = None


def _serialize_item(item: ScoredExplanation, engine: Engine) -> dict:
    conn = item.connection
    return {
        "entity1": conn.entity1_id.value,
        "entity1_label": engine.graph.label(conn.entity1_id),
        "entity2": conn.entity2_id.value,
        "entity2_label": engine.graph.label(conn.entity2_id),
        "relationship_type": conn.relationship_type,
        "metadata": conn.relevant_metadata,
        "label": conn.explanation_text,
        "explanation": item.explanation,
        "backend_id": item.backend_id,
        "breakdown": {
            "sr": item.breakdown.sr,
            "cr": item.breakdown.cr,
            "alpha": item.breakdown.alpha,
            "score": item.breakdown.score,
        },
    }


def _apply_facets(items: list[dict], facets: Optional[FacetsModel]) -> list[dict]:
    if facets is None:
        return items
    out = items
    if facets.relationship_type is not None:
        out = [i for i in out if i["relationship_type"] == facets.relationship_type]
    if facets.score_min is not None:
        out = [i for i in out if i["breakdown"]["score"] >= facets.score_min]
    if facets.score_max is not None:
        out = [i for i in out if i["breakdown"]["score"] <= facets.score_max]
    return out


def create_app(engine: Optional[Engine] = None) -> FastAPI:
    engine = engine or Engine(EngineConfig.load())
    app = FastAPI(title="relex", version="0.1.0")
    app.state.engine = engine

    @app.get("/health")
    def health():
        return {"status": "ok", "triples": len(engine.graph)}

    @app.post("/graphs")
    def load_graph(body: GraphModel):
        try:
            if body.ntriples is not None:
                graph = engine.load_graph_text(body.ntriples)
            elif body.path is not None:
                graph = engine.load_graph_file(body.path)
            else:
                raise HTTPException(status_code=422, detail="provide ntriples or path")
        except ParseError as e:
            raise HTTPException(status_code=400, detail=str(e))
        except OSError as e:
            raise HTTPException(status_code=400, detail=f"cannot read graph: {e}")
        return {"triples": len(graph), "entities": len(graph.entities())}

    @app.get("/entities")
    def entities(q: str = Query(""), limit: int = Query(20, ge=1, le=200)):
        if not q:
            return {"results": []}
        return {
            "results": [
                {"id": e.value, "label": label}
                for e, label in engine.search_entities(q, limit=limit)
            ]
        }

    @app.post("/discover")
    def discover(body: DiscoverModel):
        candidates = engine.discover()
        return {
            "candidates": [
                {
                    "entity1": c.entity1_id.value,
                    "entity2": c.entity2_id.value,
                    "relationship_type": c.relationship_type,
                    "metadata": c.relevant_metadata,
                    "label": c.explanation_text,
                }
                for c in candidates
            ]
        }

    @app.post("/explore")
    def explore(body: ExploreRequestModel):
        try:
            result = engine.explore(
                context=body.context.to_context(),
                k=body.k,
                entity1=Iri(body.entity1) if body.entity1 else None,
                entity2=Iri(body.entity2) if body.entity2 else None,
                alpha=body.alpha,
            )
        except ValueError as e:
            raise HTTPException(status_code=422, detail=str(e))
        except ExplainerError as e:
            raise HTTPException(status_code=502, detail=str(e))
        items = [_serialize_item(item, engine) for item in result.items]
        return {
            "status": "success",
            "results": _apply_facets(items, body.facets),
            "failures": [
                {"entity1": f.connection.entity1_id.value, "entity2": f.connection.entity2_id.value, "error": f.error}
                for f in result.failures
            ],
        }

    @app.get("/baseline")
    def baseline(e1: str = Query(...), e2: str = Query(...)):
        try:
            result = baselines.graph_baseline(engine.graph, Iri(e1), Iri(e2))
        except ValueError as e:
            raise HTTPException(status_code=422, detail=str(e))
        if result is None:
            return {"found": False, "explanation": None}
        return {"found": True, "explanation": result.explanation, "path_length": result.path.dist}

    @app.post("/evaluate")
    def evaluate(body: EvaluateModel):
        try:
            with open(body.gold_path) as f:
                gold = evalkit.parse_gold_standard(f.read())
            report = engine.evaluate(
                gold,
                system=body.system,
                k=body.k,
                context=body.context.to_context() if body.context else None,
            )
        except OSError as e:
            raise HTTPException(status_code=400, detail=f"cannot read gold standard: {e}")
        except evalkit.EvalError as e:
            raise HTTPException(status_code=400, detail=str(e))
        return report.to_dict()

    @app.get("/facets")
    def facets():
        return {"relationship_types": engine.facets()}

    return app


def serve(config: Optional[EngineConfig] = None, engine: Optional[Engine] = None):
    """Run the service with uvicorn; blocks until shutdown."""
    import uvicorn

    config = config or EngineConfig.load()
    app = create_app(engine or Engine(config))
    uvicorn.run(app, host="127.0.0.1", port=config.port)
