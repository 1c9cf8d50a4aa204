"""FastAPI application exposing the planning pipeline."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..env_model import EnvFormatError
from . import handlers, schemas

app = FastAPI(
    title="waitr planning service",
    description="Multi-agent spatiotemporal path planning over gridded dynamic environments.",
)


def _guarded(fn, request):
    try:
        return fn(request)
    except (EnvFormatError, ValueError, IndexError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


@app.get("/health", response_model=schemas.HealthResponse)
def health() -> schemas.HealthResponse:
    return handlers.health()


@app.post("/synth", response_model=schemas.SynthResponse)
def synth(request: schemas.SynthRequest) -> schemas.SynthResponse:
    return _guarded(handlers.synth, request)


@app.post("/extract", response_model=schemas.ExtractResponse)
def extract(request: schemas.ExtractRequest) -> schemas.ExtractResponse:
    return _guarded(handlers.extract, request)


@app.post("/cluster", response_model=schemas.ClusterResponse)
def cluster(request: schemas.ClusterRequest) -> schemas.ClusterResponse:
    return _guarded(handlers.cluster, request)


@app.post("/graph", response_model=schemas.GraphResponse)
def graph(request: schemas.GraphRequest) -> schemas.GraphResponse:
    return _guarded(handlers.graph, request)


@app.post("/plan", response_model=schemas.PlanResponse)
def plan(request: schemas.PlanRequest) -> schemas.PlanResponse:
    return _guarded(handlers.plan, request)


@app.post("/run", response_model=schemas.RunResponse)
def run(request: schemas.RunRequest) -> schemas.RunResponse:
    return _guarded(handlers.run, request)


@app.post("/compare", response_model=schemas.CompareResponse)
def compare(request: schemas.CompareRequest) -> schemas.CompareResponse:
    return _guarded(handlers.compare, request)
