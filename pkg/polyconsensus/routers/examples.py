from fastapi import APIRouter, HTTPException

from polyconsensus import pipeline
from polyconsensus.core.errors import PolyConsensusError
from polyconsensus.core.schemas import ModelConfig
from polyconsensus.routers import http_error

router = APIRouter(prefix="/api", tags=["Examples"])

EXAMPLES = ("vdp", "lorenz")


@router.get("/examples/{name}", response_model=ModelConfig, response_model_exclude_none=True)
def get_example(name: str, classical: bool = False):
    if name not in EXAMPLES:
        raise HTTPException(status_code=404, detail=f"unknown example '{name}', expected one of {list(EXAMPLES)}")
    try:
        return pipeline.example_config(name, classical=classical)
    except PolyConsensusError as e:
        raise http_error(e)


@router.get("/schema")
def get_schema():
    return ModelConfig.model_json_schema()
