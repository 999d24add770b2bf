import logging
from typing import List, Optional

from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field

from polyconsensus import pipeline
from polyconsensus.core.errors import PolyConsensusError
from polyconsensus.core.schemas import Certificate, ModelConfig, TraceMetadata
from polyconsensus.routers import http_error

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/simulate", tags=["Simulate"])


class SimulateRequest(BaseModel):
    config: ModelConfig
    certificate: Optional[Certificate] = None
    dt: float = Field(1e-3, gt=0)
    t_final: float = Field(10.0, gt=0)
    seed: int = 0
    amplitude: float = Field(2.0, gt=0)
    stride: int = Field(100, ge=1)      # keep every stride-th row of the trace


class SimulateResponse(BaseModel):
    metadata: TraceMetadata
    columns: List[str]
    rows: List[List[float]]


@router.post("", response_model=SimulateResponse)
def simulate_model(body: SimulateRequest):
    try:
        model = pipeline.build_model(body.config)
        trace, metadata = pipeline.simulate(
            model,
            body.certificate,
            dt=body.dt,
            t_final=body.t_final,
            seed=body.seed,
            amplitude=body.amplitude,
            model_hash=body.config.content_hash(),
        )
        return SimulateResponse(
            metadata=metadata,
            columns=pipeline.trace_header(model.n, model.N, trace.V is not None),
            rows=list(pipeline.trace_rows(trace, body.stride)),
        )
    except HTTPException:
        raise
    except PolyConsensusError as e:
        raise http_error(e)
    except Exception as e:
        logger.exception("simulate failed")
        raise HTTPException(status_code=500, detail=str(e))
