import logging
from typing import Literal, Optional

from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field

from polyconsensus import pipeline
from polyconsensus.core.errors import PolyConsensusError
from polyconsensus.core.schemas import Certificate, ModelConfig, VerificationReport
from polyconsensus.routers import http_error
from polyconsensus.sdp import SolverOptions

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/certify", tags=["Certify"])


class CertifyRequest(BaseModel):
    config: ModelConfig
    method: Optional[Literal["theorem1", "theorem2"]] = None
    l: Optional[int] = Field(None, ge=1)
    epsilon: Optional[float] = Field(None, ge=0)
    margin: Optional[float] = Field(None, ge=0)
    solver: Literal["cvxpy", "builtin"] = "cvxpy"
    max_iters: int = Field(2000, ge=1)
    seed: int = 0


class CertifyResponse(BaseModel):
    status: Literal["certified", "unknown", "infeasible"]
    message: str = ""
    certificate: Optional[Certificate] = None
    report: Optional[VerificationReport] = None


@router.post("", response_model=CertifyResponse)
def certify_model(body: CertifyRequest):
    defaults = body.config.method
    try:
        model = pipeline.build_model(body.config)
        outcome = pipeline.certify(
            model,
            method=body.method or defaults.method,
            l=body.l or defaults.l,
            epsilon=defaults.epsilon if body.epsilon is None else body.epsilon,
            margin=defaults.margin if body.margin is None else body.margin,
            margin_neg=defaults.margin_neg,
            tol_verify=defaults.tol_verify,
            options=SolverOptions(method=body.solver, max_iters=body.max_iters, seed=body.seed),
            model_hash=body.config.content_hash(),
        )
        return CertifyResponse(
            status=outcome.status,
            message=outcome.result.message,
            certificate=outcome.certificate,
            report=outcome.report,
        )
    except HTTPException:
        raise
    except PolyConsensusError as e:
        raise http_error(e)
    except Exception as e:
        logger.exception("certify failed")
        raise HTTPException(status_code=500, detail=str(e))
