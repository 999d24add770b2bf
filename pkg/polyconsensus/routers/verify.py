import logging
from typing import Optional

from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field

from polyconsensus import pipeline
from polyconsensus.core.errors import PolyConsensusError
from polyconsensus.core.schemas import Certificate, ModelConfig, VerificationReport
from polyconsensus.routers import http_error

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/verify", tags=["Verify"])


class VerifyRequest(BaseModel):
    config: ModelConfig
    certificate: Certificate
    tol_verify: Optional[float] = Field(None, gt=0)


class VerifyResponse(BaseModel):
    report: VerificationReport
    hash_mismatch: bool


@router.post("", response_model=VerifyResponse)
def verify_certificate(body: VerifyRequest):
    tol = body.config.method.tol_verify if body.tol_verify is None else body.tol_verify
    try:
        model = pipeline.build_model(body.config)
        report, mismatch = pipeline.verify(model, body.certificate, tol, body.config.content_hash())
        return VerifyResponse(report=report, hash_mismatch=mismatch)
    except HTTPException:
        raise
    except PolyConsensusError as e:
        raise http_error(e)
    except Exception as e:
        logger.exception("verify failed")
        raise HTTPException(status_code=500, detail=str(e))
