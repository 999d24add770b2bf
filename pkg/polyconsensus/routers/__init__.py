from fastapi import HTTPException, status

from polyconsensus.core.errors import InputError, PolyConsensusError


def http_error(exc: PolyConsensusError) -> HTTPException:
    """Map a library error to a JSON error response."""
    code = status.HTTP_400_BAD_REQUEST if isinstance(exc, InputError) else status.HTTP_500_INTERNAL_SERVER_ERROR
    detail = {"kind": exc.kind, "message": exc.message}
    report = getattr(exc.detail, "violations", None)
    if report is not None:
        detail["violations"] = [{"kind": v.kind, "detail": v.detail} for v in report]
    return HTTPException(status_code=code, detail=detail)
