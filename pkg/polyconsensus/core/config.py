import os
from typing import List, Optional

from dotenv import load_dotenv
from pydantic import BaseModel

load_dotenv()


class Settings(BaseModel):
    sdpa_solver: Optional[str] = None      # executable called as: <solver> in.dat-s out
    cvxpy_solver: Optional[str] = None     # None lets cvxpy pick its default backend
    log_level: str = "INFO"
    cors_origins: List[str] = ["*"]

    # Defaults shared by the CLI, the HTTP routers and the pipeline
    default_solver: str = "cvxpy"
    default_epsilon: float = 1.0
    default_margin: float = 1e-6
    default_tol_verify: float = 1e-7
    zero_tol: float = 1e-8                  # pattern zero-eigenvalue test, when a config sets none


def _split_origins(raw: Optional[str]) -> List[str]:
    if not raw:
        return ["*"]
    return [origin.strip() for origin in raw.split(",") if origin.strip()]


settings = Settings(
    sdpa_solver=os.getenv("POLYCONSENSUS_SDPA_SOLVER") or None,
    cvxpy_solver=os.getenv("POLYCONSENSUS_CVXPY_SOLVER") or None,
    log_level=os.getenv("POLYCONSENSUS_LOG_LEVEL", "INFO").upper(),
    cors_origins=_split_origins(os.getenv("POLYCONSENSUS_CORS_ORIGINS")),
    zero_tol=float(os.getenv("POLYCONSENSUS_ZERO_TOL", "1e-8")),
)
