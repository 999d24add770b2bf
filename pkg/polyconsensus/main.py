from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from polyconsensus import __version__
from polyconsensus.core.config import settings
from polyconsensus.core.logging import configure_logging
from polyconsensus.routers import certify, examples, simulate, verify

configure_logging()

app = FastAPI(title="polyconsensus", version=__version__)

# --- CORS ---
app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.cors_origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# --- ROUTERS ---
app.include_router(certify.router)
app.include_router(verify.router)
app.include_router(simulate.router)
app.include_router(examples.router)  # also serves /api/schema


@app.get("/")
def read_root():
    return {"message": "polyconsensus certification service is running", "version": __version__}
