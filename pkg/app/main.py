"""
SolAut - Main FastAPI Application
HTTP surface over the same report documents the command line prints.
"""

import os
import asyncio
import logging
from datetime import datetime, timezone
from contextlib import asynccontextmanager
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel
from slowapi import Limiter, _rate_limit_exceeded_handler
from slowapi.util import get_remote_address
from slowapi.errors import RateLimitExceeded

from . import __version__
from .config import get_settings
from .errors import SolAutError
from .reports import ReportDocument, aut_report, classify_report, homeo_report, out_report, parse_matrix

UTC = timezone.utc  # datetime.UTC alias (3.11+)

# ----- Logging Configuration -----
logging.basicConfig(
    level=get_settings().log_level,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger("solaut")

# ----- Rate Limiter -----
limiter = Limiter(key_func=get_remote_address)


# ----- Lifespan Events -----
@asynccontextmanager
async def lifespan(app: FastAPI):
    """Application lifespan - startup and shutdown."""
    settings = get_settings()
    logger.info(f"SolAut {__version__} starting (iso_limit={settings.iso_limit}, max_beta={settings.max_beta})")
    yield
    logger.info("SolAut shutting down")


# ----- App Setup -----
app = FastAPI(
    title="SolAut",
    description="Automorphism groups of Sol 3-manifold groups",
    version=__version__,
    lifespan=lifespan
)

# Rate limiter setup
app.state.limiter = limiter
app.add_exception_handler(RateLimitExceeded, _rate_limit_exceeded_handler)

# CORS - origins from env (comma-separated), falling back to localhost defaults
_default_origins = "http://localhost:8000,http://127.0.0.1:8000"
CORS_ORIGINS = [
    o.strip() for o in os.environ.get("CORS_ORIGINS", _default_origins).split(",") if o.strip()
]
app.add_middleware(
    CORSMiddleware,
    allow_origins=CORS_ORIGINS,
    allow_credentials=False,
    allow_methods=["GET", "POST", "OPTIONS"],
    allow_headers=["Content-Type"],
)


@app.exception_handler(SolAutError)
async def solaut_error_handler(request: Request, exc: SolAutError):
    logger.info(f"{request.url.path} rejected: {exc.code}: {exc}")
    return JSONResponse(
        status_code=exc.http_status,
        content={"error": exc.code, "message": str(exc), "exit_code": exc.exit_code},
    )


# ----- Request Models -----

class MatrixRequest(BaseModel):
    matrix: str


class StructureRequest(BaseModel):
    kind: Literal["torus-bundle", "sapphire"]
    matrix: str
    verify: bool = False


class HomeoRequest(BaseModel):
    A: str
    B: str


# ----- API Endpoints -----

@app.get("/api/health")
async def health():
    """Health check endpoint."""
    return {
        "status": "healthy",
        "version": __version__,
        "timestamp": datetime.now(UTC).isoformat()
    }


@app.post("/api/classify", response_model=ReportDocument)
@limiter.limit("60/minute")
async def classify(data: MatrixRequest, request: Request):
    """Anosov verdict, primitive root, reverser data and square roots of a matrix."""
    A = parse_matrix(data.matrix)
    return await asyncio.to_thread(classify_report, A)


@app.post("/api/aut", response_model=ReportDocument)
@limiter.limit("30/minute")
async def aut(data: StructureRequest, request: Request):
    """Structure tree and named generators of Aut(E)."""
    M = parse_matrix(data.matrix)
    return await asyncio.to_thread(aut_report, data.kind, M, data.verify)


@app.post("/api/out", response_model=ReportDocument)
@limiter.limit("30/minute")
async def out(data: StructureRequest, request: Request):
    """
    Structure tree, presentation and order of Out(E).
    With verify=true the brute-force oracle runs as well; this can take
    seconds for larger groups.
    """
    M = parse_matrix(data.matrix)
    return await asyncio.to_thread(out_report, data.kind, M, data.verify)


@app.post("/api/homeo", response_model=ReportDocument)
@limiter.limit("60/minute")
async def homeo(data: HomeoRequest, request: Request):
    """Homeomorphism test for the torus bundles of two Anosov matrices."""
    A, B = parse_matrix(data.A), parse_matrix(data.B)
    return await asyncio.to_thread(homeo_report, A, B)
