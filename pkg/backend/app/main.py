import asyncio
import logging
import os

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.middleware.gzip import GZipMiddleware
from fastapi.responses import JSONResponse
from pydantic import ValidationError

from .core.errors import ContractViolation, InfiniteExpectationError, SsgaError
from .routers import bounds, chain, experiments, history
from .services import storage

# Create all database tables
storage.init_db()

logger = logging.getLogger(__name__)
app = FastAPI(title="Steady-State GA Runtime Lab")


@app.middleware("http")
async def log_requests(request: Request, call_next):
    logger.info(f"Incoming request: {request.method} {request.url.path}")
    response = await call_next(request)
    return response


app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Experiment tables are large JSON documents
app.add_middleware(GZipMiddleware, minimum_size=500)

# Experiments already fan out over processes; keep concurrent requests low
app.state.max_concurrency = max(1, (os.cpu_count() or 2) // 2)
app.state.semaphore = asyncio.Semaphore(app.state.max_concurrency)


@app.exception_handler(ContractViolation)
async def contract_violation_handler(request: Request, exc: ContractViolation):
    return JSONResponse(status_code=422, content={"detail": str(exc)})


@app.exception_handler(ValidationError)
async def validation_error_handler(request: Request, exc: ValidationError):
    return JSONResponse(status_code=422, content={"detail": exc.errors(include_url=False, include_context=False)})


@app.exception_handler(InfiniteExpectationError)
async def infinite_expectation_handler(request: Request, exc: InfiniteExpectationError):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(SsgaError)
async def internal_error_handler(request: Request, exc: SsgaError):
    logger.error("request %s failed: %s", request.url.path, exc)
    return JSONResponse(status_code=500, content={"detail": str(exc)})


app.include_router(experiments.router)
app.include_router(bounds.router)
app.include_router(chain.router)
app.include_router(history.router)


@app.get("/")
def read_root():
    return {"message": "Steady-State GA Runtime Lab is running."}
