from typing import Dict, List

from fastapi import APIRouter, Depends, HTTPException, Request
from sqlalchemy.orm import Session
from starlette.concurrency import run_in_threadpool

from ..core.config import settings
from ..db import database, schemas
from ..services import harness, specs, storage

router = APIRouter(
    prefix="/experiments",
    tags=["Experiments"]
)


def _spec_for(req: schemas.RunRequest) -> schemas.ExperimentSpec:
    template = schemas.AlgorithmConfig(
        variant=req.algo,
        n=req.n,
        mu=req.mu,
        c=req.c,
        parent_selection=req.selection,
        greedy_crossover=req.greedy_crossover,
    )
    return schemas.ExperimentSpec(
        name="run",
        series=[schemas.SeriesSpec(template=template, sweep="n", values=[req.n])],
        runs_per_point=req.runs,
        master_seed=req.seed,
    )


@router.post("/run", response_model=schemas.TableRow)
async def run_configuration(
    req: schemas.RunRequest,
    request: Request,
    record: bool = False,
    db: Session = Depends(database.get_db),
):
    """
    Seeded runs of one configuration, summarised as a single table row.
    The same request always returns the same row.
    """
    spec = _spec_for(req)
    async with request.app.state.semaphore:
        workers = settings.WORKERS or request.app.state.max_concurrency
        table = await run_in_threadpool(harness.run_experiment, spec, workers)
    row = table[0].row
    if record:
        storage.save_table(spec.name, spec.master_seed, spec.normalization, [row], db=db)
    return row


@router.get("/builtin")
def list_builtin_specs(scale: specs.Scale = "desk") -> List[Dict]:
    """Names, point counts and run totals of the builtin figure / table specs."""
    out = []
    for spec in specs.builtin_specs(scale):
        points = harness.expand_points(spec)
        out.append({
            "name": spec.name,
            "points": len(points),
            "runs": sum(p.runs for p in points),
            "normalization": spec.normalization,
        })
    return out


@router.get("/builtin/{name}", response_model=schemas.ExperimentSpec)
def get_builtin_spec(name: str, scale: specs.Scale = "desk"):
    try:
        return specs.get_spec(name, scale)
    except KeyError:
        raise HTTPException(status_code=404, detail=f"Unknown builtin spec: {name}")
