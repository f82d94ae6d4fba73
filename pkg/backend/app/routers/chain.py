import numpy as np
from fastapi import APIRouter, Request
from starlette.concurrency import run_in_threadpool

from ..db import schemas
from ..services import markov

router = APIRouter(
    prefix="/chain",
    tags=["Markov chain"]
)


@router.post("/solve", response_model=schemas.ChainSolution)
async def solve_chain(req: schemas.ChainSolveRequest, request: Request):
    """
    Expected absorption times of the three-state level chain from S1 and S2.
    With `episodes`, the closed form is checked against a seeded simulation.
    """
    params = schemas.MarkovParams(p_m=req.p_m, p_d=req.p_d, p_c=req.p_c, p_r=req.p_r)
    solution = schemas.ChainSolution(params=params, times=markov.absorbing_times(params))
    if req.episodes:
        rng = np.random.default_rng(req.seed)
        async with request.app.state.semaphore:
            solution.simulation = await run_in_threadpool(markov.oracle_check, params, req.episodes, rng)
    return solution
