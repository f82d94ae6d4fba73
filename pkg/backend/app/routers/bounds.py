from typing import Literal, Optional, Union

from fastapi import APIRouter, HTTPException, Query

from ..core.config import BoundMode
from ..db import schemas
from ..services import bounds

router = APIRouter(
    prefix="/bounds",
    tags=["Bounds"]
)

BoundName = Literal["upper", "upper-2plus1", "lower", "takeover", "optimal-c"]


@router.get("/{kind}", response_model=Union[schemas.BoundReport, schemas.OptimalMutation])
def get_bound(
    kind: BoundName,
    mu: Optional[int] = Query(default=None, ge=1),
    c: float = Query(default=1.0, gt=0),
    n: Optional[int] = Query(default=None, ge=1),
    mode: Optional[BoundMode] = None,
    per_level: bool = False,
):
    """Closed-form bound in the same shape as `ssga bounds --kind ...`."""
    if kind == "optimal-c":
        return bounds.optimal_mutation()
    if kind == "takeover":
        if mu is None:
            raise HTTPException(status_code=422, detail="takeover needs mu")
        return bounds.takeover_report(mu, c)
    if n is None:
        raise HTTPException(status_code=422, detail=f"{kind} needs n")
    if kind == "upper":
        if mu is None or mu < 3:
            raise HTTPException(status_code=422, detail="upper needs mu >= 3; use upper-2plus1 for mu = 2")
        return bounds.upper_bound_theorem2(mu, c, n, per_level=per_level, mode=mode)
    if kind == "upper-2plus1":
        return bounds.upper_bound_2plus1(c, n, mode=mode)
    return bounds.lower_bound_theorem5(c, n, per_level=per_level, mode=mode)
