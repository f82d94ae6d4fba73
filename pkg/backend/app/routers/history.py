from typing import List, Optional

from fastapi import APIRouter, Depends, HTTPException
from fastapi.responses import PlainTextResponse
from sqlalchemy.orm import Session

from ..db import database, schemas
from ..services import export, storage

router = APIRouter(
    prefix="/history",
    tags=["History"]
)


@router.get("", response_model=List[schemas.ExperimentRecord])
def list_history(name: Optional[str] = None, db: Session = Depends(database.get_db)):
    """Recorded experiment tables, newest first."""
    return storage.list_records(db, name=name)


@router.get("/{record_id}", response_model=schemas.ExperimentRecord)
def get_history_item(record_id: int, db: Session = Depends(database.get_db)):
    record = storage.get_record(db, record_id)
    if not record:
        raise HTTPException(status_code=404, detail="Experiment record not found")
    return record


@router.get("/{record_id}/csv", response_class=PlainTextResponse)
def get_history_csv(record_id: int, db: Session = Depends(database.get_db)):
    """The recorded table rendered as the CLI would write it."""
    record = storage.get_record(db, record_id)
    if not record:
        raise HTTPException(status_code=404, detail="Experiment record not found")
    rows = [schemas.TableRow.model_validate(row) for row in record.rows]
    return PlainTextResponse(export.render_table(rows, "csv"), media_type="text/csv")


@router.delete("/{record_id}")
def delete_history_item(record_id: int, db: Session = Depends(database.get_db)):
    if not storage.delete_record(db, record_id):
        raise HTTPException(status_code=404, detail="Experiment record not found")
    return {"message": "Experiment record deleted successfully"}
