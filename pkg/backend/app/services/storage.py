"""Experiment history: tables recorded in the SQL database."""

import logging
from typing import List, Optional

from sqlalchemy.orm import Session

from ..db import models
from ..db.database import Base, SessionLocal, engine
from ..db.schemas import TableRow

logger = logging.getLogger(__name__)


def init_db() -> None:
    Base.metadata.create_all(bind=engine)


def save_table(name: str, master_seed: int, normalization: str, rows: List[TableRow], db: Optional[Session] = None) -> int:
    """Store one experiment table and return its record id."""
    own_session = db is None
    db = db or SessionLocal()
    try:
        record = models.ExperimentRecord(
            name=name,
            master_seed=str(master_seed),
            normalization=normalization,
            point_count=len(rows),
            rows=[row.model_dump() for row in rows],
        )
        db.add(record)
        db.commit()
        db.refresh(record)
        logger.info("recorded experiment %s as #%d (%d rows)", name, record.id, len(rows))
        return record.id
    except Exception:
        db.rollback()
        raise
    finally:
        if own_session:
            db.close()


def list_records(db: Session, name: Optional[str] = None) -> List[models.ExperimentRecord]:
    query = db.query(models.ExperimentRecord)
    if name:
        query = query.filter(models.ExperimentRecord.name == name)
    return query.order_by(models.ExperimentRecord.created_at.desc(), models.ExperimentRecord.id.desc()).all()


def get_record(db: Session, record_id: int) -> Optional[models.ExperimentRecord]:
    return db.query(models.ExperimentRecord).filter(models.ExperimentRecord.id == record_id).first()


def delete_record(db: Session, record_id: int) -> bool:
    record = get_record(db, record_id)
    if record is None:
        return False
    db.delete(record)
    db.commit()
    return True
