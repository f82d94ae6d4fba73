from sqlalchemy import JSON, BigInteger, Column, DateTime, Integer, String
from sqlalchemy.sql import func

from .database import Base


class ExperimentRecord(Base):
    __tablename__ = "experiment_records"

    id = Column(Integer, primary_key=True, index=True)
    name = Column(String, index=True, nullable=False)  # builtin spec name or "run"/"sweep"
    created_at = Column(DateTime(timezone=True), server_default=func.now())
    # stored as text: 64-bit seeds overflow signed BIGINT columns
    master_seed = Column(String, nullable=False)
    normalization = Column(String, nullable=False, default="none")
    point_count = Column(BigInteger, nullable=False, default=0)
    rows = Column(JSON, nullable=False)  # list of table rows, CSV column order
