"""Database models for persisted run manifests and sweep cells"""

from sqlalchemy import Column, Integer, String, Text, DateTime, Float, JSON, ForeignKey
from sqlalchemy.orm import declarative_base, relationship
from datetime import datetime
import uuid

Base = declarative_base()


class RunRecord(Base):
    __tablename__ = "runs"

    id = Column(String, primary_key=True, default=lambda: str(uuid.uuid4()))
    config_digest = Column(String, nullable=False)
    config_path = Column(String, nullable=True)
    horizon = Column(Integer, nullable=False)
    max_depth = Column(Integer, nullable=False)
    seed = Column(Integer, nullable=False)
    trace_path = Column(String, nullable=True)
    report_path = Column(String, nullable=True)
    wall_clock = Column(Float, nullable=True)  # seconds

    # Counts
    stages = Column(Integer, default=0)
    events = Column(Integer, default=0)
    initializations = Column(Integer, default=0)

    status = Column(String, default="ok")  # ok, fail, error
    verdicts = Column(JSON, nullable=True)

    created_at = Column(DateTime, default=datetime.utcnow)

    sweep_cell = relationship("SweepCell", back_populates="run", uselist=False)


class SweepCell(Base):
    __tablename__ = "sweep_cells"

    id = Column(String, primary_key=True, default=lambda: str(uuid.uuid4()))
    sweep_id = Column(String, nullable=False, index=True)
    run_id = Column(String, ForeignKey("runs.id"), nullable=True)
    cell = Column(String, nullable=False)  # depth/horizon/mix/seed label
    mix = Column(String, nullable=False)
    status = Column(String, default="ok")

    # Observed maxima against the closed-form bounds
    max_cyc = Column(JSON, nullable=True)
    observed = Column(JSON, nullable=True)  # {"f": [...], "g": [...], "h": [...]}
    closed_forms = Column(JSON, nullable=True)
    failed_checks = Column(Text, nullable=True)

    created_at = Column(DateTime, default=datetime.utcnow)

    run = relationship("RunRecord", back_populates="sweep_cell")
