"""Database connection and session management for run manifests"""

from sqlalchemy import create_engine, event, inspect, text
from sqlalchemy.orm import sessionmaker, Session
from sqlalchemy.pool import StaticPool
from .models import Base, RunRecord, SweepCell
from .config import settings
import logging
import os
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)

engine_kwargs = {
    "echo": False,
    "pool_pre_ping": True
}

if "sqlite" in settings.database_url:
    engine_kwargs.update({
        "connect_args": {"check_same_thread": False},
        "poolclass": StaticPool
    })

engine = create_engine(settings.database_url, **engine_kwargs)


@event.listens_for(engine, "connect")
def set_sqlite_pragma(dbapi_connection, connection_record):
    if "sqlite" in settings.database_url:
        cursor = dbapi_connection.cursor()
        cursor.execute("PRAGMA foreign_keys=ON")
        cursor.close()


SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)


def create_tables():
    """Create all tables; DEV_MODE drops them first"""
    try:
        if os.environ.get('DEV_MODE') == 'true':
            logger.info("🛠️ DEV_MODE enabled: Dropping and recreating all tables")
            Base.metadata.drop_all(bind=engine)
        Base.metadata.create_all(bind=engine)
        logger.info("✅ Database tables created successfully")
    except Exception as e:
        logger.error(f"❌ Error creating database tables: {e}")
        raise


def get_db_sync() -> Session:
    """Get database session synchronously"""
    return SessionLocal()


def record_run(fields: Dict[str, Any]) -> Optional[str]:
    """Store one run manifest; returns the row id, or None when the write failed"""
    db = get_db_sync()
    try:
        row = RunRecord(**fields)
        db.add(row)
        db.commit()
        logger.info(f"✅ Persisted run {row.id}")
        return row.id
    except Exception as e:
        db.rollback()
        logger.error(f"❌ Failed to persist run: {e}")
        return None
    finally:
        db.close()


def record_sweep_cell(fields: Dict[str, Any]) -> Optional[str]:
    db = get_db_sync()
    try:
        row = SweepCell(**fields)
        db.add(row)
        db.commit()
        return row.id
    except Exception as e:
        db.rollback()
        logger.error(f"❌ Failed to persist sweep cell {fields.get('cell')}: {e}")
        return None
    finally:
        db.close()


def check_database_health() -> bool:
    """Check the database is reachable and both tables carry the expected columns"""
    try:
        db = SessionLocal()
        db.execute(text("SELECT 1"))
        inspector = inspect(engine)
        tables = inspector.get_table_names()
        for model in (RunRecord, SweepCell):
            name = model.__tablename__
            if name not in tables:
                continue
            columns = {c['name'] for c in inspector.get_columns(name)}
            expected = {c.name for c in model.__table__.columns}
            if not expected.issubset(columns):
                logger.error(f"Schema validation failed for {name}: missing columns {expected - columns}")
                return False
        db.close()
        return True
    except Exception as e:
        logger.error(f"Database health check failed: {e}")
        return False
