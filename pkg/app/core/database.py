"""
Database connection and session management.
Each checkpoint directory holds its own SQLite file, ``<dir>/checkpoint.db``.
"""
from functools import lru_cache
from pathlib import Path

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import declarative_base, sessionmaker

from app.core.config import settings

CHECKPOINT_FILENAME = "checkpoint.db"

Base = declarative_base()


@lru_cache(maxsize=None)
def get_engine(directory: str) -> Engine:
    """Engine for a checkpoint directory; the directory and tables are created on first use."""
    path = Path(directory).expanduser().resolve()
    path.mkdir(parents=True, exist_ok=True)
    engine = create_engine(
        f"sqlite:///{path / CHECKPOINT_FILENAME}",
        echo=settings.DEBUG,
        connect_args={"check_same_thread": False},
    )
    from app.models.checkpoint_entry import CheckpointEntry  # noqa: F401  registers the table

    Base.metadata.create_all(bind=engine, checkfirst=True)
    return engine


@lru_cache(maxsize=None)
def get_session_factory(directory: str) -> sessionmaker:
    return sessionmaker(autocommit=False, autoflush=False, bind=get_engine(directory))

