"""
Database models and file schemas.
"""
from app.models.checkpoint_entry import CheckpointEntry

__all__ = ["CheckpointEntry"]
