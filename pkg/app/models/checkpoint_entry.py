"""
Database model for checkpointed evaluation-matrix entries.
"""
from sqlalchemy import Column, DateTime, Index, Integer, String, Text, UniqueConstraint
from sqlalchemy.sql import func

from app.core.database import Base


class CheckpointEntry(Base):
    """One evaluated (invariant, point) entry of a named matrix."""
    __tablename__ = "checkpoint_entries"

    id = Column(Integer, primary_key=True, index=True)
    matrix_key = Column(String, index=True, nullable=False)
    row_id = Column(String, nullable=False)  # InvariantSpec identifier
    column_id = Column(String, nullable=False)  # point identifier
    value = Column(Text, nullable=False)  # "p/q" when exact, residue when modular
    modulus = Column(String, nullable=True)  # decimal prime, NULL when exact
    created_at = Column(DateTime(timezone=True), server_default=func.now())

    __table_args__ = (
        UniqueConstraint("matrix_key", "row_id", "column_id", name="uq_checkpoint_entry"),
        Index("ix_checkpoint_matrix_row", "matrix_key", "row_id"),
    )

    def __repr__(self):
        return f"<CheckpointEntry(matrix_key='{self.matrix_key}', row_id='{self.row_id}', column_id='{self.column_id}')>"
