"""
Database operations for checkpointed matrix entries.

Writes go through one process-wide lock (SQLite allows a single writer); reads
take no lock. Failures are logged and reported through the return value so an
evaluation run never dies because its checkpoint could not be written.
"""
import logging
from fractions import Fraction
from threading import Lock
from typing import Dict, Optional, Tuple, Union

from sqlalchemy.exc import IntegrityError, SQLAlchemyError
from sqlalchemy.orm import Session

from app.core.database import get_session_factory
from app.core.rationals import format_rational, parse_rational
from app.models.checkpoint_entry import CheckpointEntry

logger = logging.getLogger(__name__)

_write_lock = Lock()

EntryValue = Union[int, Fraction]


def _encode(value: EntryValue) -> str:
    return format_rational(value)


def _decode(text: str, modulus: Optional[int]) -> EntryValue:
    value = parse_rational(text)
    return int(value) if modulus else value


def save_entry_to_db(directory: str, matrix_key: str, row_id: str, column_id: str,
                     value: EntryValue, modulus: Optional[int] = None) -> bool:
    """
    Save one matrix entry.

    Args:
        directory: Checkpoint directory
        matrix_key: Name of the matrix (encodes degree, symmetry, seed and prime)
        row_id: InvariantSpec identifier
        column_id: Point identifier
        value: Exact value or residue
        modulus: Prime for residues, None for exact values

    Returns:
        True if saved successfully, False otherwise
    """
    db: Optional[Session] = None
    with _write_lock:
        try:
            db = get_session_factory(directory)()
            existing = db.query(CheckpointEntry).filter(
                CheckpointEntry.matrix_key == matrix_key,
                CheckpointEntry.row_id == row_id,
                CheckpointEntry.column_id == column_id,
            ).first()
            if existing:
                existing.value = _encode(value)
                existing.modulus = str(modulus) if modulus else None
                logger.debug(f"[CheckpointDB] Updated entry {matrix_key}[{row_id}, {column_id}]")
            else:
                db.add(CheckpointEntry(
                    matrix_key=matrix_key,
                    row_id=row_id,
                    column_id=column_id,
                    value=_encode(value),
                    modulus=str(modulus) if modulus else None,
                ))
            db.commit()
            return True
        except IntegrityError as e:
            logger.warning(f"[CheckpointDB] Duplicate entry {matrix_key}[{row_id}, {column_id}]: {e}")
            if db:
                db.rollback()
            return False
        except SQLAlchemyError as e:
            logger.error(f"[CheckpointDB] Error saving entry: {e}", exc_info=True)
            if db:
                db.rollback()
            return False
        finally:
            if db:
                db.close()


def get_entries_from_db(directory: str, matrix_key: str,
                        modulus: Optional[int] = None) -> Dict[Tuple[str, str], EntryValue]:
    """
    All stored entries of a matrix, keyed by (row id, column id).

    Entries recorded under a different modulus are ignored.
    """
    db: Optional[Session] = None
    try:
        db = get_session_factory(directory)()
        rows = db.query(CheckpointEntry).filter(CheckpointEntry.matrix_key == matrix_key).all()
        wanted = str(modulus) if modulus else None
        return {
            (r.row_id, r.column_id): _decode(r.value, modulus)
            for r in rows
            if r.modulus == wanted
        }
    except SQLAlchemyError as e:
        logger.error(f"[CheckpointDB] Error reading matrix {matrix_key}: {e}", exc_info=True)
        return {}
    finally:
        if db:
            db.close()


def count_entries(directory: str, matrix_key: str) -> int:
    db: Optional[Session] = None
    try:
        db = get_session_factory(directory)()
        return db.query(CheckpointEntry).filter(CheckpointEntry.matrix_key == matrix_key).count()
    except SQLAlchemyError as e:
        logger.error(f"[CheckpointDB] Error counting matrix {matrix_key}: {e}", exc_info=True)
        return 0
    finally:
        if db:
            db.close()


def clear_matrix(directory: str, matrix_key: str) -> bool:
    db: Optional[Session] = None
    with _write_lock:
        try:
            db = get_session_factory(directory)()
            deleted = db.query(CheckpointEntry).filter(CheckpointEntry.matrix_key == matrix_key).delete()
            db.commit()
            logger.info(f"[CheckpointDB] Cleared {deleted} entries of {matrix_key}")
            return True
        except SQLAlchemyError as e:
            logger.error(f"[CheckpointDB] Error clearing matrix {matrix_key}: {e}", exc_info=True)
            if db:
                db.rollback()
            return False
        finally:
            if db:
                db.close()


class CheckpointStore:
    """Entry cache for one matrix in one checkpoint directory."""

    def __init__(self, directory: str, matrix_key: str, modulus: Optional[int] = None):
        self.directory = directory
        self.matrix_key = matrix_key
        self.modulus = modulus
        self._entries = get_entries_from_db(directory, matrix_key, modulus)
        if self._entries:
            logger.info(f"[CheckpointDB] Resuming {matrix_key}: {len(self._entries)} entries on disk")

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, row_id: str, column_id: str) -> Optional[EntryValue]:
        return self._entries.get((row_id, column_id))

    def put(self, row_id: str, column_id: str, value: EntryValue) -> bool:
        self._entries[(row_id, column_id)] = value
        return save_entry_to_db(self.directory, self.matrix_key, row_id, column_id, value, self.modulus)
