"""
Pydantic schemas for the JSON files read and written by the command line.

Rationals travel as decimal strings ("p/q" or "p"); tensor entries are keyed by
bit-strings with factor 1 first, omitted keys meaning zero.
"""
import re
from typing import Any, Dict, List, Literal, Optional, Type, TypeVar, Union

import orjson
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from app.core.exceptions import InputValidationError, SchemaError
from app.core.invariants import InvariantSpec
from app.core.rationals import parse_rational
from app.core.tableaux import TableauQuintuple
from app.core.tensor import DenseTensor

M = TypeVar("M", bound=BaseModel)

RationalText = Union[str, int]
_BITS = re.compile(r"^[01]+$")


class Provenance(BaseModel):
    """Everything needed to re-derive an artifact; extra keys are kept verbatim."""
    model_config = ConfigDict(extra="allow")

    command: str = Field(..., description="Subcommand that produced the artifact")
    seed: int = Field(..., description="Master seed of the run")
    version: Optional[str] = Field(None, description="Toolkit version")
    primes: List[str] = Field(default_factory=list, description="Primes used, as decimal strings")


class RunConfig(BaseModel):
    """Per-run values; every one but the thread count is echoed into provenance."""

    seed: int = Field(0, ge=0, lt=2**64)
    degree: Optional[int] = Field(None, ge=1)
    symmetry: Optional[Literal["full", "sym", "sgn"]] = None
    rank: Optional[int] = Field(None, ge=1)
    points: Optional[int] = Field(None, ge=1)
    height: Optional[int] = Field(None, ge=1)
    modulus: str = Field("auto", description="auto, exact, or comma-separated primes")
    checkpoint: Optional[str] = None
    threads: Optional[int] = Field(None, ge=1)

    @field_validator("modulus")
    @classmethod
    def check_modulus(cls, v: str) -> str:
        value = v.strip().lower()
        if value in ("auto", "exact"):
            return value
        parts = [p.strip() for p in value.split(",") if p.strip()]
        if not parts or not all(p.isdigit() for p in parts):
            raise ValueError(f"modulus must be auto, exact or a list of primes, got {v!r}")
        return ",".join(parts)

    def modulus_policy(self) -> Union[str, List[int]]:
        if self.modulus in ("auto", "exact"):
            return self.modulus
        return [int(p) for p in self.modulus.split(",")]

    def provenance(self, command: str, **extra: Any) -> Dict[str, Any]:
        data = self.model_dump(exclude={"threads"}, exclude_none=True)
        data.update(extra)
        data["command"] = command
        return Provenance(**data).model_dump(exclude_none=True)


class TensorFile(BaseModel):
    n: int = Field(..., ge=1, le=12, description="Number of binary factors")
    entries: Dict[str, RationalText] = Field(default_factory=dict)
    provenance: Optional[Dict[str, Any]] = None

    @model_validator(mode="after")
    def check_keys(self) -> "TensorFile":
        for key, value in self.entries.items():
            if len(key) != self.n or not _BITS.match(key):
                raise ValueError(f"entry key {key!r} is not a {self.n}-bit string")
            try:
                parse_rational(value)
            except InputValidationError as e:
                raise ValueError(str(e))
        return self

    def to_tensor(self) -> DenseTensor:
        return DenseTensor.from_mapping(self.n, self.entries)

    @classmethod
    def from_tensor(cls, A: DenseTensor, provenance: Optional[Dict[str, Any]] = None) -> "TensorFile":
        return cls(n=A.n, entries=A.to_mapping(), provenance=provenance)


class QuintupleFile(BaseModel):
    m: int = Field(..., ge=1)
    tableaux: List[List[List[int]]] = Field(..., description="Per factor: [top row, bottom row], entries 1..2m")

    @model_validator(mode="after")
    def check_shape(self) -> "QuintupleFile":
        for k, rows in enumerate(self.tableaux):
            if len(rows) != 2 or any(len(row) != self.m for row in rows):
                raise ValueError(f"tableau {k} must have two rows of length {self.m}")
        return self

    def to_quintuple(self):
        """(quintuple, sign) with the sign of straightening non-canonical columns."""
        try:
            return TableauQuintuple.from_rows(self.tableaux)
        except InputValidationError as e:
            raise ValueError(str(e))


class InvariantTermModel(BaseModel):
    coeff: RationalText = "1"
    quintuple: QuintupleFile


class InvariantSpecFile(BaseModel):
    degree: Optional[int] = None
    symmetrization: Literal["none", "sum", "signed"] = "none"
    terms: List[InvariantTermModel] = Field(..., min_length=1)

    def to_spec(self) -> InvariantSpec:
        return InvariantSpec.from_dict(self.model_dump(exclude_none=True))


class EvaluationMatrixFile(BaseModel):
    row_ids: List[str]
    column_ids: List[str]
    entries: List[List[str]]
    modulus: Optional[str] = None
    provenance: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_complete(self) -> "EvaluationMatrixFile":
        if len(self.entries) != len(self.row_ids):
            raise ValueError("one row of entries per row id required")
        if any(len(row) != len(self.column_ids) for row in self.entries):
            raise ValueError("matrix has missing entries")
        return self


class BasisCacheFile(BaseModel):
    """A constructed basis with its evaluation matrix at the generic points."""

    degree: int = Field(..., ge=2)
    symmetry: Literal["full", "sym", "sgn"]
    basis: List[InvariantSpecFile]
    matrix: EvaluationMatrixFile

    @model_validator(mode="after")
    def check_rows(self) -> "BasisCacheFile":
        if len(self.basis) != len(self.matrix.row_ids):
            raise ValueError(f"{len(self.basis)} basis invariants but {len(self.matrix.row_ids)} matrix rows")
        return self


def _line_of(text: str, loc) -> Optional[int]:
    """Line of the first occurrence of the innermost named field of a location."""
    names = [part for part in loc if isinstance(part, str)]
    for name in reversed(names):
        index = text.find(f'"{name}"')
        if index >= 0:
            return text.count("\n", 0, index) + 1
    return None


def parse_document(raw: Union[str, bytes], model: Type[M]) -> M:
    """
    Decode JSON and validate it against ``model``.

    Raises:
        SchemaError: malformed JSON or schema violation, with field path and line
    """
    text = raw.decode("utf-8", errors="replace") if isinstance(raw, bytes) else raw
    try:
        data = orjson.loads(raw)
    except orjson.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON: {e.msg}", "", e.lineno)
    try:
        return model.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        loc = first.get("loc", ())
        path = ".".join(str(part) for part in loc)
        raise SchemaError(first.get("msg", "invalid value"), path, _line_of(text, loc))


def parse_invariant_document(raw: Union[str, bytes]) -> InvariantSpec:
    """An invariant file holds either a full spec (``terms``) or a bare quintuple."""
    try:
        data = orjson.loads(raw)
    except orjson.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON: {e.msg}", "", e.lineno)
    if isinstance(data, dict) and "terms" not in data and "tableaux" in data:
        quintuple_file = parse_document(raw, QuintupleFile)
        try:
            quintuple, sign = quintuple_file.to_quintuple()
        except ValueError as e:
            raise SchemaError(str(e), "tableaux")
        return InvariantSpec.single(quintuple, "none", sign)
    spec_file = parse_document(raw, InvariantSpecFile)
    try:
        return spec_file.to_spec()
    except InputValidationError as e:
        raise SchemaError(str(e), "terms")
