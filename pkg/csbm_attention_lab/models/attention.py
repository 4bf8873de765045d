from __future__ import annotations

from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, root_validator, validator

UNIT_NORM_TOLERANCE = 1e-12
ROW_SUM_TOLERANCE = 1e-9


class AttentionKind(str, Enum):
    CONSTRUCTED_CLEAN = "constructed_clean"
    LIPSCHITZ_LINEAR = "lipschitz_linear"
    UNIFORM = "uniform"


class PhiKind(str, Enum):
    IDENTITY = "identity"
    LEAKY_RELU = "leaky_relu"
    TANH_SCALED = "tanh_scaled"


class PhiSpec(BaseModel):
    """
    Scalar Lipschitz map applied after the linear projection s^T E.

    tanh_scaled is phi(x) = offset + lipschitz * tanh(x), so the declared
    constants are exact: L = lipschitz and |phi(0)| = |offset| = R.
    """

    class Config:
        allow_mutation = False

    kind: PhiKind = PhiKind.IDENTITY
    slope: float = Field(0.2, description="Negative-side slope of leaky_relu")
    lipschitz: float = Field(1.0, gt=0.0, description="L for tanh_scaled")
    offset: float = Field(0.0, description="phi(0) for tanh_scaled")

    @property
    def lipschitz_constant(self) -> float:
        if self.kind == PhiKind.LEAKY_RELU:
            return max(1.0, abs(self.slope))
        if self.kind == PhiKind.TANH_SCALED:
            return self.lipschitz
        return 1.0

    @property
    def origin_bound(self) -> float:
        if self.kind == PhiKind.TANH_SCALED:
            return abs(self.offset)
        return 0.0

    def apply(self, x: np.ndarray) -> np.ndarray:
        if self.kind == PhiKind.LEAKY_RELU:
            return np.where(x >= 0.0, x, self.slope * x)
        if self.kind == PhiKind.TANH_SCALED:
            return self.offset + self.lipschitz * np.tanh(x)
        return np.asarray(x, dtype=float)

    @classmethod
    def parse(cls, text: str) -> "PhiSpec":
        """Parse `identity`, `leaky_relu:0.2` or `tanh_scaled:L,R`."""
        name, _, args = text.strip().partition(":")
        kind = PhiKind(name.strip())
        numbers = [float(a) for a in args.split(",") if a.strip()]
        if kind == PhiKind.LEAKY_RELU and numbers:
            return cls(kind=kind, slope=numbers[0])
        if kind == PhiKind.TANH_SCALED and numbers:
            lipschitz, offset = (numbers + [0.0])[:2]
            return cls(kind=kind, lipschitz=lipschitz, offset=offset)
        return cls(kind=kind)


class AttentionSpec(BaseModel):
    class Config:
        allow_mutation = False

    kind: AttentionKind
    s: Optional[Tuple[float, ...]] = Field(
        None, description="Unit direction applied to edge features"
    )
    alpha: float = Field(1.0, gt=0.0, description="Scale of the clean construction")
    phi: Optional[PhiSpec] = None

    @validator("s")
    def s_has_unit_norm(
        cls, value: Optional[Tuple[float, ...]]
    ) -> Optional[Tuple[float, ...]]:
        if value is not None:
            norm = float(np.linalg.norm(value))
            if abs(norm - 1.0) > UNIT_NORM_TOLERANCE:
                raise ValueError(f"s must have unit norm, got {norm!r}")
        return value

    @root_validator(skip_on_failure=True)
    def check_kind_requirements(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        kind = values["kind"]
        if kind != AttentionKind.UNIFORM and values.get("s") is None:
            raise ValueError(f"{kind.value} attention needs a direction s")
        if kind == AttentionKind.LIPSCHITZ_LINEAR and values.get("phi") is None:
            values["phi"] = PhiSpec()
        return values

    @property
    def s_array(self) -> np.ndarray:
        return np.asarray(self.s, dtype=float)

    @property
    def h(self) -> Optional[int]:
        return None if self.s is None else len(self.s)


class GammaMatrix(BaseModel):
    """
    Attention coefficients stored per directed slot, in the CSR order of the
    sample's adjacency: values[indptr[i]:indptr[i+1]] is node i's row.
    """

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    indptr: np.ndarray
    indices: np.ndarray
    values: np.ndarray

    @root_validator(skip_on_failure=True)
    def check_row_stochastic(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        indptr, indices, gammas = values["indptr"], values["indices"], values["values"]
        if len(indices) != len(gammas) or indptr[-1] != len(gammas):
            raise ValueError("gamma values do not mirror the neighbourhood index")
        # Coefficients can underflow to 0.0 once logit gaps exceed ~745.
        if (gammas < 0.0).any() or not np.isfinite(gammas).all():
            raise ValueError("attention coefficients must be finite and non-negative")
        sums = _row_sums(indptr, gammas)
        nonempty = np.diff(indptr) > 0
        if (np.abs(sums[nonempty] - 1.0) > ROW_SUM_TOLERANCE).any():
            raise ValueError("attention rows must sum to one")
        values["values"].setflags(write=False)
        return values

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def row(self, i: int) -> Tuple[np.ndarray, np.ndarray]:
        start, stop = self.indptr[i], self.indptr[i + 1]
        return self.indices[start:stop], self.values[start:stop]

    def row_sums(self) -> np.ndarray:
        return _row_sums(self.indptr, self.values)


def _row_sums(indptr: np.ndarray, values: np.ndarray) -> np.ndarray:
    rows = np.repeat(np.arange(len(indptr) - 1), np.diff(indptr))
    return np.bincount(rows, weights=values, minlength=len(indptr) - 1)


class EdgeGroupStats(BaseModel):
    count: int
    mean: float
    std: float
    min: float
    max: float


class GammaSummary(BaseModel):
    intra: EdgeGroupStats
    inter: EdgeGroupStats
    uniformity_factor: float
    node_uniform_fraction: Tuple[float, ...] = Field(
        ..., description="Per node: share of coefficients within the factor band"
    )
    uniform_node_share: float = Field(
        ..., description="Share of non-isolated nodes whose band share is >= 0.9"
    )
