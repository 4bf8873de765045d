from __future__ import annotations

from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, root_validator, validator

from csbm_attention_lab.models.attention import UNIT_NORM_TOLERANCE


class ClassifierSpec(BaseModel):
    class Config:
        allow_mutation = False

    w: Tuple[float, ...] = Field(..., description="Unit-norm weight vector, length d")
    threshold: float = 0.0
    orientation: int = Field(..., description="sign(p - q) used to build w")

    @validator("w")
    def w_has_unit_norm(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        norm = float(np.linalg.norm(value))
        if abs(norm - 1.0) > UNIT_NORM_TOLERANCE:
            raise ValueError(f"w must have unit norm, got {norm!r}")
        return value

    @validator("orientation")
    def orientation_is_sign(cls, value: int) -> int:
        if value not in (-1, 1):
            raise ValueError("orientation must be +1 or -1")
        return value

    @property
    def w_array(self) -> np.ndarray:
        return np.asarray(self.w, dtype=float)


class PredictionResult(BaseModel):
    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    scores: np.ndarray
    predicted: np.ndarray
    accuracy: float = Field(..., ge=0.0, le=1.0)
    perfect: bool
    per_class_accuracy: Tuple[Optional[float], Optional[float]]

    @root_validator(skip_on_failure=True)
    def perfect_means_all_correct(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        if values["perfect"] != (values["accuracy"] == 1.0):
            raise ValueError("perfect must hold exactly when accuracy is 1")
        return values
