from typing import Dict, Optional

from pydantic import BaseModel, Field


class ConcentrationReport(BaseModel):
    """
    Outcome of one empirical concentration check on one sample.

    `passed` is decided by the check's own quantile rule over
    `violation_count`; `degenerate` marks a theoretical centre (or lower
    bound) that is zero or negative, which is reported and never silently
    treated as a pass of the underlying statement.
    """

    statistic: str
    observations: int = Field(..., ge=0)
    center: Optional[float] = Field(None, description="Theoretical centre")
    envelope: float = Field(..., description="Envelope constant used")
    max_deviation: Optional[float] = None
    quantiles: Dict[str, float] = Field(default_factory=dict)
    violation_count: int = Field(..., ge=0)
    passed: bool
    degenerate: bool = False
    observed_constants: Dict[str, float] = Field(default_factory=dict)

    @property
    def violation_fraction(self) -> float:
        if not self.observations:
            return 0.0
        return self.violation_count / self.observations
