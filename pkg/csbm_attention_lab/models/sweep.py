from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, root_validator, validator

from csbm_attention_lab.config import Configuration
from csbm_attention_lab.models.attention import PhiSpec
from csbm_attention_lab.models.csbm import CsbmParams
from csbm_attention_lab.models.report import ConcentrationReport

MAX_NOISY_NU_RATIO = 100.0

METRICS: Tuple[str, ...] = (
    "accuracy",
    "perfect",
    "intra_gamma_mean",
    "inter_gamma_mean",
    "intra_mass",
    "inter_mass",
    "sum_sq_gamma_median",
)


class ExperimentKind(str, Enum):
    CLEAN_VARY_Q_POSITIVE = "clean_vary_q_positive"
    CLEAN_VARY_Q_NEGATIVE = "clean_vary_q_negative"
    CLEAN_VARY_MU = "clean_vary_mu"
    NOISY_VARY_Q_POSITIVE = "noisy_vary_q_positive"
    NOISY_VARY_Q_NEGATIVE = "noisy_vary_q_negative"
    NOISY_VARY_MU = "noisy_vary_mu"
    VARY_NU_GAMMA = "vary_nu_gamma"

    @property
    def is_clean(self) -> bool:
        return self.value.startswith("clean_")

    @property
    def is_noisy(self) -> bool:
        return self.value.startswith("noisy_")

    @property
    def varies_q(self) -> bool:
        return "_vary_q_" in self.value

    @property
    def varies_mu(self) -> bool:
        return self.value.endswith("_vary_mu")

    @property
    def varies_nu(self) -> bool:
        return self == ExperimentKind.VARY_NU_GAMMA


class Method(str, Enum):
    GAT = "gat"
    GCN = "gcn"


class GridScale(str, Enum):
    LINEAR = "linear"
    LOG = "log"


class GridSpec(BaseModel):
    class Config:
        allow_mutation = False

    start: float
    stop: float
    points: int = Field(..., ge=1)
    scale: GridScale = GridScale.LINEAR

    @root_validator(skip_on_failure=True)
    def log_grid_is_positive(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        if values["scale"] == GridScale.LOG and min(
            values["start"], values["stop"]
        ) <= 0.0:
            raise ValueError("log-scaled grids need positive endpoints")
        return values


class SweepConfig(BaseModel):
    """
    One experiment: the base model, the swept grid and how many trials to run
    at every grid point. `base` carries placeholder mu/nu whose dimensions
    are kept; the actual vectors are derived per grid point.
    """

    class Config:
        allow_mutation = False

    experiment: ExperimentKind
    base: CsbmParams
    grid: Optional[GridSpec] = Field(
        None, description="Explicit grid; None selects the experiment's default"
    )
    trials: int = Field(Configuration.DEFAULT_TRIALS, ge=1)
    seed: int = Field(Configuration.DEFAULT_MASTER_SEED, ge=0)
    methods: Tuple[Method, ...] = (Method.GAT, Method.GCN)
    output: Optional[Path] = None
    alpha: Union[float, Literal["auto"]] = 1.0
    phi: PhiSpec = PhiSpec()
    noisy_nu_ratio: float = Field(Configuration.NOISY_NU_RATIO, gt=0.0)
    clean_nu_factor: float = Field(Configuration.CLEAN_NU_FACTOR, ge=1.0)
    workers: int = Field(1, ge=1)
    envelope_c: float = Field(Configuration.DEGREE_ENVELOPE_C, gt=0.0)
    uniformity_factor: float = Field(Configuration.UNIFORMITY_FACTOR, gt=1.0)
    pair_sample_size: int = Field(Configuration.UNCOMMON_PAIR_SAMPLE_SIZE, ge=1)

    @validator("methods")
    def methods_not_empty(cls, value: Tuple[Method, ...]) -> Tuple[Method, ...]:
        if not value:
            raise ValueError("at least one method is required")
        return tuple(dict.fromkeys(value))

    @validator("alpha")
    def alpha_positive(cls, value: Union[float, str]) -> Union[float, str]:
        if value != "auto" and float(value) <= 0.0:
            raise ValueError("alpha must be positive or 'auto'")
        return value

    @root_validator(skip_on_failure=True)
    def check_regime(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        base: CsbmParams = values["base"]
        if base.zeta <= 0.0:
            raise ValueError("edge feature noise zeta must be positive")
        if (
            values["experiment"].is_noisy
            and values["noisy_nu_ratio"] > MAX_NOISY_NU_RATIO
        ):
            raise ValueError(
                f"noisy regime needs ||nu|| <= {MAX_NOISY_NU_RATIO} * zeta"
            )
        return values


class TrialRecord(BaseModel):
    experiment: ExperimentKind
    point: int
    grid_value: float
    trial: int
    method: Method
    accuracy: float
    perfect: bool
    intra_gamma_mean: float
    inter_gamma_mean: float
    intra_mass: float
    inter_mass: float
    sum_sq_gamma_median: float
    seed: int

    def metric(self, name: str) -> float:
        return float(getattr(self, name))


class AggregateRecord(BaseModel):
    experiment: ExperimentKind
    point: int
    grid_value: float
    method: Method
    trials: int
    means: Dict[str, float]
    stds: Dict[str, float]


class SweepResult(BaseModel):
    experiment: ExperimentKind
    trials: List[TrialRecord] = Field(default_factory=list)
    aggregates: List[AggregateRecord] = Field(default_factory=list)

    def aggregate(self, point: int, method: Method) -> AggregateRecord:
        for record in self.aggregates:
            if record.point == point and record.method == method:
                return record
        raise KeyError(f"no aggregate for point {point} and method {method.value}")


class DiagnosticRecord(BaseModel):
    experiment: ExperimentKind
    point: int
    grid_value: float
    trial: int
    seed: int
    report: ConcentrationReport
