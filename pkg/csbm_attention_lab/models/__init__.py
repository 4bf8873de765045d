from csbm_attention_lab.models.attention import (
    AttentionKind,
    AttentionSpec,
    EdgeGroupStats,
    GammaMatrix,
    GammaSummary,
    PhiKind,
    PhiSpec,
)
from csbm_attention_lab.models.classifier import ClassifierSpec, PredictionResult
from csbm_attention_lab.models.csbm import (
    Adjacency,
    BalanceMode,
    CsbmParams,
    GraphSample,
)
from csbm_attention_lab.models.report import ConcentrationReport
from csbm_attention_lab.models.sweep import (
    AggregateRecord,
    DiagnosticRecord,
    ExperimentKind,
    GridScale,
    GridSpec,
    Method,
    SweepConfig,
    SweepResult,
    TrialRecord,
)

__all__ = [
    "Adjacency",
    "AggregateRecord",
    "AttentionKind",
    "AttentionSpec",
    "BalanceMode",
    "ClassifierSpec",
    "ConcentrationReport",
    "CsbmParams",
    "DiagnosticRecord",
    "EdgeGroupStats",
    "ExperimentKind",
    "GammaMatrix",
    "GammaSummary",
    "GraphSample",
    "GridScale",
    "GridSpec",
    "Method",
    "PhiKind",
    "PhiSpec",
    "PredictionResult",
    "SweepConfig",
    "SweepResult",
    "TrialRecord",
]
