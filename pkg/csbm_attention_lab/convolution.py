from typing import Optional, Tuple

import numpy as np

from csbm_attention_lab.attention import (
    attention_coefficients,
    check_alignment,
    direction_sign,
    uniform_spec,
)
from csbm_attention_lab.error_handler import DimensionMismatchError, ZeroMeanError
from csbm_attention_lab.models.attention import GammaMatrix
from csbm_attention_lab.models.classifier import ClassifierSpec, PredictionResult
from csbm_attention_lab.models.csbm import CsbmParams, GraphSample


def build_classifier(params: CsbmParams) -> ClassifierSpec:
    orientation = direction_sign(params)
    if params.mu_norm == 0.0:
        raise ZeroMeanError("node feature mean mu is zero, no direction to classify")
    w = orientation * params.mu_array / params.mu_norm
    return ClassifierSpec(w=tuple(w.tolist()), orientation=orientation)


def attention_convolve(
    sample: GraphSample, gamma: GammaMatrix, classifier: ClassifierSpec
) -> np.ndarray:
    """
    score_i = sum_j gamma_ij * w^T x_j. Features are projected onto w before
    aggregation, which is the same sum by linearity.
    """
    check_alignment(sample, gamma)
    w = classifier.w_array
    if sample.node_features.shape[1] != len(w):
        raise DimensionMismatchError(
            f"node features have dimension {sample.node_features.shape[1]}, "
            f"w has {len(w)}"
        )
    projections = sample.node_features @ w
    aggregated = sample.adjacency.to_csr(gamma.values) @ projections
    return np.asarray(aggregated, dtype=float)


def _accuracy(correct: np.ndarray) -> Optional[float]:
    return float(correct.mean()) if len(correct) else None


def classify(
    scores: np.ndarray, labels: np.ndarray, threshold: float = 0.0
) -> PredictionResult:
    """Class 1 on a score strictly above the threshold; ties go to class 0."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    if scores.shape != labels.shape:
        raise DimensionMismatchError(
            f"{len(scores)} scores cannot be matched with {len(labels)} labels"
        )
    predicted = (scores > threshold).astype(np.int8)
    correct = predicted == labels
    accuracy = float(correct.mean()) if len(correct) else 1.0
    return PredictionResult(
        scores=scores,
        predicted=predicted,
        accuracy=accuracy,
        perfect=accuracy == 1.0,
        per_class_accuracy=(
            _accuracy(correct[labels == 0]),
            _accuracy(correct[labels == 1]),
        ),
    )


def graph_convolution_baseline(
    sample: GraphSample, classifier: ClassifierSpec
) -> PredictionResult:
    gamma = attention_coefficients(sample, uniform_spec())
    scores = attention_convolve(sample, gamma, classifier)
    return classify(scores, sample.labels, classifier.threshold)


def mass_allocation(sample: GraphSample, gamma: GammaMatrix) -> Tuple[float, float]:
    """
    Percentages of all attention mass placed on intra- and inter-class slots.
    A graph without edges has no mass to allocate and yields (nan, nan).
    """
    check_alignment(sample, gamma)
    total = float(gamma.values.sum())
    if total == 0.0:
        return float("nan"), float("nan")
    intra = 100.0 * float(gamma.values[sample.slot_is_intra].sum()) / total
    return intra, 100.0 - intra
