import math
from typing import Optional, Union

import numpy as np
from she_logging import logger

from csbm_attention_lab.config import Configuration
from csbm_attention_lab.error_handler import (
    ConfigurationError,
    DegenerateDirectionError,
    DimensionMismatchError,
    ZeroMeanError,
)
from csbm_attention_lab.models.attention import (
    AttentionKind,
    AttentionSpec,
    EdgeGroupStats,
    GammaMatrix,
    GammaSummary,
    PhiSpec,
)
from csbm_attention_lab.models.csbm import CsbmParams, GraphSample


def direction_sign(params: CsbmParams) -> int:
    """sign(p - q); undefined when the two classes connect alike."""
    if params.p == params.q:
        raise DegenerateDirectionError(
            f"p and q are both {params.p}, sign(p - q) is undefined"
        )
    return 1 if params.p > params.q else -1


def _edge_direction(params: CsbmParams) -> np.ndarray:
    sign = direction_sign(params)
    if params.nu_norm == 0.0:
        raise ZeroMeanError("edge feature mean nu is zero, no direction to attend")
    return sign * params.nu_array / params.nu_norm


def auto_alpha(params: CsbmParams) -> float:
    """((||nu|| / zeta) * sqrt(log|E|))^(-1/2), with |E| ~ 0.5 n^2 (p + q)."""
    if params.zeta <= 0.0:
        raise ConfigurationError("alpha='auto' needs a positive zeta")
    log_edges = params.log_edge_scale
    if log_edges <= 0.0:
        raise ConfigurationError(
            "alpha='auto' needs 0.5 n^2 (p + q) > 1 to take sqrt(log|E|)"
        )
    alpha = float((params.nu_norm / params.zeta * math.sqrt(log_edges)) ** -0.5)
    logger.debug("Derived attention scale alpha=%.6g", alpha)
    return alpha


def build_clean_spec(
    params: CsbmParams, alpha: Union[float, str] = 1.0
) -> AttentionSpec:
    s = _edge_direction(params)
    scale = auto_alpha(params) if alpha == "auto" else float(alpha)
    return AttentionSpec(
        kind=AttentionKind.CONSTRUCTED_CLEAN, s=tuple(s.tolist()), alpha=scale
    )


def build_lipschitz_spec(
    params: CsbmParams, phi: Optional[PhiSpec] = None
) -> AttentionSpec:
    s = _edge_direction(params)
    return AttentionSpec(
        kind=AttentionKind.LIPSCHITZ_LINEAR,
        s=tuple(s.tolist()),
        phi=phi or PhiSpec(),
    )


def uniform_spec() -> AttentionSpec:
    return AttentionSpec(kind=AttentionKind.UNIFORM)


def psi_values(spec: AttentionSpec, edge_features: np.ndarray) -> np.ndarray:
    """Psi applied to every row of an (m, h) edge feature matrix."""
    features = np.asarray(edge_features, dtype=float)
    if features.ndim != 2:
        raise DimensionMismatchError("edge features must be an (m, h) matrix")
    if spec.kind == AttentionKind.UNIFORM:
        return np.zeros(features.shape[0])
    if features.shape[1] != spec.h:
        raise DimensionMismatchError(
            f"edge features have dimension {features.shape[1]}, s has {spec.h}"
        )
    projected = features @ spec.s_array
    if spec.kind == AttentionKind.CONSTRUCTED_CLEAN:
        return spec.alpha * projected
    assert spec.phi is not None
    return spec.phi.apply(projected)


def psi(spec: AttentionSpec, edge_feature: np.ndarray) -> float:
    feature = np.asarray(edge_feature, dtype=float)
    if feature.ndim != 1:
        raise DimensionMismatchError("a single edge feature must be a vector")
    return float(psi_values(spec, feature[np.newaxis, :])[0])


def attention_coefficients(sample: GraphSample, spec: AttentionSpec) -> GammaMatrix:
    """
    Softmax of Psi over each neighbourhood, stabilised by subtracting the row
    maximum. Psi is evaluated once per undirected edge and gathered onto
    both directed slots.
    """
    adjacency = sample.adjacency
    logits = psi_values(spec, sample.edge_features)[adjacency.edge_ids]
    degrees = adjacency.degrees
    values = np.empty(len(logits), dtype=float)
    if len(logits):
        nonempty = degrees > 0
        row_max = np.zeros(adjacency.n)
        row_max[nonempty] = np.maximum.reduceat(
            logits, adjacency.indptr[:-1][nonempty]
        )
        rows = adjacency.sources
        weights = np.exp(logits - row_max[rows])
        totals = np.bincount(rows, weights=weights, minlength=adjacency.n)
        values = weights / totals[rows]
    return GammaMatrix(
        indptr=adjacency.indptr, indices=adjacency.indices, values=values
    )


def check_alignment(sample: GraphSample, gamma: GammaMatrix) -> None:
    if not sample.adjacency.same_structure(gamma.indptr, gamma.indices):
        raise DimensionMismatchError(
            "attention coefficients do not match the sample's adjacency"
        )


def _group_stats(values: np.ndarray) -> EdgeGroupStats:
    if not len(values):
        nan = float("nan")
        return EdgeGroupStats(count=0, mean=nan, std=nan, min=nan, max=nan)
    return EdgeGroupStats(
        count=len(values),
        mean=float(values.mean()),
        std=float(values.std()),
        min=float(values.min()),
        max=float(values.max()),
    )


def gamma_stats(
    sample: GraphSample,
    gamma: GammaMatrix,
    factor: float = Configuration.UNIFORMITY_FACTOR,
) -> GammaSummary:
    check_alignment(sample, gamma)
    intra = sample.slot_is_intra
    degrees = gamma.degrees
    rows = sample.adjacency.sources

    slot_degree = degrees[rows].astype(float)
    in_band = (gamma.values >= 1.0 / (factor * slot_degree)) & (
        gamma.values <= factor / slot_degree
    )
    hits = np.bincount(rows, weights=in_band.astype(float), minlength=gamma.n)
    fractions = np.full(gamma.n, np.nan)
    nonempty = degrees > 0
    fractions[nonempty] = hits[nonempty] / degrees[nonempty]

    if nonempty.any():
        share = float(
            np.mean(fractions[nonempty] >= Configuration.UNIFORM_NODE_FRACTION)
        )
    else:
        share = float("nan")
    return GammaSummary(
        intra=_group_stats(gamma.values[intra]),
        inter=_group_stats(gamma.values[~intra]),
        uniformity_factor=factor,
        node_uniform_fraction=tuple(fractions.tolist()),
        uniform_node_share=share,
    )


def sum_sq_gamma(gamma: GammaMatrix) -> np.ndarray:
    """Per node sum of squared coefficients; 0 for isolated nodes."""
    rows = np.repeat(np.arange(gamma.n), gamma.degrees)
    return np.bincount(rows, weights=gamma.values**2, minlength=gamma.n)

