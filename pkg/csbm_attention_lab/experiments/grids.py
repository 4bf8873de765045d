"""
Per-point parameter derivation for the synthetic sweeps.

Norms follow the experiment recipes: mu sits at a multiple of the
perfect-classification threshold of its regime, nu at the clean or noisy
edge-feature separation. Both vectors point along the first coordinate axis.
"""
import math
from typing import Optional, Tuple

import numpy as np

from csbm_attention_lab.config import Configuration
from csbm_attention_lab.error_handler import (
    ConfigurationError,
    DegenerateDirectionError,
)
from csbm_attention_lab.models.csbm import CsbmParams, axis_vector
from csbm_attention_lab.models.sweep import (
    ExperimentKind,
    GridScale,
    GridSpec,
    SweepConfig,
)

VARY_Q_POINTS = 15
VARY_MU_POINTS = 12
VARY_NU_POINTS = 12

CLEAN_POSITIVE_MULTIPLE = 5.0
CLEAN_NEGATIVE_MULTIPLE = 1.0
NOISY_POSITIVE_MULTIPLE = 8.0
NOISY_NEGATIVE_MULTIPLE = 0.1

VARY_NU_START_MULTIPLE = 0.01
VARY_NU_STOP_MULTIPLE = 30.0


def _effective_q(kind: ExperimentKind, params: CsbmParams, grid_value: float) -> float:
    return grid_value if kind.varies_q else params.q


def clean_threshold(n: int, p: float, q: float, sigma: float) -> float:
    """sigma * sqrt(log n / (n max(p, q)))."""
    densest = max(p, q)
    if densest <= 0.0:
        raise ConfigurationError("mu threshold needs max(p, q) > 0")
    return sigma * math.sqrt(math.log(n) / (n * densest))


def noisy_threshold(n: int, p: float, q: float, sigma: float) -> float:
    """sigma * (p + q) / |p - q| * sqrt(log n / (n max(p, q)))."""
    if p == q:
        raise DegenerateDirectionError(
            f"noisy mu threshold divides by |p - q|, both are {p}"
        )
    return (p + q) / abs(p - q) * clean_threshold(n, p, q, sigma)


def edge_scale(n: int, p: float, q: float) -> float:
    """sqrt(log(0.5 n^2 (p + q))), the clean separation unit of nu / zeta."""
    edges = 0.5 * n**2 * (p + q)
    if edges <= 1.0:
        raise ConfigurationError(
            f"expected edge count 0.5 n^2 (p + q) = {edges:g} is too small"
        )
    return math.sqrt(math.log(edges))


def mu_norm(kind: ExperimentKind, params: CsbmParams, grid_value: float) -> float:
    """Norm of mu at one grid point; for vary_mu kinds the grid value itself."""
    n, p, sigma = params.n, params.p, params.sigma
    q = _effective_q(kind, params, grid_value)
    if kind.is_noisy and p == q:
        raise DegenerateDirectionError(
            f"noisy regime needs p != q to orient mu, both are {p}"
        )
    if kind.varies_mu:
        return float(grid_value)
    if kind in (ExperimentKind.CLEAN_VARY_Q_POSITIVE, ExperimentKind.VARY_NU_GAMMA):
        return CLEAN_POSITIVE_MULTIPLE * clean_threshold(n, p, q, sigma)
    if kind == ExperimentKind.CLEAN_VARY_Q_NEGATIVE:
        return CLEAN_NEGATIVE_MULTIPLE * clean_threshold(n, p, q, sigma)
    if kind == ExperimentKind.NOISY_VARY_Q_POSITIVE:
        return NOISY_POSITIVE_MULTIPLE * noisy_threshold(n, p, q, sigma)
    return NOISY_NEGATIVE_MULTIPLE * noisy_threshold(n, p, q, sigma)


def nu_norm(
    kind: ExperimentKind,
    params: CsbmParams,
    grid_value: float,
    noisy_nu_ratio: float = Configuration.NOISY_NU_RATIO,
    clean_nu_factor: float = Configuration.CLEAN_NU_FACTOR,
) -> float:
    """Norm of nu at one grid point."""
    if params.zeta <= 0.0:
        raise ConfigurationError("edge feature noise zeta must be positive")
    if kind.is_noisy:
        return noisy_nu_ratio * params.zeta
    scale = params.zeta * edge_scale(
        params.n, params.p, _effective_q(kind, params, grid_value)
    )
    if kind.varies_nu:
        return float(grid_value) * scale
    return clean_nu_factor * scale


def derive_mu(
    kind: ExperimentKind, params: CsbmParams, grid_value: float
) -> Tuple[float, ...]:
    return axis_vector(mu_norm(kind, params, grid_value), params.d or 1)


def derive_nu(
    kind: ExperimentKind,
    params: CsbmParams,
    grid_value: float,
    noisy_nu_ratio: float = Configuration.NOISY_NU_RATIO,
    clean_nu_factor: float = Configuration.CLEAN_NU_FACTOR,
) -> Tuple[float, ...]:
    norm = nu_norm(kind, params, grid_value, noisy_nu_ratio, clean_nu_factor)
    return axis_vector(norm, params.h or 1)


def default_grid(kind: ExperimentKind, params: CsbmParams) -> GridSpec:
    n, p, q, sigma = params.n, params.p, params.q, params.sigma
    if kind.varies_q:
        return GridSpec(
            start=math.log(n) ** 2 / n,
            stop=min(2.0 * p, 0.999),
            points=VARY_Q_POINTS,
            scale=GridScale.LINEAR,
        )
    if kind.varies_mu:
        if kind.is_clean:
            start = 0.1 * clean_threshold(n, p, q, sigma)
        else:
            start = 0.01 * noisy_threshold(n, p, q, sigma)
        return GridSpec(
            start=start,
            stop=20.0 * sigma * math.sqrt(math.log(n)),
            points=VARY_MU_POINTS,
            scale=GridScale.LOG,
        )
    return GridSpec(
        start=VARY_NU_START_MULTIPLE,
        stop=VARY_NU_STOP_MULTIPLE,
        points=VARY_NU_POINTS,
        scale=GridScale.LOG,
    )


def grid_values(grid: GridSpec) -> np.ndarray:
    if grid.points == 1:
        return np.array([grid.start])
    if grid.scale == GridScale.LOG:
        return np.geomspace(grid.start, grid.stop, grid.points)
    return np.linspace(grid.start, grid.stop, grid.points)


def resolve_grid(config: SweepConfig) -> np.ndarray:
    grid: Optional[GridSpec] = config.grid
    if grid is None:
        grid = default_grid(config.experiment, config.base)
    return grid_values(grid)


def point_params(config: SweepConfig, grid_value: float) -> CsbmParams:
    """Full model parameters for one grid point, validated."""
    kind, base = config.experiment, config.base
    q = _effective_q(kind, base, grid_value)
    with_q = CsbmParams(**{**base.dict(), "q": q})
    mu = derive_mu(kind, with_q, grid_value)
    nu = derive_nu(
        kind, with_q, grid_value, config.noisy_nu_ratio, config.clean_nu_factor
    )
    return CsbmParams(**{**with_q.dict(), "mu": mu, "nu": nu})
