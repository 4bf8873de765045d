"""
Empirical checks of the concentration statements behind the classification
thresholds. Each check reduces one sample to a ConcentrationReport; the
envelope constants default to the calibrated values in Configuration.
"""
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from she_logging import logger

from csbm_attention_lab.attention import (
    check_alignment,
    gamma_stats,
    psi_values,
    sum_sq_gamma,
)
from csbm_attention_lab.config import Configuration
from csbm_attention_lab.helpers.rng import make_rng
from csbm_attention_lab.models.attention import AttentionSpec, GammaMatrix
from csbm_attention_lab.models.csbm import CsbmParams, GraphSample
from csbm_attention_lab.models.report import ConcentrationReport


def _quantiles(values: np.ndarray) -> Dict[str, float]:
    finite = values[np.isfinite(values)]
    if not len(finite):
        return {}
    q05, q50, q95 = np.quantile(finite, [0.05, 0.5, 0.95])
    return {"q05": float(q05), "q50": float(q50), "q95": float(q95)}


def _degenerate(
    statistic: str, observations: int, envelope: float
) -> ConcentrationReport:
    logger.warning("Degenerate theoretical centre for %s", statistic)
    return ConcentrationReport(
        statistic=statistic,
        observations=observations,
        center=0.0,
        envelope=envelope,
        violation_count=0,
        passed=False,
        degenerate=True,
    )


def class_neighbor_counts(sample: GraphSample) -> Tuple[np.ndarray, np.ndarray]:
    """Per node: number of same-class and of other-class neighbours."""
    adjacency = sample.adjacency
    intra = sample.slot_is_intra.astype(float)
    rows = adjacency.sources
    same = np.bincount(rows, weights=intra, minlength=sample.n)
    other = np.bincount(rows, weights=1.0 - intra, minlength=sample.n)
    return same, other


def check_degree_concentration(
    sample: GraphSample,
    params: CsbmParams,
    envelope: float = Configuration.DEGREE_ENVELOPE_C,
) -> ConcentrationReport:
    statistic = "degree"
    n = params.n
    density = params.p + params.q
    center = n * density / 2.0
    if center <= 0.0:
        return _degenerate(statistic, n, envelope)

    rate = math.sqrt(math.log(n) / (n * density))
    deviations = np.abs(sample.adjacency.degrees - center) / center
    violations = int((deviations > envelope * rate).sum())
    return ConcentrationReport(
        statistic=statistic,
        observations=n,
        center=center,
        envelope=envelope,
        max_deviation=float(deviations.max()),
        quantiles=_quantiles(deviations),
        violation_count=violations,
        passed=violations == 0,
        observed_constants={"c_observed": float(deviations.max() / rate)},
    )


def check_class_degree_concentration(
    sample: GraphSample,
    params: CsbmParams,
    envelope: float = Configuration.DEGREE_ENVELOPE_C,
) -> ConcentrationReport:
    """
    Same relative test as the degree check, per node and per class, with
    centres np/2 for the node's own class and nq/2 for the other. A zero
    centre is degenerate: any neighbour counted against it is a violation.
    """
    statistic = "class_degree"
    n = params.n
    log_n = math.log(n)
    counts = class_neighbor_counts(sample)
    centers = (n * params.p / 2.0, n * params.q / 2.0)

    deviations: List[np.ndarray] = []
    scaled: List[float] = []
    violations = 0
    degenerate = False
    for count, center in zip(counts, centers):
        if center <= 0.0:
            degenerate = True
            violations += int((count > 0).sum())
            continue
        rate = math.sqrt(log_n / (2.0 * center))
        relative = np.abs(count - center) / center
        violations += int((relative > envelope * rate).sum())
        deviations.append(relative)
        scaled.append(float(relative.max() / rate))

    if degenerate:
        logger.warning(
            "Class degree check has a zero centre",
            extra={"p": params.p, "q": params.q},
        )
    observed = np.concatenate(deviations) if deviations else np.empty(0)
    return ConcentrationReport(
        statistic=statistic,
        observations=2 * n,
        center=centers[0],
        envelope=envelope,
        max_deviation=float(observed.max()) if len(observed) else None,
        quantiles=_quantiles(observed),
        violation_count=violations,
        passed=violations == 0,
        degenerate=degenerate,
        observed_constants={"c_observed": max(scaled)} if scaled else {},
    )


def density_precondition_holds(params: CsbmParams) -> bool:
    n = params.n
    return max(params.p, params.q) <= 1.0 - 36.0 * math.log(n) / n


def _node_pairs(
    n: int, sample_size: int, exact: bool, seed: int
) -> Tuple[np.ndarray, np.ndarray]:
    if exact:
        return np.triu_indices(n, k=1)
    rng = make_rng(seed)
    first = rng.integers(0, n, size=sample_size)
    second = rng.integers(0, n - 1, size=sample_size)
    second = second + (second >= first)
    return first, second


def check_uncommon_neighbors(
    sample: GraphSample,
    params: CsbmParams,
    node_pair_sample_size: int = Configuration.UNCOMMON_PAIR_SAMPLE_SIZE,
    exact: bool = False,
    seed: int = 0,
) -> ConcentrationReport:
    """
    Lower bound on |N_i xor N_j| over node pairs: centre (n/2)(p+q-p^2-q^2)
    for same-class pairs, (n/2)(p+q-2pq) for cross-class pairs, each with
    slack delta = C * sqrt(log n / (n * base)). A category whose centre is
    not positive holds vacuously and flags the report degenerate.
    """
    statistic = "uncommon_neighbors"
    n = params.n
    p, q = params.p, params.q
    if not density_precondition_holds(params):
        logger.warning(
            "Graph too dense for the uncommon neighbour bound, computing anyway",
            extra={"p": p, "q": q, "n": n},
        )
    if exact and n > Configuration.UNCOMMON_EXACT_MAX_N:
        logger.warning(
            "Exact pair enumeration limited to n <= %d, sampling pairs instead",
            Configuration.UNCOMMON_EXACT_MAX_N,
        )
        exact = False

    first, second = _node_pairs(n, node_pair_sample_size, exact, seed)
    adjacency = sample.adjacency.to_csr()
    if exact:
        common = (adjacency @ adjacency).toarray()[first, second]
    else:
        common = np.asarray(
            adjacency[first].multiply(adjacency[second]).sum(axis=1)
        ).ravel()
    degrees = sample.adjacency.degrees
    uncommon = degrees[first] + degrees[second] - 2.0 * common
    same_class = sample.labels[first] == sample.labels[second]

    bases = {True: p + q - p**2 - q**2, False: p + q - 2.0 * p * q}
    bound = np.full(len(first), -np.inf)
    center = np.zeros(len(first))
    degenerate = False
    for is_same, base in bases.items():
        mask = same_class == is_same
        if base <= 0.0:
            degenerate = degenerate or bool(mask.any())
            continue
        delta = Configuration.UNCOMMON_DELTA_C * math.sqrt(math.log(n) / (n * base))
        center[mask] = n / 2.0 * base
        bound[mask] = n / 2.0 * base * (1.0 - delta)

    violations = int((uncommon < bound).sum())
    checked = center > 0.0
    shortfall = (center[checked] - uncommon[checked]) / center[checked]
    observations = len(first)
    passed = violations <= Configuration.PAIR_VIOLATION_FRACTION * observations
    return ConcentrationReport(
        statistic=statistic,
        observations=observations,
        center=n / 2.0 * bases[True],
        envelope=Configuration.UNCOMMON_DELTA_C,
        max_deviation=float(shortfall.max()) if len(shortfall) else None,
        quantiles=_quantiles(uncommon[checked] / center[checked]),
        violation_count=violations,
        passed=passed,
        degenerate=degenerate,
    )


def class_exp_sums(sample: GraphSample, spec: AttentionSpec) -> np.ndarray:
    """Column k holds the sum of exp(Psi) over each node's class-k neighbours."""
    adjacency = sample.adjacency
    logits = psi_values(spec, sample.edge_features)[adjacency.edge_ids]
    with np.errstate(over="ignore"):
        weights = np.exp(logits)
    rows = adjacency.sources
    neighbor_class = sample.labels[adjacency.indices]
    sums = np.zeros((sample.n, 2))
    for k in (0, 1):
        mask = neighbor_class == k
        sums[:, k] = np.bincount(
            rows[mask], weights=weights[mask], minlength=sample.n
        )
    return sums


def check_sum_exp_bounds(
    sample: GraphSample,
    params: CsbmParams,
    spec: AttentionSpec,
    c_lo: float = Configuration.SUM_EXP_C_LO,
    c_hi: float = Configuration.SUM_EXP_C_HI,
) -> ConcentrationReport:
    statistic = "sum_exp"
    n = params.n
    sums = class_exp_sums(sample, spec)
    total_scale = n * (params.p + params.q)
    if total_scale <= 0.0:
        return _degenerate(statistic, n, c_hi)

    own = sample.labels.astype(int)
    centers = np.where(
        np.arange(2)[np.newaxis, :] == own[:, np.newaxis],
        n * params.p / 2.0,
        n * params.q / 2.0,
    )
    positive = centers > 0.0
    lo_ratio = np.full(sums.shape, np.inf)
    lo_ratio[positive] = sums[positive] / centers[positive]
    hi_ratio = sums / total_scale

    node_lo = lo_ratio.min(axis=1)
    node_hi = hi_ratio.max(axis=1)
    ok = (node_lo >= c_lo) & (node_hi <= c_hi)
    violations = int((~ok).sum())
    finite_lo = node_lo[np.isfinite(node_lo)]
    observed: Dict[str, float] = {"c_hi_observed": float(node_hi.max())}
    if len(finite_lo):
        observed["c_lo_observed"] = float(finite_lo.min())
    return ConcentrationReport(
        statistic=statistic,
        observations=n,
        center=total_scale,
        envelope=c_hi,
        max_deviation=float(node_hi.max()),
        quantiles=_quantiles(node_lo),
        violation_count=violations,
        passed=violations <= (1.0 - Configuration.NODE_PASS_FRACTION) * n,
        degenerate=not bool(positive.all()),
        observed_constants=observed,
    )


def gamma_class_masses(
    sample: GraphSample, gamma: GammaMatrix
) -> Tuple[np.ndarray, np.ndarray]:
    """Per node: attention mass on same-class and on other-class neighbours."""
    check_alignment(sample, gamma)
    intra = sample.slot_is_intra
    rows = sample.adjacency.sources
    same = np.bincount(
        rows, weights=np.where(intra, gamma.values, 0.0), minlength=sample.n
    )
    other = np.bincount(
        rows, weights=np.where(intra, 0.0, gamma.values), minlength=sample.n
    )
    return same, other


def check_gamma_ratio_bounds(
    sample: GraphSample,
    gamma: GammaMatrix,
    params: CsbmParams,
    envelope: float = Configuration.GAMMA_RATIO_C,
) -> ConcentrationReport:
    """
    The intra minus inter attention mass of a node, rescaled by
    (p + q) / (p - q), sits near 1 when coefficients are near uniform. A node
    is within the band when the rescaled difference lies in [0, c]; nodes
    whose mass leans towards the wrong class are counted apart from those
    above c.
    """
    statistic = "gamma_ratio"
    same, other = gamma_class_masses(sample, gamma)
    active = gamma.degrees > 0
    difference = (same - other)[active]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(other[active] > 0.0, same[active] / other[active], np.inf)

    observed: Dict[str, float] = {}
    finite_ratio = ratio[np.isfinite(ratio)]
    if len(finite_ratio):
        observed["ratio_q50"] = float(np.median(finite_ratio))

    if params.p == params.q:
        logger.warning("Gamma ratio band is undefined for p == q")
        spread = float(np.abs(difference).max()) if len(difference) else None
        return ConcentrationReport(
            statistic=statistic,
            observations=len(difference),
            center=0.0,
            envelope=envelope,
            max_deviation=spread,
            quantiles=_quantiles(difference),
            violation_count=0,
            passed=False,
            degenerate=True,
            observed_constants=observed,
        )

    scaled = difference * (params.p + params.q) / (params.p - params.q)
    wrong_side = int((scaled < 0.0).sum())
    above_band = int((scaled > envelope).sum())
    violations = wrong_side + above_band
    observed["wrong_side"] = float(wrong_side)
    observed["above_band"] = float(above_band)
    if len(scaled):
        observed["c_observed"] = float(scaled.max())
    return ConcentrationReport(
        statistic=statistic,
        observations=len(scaled),
        center=1.0,
        envelope=envelope,
        max_deviation=float(np.abs(scaled - 1.0).max()) if len(scaled) else None,
        quantiles=_quantiles(scaled),
        violation_count=violations,
        passed=violations <= (1.0 - Configuration.NODE_PASS_FRACTION) * len(scaled),
        observed_constants=observed,
    )


def check_sum_sq_gamma(
    sample: GraphSample,
    gamma: GammaMatrix,
    params: CsbmParams,
    factor: float = Configuration.SUM_SQ_GAMMA_FACTOR,
) -> ConcentrationReport:
    statistic = "sum_sq_gamma"
    active = gamma.degrees > 0
    density = params.p + params.q
    if density <= 0.0:
        return _degenerate(statistic, int(active.sum()), factor)

    center = 2.0 / (params.n * density)
    values = sum_sq_gamma(gamma)[active]
    outside = (values < center / factor) | (values > factor * center)
    median: Optional[float] = float(np.median(values)) if len(values) else None
    passed = median is not None and center / factor <= median <= factor * center
    return ConcentrationReport(
        statistic=statistic,
        observations=len(values),
        center=center,
        envelope=factor,
        max_deviation=median / center if median is not None else None,
        quantiles=_quantiles(values),
        violation_count=int(outside.sum()),
        passed=passed,
    )


def check_gamma_uniformity(
    sample: GraphSample,
    gamma: GammaMatrix,
    factor: float = Configuration.UNIFORMITY_FACTOR,
) -> ConcentrationReport:
    summary = gamma_stats(sample, gamma, factor)
    fractions = np.asarray(summary.node_uniform_fraction)
    active = fractions[np.isfinite(fractions)]
    violations = int((active < Configuration.UNIFORM_NODE_FRACTION).sum())
    share = summary.uniform_node_share
    return ConcentrationReport(
        statistic="gamma_uniformity",
        observations=len(active),
        center=None,
        envelope=factor,
        max_deviation=float(1.0 - active.min()) if len(active) else None,
        quantiles=_quantiles(active),
        violation_count=violations,
        passed=bool(len(active)) and share >= Configuration.UNIFORM_NODE_FRACTION,
        observed_constants={"uniform_node_share": share} if len(active) else {},
    )
