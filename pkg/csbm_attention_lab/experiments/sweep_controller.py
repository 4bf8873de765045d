from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np
from she_logging import logger

from csbm_attention_lab.attention import (
    attention_coefficients,
    build_clean_spec,
    build_lipschitz_spec,
    gamma_stats,
    sum_sq_gamma,
    uniform_spec,
)
from csbm_attention_lab.convolution import (
    attention_convolve,
    build_classifier,
    classify,
    graph_convolution_baseline,
    mass_allocation,
)
from csbm_attention_lab.experiments.grids import point_params, resolve_grid
from csbm_attention_lab.helpers.rng import derive_seed
from csbm_attention_lab.models.attention import AttentionSpec, GammaMatrix
from csbm_attention_lab.models.classifier import ClassifierSpec, PredictionResult
from csbm_attention_lab.models.csbm import CsbmParams, GraphSample
from csbm_attention_lab.models.sweep import (
    METRICS,
    AggregateRecord,
    Method,
    SweepConfig,
    SweepResult,
    TrialRecord,
)
from csbm_attention_lab.sampler import sample_csbm


class GridPoint(NamedTuple):
    index: int
    value: float
    params: CsbmParams
    attention: AttentionSpec
    classifier: ClassifierSpec


def gat_spec_for(config: SweepConfig, params: CsbmParams) -> AttentionSpec:
    """
    Clean kinds use the constructed attention, noisy kinds the Lipschitz one.
    A zero edge-feature mean leaves nothing to attend to and falls back to
    uniform coefficients.
    """
    if params.nu_norm == 0.0:
        return uniform_spec()
    if config.experiment.is_noisy:
        return build_lipschitz_spec(params, config.phi)
    return build_clean_spec(params, config.alpha)


def plan_grid(config: SweepConfig) -> List[GridPoint]:
    """Derive and validate every grid point before any trial is sampled."""
    points = []
    for index, value in enumerate(resolve_grid(config)):
        params = point_params(config, float(value))
        points.append(
            GridPoint(
                index=index,
                value=float(value),
                params=params,
                attention=gat_spec_for(config, params),
                classifier=build_classifier(params),
            )
        )
    return points


def _record(
    config: SweepConfig,
    point: GridPoint,
    trial: int,
    seed: int,
    method: Method,
    sample: GraphSample,
    gamma: GammaMatrix,
    prediction: PredictionResult,
) -> TrialRecord:
    summary = gamma_stats(sample, gamma, config.uniformity_factor)
    intra_mass, inter_mass = mass_allocation(sample, gamma)
    squares = sum_sq_gamma(gamma)[gamma.degrees > 0]
    return TrialRecord(
        experiment=config.experiment,
        point=point.index,
        grid_value=point.value,
        trial=trial,
        method=method,
        accuracy=prediction.accuracy,
        perfect=prediction.perfect,
        intra_gamma_mean=summary.intra.mean,
        inter_gamma_mean=summary.inter.mean,
        intra_mass=intra_mass,
        inter_mass=inter_mass,
        sum_sq_gamma_median=float(np.median(squares)) if len(squares) else np.nan,
        seed=seed,
    )


def run_trial(config: SweepConfig, point: GridPoint, trial: int) -> List[TrialRecord]:
    seed = derive_seed(config.seed, point.index, trial)
    sample = sample_csbm(point.params, seed)
    records = []
    for method in config.methods:
        if method == Method.GAT:
            gamma = attention_coefficients(sample, point.attention)
            scores = attention_convolve(sample, gamma, point.classifier)
            prediction = classify(scores, sample.labels, point.classifier.threshold)
        else:
            gamma = attention_coefficients(sample, uniform_spec())
            prediction = graph_convolution_baseline(sample, point.classifier)
        records.append(
            _record(config, point, trial, seed, method, sample, gamma, prediction)
        )
    logger.debug(
        "Finished trial %d at grid point %d",
        trial,
        point.index,
        extra={"seed": seed, "accuracy": [r.accuracy for r in records]},
    )
    return records


def aggregate(
    config: SweepConfig, point: GridPoint, method: Method, rows: Sequence[TrialRecord]
) -> AggregateRecord:
    """Mean and sample standard deviation (ddof=1) of every metric."""
    means: Dict[str, float] = {}
    stds: Dict[str, float] = {}
    for metric in METRICS:
        values = np.array([row.metric(metric) for row in rows], dtype=float)
        means[metric] = float(values.mean())
        stds[metric] = float(values.std(ddof=1)) if len(values) > 1 else np.nan
    return AggregateRecord(
        experiment=config.experiment,
        point=point.index,
        grid_value=point.value,
        method=method,
        trials=len(rows),
        means=means,
        stds=stds,
    )


def run_sweep(config: SweepConfig) -> SweepResult:
    points = plan_grid(config)
    logger.info(
        "Running %s sweep over %d grid points",
        config.experiment.value,
        len(points),
        extra={"trials": config.trials, "seed": config.seed, "workers": config.workers},
    )
    jobs = [(point, trial) for point in points for trial in range(config.trials)]
    slots: List[Optional[List[TrialRecord]]] = [None] * len(jobs)

    def _run(slot: int) -> None:
        point, trial = jobs[slot]
        slots[slot] = run_trial(config, point, trial)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as executor:
            list(executor.map(_run, range(len(jobs))))
    else:
        for slot in range(len(jobs)):
            _run(slot)

    result = SweepResult(experiment=config.experiment)
    for records in slots:
        assert records is not None
        result.trials.extend(records)

    for point in points:
        point_rows = [row for row in result.trials if row.point == point.index]
        for method in config.methods:
            rows = [row for row in point_rows if row.method == method]
            record = aggregate(config, point, method, rows)
            result.aggregates.append(record)
            logger.info(
                "Grid point %d (%.6g) %s mean accuracy %.4f",
                point.index,
                point.value,
                method.value,
                record.means["accuracy"],
                extra={"perfect_rate": record.means["perfect"]},
            )
    logger.info(
        "Finished %s sweep with %d trial records",
        config.experiment.value,
        len(result.trials),
    )
    return result
