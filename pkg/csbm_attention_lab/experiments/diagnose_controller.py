from collections import defaultdict
from typing import Dict, List

from she_logging import logger

from csbm_attention_lab.attention import attention_coefficients
from csbm_attention_lab.diagnostics import (
    check_class_degree_concentration,
    check_degree_concentration,
    check_gamma_ratio_bounds,
    check_gamma_uniformity,
    check_sum_exp_bounds,
    check_sum_sq_gamma,
    check_uncommon_neighbors,
)
from csbm_attention_lab.experiments.sweep_controller import GridPoint, plan_grid
from csbm_attention_lab.helpers.rng import derive_seed
from csbm_attention_lab.models.attention import AttentionKind
from csbm_attention_lab.models.report import ConcentrationReport
from csbm_attention_lab.models.sweep import DiagnosticRecord, SweepConfig
from csbm_attention_lab.sampler import sample_csbm

# Separates the pair-sampling stream from the graph stream of the same trial.
PAIR_STREAM = 1


def checks_sum_exp(point: GridPoint) -> bool:
    """The exponential-sum bounds only hold for Lipschitz attention logits."""
    return point.attention.kind != AttentionKind.CONSTRUCTED_CLEAN


def diagnose_trial(
    config: SweepConfig, point: GridPoint, trial: int
) -> List[DiagnosticRecord]:
    seed = derive_seed(config.seed, point.index, trial)
    params = point.params
    sample = sample_csbm(params, seed)
    gamma = attention_coefficients(sample, point.attention)

    reports: List[ConcentrationReport] = [
        check_degree_concentration(sample, params, config.envelope_c),
        check_class_degree_concentration(sample, params, config.envelope_c),
        check_uncommon_neighbors(
            sample,
            params,
            config.pair_sample_size,
            seed=derive_seed(seed, PAIR_STREAM),
        ),
        check_gamma_ratio_bounds(sample, gamma, params),
        check_sum_sq_gamma(sample, gamma, params),
        check_gamma_uniformity(sample, gamma, config.uniformity_factor),
    ]
    if checks_sum_exp(point):
        reports.insert(3, check_sum_exp_bounds(sample, params, point.attention))
    return [
        DiagnosticRecord(
            experiment=config.experiment,
            point=point.index,
            grid_value=point.value,
            trial=trial,
            seed=seed,
            report=report,
        )
        for report in reports
    ]


def pass_rates(records: List[DiagnosticRecord]) -> Dict[str, float]:
    """Share of trials on which each statistic passed."""
    outcomes: Dict[str, List[bool]] = defaultdict(list)
    for record in records:
        outcomes[record.report.statistic].append(record.report.passed)
    return {name: sum(passed) / len(passed) for name, passed in outcomes.items()}


def run_diagnostics(config: SweepConfig) -> List[DiagnosticRecord]:
    points = plan_grid(config)
    logger.info(
        "Running concentration diagnostics over %d grid points",
        len(points),
        extra={"experiment": config.experiment.value, "trials": config.trials},
    )
    if not all(checks_sum_exp(point) for point in points):
        logger.warning(
            "Skipping the exponential sum check for constructed clean attention",
            extra={"experiment": config.experiment.value},
        )
    records: List[DiagnosticRecord] = []
    for point in points:
        for trial in range(config.trials):
            records.extend(diagnose_trial(config, point, trial))
    for statistic, rate in sorted(pass_rates(records).items()):
        logger.info("Diagnostic %s passed on %.1f%% of trials", statistic, 100 * rate)
    return records
