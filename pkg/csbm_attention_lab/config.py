from pathlib import Path

from environs import Env


class Configuration:
    """
    Envelope constants operationalise asymptotic statements at finite n. The
    defaults were calibrated by Monte Carlo at n=400 and may be overridden
    through the environment.
    """

    env = Env()

    DEFAULT_TRIALS: int = env.int("CSBM_LAB_TRIALS", 50)
    DEFAULT_MASTER_SEED: int = env.int("CSBM_LAB_SEED", 20220601)

    DEGREE_ENVELOPE_C: float = env.float("CSBM_LAB_DEGREE_ENVELOPE_C", 4.0)
    UNIFORMITY_FACTOR: float = env.float("CSBM_LAB_UNIFORMITY_FACTOR", 3.0)
    UNIFORM_NODE_FRACTION: float = env.float("CSBM_LAB_UNIFORM_NODE_FRACTION", 0.9)
    NODE_PASS_FRACTION: float = env.float("CSBM_LAB_NODE_PASS_FRACTION", 0.95)
    PAIR_VIOLATION_FRACTION: float = env.float(
        "CSBM_LAB_PAIR_VIOLATION_FRACTION", 0.05
    )
    UNCOMMON_PAIR_SAMPLE_SIZE: int = env.int("CSBM_LAB_PAIR_SAMPLE_SIZE", 200)
    UNCOMMON_EXACT_MAX_N: int = env.int("CSBM_LAB_UNCOMMON_EXACT_MAX_N", 500)
    UNCOMMON_DELTA_C: float = env.float("CSBM_LAB_UNCOMMON_DELTA_C", 3.0)
    SUM_EXP_C_LO: float = env.float("CSBM_LAB_SUM_EXP_C_LO", 0.2)
    SUM_EXP_C_HI: float = env.float("CSBM_LAB_SUM_EXP_C_HI", 5.0)
    GAMMA_RATIO_C: float = env.float("CSBM_LAB_GAMMA_RATIO_C", 3.0)
    SUM_SQ_GAMMA_FACTOR: float = env.float("CSBM_LAB_SUM_SQ_GAMMA_FACTOR", 3.0)

    # Noisy regime: ||nu|| = ratio * zeta.
    NOISY_NU_RATIO: float = env.float("CSBM_LAB_NOISY_NU_RATIO", 100.0)
    # Clean regime: ||nu|| = factor * zeta * sqrt(log(0.5 n^2 (p + q))).
    CLEAN_NU_FACTOR: float = env.float("CSBM_LAB_CLEAN_NU_FACTOR", 100.0)


def default_output_dir() -> Path:
    """Read at call time so that the variable can change between CLI runs."""
    return Env().path("CSBM_LAB_OUTPUT_DIR", "results")
