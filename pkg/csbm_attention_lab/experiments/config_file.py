"""
Experiment configuration files: flat `key = value` lines, `#` starts a
comment. Keys mirror SweepConfig; model keys (n, p, q, sigma, zeta, d, h,
balance_mode, self_loops) build the base CsbmParams and grid_* keys the
sweep grid.
"""
from pathlib import Path
from typing import Any, Dict, Optional

from she_logging import logger

from csbm_attention_lab.config import default_output_dir
from csbm_attention_lab.error_handler import ConfigurationError
from csbm_attention_lab.models.attention import PhiSpec
from csbm_attention_lab.models.csbm import CsbmParams
from csbm_attention_lab.models.sweep import GridSpec, Method, SweepConfig

MODEL_DEFAULTS: Dict[str, Any] = {
    "n": 400,
    "p": 0.4,
    "q": 0.33,
    "sigma": 0.1,
    "zeta": 0.1,
}
MODEL_KEYS = frozenset(
    {"n", "p", "q", "sigma", "zeta", "d", "h", "balance_mode", "self_loops"}
)
GRID_KEYS = frozenset({"grid_start", "grid_stop", "grid_points", "grid_scale"})
SWEEP_KEYS = frozenset(
    {
        "experiment",
        "trials",
        "seed",
        "methods",
        "output",
        "alpha",
        "phi",
        "noisy_nu_ratio",
        "clean_nu_factor",
        "workers",
        "envelope_c",
        "uniformity_factor",
        "pair_sample_size",
    }
)
KNOWN_KEYS = MODEL_KEYS | GRID_KEYS | SWEEP_KEYS


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, str]:
    entries: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, separator, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not separator or not key:
            raise ConfigurationError(f"{source}:{number}: expected 'key = value'")
        if key not in KNOWN_KEYS:
            raise ConfigurationError(f"{source}:{number}: unknown key '{key}'")
        if key in entries:
            raise ConfigurationError(f"{source}:{number}: duplicate key '{key}'")
        entries[key] = value
    return entries


def _grid(entries: Dict[str, str]) -> Optional[GridSpec]:
    present = GRID_KEYS & entries.keys()
    if not present:
        return None
    missing = {"grid_start", "grid_stop", "grid_points"} - present
    if missing:
        raise ConfigurationError(
            f"incomplete grid, missing {', '.join(sorted(missing))}"
        )
    return GridSpec(
        start=entries["grid_start"],
        stop=entries["grid_stop"],
        points=entries["grid_points"],
        scale=entries.get("grid_scale", "linear"),
    )


def _base_params(entries: Dict[str, str]) -> CsbmParams:
    model: Dict[str, Any] = {**MODEL_DEFAULTS}
    model.update({key: entries[key] for key in MODEL_KEYS & entries.keys()})
    # Placeholder unit means; every grid point derives its own mu and nu.
    return CsbmParams.from_norms(
        n=int(model.pop("n")),
        p=float(model.pop("p")),
        q=float(model.pop("q")),
        mu_norm=1.0,
        nu_norm=1.0,
        sigma=float(model.pop("sigma")),
        zeta=float(model.pop("zeta")),
        d=int(model.pop("d")) if "d" in model else None,
        h=int(model.pop("h")) if "h" in model else None,
        **model,
    )


def build_sweep_config(
    entries: Dict[str, str], overrides: Optional[Dict[str, Any]] = None
) -> SweepConfig:
    if "experiment" not in entries:
        raise ConfigurationError("configuration must name an 'experiment'")
    values: Dict[str, Any] = {key: entries[key] for key in SWEEP_KEYS & entries.keys()}
    if "methods" in values:
        values["methods"] = [
            Method(name.strip())
            for name in values["methods"].split(",")
            if name.strip()
        ]
    if "phi" in values:
        values["phi"] = PhiSpec.parse(values["phi"])
    values.update(
        {key: value for key, value in (overrides or {}).items() if value is not None}
    )
    return SweepConfig(base=_base_params(entries), grid=_grid(entries), **values)


def load_sweep_config(
    path: Path, overrides: Optional[Dict[str, Any]] = None
) -> SweepConfig:
    try:
        text = Path(path).read_text()
    except FileNotFoundError:
        raise ConfigurationError(f"configuration file {path} does not exist")
    except OSError as e:
        raise ConfigurationError(f"cannot read configuration file {path}: {e}")
    try:
        config = build_sweep_config(parse_config_text(text, str(path)), overrides)
    except ConfigurationError:
        raise
    except ValueError as e:
        # ValidationError and enum lookups surface here as well.
        raise ConfigurationError(f"{path}: {e}") from e
    logger.debug("Loaded %s configuration from %s", config.experiment.value, path)
    return config


def resolve_output(config: SweepConfig) -> Path:
    if config.output is not None:
        return config.output
    return default_output_dir() / f"{config.experiment.value}.csv"
