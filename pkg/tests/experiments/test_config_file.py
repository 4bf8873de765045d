from pathlib import Path

import pytest
from _pytest.monkeypatch import MonkeyPatch

from csbm_attention_lab.error_handler import ConfigurationError
from csbm_attention_lab.experiments.config_file import (
    build_sweep_config,
    load_sweep_config,
    parse_config_text,
    resolve_output,
)
from csbm_attention_lab.models.attention import PhiKind
from csbm_attention_lab.models.csbm import BalanceMode
from csbm_attention_lab.models.sweep import ExperimentKind, GridScale, Method

CONFIG_DIR = Path(__file__).parents[2] / "experiment_configs"

SMALL_CONFIG = """
# small clean sweep
experiment = clean_vary_q_positive
n = 60          # nodes
p = 0.4
sigma = 0.1
zeta = 0.1
grid_start = 0.1
grid_stop = 0.2
grid_points = 2
trials = 3
methods = gcn, gat
"""


class TestParseConfigText:
    def test_comments_and_blank_lines(self) -> None:
        entries = parse_config_text(SMALL_CONFIG)
        assert entries["n"] == "60"
        assert entries["methods"] == "gcn, gat"
        assert len(entries) == 10

    def test_unknown_key(self) -> None:
        with pytest.raises(ConfigurationError, match="sweep.cfg:2: unknown key"):
            parse_config_text("n = 10\ncolour = blue\n", "sweep.cfg")

    def test_duplicate_key(self) -> None:
        with pytest.raises(ConfigurationError, match="duplicate key 'n'"):
            parse_config_text("n = 10\nn = 20\n")

    def test_missing_separator(self) -> None:
        with pytest.raises(ConfigurationError, match="expected 'key = value'"):
            parse_config_text("experiment clean_vary_mu\n")


class TestBuildSweepConfig:
    def test_small_config(self) -> None:
        config = build_sweep_config(parse_config_text(SMALL_CONFIG))
        assert config.experiment == ExperimentKind.CLEAN_VARY_Q_POSITIVE
        assert config.base.n == 60
        assert config.base.q == 0.33
        assert config.base.balance_mode == BalanceMode.EXACT_HALF
        assert config.grid is not None
        assert config.grid.points == 2
        assert config.grid.scale == GridScale.LINEAR
        assert config.trials == 3
        assert config.methods == (Method.GCN, Method.GAT)
        assert config.output is None

    def test_overrides_win(self) -> None:
        config = build_sweep_config(
            parse_config_text(SMALL_CONFIG),
            {"seed": 7, "trials": None, "output": Path("out/x.csv")},
        )
        assert config.seed == 7
        assert config.trials == 3
        assert config.output == Path("out/x.csv")

    def test_experiment_is_required(self) -> None:
        with pytest.raises(ConfigurationError):
            build_sweep_config({"n": "60"})

    def test_incomplete_grid(self) -> None:
        with pytest.raises(ConfigurationError, match="grid_points"):
            build_sweep_config(
                {
                    "experiment": "clean_vary_mu",
                    "grid_start": "0.1",
                    "grid_stop": "1",
                }
            )

    def test_phi_and_alpha(self) -> None:
        config = build_sweep_config(
            {
                "experiment": "noisy_vary_mu",
                "phi": "tanh_scaled:2,0.5",
                "alpha": "auto",
                "noisy_nu_ratio": "0.01",
            }
        )
        assert config.phi.kind == PhiKind.TANH_SCALED
        assert config.phi.origin_bound == 0.5
        assert config.alpha == "auto"
        assert config.noisy_nu_ratio == 0.01

    def test_noisy_ratio_is_capped(self) -> None:
        with pytest.raises(ValueError):
            build_sweep_config(
                {"experiment": "noisy_vary_mu", "noisy_nu_ratio": "150"}
            )


class TestLoadSweepConfig:
    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigurationError, match="does not exist"):
            load_sweep_config(tmp_path / "missing.cfg")

    def test_invalid_value_names_the_file(self, tmp_path: Path) -> None:
        path = tmp_path / "bad.cfg"
        path.write_text("experiment = clean_vary_mu\np = 1.5\n")
        with pytest.raises(ConfigurationError, match="bad.cfg"):
            load_sweep_config(path)

    def test_unknown_experiment(self, tmp_path: Path) -> None:
        path = tmp_path / "bad.cfg"
        path.write_text("experiment = vary_everything\n")
        with pytest.raises(ConfigurationError):
            load_sweep_config(path)

    def test_odd_exact_half_is_rejected(self, tmp_path: Path) -> None:
        path = tmp_path / "odd.cfg"
        path.write_text("experiment = clean_vary_mu\nn = 41\n")
        with pytest.raises(ConfigurationError):
            load_sweep_config(path)

    @pytest.mark.parametrize(
        "path", sorted(CONFIG_DIR.glob("*.cfg")), ids=lambda path: path.stem
    )
    def test_shipped_configs_load(self, path: Path) -> None:
        config = load_sweep_config(path)
        assert config.base.n == 400
        assert config.output == Path("results") / f"{path.stem}.csv"


class TestResolveOutput:
    def test_config_output(self) -> None:
        config = build_sweep_config(
            {"experiment": "clean_vary_mu", "output": "a/b.csv"}
        )
        assert resolve_output(config) == Path("a/b.csv")

    def test_environment_default(
        self, tmp_path: Path, monkeypatch: MonkeyPatch
    ) -> None:
        monkeypatch.setenv("CSBM_LAB_OUTPUT_DIR", str(tmp_path))
        config = build_sweep_config({"experiment": "vary_nu_gamma"})
        assert resolve_output(config) == tmp_path / "vary_nu_gamma.csv"
