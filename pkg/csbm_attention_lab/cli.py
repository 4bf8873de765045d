import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

import click
from pydantic import ValidationError
from she_logging import logger

from csbm_attention_lab.error_handler import (
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    CsbmLabException,
    OutputError,
    catch_cli_error,
)
from csbm_attention_lab.experiments.config_file import (
    load_sweep_config,
    resolve_output,
)
from csbm_attention_lab.experiments.diagnose_controller import (
    pass_rates,
    run_diagnostics,
)
from csbm_attention_lab.experiments.sweep_controller import run_sweep
from csbm_attention_lab.helpers.csv_output import (
    diagnostics_path,
    emit_csv,
    emit_diagnostics_csv,
    read_summary,
)
from csbm_attention_lab.helpers.graph_dump import write_graph_dump
from csbm_attention_lab.models.csbm import BalanceMode, CsbmParams
from csbm_attention_lab.models.sweep import ExperimentKind
from csbm_attention_lab.sampler import sample_csbm

PROG_NAME = "csbm-lab"


def _overrides(
    seed: Optional[int], trials: Optional[int], out: Optional[Path]
) -> Dict[str, Any]:
    return {"seed": seed, "trials": trials, "output": out}


seed_option = click.option("--seed", type=int, help="Master seed override.")
trials_option = click.option("--trials", type=int, help="Trials per point override.")
out_option = click.option(
    "--out", type=click.Path(dir_okay=False, path_type=Path), help="Output CSV path."
)


@click.group(help="Graph attention experiments on the contextual SBM.")
def cli() -> None:
    pass


@cli.command(help="Run a configured sweep and write its CSV files.")
@click.argument("config_file", type=click.Path(path_type=Path))
@seed_option
@trials_option
@out_option
def sweep(
    config_file: Path, seed: Optional[int], trials: Optional[int], out: Optional[Path]
) -> None:
    config = load_sweep_config(config_file, _overrides(seed, trials, out))
    result = run_sweep(config)
    path = emit_csv(result, resolve_output(config))
    click.echo(str(path))


@cli.command(help="Run the concentration diagnostics of a configuration.")
@click.argument("config_file", type=click.Path(path_type=Path))
@seed_option
@trials_option
@out_option
def diagnose(
    config_file: Path, seed: Optional[int], trials: Optional[int], out: Optional[Path]
) -> None:
    config = load_sweep_config(config_file, _overrides(seed, trials, out))
    records = run_diagnostics(config)
    path = emit_diagnostics_csv(records, diagnostics_path(resolve_output(config)))
    for statistic, rate in sorted(pass_rates(records).items()):
        click.echo(f"{statistic}\t{rate:.3f}")
    click.echo(str(path))


@cli.command(help="Sample one graph and dump it as text.")
@click.option("--n", "n", type=int, default=400, show_default=True)
@click.option("--p", "p", type=float, default=0.4, show_default=True)
@click.option("--q", "q", type=float, default=0.33, show_default=True)
@click.option("--mu-norm", type=float, default=1.0, show_default=True)
@click.option("--nu-norm", type=float, default=1.0, show_default=True)
@click.option("--sigma", type=float, default=0.1, show_default=True)
@click.option("--zeta", type=float, default=0.1, show_default=True)
@click.option(
    "--balance-mode",
    type=click.Choice([mode.value for mode in BalanceMode]),
    default=BalanceMode.EXACT_HALF.value,
    show_default=True,
)
@click.option("--self-loops", is_flag=True, default=False)
@click.option("--seed", type=int, default=0, show_default=True)
@out_option
def sample(
    n: int,
    p: float,
    q: float,
    mu_norm: float,
    nu_norm: float,
    sigma: float,
    zeta: float,
    balance_mode: str,
    self_loops: bool,
    seed: int,
    out: Optional[Path],
) -> None:
    params = CsbmParams.from_norms(
        n=n,
        p=p,
        q=q,
        mu_norm=mu_norm,
        nu_norm=nu_norm,
        sigma=sigma,
        zeta=zeta,
        balance_mode=balance_mode,
        self_loops=self_loops,
    )
    graph = sample_csbm(params, seed)
    if out is None:
        write_graph_dump(graph, sys.stdout)
        return
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        with out.open("w") as handle:
            write_graph_dump(graph, handle)
    except OSError as e:
        raise OutputError(out, e.strerror or str(e)) from e
    click.echo(str(out))


@cli.command(help="Print the per-point means of a sweep summary file.")
@click.argument("summary_file", type=click.Path(path_type=Path))
def summary(summary_file: Path) -> None:
    for record in read_summary(summary_file):
        click.echo(
            f"{record.method.value}\t{record.grid_value:.6g}\t"
            f"{record.means['accuracy']:.4f}\t{record.means['perfect']:.3f}"
        )


@cli.command("list-experiments", help="List the experiment kinds.")
def list_experiments() -> None:
    for kind in ExperimentKind:
        click.echo(kind.value)


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line and map failures onto process exit codes."""
    try:
        exit_code = cli.main(
            args=list(argv) if argv is not None else None,
            prog_name=PROG_NAME,
            standalone_mode=False,
        )
    except click.ClickException as e:
        e.show()
        return EXIT_CONFIG_ERROR
    except click.Abort:
        logger.error("Aborted")
        return EXIT_CONFIG_ERROR
    except (CsbmLabException, ValidationError, OSError) as e:
        return catch_cli_error(e)
    return exit_code if isinstance(exit_code, int) else EXIT_OK


def main() -> None:
    sys.exit(cli_main())
