#! /usr/bin/env python3
"""
Command line front end: single runs, protocol x n_t x seed sweeps and the closed-form model
Date: Mar 15, 2025
"""
# Standard Library Imports
import argparse
import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from itertools import product
from pathlib import Path
from typing import Literal

# Third Party Imports
from pydantic import BaseModel, ConfigDict, Field

# Local Imports
from bbpsim import __version__
from bbpsim.analytics.models import MODEL_COLUMNS, ModelGrid, evaluate_grid
from bbpsim.analytics.report import MetricsReport, failed_cell, format_cell, reduce_trace, summary_table, write_report
from bbpsim.errors import BbpSimError, ConfigError, ModelParameterError
from bbpsim.logger import banner, setup_logging
from bbpsim.netsim.engine import Simulation
from bbpsim.netsim.scenario import Scenario, parse_model, read_json
from bbpsim.settings import Settings, load_settings

logger = logging.getLogger(__name__)

BUNDLED = {"run": "default_run.json", "validate-config": "default_run.json", "sweep": "protocol_sweep.json",
           "model": "model_grid.json"}


class RunConfig(BaseModel):
    """
    A scenario plus where to write and, for sweeps, the axes to cross. An axis left
    out takes the scenario's own value.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    scenario: Scenario = Field(default_factory=Scenario)
    out_dir: str = "out"
    protocols: list[Literal["bbp", "lbp", "bhp", "cbp"]] | None = Field(None, min_length=1)
    n_t_values: list[int] | None = Field(None, min_length=1)
    seeds: list[int] | None = Field(None, min_length=1)

    def cells(self) -> list[tuple[str, int, int]]:
        return list(product(self.protocols or [self.scenario.protocol],
                            self.n_t_values or [self.scenario.n_t],
                            self.seeds or [self.scenario.seed]))


def bundled_config(name: str) -> Path:
    return Path(str(resources.files("bbpsim") / "configs" / name))


def load_run_config(path: str | Path, seed: int | None = None) -> RunConfig:
    """
    Parse a run config and apply the --seed override
    :param path: JSON file
    :param seed: Seed override for the scenario and every sweep cell
    :return: RunConfig
    """
    config = parse_model(RunConfig, read_json(path), str(path))
    if seed is not None:
        scenario = config.scenario.model_copy(update={"seed": seed})
        config = config.model_copy(update={"scenario": scenario, "seeds": None})
    return config


def write_effective_config(config: BaseModel, out_dir: Path) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "effective_config.json"
    path.write_text(json.dumps(config.model_dump(mode="json"), indent=2, sort_keys=True) + "\n")
    return path


def run_cell(scenario: Scenario, cell_dir: Path) -> MetricsReport:
    """
    Run one scenario, write its trace CSVs and reduce it
    :param scenario: Run parameters
    :param cell_dir: Directory for blocks.csv and friends
    :return: MetricsReport
    """
    simulation = Simulation(scenario)
    trace = simulation.run()
    trace.write(cell_dir)
    return reduce_trace(trace, scenario)


def _sweep_cell(scenario: Scenario, cell_dir: Path) -> MetricsReport:
    try:
        return run_cell(scenario, cell_dir)
    except BbpSimError as exc:
        logger.error("cell %s n_t=%d seed=%d failed: %s", scenario.protocol, scenario.n_t, scenario.seed, exc)
        return failed_cell(scenario.protocol, scenario.n_t, scenario.seed, str(exc))


def _init_worker(level: str) -> None:
    setup_logging(level)


def cmd_run(args: argparse.Namespace, settings: Settings) -> int:
    config = load_run_config(args.config, args.seed)
    out_dir = Path(args.out or config.out_dir)
    write_effective_config(config, out_dir)
    report = run_cell(config.scenario, out_dir)
    write_report([report], out_dir / "report.csv")
    print(summary_table([report]))
    return 0


def cmd_sweep(args: argparse.Namespace, settings: Settings) -> int:
    config = load_run_config(args.config, args.seed)
    cells = config.cells()
    if len(cells) > settings.max_cells:
        raise ConfigError(f"{args.config}: sweep has {len(cells)} cells, more than BBPSIM_MAX_CELLS={settings.max_cells}")
    out_dir = Path(args.out or config.out_dir)
    write_effective_config(config, out_dir)

    scenarios = [config.scenario.model_copy(update={"protocol": p, "n_t": n_t, "seed": seed})
                 for p, n_t, seed in cells]
    cell_dirs = [out_dir / f"{p}_n{n_t}_s{seed}" for p, n_t, seed in cells]
    logger.info("sweeping %d cells with %d worker(s)", len(cells), settings.workers)
    if settings.workers > 1 and len(cells) > 1:
        level = logging.getLogger("bbpsim").getEffectiveLevel()
        with ProcessPoolExecutor(settings.workers, initializer=_init_worker,
                                 initargs=(logging.getLevelName(level),)) as pool:
            reports = list(pool.map(_sweep_cell, scenarios, cell_dirs))
    else:
        reports = [_sweep_cell(s, d) for s, d in zip(scenarios, cell_dirs)]

    write_report(reports, out_dir / "report.csv")
    print(summary_table(reports))
    failed = sum(1 for r in reports if r.error)
    if failed:
        logger.error("%d of %d cells failed", failed, len(reports))
        return 2
    return 0


def cmd_model(args: argparse.Namespace, settings: Settings) -> int:
    grid = parse_model(ModelGrid, read_json(args.config), str(args.config))
    rows = evaluate_grid(grid)
    formatted = [[format_cell(row[c]) for c in MODEL_COLUMNS] for row in rows]
    print(banner("Closed-form model"))
    print(",".join(MODEL_COLUMNS))
    for row in formatted:
        print(",".join(row))
    if args.out:
        out_dir = Path(args.out)
        write_effective_config(grid, out_dir)
        with (out_dir / "model.csv").open("w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(MODEL_COLUMNS)
            writer.writerows(formatted)
    return 0


def cmd_validate_config(args: argparse.Namespace, settings: Settings) -> int:
    config = load_run_config(args.config, args.seed)
    print(json.dumps(config.model_dump(mode="json"), indent=2, sort_keys=True))
    logger.info("%s is valid: %d cell(s)", args.config, len(config.cells()))
    return 0


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "model": cmd_model,
    "validate-config": cmd_validate_config,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON config, the bundled one for the command by default")
    common.add_argument("--out", help="Output directory (overrides out_dir from the config)")
    common.add_argument("--seed", type=int, help="Override the scenario seed")
    common.add_argument("--quiet", action="store_true", help="Only log warnings and errors")

    parser = argparse.ArgumentParser(prog="bbpsim", description="Block propagation simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("run", parents=[common], help="Run one scenario")
    commands.add_parser("sweep", parents=[common], help="Run the protocol x n_t x seed product")
    commands.add_parser("model", parents=[common], help="Evaluate the closed-form model on a grid")
    commands.add_parser("validate-config", parents=[common], help="Check a run config and echo it")
    return parser


def main(argv: list[str] | None = None) -> int:
    """
    Entry point for ``bbpsim`` and ``python -m bbpsim``
    :param argv: Arguments without the program name, sys.argv by default
    :return: Exit status: 0 success, 1 config error, 2 runtime error
    """
    args = build_parser().parse_args(argv)
    settings = load_settings()
    setup_logging("WARNING" if args.quiet else settings.log_level)
    if args.config is None:
        args.config = bundled_config(BUNDLED[args.command])

    try:
        return COMMANDS[args.command](args, settings)
    except (ConfigError, ModelParameterError) as exc:
        logger.error("%s", exc)
        logger.debug("config failure", exc_info=True)
        return 1
    except BbpSimError as exc:
        logger.error("%s", exc)
        logger.debug("run failure", exc_info=True)
        return 2
    except OSError as exc:
        logger.error("cannot write output: %s", exc)
        return 2
