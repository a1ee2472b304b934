"""polaron-qsim command line: one subcommand per result set."""
from dotenv import load_dotenv

load_dotenv()

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table as RichTable

from .adapters.config_loader import load_run_config
from .config import EnvDefaults
from .errors import ConfigError, NumericalError
from .graph import PIPELINES, run_pipeline
from .logging_utils import configure_logging

logger = logging.getLogger("polaron_qsim.app")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2

HELP = {
    "benchmark": "ED vs exact circuit vs shot-mode Ramsey signal (t,P0,P1,S CSVs + summary)",
    "ramsey": "time-domain Ramsey signal in the t,P0,P1,S layout",
    "spectrum": "FFT spectral density and quasiparticle peak",
    "heatmap": "U_imp sweep: spectral heatmap, peak track, molecular-branch fit",
    "vqe": "SPSA-driven VQE against the ED ground energy",
    "trotter-scan": "Trotter error vs N_steps against the ED curve",
    "calibrate": "grid search for the settings that best match the ideal-run table",
    "mitigate": "noisy Ramsey point: unitary folding, ZNE, readout correction",
}


def build_parser() -> argparse.ArgumentParser:
    env = EnvDefaults.load()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON or TOML run config")
    common.add_argument("--seed", type=int, help="master seed (default 0)")
    common.add_argument("--shots", type=int, help="shots per time point (default 1000)")
    common.add_argument("--n-steps", type=int, dest="n_steps", help="Trotter steps (default 15)")
    common.add_argument("--threads", type=int, help=f"worker threads (default PQSIM_THREADS={env.threads})")
    common.add_argument("--out", help=f"output directory (default PQSIM_OUT_DIR={env.out_dir})")
    common.add_argument("--format", choices=["csv", "json"], help="table format (default csv)")
    common.add_argument("--J", type=float, dest="J", help="hopping J (default 1.0)")
    common.add_argument("--U-ff", type=float, dest="U_ff", help="bath onsite interaction (default 0)")
    common.add_argument("--U-imp", type=float, dest="U_imp", help="impurity-bath interaction (default 2.5)")
    common.add_argument("--L", type=int, dest="L", help="bath sites (default 2)")
    common.add_argument("--hopping-sign", type=int, choices=[-1, 1], dest="hopping_sign", help="sign of the hopping term (default -1)")
    common.add_argument("--coupling", choices=["uniform", "local"], help="impurity coupling (default uniform)")
    common.add_argument("--t-max", type=float, dest="t_max", help="last time point (default 4.0)")
    common.add_argument("--dt", type=float, help="time step (default 0.5)")
    common.add_argument("--log-level", dest="log_level", help=f"default PQSIM_LOG_LEVEL={env.log_level}")

    parser = argparse.ArgumentParser(prog="polaron-qsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in PIPELINES:
        sub.add_parser(name, parents=[common], help=HELP[name], description=HELP[name])
    return parser


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    out: Dict[str, Any] = {}

    def put(section: Optional[str], key: str, value: Any) -> None:
        if value is None:
            return
        target = out.setdefault(section, {}) if section else out
        target[key] = value

    put(None, "seed", args.seed)
    put(None, "threads", args.threads)
    put(None, "out_dir", args.out)
    put(None, "format", args.format)
    put("protocol", "shots", args.shots)
    put("protocol", "n_steps", args.n_steps)
    put("protocol", "t_max", args.t_max)
    put("protocol", "dt", args.dt)
    put("model", "J", args.J)
    put("model", "U_ff", args.U_ff)
    put("model", "U_imp", args.U_imp)
    put("model", "L", args.L)
    put("model", "hopping_sign", args.hopping_sign)
    put("model", "impurity_coupling", args.coupling)
    return out


def print_summary(console: Console, command: str, summary: Dict[str, Any], artifacts: List[Dict[str, Any]]) -> None:
    table = RichTable(title=f"polaron-qsim {command}")
    table.add_column("key")
    table.add_column("value")
    for key, value in summary.items():
        table.add_row(key, f"{value:.6g}" if isinstance(value, float) else str(value))
    console.print(table)
    for a in artifacts:
        console.print(f"[dim]{a['type']}[/dim] {a['uri']}")


def main(argv: Optional[List[str]] = None) -> int:
    console = Console(stderr=True)
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        console.print(f"[red]configuration error:[/red] {exc}")
        return EXIT_CONFIG
    configure_logging(args.log_level)
    try:
        cfg = load_run_config(args.config, overrides_from_args(args))
        state = run_pipeline(args.command, cfg)
    except (ConfigError, ValidationError) as exc:
        console.print(f"[red]configuration error:[/red] {exc}")
        return EXIT_CONFIG
    except (NumericalError, np.linalg.LinAlgError) as exc:
        console.print(f"[red]numerical failure:[/red] {exc}")
        return EXIT_NUMERICAL
    print_summary(console, args.command, state.summary, state.artifacts)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
