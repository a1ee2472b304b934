"""ED vs exact circuit vs finite-shot circuit on one time grid."""
import logging

import numpy as np

from ..errors import ConfigError
from ..sim.ed_oracle import exact_signal
from ..sim.ramsey import HARDWARE_REFERENCE, fidelity_r2, measure_signal, table_residual
from ..state import SimState
from .ramsey_protocol import signal_table

logger = logging.getLogger("polaron_qsim.nodes.benchmark")

DEFAULT_BENCHMARK_SHOTS = 1000


def run(state: SimState) -> SimState:
    cfg = state.config
    exact_cfg = cfg.ramsey_config()
    ed = exact_signal(exact_cfg)
    circuit = measure_signal(exact_cfg)
    shots = measure_signal(cfg.ramsey_config(shots=cfg.protocol.shots or DEFAULT_BENCHMARK_SHOTS))

    state.tables["benchmark_ed"] = signal_table(ed)
    state.tables["benchmark_circuit"] = signal_table(circuit)
    state.tables["benchmark_shots"] = signal_table(shots)

    try:
        ref_residual = table_residual(circuit)
        hw_residual = table_residual(shots, HARDWARE_REFERENCE)
    except ConfigError:
        ref_residual = hw_residual = None
    state.summary.update(
        {
            "n_qubits": exact_cfg.n_qubits,
            "n_steps": exact_cfg.n_steps,
            "shots": shots.shots,
            "sup_norm_circuit_vs_ed": float(np.max(np.abs(circuit.re_s - ed.re_s))),
            "sup_norm_shots_vs_ed": float(np.max(np.abs(shots.re_s - ed.re_s))),
            "r2_circuit": fidelity_r2(circuit, ed),
            "r2_shots": fidelity_r2(shots, ed),
            "reference_max_residual": ref_residual,
            "hardware_max_residual": hw_residual,
        }
    )
    logger.info(
        "benchmark: sup|circuit-ED|=%.3e, R2(shots)=%.4f",
        state.summary["sup_norm_circuit_vs_ed"],
        state.summary["r2_shots"],
    )
    return state
