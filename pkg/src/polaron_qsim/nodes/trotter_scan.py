"""Trotter error against the ED curve for a set of step counts."""
import logging

import numpy as np

from ..sim.circuit import lower_to_native
from ..sim.ed_oracle import exact_signal
from ..sim.ramsey import build_ramsey_circuit, circuit_signal_for, system_hamiltonians, uniform_grid
from ..state import SimState, Table

logger = logging.getLogger("polaron_qsim.nodes.trotter_scan")

EXACT_TOL = 1e-10


def error_slope(steps, errors) -> float | None:
    """Log-log slope of error against step count; None when fewer than two usable points."""
    x = np.asarray(steps, dtype=float)
    y = np.asarray(errors, dtype=float)
    keep = y > EXACT_TOL
    if keep.sum() < 2:
        return None
    slope, _ = np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)
    return float(slope)


def run(state: SimState) -> SimState:
    scan = state.config.trotter_scan
    cfg = state.config.with_model(J=scan.J, U_imp=scan.U_imp, impurity_coupling=scan.impurity_coupling)
    rc = cfg.ramsey_config(times=uniform_grid(scan.t_max, scan.dt))
    ed = exact_signal(rc)
    h, h0 = system_hamiltonians(rc)

    rows = []
    errors = {}
    for n in sorted(set(scan.steps)):
        signal = circuit_signal_for(h, h0, rc.occupation(), rc.time_grid, n_steps=n, threads=cfg.threads, ordering=rc.ordering)
        err = float(np.max(np.abs(signal.re_s - ed.re_s)))
        native = lower_to_native(build_ramsey_circuit(rc.model_copy(update={"n_steps": n}), scan.t_max))
        rows.append([n, err, len(native), native.count("CNOT"), native.two_qubit_count()])
        errors[n] = err
        logger.info("trotter scan: n_steps=%d sup error %.3e", n, err)

    fit_steps = [n for n in errors if n >= scan.slope_min_steps]
    slope = error_slope(fit_steps, [errors[n] for n in fit_steps])
    state.tables["trotter_scan"] = Table.from_rows(
        ["n_steps", "sup_error", "native_gates", "cnots", "two_qubit_gates"], rows
    )
    state.summary.update(
        {
            "J": cfg.model.J,
            "U_imp": cfg.model.U_imp,
            "impurity_coupling": cfg.model.impurity_coupling,
            "slope": slope,
            "exact_product_formula": max(errors.values()) <= EXACT_TOL,
            "ratio_1_vs_15": errors[1] / errors[15] if 1 in errors and errors.get(15, 0) > EXACT_TOL else None,
        }
    )
    return state
