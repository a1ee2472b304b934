"""U_imp sweep: spectral heatmap, peak track and the molecular-branch fit."""
import logging

from ..errors import NumericalError
from ..sim.ramsey import uniform_grid
from ..sim.spectroscopy import linear_branch_fit, sweep_phase_diagram
from ..state import SimState, Table

logger = logging.getLogger("polaron_qsim.nodes.heatmap")


def _matrix_table(u_values, frequencies, matrix) -> Table:
    columns = ["U_imp"] + [f"{w:.6f}" for w in frequencies]
    rows = [[float(u)] + row.tolist() for u, row in zip(u_values, matrix)]
    return Table.from_rows(columns, rows)


def run(state: SimState) -> SimState:
    cfg = state.config
    sp = cfg.spectrum
    base = cfg.ramsey_config(times=uniform_grid(sp.t_max, sp.dt), measure_imaginary=sp.source == "circuit")
    grid = sweep_phase_diagram(
        base,
        sp.u_grid(),
        source=sp.source,
        window=sp.window,
        zero_pad_factor=sp.zero_pad_factor,
        search_range=sp.search_range(),
        threads=cfg.threads,
    )
    state.tables["heatmap"] = _matrix_table(grid.u_values, grid.frequencies, grid.normalized())
    state.tables["heatmap_raw"] = _matrix_table(grid.u_values, grid.frequencies, grid.amplitude_matrix)
    state.tables["peak_track"] = Table.from_rows(
        ["U_imp", "E_peak", "amplitude"],
        zip(grid.u_values.tolist(), grid.peak_track.tolist(), grid.peak_amplitudes.tolist()),
    )
    try:
        fit = linear_branch_fit(grid, sp.u_min)
        state.summary["branch_fit"] = {"u_min": sp.u_min, **fit._asdict()}
    except NumericalError as exc:
        logger.warning("branch fit skipped: %s", exc)
        state.summary["branch_fit"] = None
    state.summary.update({"rows": int(grid.u_values.size), "source": sp.source})
    return state
