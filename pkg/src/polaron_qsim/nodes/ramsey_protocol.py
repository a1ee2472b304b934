"""Time-domain Ramsey run: one signal in the t, P0, P1, S layout."""
import logging

from ..sim.ramsey import RamseySignal, build_ramsey_circuit, measure_signal
from ..state import SimState, Table

logger = logging.getLogger("polaron_qsim.nodes.ramsey_protocol")

SIGNAL_COLUMNS = ["t", "P0", "P1", "S"]


def signal_table(signal: RamseySignal) -> Table:
    if signal.im_s is None:
        return Table.from_rows(SIGNAL_COLUMNS, signal.rows())
    rows = [list(r) + [float(im)] for r, im in zip(signal.rows(), signal.im_s)]
    return Table.from_rows(SIGNAL_COLUMNS + ["ImS"], rows)


def run(state: SimState) -> SimState:
    cfg = state.config
    signal = measure_signal(cfg.ramsey_config(shots=cfg.protocol.shots))
    state.tables["ramsey"] = signal_table(signal)
    last = float(signal.times[-1])
    state.blobs["ramsey_circuit.json"] = build_ramsey_circuit(cfg.ramsey_config(), last).to_json()
    state.summary.update(
        {
            "mode": signal.provenance,
            "points": int(signal.times.size),
            "n_steps": cfg.protocol.n_steps,
            "U_imp": cfg.model.U_imp,
            "S_final": float(signal.re_s[-1]),
        }
    )
    logger.info("ramsey: %d points (%s)", signal.times.size, signal.provenance)
    return state
