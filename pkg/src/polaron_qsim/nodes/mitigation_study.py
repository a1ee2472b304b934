"""Noisy Ramsey point at several fold scales, readout correction and ZNE."""
import logging

from ..sim.circuit import run_circuit
from ..sim.mitigation import (
    apply_readout_noise,
    correct_readout,
    fold,
    run_noisy,
    zne_extrapolate,
)
from ..sim.ramsey import ANCILLA, build_ramsey_circuit, point_seed
from ..state import SimState, Table

logger = logging.getLogger("polaron_qsim.nodes.mitigation_study")

READOUT_CHANNEL = 7


def run(state: SimState) -> SimState:
    cfg = state.config
    nb = cfg.noise
    rc = cfg.ramsey_config(n_steps=nb.n_steps)
    circuit = build_ramsey_circuit(rc, nb.t)
    p1 = run_circuit(circuit).probability_one(ANCILLA)
    ideal = 1.0 - 2.0 * p1
    confusion = nb.confusion()

    rows = []
    raw_points, corrected_points = [], []
    for scale in nb.scales:
        folded = fold(circuit, scale)
        noise = nb.noise_model(point_seed(cfg.seed, scale, 0))
        counts = run_noisy(folded.circuit, None, noise, nb.shots, ANCILLA, cfg.threads)
        read = apply_readout_noise(confusion, counts, point_seed(cfg.seed, scale, READOUT_CHANNEL))
        fixed = correct_readout(confusion, (read[0] / nb.shots, read[1] / nb.shots))
        s_gate = (counts[0] - counts[1]) / nb.shots
        s_read = (read[0] - read[1]) / nb.shots
        s_fixed = fixed.probabilities[0] - fixed.probabilities[1]
        rows.append([scale, len(folded.circuit), s_gate, s_read, s_fixed, fixed.clipped])
        raw_points.append((scale, s_read))
        corrected_points.append((scale, s_fixed))

    zne_raw = zne_extrapolate(raw_points, nb.zne_order, nb.zne_method)
    zne_fixed = zne_extrapolate(corrected_points, nb.zne_order, nb.zne_method)
    state.tables["mitigation"] = Table.from_rows(
        ["scale", "gates", "S_gate_noise", "S_readout_noise", "S_readout_corrected", "clipped"], rows
    )
    state.summary.update(
        {
            "t": nb.t,
            "n_steps": nb.n_steps,
            "S_ideal": ideal,
            "S_unmitigated": raw_points[0][1],
            "S_readout_corrected": corrected_points[0][1],
            "S_zne": zne_raw.zero_noise_estimate,
            "S_zne_readout_corrected": zne_fixed.zero_noise_estimate,
            "zne_method": zne_fixed.method,
            "zne_fit_residual": zne_fixed.fit_residual,
        }
    )
    logger.info("mitigation: ideal %.4f, raw %.4f, mitigated %.4f", ideal, raw_points[0][1], zne_fixed.zero_noise_estimate)
    return state
