"""VQE ground-state search with SPSA against the ED reference."""
import logging

from ..sim.ramsey import system_hamiltonians
from ..sim.vqe import AnsatzSpec, spsa_minimize
from ..state import SimState, Table

logger = logging.getLogger("polaron_qsim.nodes.vqe_run")


def run(state: SimState) -> SimState:
    cfg = state.config
    rc = cfg.ramsey_config()
    h, _ = system_hamiltonians(rc)
    ansatz = AnsatzSpec(
        n_qubits=h.n_qubits,
        layers=cfg.vqe.layers,
        entangler=cfg.vqe.entangler,
        occupation=rc.occupation() if cfg.vqe.use_occupation else None,
    )
    result = spsa_minimize(h, ansatz, cfg.vqe.spsa(cfg.seed))
    state.tables["vqe_trace"] = Table.from_rows(["iteration", "energy", "best_energy"], result.rows())
    state.summary.update(
        {
            "best_energy": result.best_energy,
            "reference_energy": result.reference_energy,
            "abs_error": result.error,
            "evaluations": result.evaluations,
            "parameters": ansatz.parameter_count,
            "shots": cfg.vqe.shots,
        }
    )
    return state
