"""Grid search for the model settings that best reproduce the ideal-run table."""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor

from ..sim.hamiltonian import LatticeSpec
from ..sim.ramsey import IDEAL_REFERENCE, RamseyConfig, measure_signal, table_residual
from ..state import SimState, Table

logger = logging.getLogger("polaron_qsim.nodes.calibration")

MATCH_TOL = 0.005


def occupation_patterns(lattice: LatticeSpec) -> list[tuple[int, ...]]:
    """Impurity filled plus exactly one bath fermion, each bath mode in turn."""
    out = []
    for mode in range(1, lattice.n_modes):
        bits = [0] * lattice.n_modes
        bits[0] = 1
        bits[mode] = 1
        out.append(tuple(bits))
    return out


def run(state: SimState) -> SimState:
    cfg = state.config
    grid = cfg.calibration
    lattice = cfg.model.lattice()
    times = tuple(row[0] for row in IDEAL_REFERENCE)

    candidates = []
    for j, u, coupling, sign, occ, n in itertools.product(
        grid.J, grid.U_imp, grid.couplings, grid.hopping_signs, occupation_patterns(lattice), grid.n_steps
    ):
        sites = range(lattice.bath_sites) if coupling == "local" else (0,)
        for site in sites:
            params = cfg.model.params().model_copy(
                update={"hopping_j": j, "u_imp": u, "impurity_coupling": coupling, "hopping_sign": sign, "impurity_site": site}
            )
            candidates.append(
                RamseyConfig(lattice=lattice, params=params, initial_occupation=occ, time_grid=times, n_steps=n)
            )

    def score(rc: RamseyConfig) -> float:
        return table_residual(measure_signal(rc))

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            residuals = list(pool.map(score, candidates))
    else:
        residuals = [score(rc) for rc in candidates]

    rows = []
    for rc, res in zip(candidates, residuals):
        p = rc.params
        rows.append(
            [p.hopping_j, p.u_imp, p.impurity_coupling, p.impurity_site, p.hopping_sign,
             "".join(map(str, rc.occupation())), rc.n_steps, res]
        )
    rows.sort(key=lambda r: r[-1])
    state.tables["calibration"] = Table.from_rows(
        ["J", "U_imp", "coupling", "impurity_site", "hopping_sign", "occupation", "n_steps", "max_residual"], rows
    )
    best = rows[0]
    state.summary.update(
        {
            "candidates": len(rows),
            "best": dict(zip(state.tables["calibration"].columns, best)),
            "best_max_residual": best[-1],
            "matches_reference": best[-1] <= MATCH_TOL,
        }
    )
    logger.info("calibration: best max residual %.4f over %d candidates", best[-1], len(rows))
    return state
