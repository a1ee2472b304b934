from typing import Callable, Dict, List

from .config import RunConfig
from .nodes import (
    benchmark,
    calibration,
    export,
    heatmap,
    mitigation_study,
    ramsey_protocol,
    spectrum,
    trotter_scan,
    vqe_run,
)
from .state import SimState

Node = Callable[[SimState], SimState]

PIPELINES: Dict[str, List[Node]] = {
    "benchmark": [benchmark.run],
    "ramsey": [ramsey_protocol.run],
    "spectrum": [spectrum.run],
    "heatmap": [heatmap.run],
    "vqe": [vqe_run.run],
    "trotter-scan": [trotter_scan.run],
    "calibrate": [calibration.run],
    "mitigate": [mitigation_study.run],
}


def run_pipeline(command: str, config: RunConfig, write: bool = True) -> SimState:
    """Run the compute nodes of ``command`` and, when ``write``, the export node last."""
    if command not in PIPELINES:
        raise KeyError(f"unknown command {command!r}")
    state = SimState(command=command, config=config)
    for node in PIPELINES[command]:
        state = node(state)
    if write:
        state = export.run(state)
    return state
