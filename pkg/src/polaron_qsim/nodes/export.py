"""Final node: the only place that writes to disk."""
import logging
from pathlib import Path

from ..adapters.exporters import summary_to_json, table_to_csv, table_to_json, write_bytes
from ..logging_utils import log_compact
from ..state import SimState

logger = logging.getLogger("polaron_qsim.nodes.export")


def run(state: SimState, out_dir: str | None = None) -> SimState:
    cfg = state.config
    root = Path(out_dir or cfg.out_dir)
    for name, table in state.tables.items():
        if cfg.format == "json":
            uri = write_bytes(root / f"{name}.json", table_to_json(table))
            state.artifacts.append({"type": "table_json", "uri": uri})
        else:
            uri = write_bytes(root / f"{name}.csv", table_to_csv(table))
            state.artifacts.append({"type": "table_csv", "uri": uri})
    for name, blob in state.blobs.items():
        state.artifacts.append({"type": "blob", "uri": write_bytes(root / name, blob)})
    uri = write_bytes(root / f"{state.command or 'run'}_summary.json", summary_to_json(state.summary))
    state.artifacts.append({"type": "summary_json", "uri": uri})
    log_compact(logger, "artifacts", state.artifacts)
    return state
