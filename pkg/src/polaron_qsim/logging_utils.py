import logging
import os
from typing import Any

import orjson
from rich.logging import RichHandler


def configure_logging(level: str | None = None) -> None:
    level = (level or os.getenv("PQSIM_LOG_LEVEL", "INFO")).upper()
    root = logging.getLogger("polaron_qsim")
    if any(isinstance(h, RichHandler) for h in root.handlers):
        root.setLevel(level)
        return
    handler = RichHandler(show_path=False, rich_tracebacks=True)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    root.addHandler(handler)
    root.setLevel(level)
    root.propagate = False


def log_compact(logger: logging.Logger, label: str, data: Any, max_len: int = 1000) -> None:
    try:
        if isinstance(data, (dict, list)):
            text = orjson.dumps(data, default=str, option=orjson.OPT_SERIALIZE_NUMPY).decode()
        else:
            text = str(data)
    except Exception:
        text = str(data)
    if len(text) > max_len:
        text = text[:max_len] + "...(truncated)"
    logger.info("%s: %s", label, text)
