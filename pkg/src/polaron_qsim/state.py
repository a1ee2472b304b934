from typing import Any, Dict, List, Sequence

from pydantic import BaseModel, ConfigDict, Field

from .config import RunConfig


class Table(BaseModel):
    """Rectangular result set; ``float_format`` applies to every float cell on export."""

    columns: List[str]
    rows: List[List[Any]] = Field(default_factory=list)
    float_format: str = "{:.6f}"

    @classmethod
    def from_rows(cls, columns: Sequence[str], rows: Sequence[Sequence[Any]], float_format: str = "{:.6f}") -> "Table":
        return cls(columns=list(columns), rows=[list(r) for r in rows], float_format=float_format)


class SimState(BaseModel):
    """Pipeline state handed from node to node; nothing touches disk before the export node."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    command: str = Field("", description="CLI subcommand that owns this run")
    config: RunConfig = Field(default_factory=RunConfig)

    # named tables, written by compute nodes and read by the export node
    tables: Dict[str, Table] = Field(default_factory=dict)

    # scalar results, exported as <command>_summary.json and echoed to the console
    summary: Dict[str, Any] = Field(default_factory=dict)

    # circuits or other raw blobs to write verbatim: name -> bytes
    blobs: Dict[str, bytes] = Field(default_factory=dict)

    artifacts: List[Dict[str, Any]] = Field(default_factory=list, description="Files written by the export node")
