"""On-disk run manifest: one JSON object per line in ``manifest.jsonl``.

Two line types are written by the single writer in the main process::

    {"type": "plan", "stage": "...", "digest": "...", "keys": ["...", ...]}
    {"type": "cell", "stage": "...", "digest": "...", "key": "...", "tables": {...}}

``digest`` identifies the configuration a line was produced with. A stage is
complete when every planned key has a cell line with the plan's digest;
re-running a stage with the same configuration skips those keys.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from loguru import logger

MANIFEST_NAME = "manifest.jsonl"


class ManifestError(ValueError):
    """Raised for a missing, corrupt or incomplete run manifest."""


@dataclass(frozen=True)
class CellRecord:
    stage: str
    key: str
    digest: str
    tables: dict[str, list[dict[str, Any]]] = field(default_factory=dict)


@dataclass
class ManifestState:
    """Parsed manifest contents; later lines win."""

    plans: dict[str, list[str]] = field(default_factory=dict)
    digests: dict[str, str] = field(default_factory=dict)
    cells: dict[str, CellRecord] = field(default_factory=dict)

    def completed(self, stage: str) -> dict[str, CellRecord]:
        digest = self.digests.get(stage)
        return {
            k: c for k, c in self.cells.items() if c.stage == stage and c.digest == digest
        }

    def missing(self, stage: str) -> list[str]:
        done = self.completed(stage)
        return [k for k in self.plans.get(stage, []) if k not in done]


class RunManifest:
    """Append-only manifest in ``output_dir``."""

    def __init__(self, output_dir: str | Path):
        self.output_dir = Path(output_dir)
        self.path = self.output_dir / MANIFEST_NAME

    def exists(self) -> bool:
        return self.path.is_file()

    def read(self) -> ManifestState:
        """Parse the manifest.

        Raises:
            ManifestError: If a line is not valid JSON or lacks required keys;
                the message carries the line number.
        """
        state = ManifestState()
        if not self.exists():
            return state
        with self.path.open(encoding="utf-8") as handle:
            for number, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                    kind = record["type"]
                    stage = record["stage"]
                    if kind == "plan":
                        state.plans[stage] = list(record["keys"])
                        state.digests[stage] = record["digest"]
                    elif kind == "cell":
                        key = record["key"]
                        state.cells[key] = CellRecord(
                            stage, key, record["digest"], record.get("tables", {})
                        )
                    else:
                        raise KeyError(f"unknown line type {kind!r}")
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise ManifestError(f"{self.path}:{number}: corrupt manifest line ({exc})") from exc
        return state

    def _append(self, record: dict[str, Any]) -> None:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(record, sort_keys=True) + "\n")
            handle.flush()

    def write_plan(self, stage: str, digest: str, keys: list[str]) -> None:
        self._append({"type": "plan", "stage": stage, "digest": digest, "keys": keys})

    def write_cell(self, record: CellRecord) -> None:
        self._append(
            {
                "type": "cell",
                "stage": record.stage,
                "digest": record.digest,
                "key": record.key,
                "tables": record.tables,
            }
        )

    def require_complete(self) -> ManifestState:
        """Return the state of a finished run.

        Raises:
            ManifestError: If no manifest exists, nothing was planned, or a
                planned cell is missing.
        """
        if not self.exists():
            raise ManifestError(f"No run manifest in {self.output_dir}; run a stage first.")
        state = self.read()
        if not state.plans:
            raise ManifestError(f"{self.path} plans no stage.")
        for stage in state.plans:
            missing = state.missing(stage)
            if missing:
                raise ManifestError(
                    f"Stage '{stage}' is incomplete: {len(missing)} cell(s) missing, "
                    f"first {missing[0]!r}."
                )
        logger.debug(f"Manifest complete: {len(state.cells)} cells over {len(state.plans)} stages")
        return state
