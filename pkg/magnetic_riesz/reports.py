"""CSV tables and the per-run JSON manifest."""
import dataclasses
import json
import logging
import sys
import time
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from ._version import __version__
from .suites import BoundReport

log = logging.getLogger("processor")

MANIFEST_NAME = "manifest.json"


def ensure_dir(path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _plain(value: Any) -> Any:
    """JSON friendly copy of numpy scalars, arrays, enums and paths."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return _plain(value.item())
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, float) and not np.isfinite(value):
        return str(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    return value


def write_csv(path, rows: Iterable[Dict[str, Any]], columns: Sequence[str] = None) -> Path:
    """Write rows (dicts) as a CSV table; columns fixes the column order."""
    path = Path(path)
    ensure_dir(path.parent)
    frame = pd.DataFrame(list(rows), columns=list(columns) if columns else None)
    frame.to_csv(path, index=False)
    log.debug("Wrote %i rows to %s", len(frame), path)
    return path


def bound_report_rows(reports: Sequence[BoundReport]) -> List[Dict[str, Any]]:
    return [{
        "name": r.name,
        "parameters": json.dumps(_plain(r.parameters), sort_keys=True),
        "measured_constant": r.measured_constant,
        "samples": r.samples,
        "threshold": r.threshold,
        "passed": r.passed,
    } for r in reports]


@dataclasses.dataclass
class RunManifest:
    """What ran, with which settings, how long it took and what it wrote."""

    command: str
    arguments: Dict[str, Any]
    settings: Dict[str, Any]
    version: str = __version__
    started: str = dataclasses.field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    timings: Dict[str, float] = dataclasses.field(default_factory=dict)
    outputs: List[str] = dataclasses.field(default_factory=list)
    suites: Dict[str, bool] = dataclasses.field(default_factory=dict)
    errors: Dict[str, float] = dataclasses.field(default_factory=dict)
    warnings: List[str] = dataclasses.field(default_factory=list)
    _clock: float = dataclasses.field(default_factory=time.perf_counter, repr=False)

    def add_output(self, path) -> Path:
        self.outputs.append(str(path))
        return Path(path)

    def record_suite(self, name: str, reports: Sequence[BoundReport]):
        self.suites[name] = all(r.passed for r in reports)

    def record_error(self, name: str, value: Optional[float]):
        """Keep the largest error estimate seen under name."""
        if value is None:
            return
        self.errors[name] = max(float(value), self.errors.get(name, 0.0))

    def lap(self, name: str):
        self.timings[name] = time.perf_counter() - self._clock

    @property
    def passed(self) -> bool:
        return all(self.suites.values())

    def as_dict(self) -> Dict[str, Any]:
        payload = dataclasses.asdict(self)
        payload.pop("_clock")
        payload["python"] = sys.version.split()[0]
        payload["passed"] = self.passed
        return _plain(payload)

    def write(self, output_dir) -> Path:
        path = ensure_dir(output_dir) / MANIFEST_NAME
        self.timings.setdefault("total", time.perf_counter() - self._clock)
        path.write_text(json.dumps(self.as_dict(), indent=2, sort_keys=True), encoding="utf-8")
        return path
