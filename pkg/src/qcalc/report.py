"""Run configuration and deterministic machine-readable reports.

Reports serialize to canonical JSON: UTF-8, lexicographically sorted
keys, floats rendered with 17 significant digits (lossless round-trip),
and a trailing newline, so identical runs yield byte-identical files.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from . import __version__
from .errors import ConfigError

DEFAULT_SEED = 42
DEFAULT_TOL = 1e-9
DEFAULT_FAIL_THRESHOLD = 1e-3
DEFAULT_DIMS = 2


@dataclass(frozen=True)
class RunConfig:
    """Knobs shared by every command."""

    seed: int = DEFAULT_SEED
    tol: float = DEFAULT_TOL
    fail_threshold: float = DEFAULT_FAIL_THRESHOLD
    dims: int = DEFAULT_DIMS
    output_path: str | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.tol < self.fail_threshold:
            raise ConfigError(
                f"need 0 < tol < fail_threshold, got tol={self.tol}, "
                f"fail_threshold={self.fail_threshold}"
            )
        if self.dims < 2:
            raise ConfigError("dims must be at least 2")

    def as_dict(self) -> dict:
        return {
            "seed": int(self.seed),
            "tol": float(self.tol),
            "fail_threshold": float(self.fail_threshold),
            "dims": int(self.dims),
            "output_path": self.output_path,
        }


@dataclass
class Report:
    """Results of one command run, with outcome tallies."""

    command: str
    config: RunConfig
    results: list = field(default_factory=list)
    version: str = __version__

    @property
    def summary(self) -> dict[str, int]:
        tally = {"passed": 0, "failed": 0, "indeterminate": 0}
        for record in self.results:
            outcome = record.get("outcome", "pass")
            key = {"pass": "passed", "fail": "failed"}.get(outcome, "indeterminate")
            tally[key] += 1
        return tally

    def as_dict(self) -> dict:
        return {
            "version": self.version,
            "command": self.command,
            "config": self.config.as_dict(),
            "results": self.results,
            "summary": self.summary,
        }

    @property
    def clean(self) -> bool:
        tally = self.summary
        return tally["failed"] == 0 and tally["indeterminate"] == 0


def _format_float(value: float) -> str:
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    return format(value, ".17g")


def canonical_json(obj) -> str:
    """Render with sorted keys and fixed float formatting."""
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return repr(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        bad = [k for k in obj if not isinstance(k, str)]
        if bad:
            raise ConfigError(f"non-string report keys: {bad!r}")
        inner = ",".join(
            f"{json.dumps(k, ensure_ascii=False)}:{canonical_json(obj[k])}"
            for k in sorted(obj)
        )
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(canonical_json(v) for v in obj) + "]"
    raise ConfigError(f"cannot serialize value of type {type(obj).__name__}")


def render_report(report: Report) -> str:
    return canonical_json(report.as_dict()) + "\n"


def emit_report(report: Report, path: str) -> None:
    """Write the canonical JSON file; I/O errors propagate to the caller."""
    data = render_report(report).encode("utf-8")
    with open(path, "wb") as handle:
        handle.write(data)
