"""Metric reports: canonical JSON persistence, merging, and table rendering.

A report cell is always one of three states: a value with its counts,
"undefined" (zero denominator), or "not evaluated" (inputs absent). The
states are never conflated with numeric 0.0.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .errors import SchemaError, SchemaMismatchError
from .metrics import AggregateStat, aggregate_runs

REPORT_SCHEMA_VERSION = 1

OK = "ok"
UNDEFINED = "undefined"
NOT_EVALUATED = "not_evaluated"

# Column order of the rendered table.
METRIC_COLUMNS = (
    "jga",
    "coref_jga",
    "nohf_orig",
    "nohf_swap",
    "cjga_named_entity",
    "cjga_paraphrase",
    "cjga_disfluency",
)

METRIC_LABELS = {
    "jga": "JGA",
    "coref_jga": "Coref JGA",
    "nohf_orig": "NoHF Orig",
    "nohf_swap": "NoHF Swap",
    "cjga_named_entity": "NEI cJGA",
    "cjga_paraphrase": "PI cJGA",
    "cjga_disfluency": "SDI cJGA",
}


@dataclass(frozen=True)
class MetricValue:
    """One metric outcome: a fraction with counts, undefined, or absent."""

    status: str
    value: Optional[float] = None
    numerator: Optional[int] = None
    denominator: Optional[int] = None

    def __post_init__(self):
        if self.status not in (OK, UNDEFINED, NOT_EVALUATED):
            raise SchemaError(f"unknown metric status {self.status!r}")
        if self.status == OK:
            if self.value is None or not 0.0 <= self.value <= 1.0:
                raise SchemaError(f"metric fraction out of range: {self.value!r}")
        elif self.value is not None:
            raise SchemaError(f"{self.status} metrics carry no value")

    @classmethod
    def ok(cls, value: float, numerator: int, denominator: int) -> "MetricValue":
        return cls(OK, value=value, numerator=numerator, denominator=denominator)

    @classmethod
    def undefined(cls, numerator: int = 0, denominator: int = 0) -> "MetricValue":
        return cls(UNDEFINED, numerator=numerator, denominator=denominator)

    @classmethod
    def not_evaluated(cls) -> "MetricValue":
        return cls(NOT_EVALUATED)

    def to_dict(self) -> dict:
        out: dict = {"status": self.status}
        if self.status != NOT_EVALUATED:
            out["numerator"] = self.numerator
            out["denominator"] = self.denominator
        if self.status == OK:
            out["value"] = self.value
        return out

    @classmethod
    def from_dict(cls, raw: Mapping) -> "MetricValue":
        return cls(
            status=raw.get("status", NOT_EVALUATED),
            value=raw.get("value"),
            numerator=raw.get("numerator"),
            denominator=raw.get("denominator"),
        )


@dataclass(frozen=True)
class RunReport:
    """All metric outcomes of one (model, seed) evaluation run."""

    model_name: str
    seed_label: str
    config_hash: str
    metrics: Mapping[str, MetricValue] = field(default_factory=dict)
    schema_version: int = REPORT_SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "model_name": self.model_name,
            "seed_label": self.seed_label,
            "config_hash": self.config_hash,
            "metrics": {name: value.to_dict() for name, value in sorted(self.metrics.items())},
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "RunReport":
        version = raw.get("schema_version")
        if version != REPORT_SCHEMA_VERSION:
            raise SchemaMismatchError(
                f"report schema version {version!r} != {REPORT_SCHEMA_VERSION}"
            )
        return cls(
            model_name=raw.get("model_name", "model"),
            seed_label=raw.get("seed_label", "run0"),
            config_hash=raw.get("config_hash", ""),
            metrics={
                name: MetricValue.from_dict(value)
                for name, value in raw.get("metrics", {}).items()
            },
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(canonical_json(self.to_dict()), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "RunReport":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"report file {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)


@dataclass(frozen=True)
class AggregateCell:
    """One table cell aggregated over runs of a model."""

    status: str
    stat: Optional[AggregateStat] = None

    def rendered(self) -> str:
        if self.status == NOT_EVALUATED:
            return "n/a"
        if self.status == UNDEFINED or self.stat is None or self.stat.median is None:
            return "undef."
        cell = f"{self.stat.median * 100:.1f} ± {self.stat.std * 100:.1f}"
        if self.stat.n_excluded:
            cell += f" ({self.stat.n_excluded} undef.)"
        return cell

    def to_dict(self) -> dict:
        out: dict = {"status": self.status}
        if self.stat is not None:
            out.update(
                {
                    "median": self.stat.median,
                    "std": self.stat.std,
                    "n_used": self.stat.n_used,
                    "n_excluded": self.stat.n_excluded,
                }
            )
        return out


@dataclass(frozen=True)
class CombinedReport:
    """Per-run reports grouped by model, with per-metric aggregates."""

    runs: tuple[RunReport, ...]

    def models(self) -> list[str]:
        seen: list[str] = []
        for run in self.runs:
            if run.model_name not in seen:
                seen.append(run.model_name)
        return seen

    def runs_of(self, model_name: str) -> list[RunReport]:
        return [run for run in self.runs if run.model_name == model_name]

    def aggregate(self, model_name: str, metric: str) -> AggregateCell:
        values: list[Optional[float]] = []
        any_present = False
        for run in self.runs_of(model_name):
            cell = run.metrics.get(metric, MetricValue.not_evaluated())
            if cell.status == NOT_EVALUATED:
                continue
            any_present = True
            values.append(cell.value if cell.status == OK else None)
        if not any_present:
            return AggregateCell(NOT_EVALUATED)
        stat = aggregate_runs(values)
        if stat.n_used == 0:
            return AggregateCell(UNDEFINED, stat)
        return AggregateCell(OK, stat)

    def to_dict(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "models": {
                model: {
                    "n_runs": len(self.runs_of(model)),
                    "aggregate": {
                        metric: self.aggregate(model, metric).to_dict()
                        for metric in METRIC_COLUMNS
                    },
                }
                for model in self.models()
            },
            "runs": [run.to_dict() for run in self.runs],
        }


def merge_reports(reports: Sequence[RunReport]) -> CombinedReport:
    """Merge per-run reports; runs are grouped by model name."""
    if not reports:
        raise SchemaError("at least one report is required")
    ordered = sorted(reports, key=lambda r: (r.model_name, r.seed_label))
    return CombinedReport(tuple(ordered))


def render_table(combined: CombinedReport) -> str:
    """Fixed-width table, one row per model: ``median ± std`` in percent."""
    header = ["Model"] + [METRIC_LABELS[m] for m in METRIC_COLUMNS]
    rows = [header]
    for model in combined.models():
        row = [model]
        for metric in METRIC_COLUMNS:
            row.append(combined.aggregate(model, metric).rendered())
        rows.append(row)
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = []
    for index, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
        if index == 0:
            lines.append("  ".join("-" * width for width in widths))
    return "\n".join(lines)


def canonical_json(data) -> str:
    """Stable serialization: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def config_hash(data) -> str:
    """Content hash of a configuration mapping (reports embed this, never timestamps)."""
    compact = json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(compact.encode("utf-8")).hexdigest()
