"""Serialisation of profiles, limit estimates and identity reports.

Every JSON document goes through ``dumps`` (sorted keys, two-space indent,
infinities as the strings ``"Infinity"``/``"-Infinity"``) so a fixed run
configuration always produces the same bytes on stdout.
"""

from __future__ import annotations

import csv
import io
import json
import math
from enum import Enum
from typing import Any, Iterable, Mapping, Sequence

from pydantic import BaseModel

from lelong.analysis import ConditionCReport, LimitEstimate, NuProfile
from lelong.error_handling import InvalidInputError
from lelong.identity_suite import IdentityReport

PROFILE_HEADER = ("r", "nu", "engine", "err_bound")
REPORT_HEADER = ("identity_id", "verdict", "residual", "tolerance", "input_hash")

PROFILE_FORMATS = ("csv", "json", "svg-data")
REPORT_FORMATS = ("json", "csv")


def _jsonable(value: Any) -> Any:
    """Recursively convert to plain JSON types."""
    if isinstance(value, BaseModel):
        return _jsonable(value.model_dump())
    if isinstance(value, Enum):
        return _jsonable(value.value)
    if isinstance(value, bool) or value is None or isinstance(value, (str, int)):
        return value
    if isinstance(value, float):
        if math.isnan(value):
            return "NaN"
        if math.isinf(value):
            return "Infinity" if value > 0 else "-Infinity"
        return value
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item"):  # numpy scalars
        return _jsonable(value.item())
    raise TypeError(f"cannot serialise {type(value).__name__}")


def dumps(payload: Any) -> str:
    """Deterministic JSON text."""
    return json.dumps(_jsonable(payload), sort_keys=True, indent=2, allow_nan=False)


def _num(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def _csv(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def classical_factor(bidim: int, classical: bool) -> float:
    """Divisor turning dd^c = (i/π)∂∂̄ masses into the (i/2π)∂∂̄ convention."""
    return float(2**bidim) if classical else 1.0


def format_profile(profile: NuProfile, fmt: str = "csv", classical: bool = False) -> str:
    """Render a profile as CSV, JSON or plain (x, y) series for plotting."""
    factor = classical_factor(profile.bidim, classical)
    values = [v / factor for v in profile.values]
    errors = [e / factor for e in profile.err_bounds]

    if fmt == "csv":
        rows = (
            (_num(r), _num(v), engine, _num(e))
            for r, v, engine, e in zip(profile.grid, values, profile.engines, errors)
        )
        return _csv(PROFILE_HEADER, rows)
    if fmt == "json":
        return dumps(
            {
                "grid": profile.grid,
                "values": values,
                "engines": profile.engines,
                "err_bounds": errors,
                "quantity": profile.quantity,
                "classical": classical,
            }
        )
    if fmt == "svg-data":
        label = profile.quantity.value.replace("-", "_")
        lines = ["# x: r (log scale)", f"# y: {label} (linear scale)"]
        lines += [f"{_num(r)} {_num(v)}" for r, v in zip(profile.grid, values)]
        return "\n".join(lines) + "\n"
    raise InvalidInputError(f"unknown profile format {fmt!r}; choose one of {', '.join(PROFILE_FORMATS)}")


def format_limit(estimate: LimitEstimate, bidim: int = 1, classical: bool = False) -> str:
    payload = estimate.model_dump()
    factor = classical_factor(bidim, classical)
    if classical and payload["value"] is not None:
        payload["value"] = payload["value"] / factor
    payload["classical"] = classical
    return dumps(payload)


def format_condition(report: ConditionCReport) -> str:
    return dumps(report)


def report_rows(reports: Sequence[IdentityReport]) -> list[tuple[str, ...]]:
    return [
        (r.identity_id, r.verdict.value, _num(r.residual), _num(r.tolerance), r.input_hash)
        for r in reports
    ]


def format_reports(reports: Sequence[IdentityReport], fmt: str = "json") -> str:
    """Render identity reports as a JSON array or a one-line-per-report CSV."""
    if fmt == "json":
        return dumps([r.model_dump() for r in reports])
    if fmt == "csv":
        return _csv(REPORT_HEADER, report_rows(reports))
    raise InvalidInputError(f"unknown report format {fmt!r}; choose one of {', '.join(REPORT_FORMATS)}")
