"""State schema for the lelong run pipeline."""

from __future__ import annotations

import operator
from typing import Annotated, Any, Dict, List

from typing_extensions import TypedDict


class GridOptions(TypedDict, total=False):
    """Radius grid of a profile."""

    r_min: float
    r_max: float
    points: int


class McOptions(TypedDict, total=False):
    """Monte Carlo options."""

    samples: int
    seed: int


class ToleranceOverrides(TypedDict, total=False):
    """Tolerance overrides given on the command line (never written back to Config)."""

    deterministic: float | None
    limit: float | None
    sigmas: float | None


class RunRequest(TypedDict, total=False):
    """Everything a run needs before parsing."""

    command: str  # profile, limit, check-c, verify, panel
    current_text: str | None  # raw JSON of the current spec
    weight_text: str | None  # JSON or micro-syntax
    params: Dict[str, float]  # placeholder substitutions
    engine: str  # auto, closed, quad, mc
    quantity: str  # nu, nu-ddc, f, ring
    identity: str | None  # verify only
    identity_options: Dict[str, Any]
    grid: GridOptions
    mc: McOptions
    tolerances: ToleranceOverrides
    include_mc_panel: bool


class RunState(TypedDict, total=False):
    """Main state for the lelong graph."""

    # Input
    request: RunRequest

    # Parsed inputs (pydantic models, set by parse_inputs)
    current: Any | None
    weight: Any | None

    # Panel fan-out
    panel_tasks: List[Dict[str, Any]]

    # Output payload of profile / limit / check-c
    outputs: Dict[str, Any] | None

    # Use operator.add as reducer to merge lists from parallel verify_case nodes
    reports: Annotated[List[Any], operator.add]  # IdentityReport models
    error_details: Annotated[List[Dict[str, Any]], operator.add]  # Structured error information with categorization


class VerifyTask(TypedDict, total=False):
    """Payload sent to one verify_case node of the panel."""

    identity: str
    case_id: str
    options: Dict[str, Any]
    engine: str
    mc: McOptions
    tolerances: ToleranceOverrides
    requested_engine: str | None  # engine of the request; catalog cases with their own engine ignore it
