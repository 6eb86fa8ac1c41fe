"""LangGraph pipeline behind every CLI command.

parse_inputs routes on the command to one compute node (profile, limit,
check_c, verify) or to plan_panel, which fans the catalog out with one
``Send("verify_case", task)`` per (identity, case, option set). Every path
ends in aggregate. Nodes never raise: failures are recorded in
``error_details`` and mapped to exit codes by the CLI.
"""

from __future__ import annotations

import logging
from typing import Any, Dict, List

from langgraph.graph import END, StateGraph
from langgraph.types import Send

from lelong.analysis import check_condition_C, estimate_limit, nu_profile
from lelong.catalog import get_case, panel_tasks
from lelong.config import Config
from lelong.current_model import parse_current, parse_weight
from lelong.error_handling import ErrorCategory, InvalidInputError
from lelong.identity_suite import VerifyOptions, run_identity
from lelong.state import RunRequest, RunState, VerifyTask

logger = logging.getLogger(__name__)

COMMAND_NODES = {
    "profile": "profile",
    "limit": "limit",
    "check-c": "check_c",
    "verify": "verify",
    "panel": "plan_panel",
}


def create_error_detail(error: Exception, node_name: str) -> Dict[str, Any]:
    """Create an error detail dict for state updates."""
    detail = ErrorCategory.create_error_dict(error, node_name)
    logger.debug(f"{node_name} failed: {detail['error_class']}: {detail['message']}")
    return detail


def _options(request: RunRequest, engine: str | None = None) -> VerifyOptions:
    return VerifyOptions.from_request(
        engine=engine or request.get("engine"),
        mc=request.get("mc"),
        tolerances=request.get("tolerances"),
        grid=request.get("grid"),
    )


def parse_inputs(state: RunState) -> Dict[str, Any]:
    """Parse the current and weight specs of a single-case command."""
    request = state["request"]
    command = request.get("command")
    try:
        if command not in COMMAND_NODES:
            raise InvalidInputError(f"unknown command {command!r}")
        if command == "panel":
            return {}
        if not request.get("current_text"):
            raise InvalidInputError(f"{command} needs a current spec (--current)")
        params = request.get("params") or {}
        current = parse_current(request["current_text"], params)
        weight = parse_weight(request.get("weight_text") or "pow:k=1", params)
        return {"current": current, "weight": weight}
    except Exception as e:
        return {"error_details": [create_error_detail(e, "parse_inputs")]}


def route_command(state: RunState) -> str:
    if state.get("error_details"):
        return "aggregate"
    return COMMAND_NODES[state["request"]["command"]]


def _profile(state: RunState):
    request = state["request"]
    opts = _options(request)
    return nu_profile(
        state["current"],
        state["weight"],
        opts.r_min,
        opts.r_max,
        opts.points,
        engine=opts.engine,
        quantity=request.get("quantity") or "nu",
        n_samples=opts.n_samples,
        seed=opts.seed,
    )


def profile_node(state: RunState) -> Dict[str, Any]:
    try:
        profile = _profile(state)
        logger.info(f"Profile of {len(profile.grid)} points ({profile.quantity.value})")
        return {"outputs": {"profile": profile}}
    except Exception as e:
        return {"error_details": [create_error_detail(e, "profile")]}


def limit_node(state: RunState) -> Dict[str, Any]:
    try:
        profile = _profile(state)
        estimate = estimate_limit(profile)
        logger.info(f"Limit model {estimate.model.value}, value {estimate.value!r}")
        return {"outputs": {"profile": profile, "limit": estimate}}
    except Exception as e:
        return {"error_details": [create_error_detail(e, "limit")]}


def check_c_node(state: RunState) -> Dict[str, Any]:
    try:
        opts = _options(state["request"])
        report = check_condition_C(state["current"], state["weight"], opts.engine, opts.n_samples, opts.seed)
        return {"outputs": {"condition": report}}
    except Exception as e:
        return {"error_details": [create_error_detail(e, "check_c")]}


def verify_node(state: RunState) -> Dict[str, Any]:
    request = state["request"]
    try:
        identity = request.get("identity")
        if not identity:
            raise InvalidInputError("verify needs an identity id")
        report = run_identity(
            identity,
            state["current"],
            state["weight"],
            request.get("identity_options") or {},
            _options(request),
        )
        return {"reports": [report]}
    except Exception as e:
        return {"error_details": [create_error_detail(e, "verify")]}


def plan_panel(state: RunState) -> Dict[str, Any]:
    request = state["request"]
    tasks = [
        {**task, "mc": request.get("mc") or {}, "tolerances": request.get("tolerances") or {}, "requested_engine": request.get("engine")}
        for task in panel_tasks(include_mc=bool(request.get("include_mc_panel")))
    ]
    return {"panel_tasks": tasks}


def fan_out_panel(state: RunState) -> List[Send] | str:
    """One verify_case invocation per panel task."""
    tasks = state.get("panel_tasks") or []
    if not tasks:
        return "aggregate"
    return [Send("verify_case", task) for task in tasks]


def verify_case(task: VerifyTask) -> Dict[str, Any]:
    """Run one catalog case; the case's own engine wins over an ``auto`` request."""
    node_name = f"verify_case[{task['identity']}:{task['case_id']}]"
    try:
        case = get_case(task["case_id"])
        T, phi = case.load()
        requested = task.get("requested_engine")
        engine = case.engine if case.engine != "auto" or not requested else requested
        opts = VerifyOptions.from_request(engine=engine, mc=task.get("mc"), tolerances=task.get("tolerances"))
        report = run_identity(task["identity"], T, phi, task.get("options") or {}, opts)
        return {"reports": [report.model_copy(update={"details": {**report.details, "case_id": case.case_id}})]}
    except Exception as e:
        return {"error_details": [create_error_detail(e, node_name)]}


def aggregate(state: RunState) -> Dict[str, Any]:
    """Fix the report order regardless of scheduling."""
    reports = sorted(
        state.get("reports") or [], key=lambda r: (r.identity_id, r.input_hash, str(r.details.get("case_id", "")))
    )
    if state["request"].get("command") in ("verify", "panel"):
        logger.info(f"{len(reports)} report(s), {sum(r.failed for r in reports)} failed")
    return {"outputs": {**(state.get("outputs") or {}), "reports": reports}}


graph_builder = (
    StateGraph(RunState)
    .add_node("parse_inputs", parse_inputs)
    .add_node("profile", profile_node)
    .add_node("limit", limit_node)
    .add_node("check_c", check_c_node)
    .add_node("verify", verify_node)
    .add_node("plan_panel", plan_panel)
    .add_node("verify_case", verify_case)
    .add_node("aggregate", aggregate)
    .add_edge("__start__", "parse_inputs")
    .add_conditional_edges(
        "parse_inputs",
        route_command,
        {
            "profile": "profile",
            "limit": "limit",
            "check_c": "check_c",
            "verify": "verify",
            "plan_panel": "plan_panel",
            "aggregate": "aggregate",
        },
    )
    .add_conditional_edges("plan_panel", fan_out_panel, ["verify_case", "aggregate"])
    .add_edge("profile", "aggregate")
    .add_edge("limit", "aggregate")
    .add_edge("check_c", "aggregate")
    .add_edge("verify", "aggregate")
    .add_edge("verify_case", "aggregate")
    .add_edge("aggregate", END)
)

graph = graph_builder.compile(name="lelong")


def create_graph_config(max_concurrency: int | None = None) -> Dict[str, Any]:
    """Create a configuration dict for graph invocation.

    Args:
        max_concurrency: Optional max concurrent panel nodes (defaults to Config.MAX_CONCURRENCY)

    Returns:
        Configuration dict for graph.invoke()
    """
    config: Dict[str, Any] = {"configurable": {}}
    concurrency = max_concurrency if max_concurrency is not None else Config.MAX_CONCURRENCY
    if concurrency is not None:
        config["max_concurrency"] = concurrency
    return config


def run(request: RunRequest, max_concurrency: int | None = None) -> RunState:
    """Invoke the graph on one request and return the final state."""
    return graph.invoke({"request": request}, config=create_graph_config(max_concurrency))
