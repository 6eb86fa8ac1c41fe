"""Integration tests for graph execution."""

import json

import pytest

from lelong import graph
from lelong.catalog import panel_tasks
from lelong.graph import run
from lelong.identity_suite import Verdict
from tests.factories import s_eps_spec

pytestmark = pytest.mark.integration


def test_graph_is_compiled() -> None:
    assert graph.name == "lelong"
    assert {"parse_inputs", "plan_panel", "verify_case", "aggregate"} <= set(graph.get_graph().nodes)


def test_profile_request() -> None:
    state = run(
        {
            "command": "profile",
            "current_text": json.dumps(s_eps_spec()),
            "params": {"eps": 0.5},
            "weight_text": "pow:k=2",
            "grid": {"r_min": 1e-6, "r_max": 0.1, "points": 8},
        }
    )
    assert not state.get("error_details")
    profile = state["outputs"]["profile"]
    assert len(profile.values) == 8
    assert state["outputs"]["reports"] == []


def test_invalid_request_is_recorded() -> None:
    state = run({"command": "verify", "current_text": "{"})
    [error] = state["error_details"]
    assert error["node"] == "parse_inputs" and error["type"] == "invalid_input"
    assert "profile" not in (state.get("outputs") or {})


def test_deterministic_panel() -> None:
    """Every deterministic catalog run passes or is n/a."""
    state = run({"command": "panel", "engine": "auto"})
    assert not state.get("error_details"), state.get("error_details")
    reports = state["outputs"]["reports"]
    assert len(reports) == len(panel_tasks())
    failed = [(r.identity_id, r.details.get("case_id"), r.residual, r.tolerance) for r in reports if r.failed]
    assert not failed
    keys = [(r.identity_id, r.input_hash) for r in reports]
    assert keys == sorted(keys)


def test_panel_is_reproducible() -> None:
    first = run({"command": "panel"}, max_concurrency=2)["outputs"]["reports"]
    second = run({"command": "panel"}, max_concurrency=8)["outputs"]["reports"]
    assert [r.model_dump() for r in first] == [r.model_dump() for r in second]
    assert any(r.verdict is Verdict.NOT_APPLICABLE for r in first)
