"""Integration tests for the command-line interface."""

import json

import pytest
from click.testing import CliRunner

from lelong import __version__
from lelong.cli import cli

pytestmark = pytest.mark.integration

ZERO = '{"n": 2, "subspace_dim": 1}'
LOG_LINE = '{"n": 2, "subspace_dim": 1, "log_coeff": 1.0}'


@pytest.fixture
def runner():
    return CliRunner()


def test_version(runner) -> None:
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.stdout


def test_profile_of_zero_current(runner) -> None:
    """The zero current has an all-zero ν column."""
    result = runner.invoke(cli, ["profile", "--current", ZERO, "--points", "8"])
    assert result.exit_code == 0, result.stderr
    lines = result.stdout.splitlines()
    assert lines[0] == "r,nu,engine,err_bound"
    assert len(lines) == 9
    assert all(line.split(",")[1] == "0.0" for line in lines[1:])


def test_profile_json(runner, s_eps_file) -> None:
    result = runner.invoke(cli, ["profile", "--current", str(s_eps_file), "--eps", "0.5", "--format", "json", "--quantity", "nu-ddc", "--points", "8"])
    assert result.exit_code == 0, result.stderr
    payload = json.loads(result.stdout)
    assert payload["quantity"] == "nu-ddc"
    assert payload["values"][-1] == pytest.approx(0.1**0.5)


def test_limit_of_s_eps(runner, s_eps_file) -> None:
    """ν(S_ε, |z|⁴) = −4 with rate r^(ε/2)."""
    result = runner.invoke(cli, ["limit", "--current", str(s_eps_file), "--eps", "0.5", "--weight", "pow:k=2"])
    assert result.exit_code == 0, result.stderr
    payload = json.loads(result.stdout)
    assert payload["model"] == "power"
    assert payload["value"] == pytest.approx(-4.0, abs=1e-6)
    assert payload["params"]["alpha1"] == pytest.approx(0.25, rel=1e-4)


def test_limit_classical(runner, s_eps_file) -> None:
    result = runner.invoke(cli, ["limit", "--current", str(s_eps_file), "--param", "eps=0.5", "--classical"])
    assert result.exit_code == 0, result.stderr
    payload = json.loads(result.stdout)
    assert payload["classical"] is True
    assert payload["value"] == pytest.approx(-1.0, abs=1e-6)


def test_limit_of_log_current_diverges(runner) -> None:
    result = runner.invoke(cli, ["limit", "--current", LOG_LINE])
    assert result.exit_code == 0, result.stderr
    payload = json.loads(result.stdout)
    assert payload["diverged"] is True and payload["value"] == "-Infinity"


def test_check_c_on_log_current(runner) -> None:
    result = runner.invoke(cli, ["check-c", "--current", LOG_LINE])
    assert result.exit_code == 0, result.stderr
    payload = json.loads(result.stdout)
    assert payload["verdict"] == "fails"
    assert payload["exponent_estimate"] == 0.0


def test_verify_passes(runner, s_eps_file) -> None:
    result = runner.invoke(cli, ["verify", "lelong_jensen", "--current", str(s_eps_file), "--eps", "0.5", "--r1", "0.1", "--r2", "0.2"])
    assert result.exit_code == 0, result.stderr
    [report] = json.loads(result.stdout)
    assert report["verdict"] == "pass"
    assert report["inputs"]["r1"] == 0.1


def test_verify_csv(runner, s_eps_file) -> None:
    result = runner.invoke(cli, ["verify", "power_monotone", "--current", str(s_eps_file), "--eps", "0.5", "--r", "0.3", "--ks", "0.5,1,2", "--format", "csv"])
    assert result.exit_code == 0, result.stderr
    assert result.stdout.splitlines()[1].startswith("power_monotone,pass,")


def test_verify_not_applicable(runner) -> None:
    result = runner.invoke(cli, ["verify", "f_monotone", "--current", LOG_LINE])
    assert result.exit_code == 0
    assert json.loads(result.stdout)[0]["verdict"] == "n/a"
    assert "f_monotone: n/a" in result.stderr


@pytest.mark.parametrize(
    "args",
    [
        ["profile"],
        ["profile", "--current", ZERO, "--weight", "cubic:k=1"],
        ["profile", "--current", "no-such-file.json"],
        ["profile", "--current", ZERO, "--param", "eps"],
        ["verify", "lelong_jensen", "--current", ZERO, "--r1", "0.1", "--r2", "0.999"],
        ["verify", "lelong_jensen", "--current", ZERO, "--r1", "0.1"],
        ["limit", "--current", '{"n": 2, "subspace_dim": 1, "monomials": [[-1.0, 1.0]]}'],
    ],
)
def test_invalid_input_exit_code(runner, args) -> None:
    result = runner.invoke(cli, args)
    assert result.exit_code == 2
    assert result.stderr.startswith("error: ")


def test_schema(runner) -> None:
    result = runner.invoke(cli, ["schema", "current"])
    assert result.exit_code == 0
    assert "subspace_dim" in json.loads(result.stdout)["properties"]


def test_deterministic_output(runner, s_eps_file) -> None:
    args = ["limit", "--current", str(s_eps_file), "--eps", "0.25", "--weight", "pow:k=3"]
    assert runner.invoke(cli, args).stdout == runner.invoke(cli, args).stdout
