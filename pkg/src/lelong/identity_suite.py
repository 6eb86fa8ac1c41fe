"""Residual checks of the identities and inequalities satisfied by ν.

Each verifier evaluates both sides through different computation paths
(closed forms against quadrature, term expansions against radial masses,
Monte Carlo against Monte Carlo with combined standard errors) and returns
an :class:`IdentityReport`. Violated sign or integrability hypotheses give
an ``n/a`` report instead of an exception.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Mapping, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from lelong.analysis import (
    ConditionVerdict,
    FValue,
    LimitEstimate,
    check_condition_C,
    estimate_limit,
    f_function,
    nu_profile,
    ring_profile,
)
from lelong.config import Config
from lelong.current_model import (
    ModelCurrent,
    RestrictionForm,
    SignClass,
    Weight,
    check_radius,
    domain_radius,
    parse_weight,
    powers_domain,
    restrict_weight,
)
from lelong.error_handling import InvalidInputError, UnsupportedConfigurationError
from lelong.mass_engine import (
    Engine,
    Kernel,
    KernelResult,
    MassMethod,
    MassValue,
    Moment,
    adaptive_quad,
    current_key,
    integrate_moments,
    kernel_integral,
    lelong_jensen_ddc_part,
    nu_ddc_estimate,
    nu_estimate,
    radial_reduction,
    ring_alpha_mass,
)

logger = logging.getLogger(__name__)

_FROZEN = ConfigDict(frozen=True)

_CHECK_GRID_POINTS = 8


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_APPLICABLE = "n/a"


class Relation(str, Enum):
    EQUALITY = "equality"  # residual = |lhs − rhs|
    INEQUALITY = "inequality"  # residual = signed slack


class VerifyOptions(BaseModel):
    """Engine, Monte Carlo and tolerance settings of one verification run."""

    model_config = _FROZEN

    engine: Engine = Engine.AUTO
    n_samples: int | None = None
    seed: int = 0
    deterministic: float = Field(default_factory=lambda: Config.TOL_DETERMINISTIC, gt=0)
    limit: float = Field(default_factory=lambda: Config.TOL_LIMIT, gt=0)
    sigmas: float = Field(default_factory=lambda: Config.MC_SIGMAS, gt=0)
    # grid of the profiles behind extrapolated limits
    r_min: float = Field(default=1e-6, gt=0)
    r_max: float = Field(default=1e-1, gt=0)
    points: int = Field(default=32, ge=8)

    @classmethod
    def from_request(
        cls,
        engine: str | None = None,
        mc: Mapping[str, Any] | None = None,
        tolerances: Mapping[str, Any] | None = None,
        grid: Mapping[str, Any] | None = None,
    ) -> "VerifyOptions":
        """Build options from the loosely typed pieces of a run request."""
        values: Dict[str, Any] = {}
        if engine:
            values["engine"] = engine
        mc = mc or {}
        if mc.get("samples") is not None:
            values["n_samples"] = mc["samples"]
        if mc.get("seed") is not None:
            values["seed"] = mc["seed"]
        for key, value in (tolerances or {}).items():
            if value is not None:
                values[key] = value
        grid = grid or {}
        for key, name in (("r_min", "r_min"), ("r_max", "r_max"), ("points", "points")):
            if grid.get(key) is not None:
                values[name] = grid[key]
        return cls(**values)

    def evaluate(self, fn: Callable[..., Any], *args: Any, engine: Engine | None = None) -> Any:
        """Call an engine function with this run's engine and Monte Carlo settings."""
        return fn(*args, engine or self.engine, self.n_samples, self.seed)

    def echo(self) -> Dict[str, Any]:
        return {"engine": self.engine.value, "n_samples": self.n_samples, "seed": self.seed}


class IdentityReport(BaseModel):
    """Outcome of one identity check."""

    model_config = _FROZEN

    identity_id: str
    inputs: Dict[str, Any]
    lhs: float | None
    rhs: float | None
    residual: float | None
    tolerance: float
    relation: Relation
    verdict: Verdict
    engines: Tuple[str, ...] = ()
    details: Dict[str, Any] = Field(default_factory=dict)
    message: str | None = None

    @computed_field  # type: ignore[prop-decorator]
    @property
    def input_hash(self) -> str:
        payload = json.dumps({"identity_id": self.identity_id, "inputs": self.inputs}, sort_keys=True, default=str)
        return hashlib.md5(payload.encode()).hexdigest()

    @model_validator(mode="after")
    def _verdict_matches_residual(self) -> "IdentityReport":
        if self.verdict is Verdict.NOT_APPLICABLE:
            return self
        if self.residual is None:
            raise ValueError("a pass/fail report needs a residual")
        if self.relation is Relation.EQUALITY:
            ok = self.residual <= self.tolerance
        else:
            ok = self.residual >= -self.tolerance
        if ok != (self.verdict is Verdict.PASS):
            raise ValueError(f"verdict {self.verdict.value} contradicts residual {self.residual!r}")
        return self

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    @property
    def failed(self) -> bool:
        return self.verdict is Verdict.FAIL


@dataclass
class _ErrorBudget:
    """Error information of the values entering one comparison."""

    opts: VerifyOptions
    engines: set[str] = field(default_factory=set)
    abs_error: float = 0.0
    variance: float = 0.0

    def add(self, result: MassValue | KernelResult | FValue, factor: float = 1.0) -> float | None:
        method = result.method
        self.engines.update(str(getattr(method, "value", method)).split("+"))
        if result.std_error is not None:
            self.variance += (factor * result.std_error) ** 2
        # FValue keeps its deterministic part apart from its standard error
        if result.std_error is None or isinstance(result, FValue):
            self.abs_error += abs(factor) * result.abs_error_bound
        return None if result.value is None else factor * result.value

    def merge(self, other: "_ErrorBudget") -> "_ErrorBudget":
        return _ErrorBudget(
            self.opts,
            self.engines | other.engines,
            self.abs_error + other.abs_error,
            self.variance + other.variance,
        )

    def tolerance(self, *values: float | None, base: float | None = None) -> float:
        scale = max([1.0, *(abs(v) for v in values if v is not None and math.isfinite(v))])
        base = self.opts.deterministic if base is None else base
        return base * scale + self.abs_error + self.opts.sigmas * math.sqrt(self.variance)


@dataclass(frozen=True)
class _Check:
    name: str
    relation: Relation
    value: float  # |lhs − rhs| for equalities, signed slack for inequalities
    tolerance: float

    @property
    def margin(self) -> float:
        if math.isnan(self.value):
            return -math.inf
        if self.relation is Relation.EQUALITY:
            return self.tolerance - self.value
        return self.value + self.tolerance

    def as_dict(self) -> Dict[str, Any]:
        return {"relation": self.relation.value, "value": self.value, "tolerance": self.tolerance}


def _equality(name: str, lhs: float, rhs: float, budget: _ErrorBudget, *scale: float, base: float | None = None) -> _Check:
    return _Check(name, Relation.EQUALITY, abs(lhs - rhs), budget.tolerance(lhs, rhs, *scale, base=base))


def _inequality(name: str, slack: float, budget: _ErrorBudget, *scale: float, base: float | None = None) -> _Check:
    return _Check(name, Relation.INEQUALITY, slack, budget.tolerance(*scale, base=base))


def _inputs(T: ModelCurrent, phi: Weight, opts: VerifyOptions, **params: Any) -> Dict[str, Any]:
    echo: Dict[str, Any] = {"current": current_key(T), "weight": phi.label(), **opts.echo()}
    for name, value in params.items():
        if isinstance(value, Weight):
            value = value.label()
        elif isinstance(value, (list, tuple, np.ndarray)):
            value = [float(v) for v in value]
        echo[name] = value
    return echo


def _report(
    identity_id: str,
    inputs: Dict[str, Any],
    lhs: float | None,
    rhs: float | None,
    checks: Sequence[_Check],
    engines: set[str],
    details: Dict[str, Any] | None = None,
) -> IdentityReport:
    """Report the check with the smallest margin; the verdict follows from it."""
    worst = min(checks, key=lambda c: c.margin)
    verdict = Verdict.PASS if worst.margin >= 0 else Verdict.FAIL
    details = dict(details or {})
    if len(checks) > 1:
        details["checks"] = {c.name: c.as_dict() for c in checks}
        details["worst_check"] = worst.name
    report = IdentityReport(
        identity_id=identity_id,
        inputs=inputs,
        lhs=lhs,
        rhs=rhs,
        residual=worst.value,
        tolerance=worst.tolerance,
        relation=worst.relation,
        verdict=verdict,
        engines=tuple(sorted(engines)),
        details=details,
    )
    log = logger.warning if report.failed else logger.info
    log(f"{identity_id}: {verdict.value} (residual {worst.value:.3g}, tolerance {worst.tolerance:.3g})")
    return report


def _not_applicable(
    identity_id: str,
    inputs: Dict[str, Any],
    message: str,
    relation: Relation = Relation.EQUALITY,
    engines: set[str] | None = None,
    details: Dict[str, Any] | None = None,
) -> IdentityReport:
    logger.info(f"{identity_id}: n/a ({message})")
    return IdentityReport(
        identity_id=identity_id,
        inputs=inputs,
        lhs=None,
        rhs=None,
        residual=None,
        tolerance=0.0,
        relation=relation,
        verdict=Verdict.NOT_APPLICABLE,
        engines=tuple(sorted(engines or ())),
        details=details or {},
        message=message,
    )


def _independent_engine(opts: VerifyOptions, T: ModelCurrent, phi: Weight) -> Engine:
    """Engine for the side that must not share a closed-form branch with the other."""
    if opts.engine is Engine.AUTO and radial_reduction(T, phi) is not None:
        return Engine.QUAD
    return opts.engine


def _check_power(T: ModelCurrent, phi: Weight, k: float) -> None:
    domain = powers_domain(T, phi)
    if not domain.contains(k):
        raise InvalidInputError(f"k={k:g} is not an admissible power of {phi.label()} for this current")


def _check_grid(T: ModelCurrent, phi: Weight, grid: Sequence[float] | None, opts: VerifyOptions) -> np.ndarray:
    if grid is None:
        cap = min(opts.r_max, 0.5 * domain_radius(phi, T))
        grid = np.geomspace(min(opts.r_min, cap / 10), cap, _CHECK_GRID_POINTS)
    radii = np.sort(np.asarray(grid, dtype=float))
    if radii.size < 2:
        raise InvalidInputError("a monotonicity check needs at least two radii")
    for r in radii:
        check_radius(phi, T, float(r))
    return radii


def _limit(T: ModelCurrent, phi: Weight, opts: VerifyOptions) -> tuple[LimitEstimate, set[str]]:
    cap = min(opts.r_max, 0.5 * domain_radius(phi, T))
    profile = nu_profile(T, phi, opts.r_min, cap, opts.points, opts.engine, n_samples=opts.n_samples, seed=opts.seed)
    return estimate_limit(profile), set(profile.engines)


def _limit_details(name: str, estimate: LimitEstimate) -> Dict[str, Any]:
    return {f"{name}_limit": estimate.model_dump(mode="json")}


def verify_lelong_jensen(S: ModelCurrent, phi: Weight, r1: float, r2: float, opts: VerifyOptions | None = None) -> IdentityReport:
    """ν(S,φ,r₂) − ν(S,φ,r₁) = ring α-mass + the two dd^c integrals of the Lelong-Jensen formula."""
    opts = opts or VerifyOptions()
    inputs = _inputs(S, phi, opts, r1=r1, r2=r2)
    check_radius(phi, S, r2, "r2")
    if not 0 < r1 <= r2:
        raise InvalidInputError(f"Lelong-Jensen radii must satisfy 0 < r1 <= r2, got r1={r1:g}, r2={r2:g}")

    budget = _ErrorBudget(opts)
    if r1 == r2:
        return _report("lelong_jensen", inputs, 0.0, 0.0, [_equality("identity", 0.0, 0.0, budget)], {"trivial"})

    nu2 = budget.add(opts.evaluate(nu_estimate, S, phi, r2))
    nu1 = budget.add(opts.evaluate(nu_estimate, S, phi, r1))
    ring = budget.add(opts.evaluate(ring_alpha_mass, S, phi, r1, r2))
    ddc = opts.evaluate(lelong_jensen_ddc_part, S, phi, r1, r2)
    if ddc.diverged:
        return _not_applicable("lelong_jensen", inputs, "dd^c integrals diverge", engines=budget.engines)
    ddc_part = budget.add(ddc)

    lhs = nu2 - nu1
    rhs = ring + ddc_part
    check = _equality("identity", lhs, rhs, budget, nu1, nu2)
    return _report(
        "lelong_jensen", inputs, lhs, rhs, [check], budget.engines, {"ring_alpha_mass": ring, "ddc_part": ddc_part}
    )


def verify_f_monotone(T: ModelCurrent, phi: Weight, grid: Sequence[float] | None = None, opts: VerifyOptions | None = None) -> IdentityReport:
    """f ≤ 0, f nonincreasing, and f(r₂) − f(r₁) equals the ring α-mass."""
    opts = opts or VerifyOptions()
    radii = _check_grid(T, phi, grid, opts)
    inputs = _inputs(T, phi, opts, grid=radii)
    if not T.sign_class.is_nonpositive:
        return _not_applicable("f_monotone", inputs, f"the current is {T.sign_class.value}, not nonpositive")

    values = [opts.evaluate(f_function, T, phi, float(r)) for r in radii]
    if any(f.diverged for f in values):
        return _not_applicable(
            "f_monotone",
            inputs,
            "f diverges: ν(dd^cT, φ, t)/t is not integrable near 0",
            relation=Relation.INEQUALITY,
            engines={f.method for f in values},
            details={"diverged": True},
        )

    checks: List[_Check] = []
    engines: set[str] = set()
    for r, f in zip(radii, values):
        budget = _ErrorBudget(opts)
        value = budget.add(f)
        checks.append(_inequality(f"nonpositive@{r:.6g}", -value, budget, value))
        engines |= budget.engines
    for (r1, f1), (r2, f2) in zip(zip(radii, values), zip(radii[1:], values[1:])):
        budget = _ErrorBudget(opts)
        a, b = budget.add(f1), budget.add(f2)
        checks.append(_inequality(f"nonincreasing@{r1:.6g}", a - b, budget, a, b))
        ring = budget.add(opts.evaluate(ring_alpha_mass, T, phi, float(r1), float(r2)))
        checks.append(_equality(f"ring@{r1:.6g}", b - a, ring, budget, a, b))
        engines |= budget.engines

    return _report(
        "f_monotone",
        inputs,
        values[0].value,
        values[-1].value,
        checks,
        engines,
        {"f": [f.value for f in values], "diverged": False},
    )


def _reject_self_validation(T: ModelCurrent, phi_k: Weight, opts: VerifyOptions) -> None:
    if opts.engine not in (Engine.AUTO, Engine.CLOSED):
        return
    red = radial_reduction(T, phi_k)
    if red is not None and red.codim == 0 and not red.has_closed_mass:
        raise UnsupportedConfigurationError(
            "ν(T, φ^k, ·) is only available through the power-scaling transform here, "
            "which would check the identity against itself; use the Monte Carlo engine"
        )


def verify_power_scaling(T: ModelCurrent, phi: Weight, k: float, r: float, opts: VerifyOptions | None = None) -> IdentityReport:
    """ν(T,φ^k,r^k) = k^p[ν(T,φ,r) + ∫₀^r (t^p/r^p − t^(kp)/r^(kp)) ν(dd^cT,φ,t)/t dt]."""
    opts = opts or VerifyOptions()
    inputs = _inputs(T, phi, opts, k=k, r=r)
    _check_power(T, phi, k)
    check_radius(phi, T, r)
    phi_k = phi.power(k)
    _reject_self_validation(T, phi_k, opts)
    p = T.bidim

    budget = _ErrorBudget(opts)
    lhs = budget.add(opts.evaluate(nu_estimate, T, phi_k, r**k))
    nu = budget.add(opts.evaluate(nu_estimate, T, phi, r), k**p)
    kernel = opts.evaluate(kernel_integral, T, phi, r, Kernel.power_scaling(k))
    if kernel.diverged:
        return _not_applicable("power_scaling", inputs, "the power-scaling kernel integral diverges", engines=budget.engines)
    correction = budget.add(kernel, k**p)
    rhs = nu + correction
    return _report(
        "power_scaling", inputs, lhs, rhs, [_equality("identity", lhs, rhs, budget)], budget.engines,
        {"kernel_integral": correction / k**p},
    )


def verify_limit_scaling(T: ModelCurrent, phi: Weight, k: float, opts: VerifyOptions | None = None) -> IdentityReport:
    """ν(T, φ^k) = k^p ν(T, φ) on extrapolated limits."""
    opts = opts or VerifyOptions()
    inputs = _inputs(T, phi, opts, k=k, r_min=opts.r_min, r_max=opts.r_max, points=opts.points)
    _check_power(T, phi, k)
    lim_phi, engines = _limit(T, phi, opts)
    lim_k, engines_k = _limit(T, phi.power(k), opts)
    engines |= engines_k
    details = {**_limit_details("phi", lim_phi), **_limit_details("phi_k", lim_k)}
    if lim_phi.value is None or lim_k.value is None or lim_phi.diverged or lim_k.diverged:
        return _not_applicable("limit_scaling", inputs, "a limit diverged or could not be extrapolated", engines=engines, details=details)

    lhs = lim_k.value
    rhs = k**T.bidim * lim_phi.value
    budget = _ErrorBudget(opts, engines)
    check = _equality("identity", lhs, rhs, budget, base=opts.limit)
    return _report("limit_scaling", inputs, lhs, rhs, [check], engines, details)


def verify_ddc_scaling(T: ModelCurrent, phi: Weight, k: float, s: float, opts: VerifyOptions | None = None) -> IdentityReport:
    """ν(dd^cT, φ^k, s^k) = k^(p−1) ν(dd^cT, φ, s)."""
    opts = opts or VerifyOptions()
    inputs = _inputs(T, phi, opts, k=k, s=s)
    _check_power(T, phi, k)
    check_radius(phi, T, s, "s")
    phi_k = phi.power(k)

    budget = _ErrorBudget(opts)
    lhs = budget.add(opts.evaluate(nu_ddc_estimate, T, phi_k, s**k, engine=_independent_engine(opts, T, phi_k)))
    rhs = budget.add(opts.evaluate(nu_ddc_estimate, T, phi, s), k ** (T.bidim - 1))
    return _report("ddc_scaling", inputs, lhs, rhs, [_equality("identity", lhs, rhs, budget)], budget.engines)


def verify_change_of_variable(T: ModelCurrent, phi: Weight, k: float, r0: float, opts: VerifyOptions | None = None) -> IdentityReport:
    """∫₀^{r₀} ν(dd^cT,φ,t^(1/k))/t dt = k ∫₀^{r₀^(1/k)} ν(dd^cT,φ,s)/s ds.

    Both sides diverging together is a consistent outcome. The report also
    checks ν(dd^cT,φ^k,t) = k^(p−1) ν(dd^cT,φ,t^(1/k)) at sample points.
    """
    opts = opts or VerifyOptions()
    inputs = _inputs(T, phi, opts, k=k, r0=r0)
    _check_power(T, phi, k)
    phi_k = phi.power(k)
    check_radius(phi_k, T, r0, "r0")
    s0 = r0 ** (1.0 / k)
    check_radius(phi, T, s0, "r0^(1/k)")
    p = T.bidim

    budget = _ErrorBudget(opts)
    right = opts.evaluate(integrate_moments, T, phi, [Moment(k, 0.0, 0.0, s0)])
    rhs = budget.add(right)

    red_k = radial_reduction(T, phi_k)
    red = radial_reduction(T, phi)
    if red is not None and red_k is not None and opts.engine is not Engine.MC:
        left_diverged = red_k.expansion().diverges(0.0, 0.0)
        lhs = None
        if not left_diverged:
            expansion = red.expansion()
            # t = e^(−x): dt/t = dx and ν is evaluated at e^(−x/k)
            value, err = adaptive_quad(
                lambda x: float(expansion.value(math.exp(-x / k))), -math.log(r0), math.inf, "change_of_variable"
            )
            lhs = budget.add(KernelResult(value=value, method=MassMethod.QUADRATURE, abs_error_bound=err))
    else:
        left = opts.evaluate(integrate_moments, T, phi_k, [Moment(k ** (1 - p), 0.0, 0.0, r0)])
        left_diverged = left.diverged
        lhs = None if left_diverged else budget.add(left)

    details: Dict[str, Any] = {"lhs_diverged": left_diverged, "rhs_diverged": right.diverged}
    if left_diverged or right.diverged:
        consistent = left_diverged and right.diverged
        lhs_value = math.inf if left_diverged else lhs
        rhs_value = math.inf if right.diverged else rhs
        check = _Check("change_of_variable", Relation.EQUALITY, 0.0 if consistent else math.inf, budget.tolerance())
        return _report("change_of_variable", inputs, lhs_value, rhs_value, [check], budget.engines, details)

    checks = [_equality("change_of_variable", lhs, rhs, budget)]
    second = _independent_engine(opts, T, phi_k)
    for t in np.geomspace(r0 * 1e-3, r0, 4):
        point = _ErrorBudget(opts)
        a = point.add(opts.evaluate(nu_ddc_estimate, T, phi_k, float(t), engine=second))
        b = point.add(opts.evaluate(nu_ddc_estimate, T, phi, float(t) ** (1.0 / k)), k ** (p - 1))
        checks.append(_equality(f"integrand@{t:.6g}", a, b, point))
        budget = budget.merge(point)
    return _report("change_of_variable", inputs, lhs, rhs, checks, budget.engines, details)


def verify_ddc_mass_bound(T: ModelCurrent, phi: Weight, r: float, s: float = 1.0, opts: VerifyOptions | None = None) -> IdentityReport:
    """Upper bounds of ν(T,φ,r) by ν(dd^cT,φ,·) for nonpositive currents.

    ν(T,φ,r) ≤ −∫₀^r ν(dd^cT,φ,t) t^(p−1)/r^p dt ≤ −∫_{r/s}^r (same) ≤ −((1−s^(−p))/p) ν(dd^cT,sφ,r),
    together with ν(dd^cT,sφ,r) = ν(dd^cT,φ,r/s). For s = 1 only the first bound is checked.
    """
    opts = opts or VerifyOptions()
    inputs = _inputs(T, phi, opts, r=r, s=s)
    if s < 1:
        raise InvalidInputError(f"s={s:g} must be at least 1")
    check_radius(phi, T, r)
    if not T.sign_class.is_nonpositive:
        return _not_applicable("ddc_mass_bound", inputs, f"the current is {T.sign_class.value}, not nonpositive", Relation.INEQUALITY)
    p = T.bidim

    budget = _ErrorBudget(opts)
    nu = budget.add(opts.evaluate(nu_estimate, T, phi, r))
    first = opts.evaluate(kernel_integral, T, phi, r, Kernel.mass_bound())
    if first.diverged:
        return _not_applicable("ddc_mass_bound", inputs, "the mass-bound integral diverges", Relation.INEQUALITY, budget.engines)
    bound = budget.add(first, -1.0)
    checks = [_inequality("first_bound", bound - nu, budget, nu, bound)]
    details: Dict[str, Any] = {"first_bound": bound}
    rhs = bound

    if s > 1:
        chain = budget.add(opts.evaluate(integrate_moments, T, phi, [Moment(r**-p, p, r / s, r)]), -1.0)
        scaled = budget.add(opts.evaluate(nu_ddc_estimate, T, phi.scaled(s), r, engine=_independent_engine(opts, T, phi)))
        shrunk = budget.add(opts.evaluate(nu_ddc_estimate, T, phi, r / s))
        rhs = -((1 - s**-p) / p) * scaled
        checks += [
            _inequality("chain", chain - bound, budget, chain, bound),
            _inequality("chain_to_ddc", rhs - chain, budget, rhs, chain),
            _inequality("ddc_bound", rhs - nu, budget, rhs, nu),
            _equality("scaled_weight", scaled, shrunk, budget),
        ]
        details.update({"chain": chain, "nu_ddc_scaled_weight": scaled, "nu_ddc_shrunk_radius": shrunk})
    return _report("ddc_mass_bound", inputs, nu, rhs, checks, budget.engines, details)


def _log_ratio(T: ModelCurrent, phi: Weight, psi: Weight) -> float:
    """lim log ψ / log φ on the support of T, when both restrict to pure powers."""
    rphi, rpsi = restrict_weight(phi, T), restrict_weight(psi, T)
    if rphi.form is not RestrictionForm.PURE_POWER or rpsi.form is not RestrictionForm.PURE_POWER:
        raise UnsupportedConfigurationError(
            "comparison needs weights whose restrictions are pure powers, so that ℓ is known exactly"
        )
    return rpsi.k / rphi.k


def verify_comparison(T: ModelCurrent, phi: Weight, psi: Weight, ell: float, opts: VerifyOptions | None = None) -> IdentityReport:
    """Compare ν(T, ψ) with ℓ^p ν(T, φ) when liminf log ψ / log φ >= ℓ.

    Positive currents give ν(T,ψ) >= ℓ^p ν(T,φ), negative currents (ψ
    satisfying condition (C)) the reverse, and log ψ ∼ ℓ log φ equality.
    """
    opts = opts or VerifyOptions()
    inputs = _inputs(T, phi, opts, psi=psi, ell=ell)
    if ell <= 0:
        raise InvalidInputError(f"ell={ell:g} must be positive")
    ratio = _log_ratio(T, phi, psi)
    if ell > ratio * (1 + 1e-12):
        raise InvalidInputError(f"liminf log ψ / log φ = {ratio:g} is below ell={ell:g}")
    equality = math.isclose(ell, ratio, rel_tol=1e-12)
    sign = T.sign_class
    if not (sign.is_nonpositive or sign.is_nonnegative):
        return _not_applicable("comparison", inputs, "the current has mixed sign")

    details: Dict[str, Any] = {"log_ratio": ratio, "equality_case": equality}
    if sign.is_nonpositive and not sign.is_nonnegative:
        condition = check_condition_C(T, psi, opts.engine, opts.n_samples, opts.seed)
        details["psi_condition_c"] = condition.verdict.value
        if condition.verdict is not ConditionVerdict.HOLDS:
            return _not_applicable("comparison", inputs, "ψ does not satisfy condition (C)", details=details)

    lim_psi, engines = _limit(T, psi, opts)
    lim_phi, engines_phi = _limit(T, phi, opts)
    engines |= engines_phi
    details.update({**_limit_details("psi", lim_psi), **_limit_details("phi", lim_phi)})
    if lim_psi.value is None or lim_phi.value is None or lim_psi.diverged or lim_phi.diverged:
        return _not_applicable("comparison", inputs, "a limit diverged or could not be extrapolated", engines=engines, details=details)

    lhs = lim_psi.value
    rhs = ell**T.bidim * lim_phi.value
    budget = _ErrorBudget(opts, engines)
    if equality or sign is SignClass.ZERO:
        check = _equality("comparison", lhs, rhs, budget, base=opts.limit)
    elif sign.is_nonnegative:
        check = _inequality("comparison", lhs - rhs, budget, lhs, rhs, base=opts.limit)
    else:
        check = _inequality("comparison", rhs - lhs, budget, lhs, rhs, base=opts.limit)
    return _report("comparison", inputs, lhs, rhs, [check], engines, details)


def verify_extension(T: ModelCurrent, phi: Weight, r: float, opts: VerifyOptions | None = None) -> IdentityReport:
    """lim_{ε→0} ∫_{ε <= φ < r} T∧α_φ^p = f(r) − ν(T, φ)."""
    opts = opts or VerifyOptions()
    inputs = _inputs(T, phi, opts, r=r)
    check_radius(phi, T, r)
    if not T.sign_class.is_nonpositive:
        return _not_applicable("extension", inputs, f"the current is {T.sign_class.value}, not nonpositive")
    condition = check_condition_C(T, phi, opts.engine, opts.n_samples, opts.seed)
    if condition.verdict is not ConditionVerdict.HOLDS:
        return _not_applicable("extension", inputs, f"condition (C) {condition.verdict.value}")

    rings = ring_profile(T, phi, r, np.geomspace(r * 1e-8, r * 1e-2, 7), opts.engine, opts.n_samples, opts.seed)
    details: Dict[str, Any] = {"ring_values": list(rings.values), "ring_eps": list(rings.eps), "ring_spread": rings.spread}
    if not rings.stabilised:
        return _not_applicable("extension", inputs, "ring masses have not settled as ε decreases", details=details)

    budget = _ErrorBudget(opts)
    smallest = opts.evaluate(ring_alpha_mass, T, phi, rings.eps[-1], r)
    lhs = budget.add(smallest)
    f = opts.evaluate(f_function, T, phi, r)
    f_value = budget.add(f)
    lim, engines = _limit(T, phi, opts)
    budget.engines |= engines
    details.update(_limit_details("phi", lim))
    if f_value is None or lim.value is None or lim.diverged:
        return _not_applicable("extension", inputs, "f or ν(T, φ) diverged", engines=budget.engines, details=details)

    rhs = f_value - lim.value
    check = _equality("extension", lhs, rhs, budget, f_value, lim.value, base=opts.limit)
    return _report("extension", inputs, lhs, rhs, [check], budget.engines, details)


def verify_power_bounds(T: ModelCurrent, phi: Weight, k: float, r: float, opts: VerifyOptions | None = None) -> IdentityReport:
    """Two-sided bounds of D = ν(T,φ,r) − ν(T,φ^k,r^k)/k^p by ν(dd^cT,φ,r).

    k >= 1: −((k−1)/(kp)) ν(dd^cT,φ,r) <= D <= 0; k < 1: 0 <= D <= ((1−k)/(kp)) ν(dd^cT,φ,r).
    """
    opts = opts or VerifyOptions()
    inputs = _inputs(T, phi, opts, k=k, r=r)
    _check_power(T, phi, k)
    check_radius(phi, T, r)
    p = T.bidim

    budget = _ErrorBudget(opts)
    nu = budget.add(opts.evaluate(nu_estimate, T, phi, r))
    scaled = budget.add(opts.evaluate(nu_estimate, T, phi.power(k), r**k), k**-p)
    ddc = budget.add(opts.evaluate(nu_ddc_estimate, T, phi, r))
    gap = nu - scaled
    width = abs(k - 1) / (k * p) * ddc
    if k >= 1:
        checks = [
            _inequality("upper", -gap, budget, nu, scaled),
            _inequality("lower", gap + width, budget, nu, scaled, ddc),
        ]
        bound = -width
    else:
        checks = [
            _inequality("lower", gap, budget, nu, scaled),
            _inequality("upper", width - gap, budget, nu, scaled, ddc),
        ]
        bound = width
    return _report("power_bounds", inputs, gap, bound, checks, budget.engines, {"nu_ddc": ddc})


def verify_power_monotone(T: ModelCurrent, phi: Weight, r: float, ks: Sequence[float], opts: VerifyOptions | None = None) -> IdentityReport:
    """u(k) = ν(T,φ^k,r^k)/k^p is nonpositive and nondecreasing in k for nonpositive T."""
    opts = opts or VerifyOptions()
    powers = sorted(set(float(k) for k in ks))
    inputs = _inputs(T, phi, opts, r=r, ks=powers)
    if len(powers) < 2:
        raise InvalidInputError("power monotonicity needs at least two distinct powers")
    for k in powers:
        _check_power(T, phi, k)
    check_radius(phi, T, r)
    if not T.sign_class.is_nonpositive:
        return _not_applicable("power_monotone", inputs, f"the current is {T.sign_class.value}, not nonpositive", Relation.INEQUALITY)

    p = T.bidim
    results = [opts.evaluate(nu_estimate, T, phi.power(k), r**k) for k in powers]
    checks: List[_Check] = []
    engines: set[str] = set()
    values = []
    for k, result in zip(powers, results):
        budget = _ErrorBudget(opts)
        u = budget.add(result, k**-p)
        values.append(u)
        checks.append(_inequality(f"nonpositive@k={k:g}", -u, budget, u))
        engines |= budget.engines
    for i in range(len(powers) - 1):
        budget = _ErrorBudget(opts)
        a = budget.add(results[i], powers[i] ** -p)
        b = budget.add(results[i + 1], powers[i + 1] ** -p)
        checks.append(_inequality(f"nondecreasing@k={powers[i]:g}", b - a, budget, a, b))
    return _report("power_monotone", inputs, values[0], values[-1], checks, engines, {"u": values})


def verify_positive_monotone(S: ModelCurrent, phi: Weight, grid: Sequence[float] | None = None, opts: VerifyOptions | None = None) -> IdentityReport:
    """ν(S, φ, ·) is nonnegative and nondecreasing for nonnegative psh S."""
    opts = opts or VerifyOptions()
    radii = _check_grid(S, phi, grid, opts)
    inputs = _inputs(S, phi, opts, grid=radii)
    if not S.sign_class.is_nonnegative:
        return _not_applicable("positive_monotone", inputs, f"the current is {S.sign_class.value}, not nonnegative", Relation.INEQUALITY)

    results = [opts.evaluate(nu_estimate, S, phi, float(r)) for r in radii]
    checks: List[_Check] = []
    engines: set[str] = set()
    for r, result in zip(radii, results):
        budget = _ErrorBudget(opts)
        value = budget.add(result)
        checks.append(_inequality(f"nonnegative@{r:.6g}", value, budget, value))
        engines |= budget.engines
    for i in range(len(results) - 1):
        budget = _ErrorBudget(opts)
        a, b = budget.add(results[i]), budget.add(results[i + 1])
        checks.append(_inequality(f"nondecreasing@{radii[i]:.6g}", b - a, budget, a, b))
    nus = [result.value for result in results]
    return _report("positive_monotone", inputs, nus[0], nus[-1], checks, engines, {"nu": nus})


@dataclass(frozen=True)
class IdentitySpec:
    """Registry entry: verifier and the options it takes besides (T, φ)."""

    verifier: Callable[..., IdentityReport]
    required: Tuple[str, ...]
    optional: Tuple[str, ...] = ()
    description: str = ""


IDENTITIES: Dict[str, IdentitySpec] = {
    "lelong_jensen": IdentitySpec(verify_lelong_jensen, ("r1", "r2"), description="Lelong-Jensen formula"),
    "f_monotone": IdentitySpec(verify_f_monotone, (), ("grid",), "f is nonpositive, nonincreasing, and its increments are ring α-masses"),
    "power_scaling": IdentitySpec(verify_power_scaling, ("k", "r"), description="ν(T,φ^k,r^k) against ν(T,φ,r) and a kernel integral"),
    "limit_scaling": IdentitySpec(verify_limit_scaling, ("k",), description="ν(T,φ^k) = k^p ν(T,φ)"),
    "ddc_scaling": IdentitySpec(verify_ddc_scaling, ("k", "s"), description="ν(dd^cT,φ^k,s^k) = k^(p−1) ν(dd^cT,φ,s)"),
    "change_of_variable": IdentitySpec(verify_change_of_variable, ("k", "r0"), description="t = s^k in the condition (C) integral"),
    "ddc_mass_bound": IdentitySpec(verify_ddc_mass_bound, ("r",), ("s",), "upper bounds of ν(T,φ,r) by dd^c masses"),
    "comparison": IdentitySpec(verify_comparison, ("psi", "ell"), description="ν(T,ψ) against ℓ^p ν(T,φ)"),
    "extension": IdentitySpec(verify_extension, ("r",), description="α-mass of the extension by zero across {φ = 0}"),
    "power_bounds": IdentitySpec(verify_power_bounds, ("k", "r"), description="two-sided bounds of ν(T,φ,r) − ν(T,φ^k,r^k)/k^p"),
    "power_monotone": IdentitySpec(verify_power_monotone, ("r", "ks"), description="ν(T,φ^k,r^k)/k^p is nondecreasing in k"),
    "positive_monotone": IdentitySpec(verify_positive_monotone, (), ("grid",), "ν(S,φ,·) is nondecreasing for nonnegative S"),
}

IDENTITY_IDS: Tuple[str, ...] = tuple(sorted(IDENTITIES))


def run_identity(
    identity_id: str,
    T: ModelCurrent,
    phi: Weight,
    options: Mapping[str, Any] | None = None,
    opts: VerifyOptions | None = None,
) -> IdentityReport:
    """Dispatch to a verifier by id.

    Raises:
        InvalidInputError: unknown identity or missing options
    """
    spec = IDENTITIES.get(identity_id)
    if spec is None:
        raise InvalidInputError(f"unknown identity {identity_id!r}; choose one of {', '.join(IDENTITY_IDS)}")
    options = {key: value for key, value in (options or {}).items() if value is not None}
    missing = [name for name in spec.required if name not in options]
    if missing:
        raise InvalidInputError(f"{identity_id} needs option(s) {', '.join(missing)}")
    kwargs = {name: options[name] for name in spec.required + spec.optional if name in options}
    if isinstance(kwargs.get("psi"), (str, Mapping)):
        kwargs["psi"] = parse_weight(kwargs["psi"])
    return spec.verifier(T, phi, **kwargs, opts=opts)


def panel_summary(reports: Sequence[IdentityReport]) -> Dict[str, int]:
    """Counts of each verdict."""
    counts = {verdict.value: 0 for verdict in Verdict}
    for report in reports:
        counts[report.verdict.value] += 1
    return counts
