"""Profiles, the functional f, limits and condition (C)."""

from __future__ import annotations

import logging
import math
from enum import Enum
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.optimize import minimize, minimize_scalar

from lelong.config import Config
from lelong.current_model import ModelCurrent, Weight, check_radius
from lelong.error_handling import InvalidInputError
from lelong.mass_engine import (
    Engine,
    Kernel,
    KernelResult,
    MassMethod,
    MassValue,
    as_engine,
    kernel_integral,
    nu_ddc_estimate,
    nu_estimate,
    radial_reduction,
    ring_alpha_mass,
)

logger = logging.getLogger(__name__)

_FROZEN = ConfigDict(frozen=True)

_ALPHA_RANGE = (0.05, 6.0)
_DELTA_RANGE = (0.01, 1.0)
_MIN_POINTS = 8
_MIN_DECADES = 3.0
# residuals this close count as a tie
_TIE = 1e-12


class Quantity(str, Enum):
    NU = "nu"
    NU_DDC = "nu-ddc"
    F = "f"
    RING = "ring"


class NuProfile(BaseModel):
    """Sampled r ↦ quantity(r) on a geometric grid."""

    model_config = _FROZEN

    grid: Tuple[float, ...]
    values: Tuple[float, ...]
    engines: Tuple[str, ...]
    err_bounds: Tuple[float, ...]
    quantity: Quantity = Quantity.NU
    bidim: int = 1

    @model_validator(mode="after")
    def _consistent(self) -> "NuProfile":
        if not len(self.grid) == len(self.values) == len(self.engines) == len(self.err_bounds):
            raise ValueError("profile columns must have equal lengths")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("profile grid must be strictly increasing")
        return self


class LimitModel(str, Enum):
    POWER = "power"  # ν∞ + A₁ r^α₁ [+ A₂ r^α₂]
    LOG = "log"  # A log r + B
    LOG_POWER = "log_power"  # −A (−log r)^δ + B
    CONSTANT = "constant"
    NONE = "none"


class LimitEstimate(BaseModel):
    """Extrapolated limit of a profile as r → 0⁺."""

    model_config = _FROZEN

    value: float | None
    model: LimitModel
    params: Dict[str, float] = Field(default_factory=dict)
    fit_residual: float
    diverged: bool = False
    inconclusive: bool = False
    fit_window: Tuple[float, float] | None = None


class ConditionVerdict(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"


class ConditionCReport(BaseModel):
    """Integrability of t ↦ ν(dd^cT, φ, t)/t near 0."""

    model_config = _FROZEN

    verdict: ConditionVerdict
    exponent_estimate: float
    method: str  # closed_form | fitted
    window: Tuple[float, float] | None = None
    message: str = ""


class FValue(BaseModel):
    """f(r) = ν(T, φ, r) + ∫₀^r (t^p/r^p − 1) ν(dd^cT, φ, t)/t dt."""

    model_config = _FROZEN

    value: float | None
    diverged: bool = False
    nu: float
    correction: float | None
    method: str
    abs_error_bound: float = 0.0
    std_error: float | None = None


class RingProfile(BaseModel):
    """Ring masses ∫_{ε <= φ < r} T∧α_φ^p as ε decreases."""

    model_config = _FROZEN

    r: float
    eps: Tuple[float, ...]
    values: Tuple[float, ...]
    std_errors: Tuple[float, ...]
    stabilised: bool
    spread: float


def f_function(
    T: ModelCurrent,
    phi: Weight,
    r: float,
    engine: Engine | str = Engine.AUTO,
    n_samples: int | None = None,
    seed: int = 0,
) -> FValue:
    """The nonincreasing functional whose limit at 0 is ν(T, φ)."""
    nu = nu_estimate(T, phi, r, engine, n_samples, seed)
    correction = kernel_integral(T, phi, r, Kernel.f_correction(), engine, n_samples, seed)
    if correction.diverged or correction.value is None:
        return FValue(value=None, diverged=True, nu=nu.value, correction=None, method=correction.method.value)
    return FValue(
        value=nu.value + correction.value,
        nu=nu.value,
        correction=correction.value,
        method=nu.method.value if nu.method == correction.method else f"{nu.method.value}+{correction.method.value}",
        abs_error_bound=_deterministic_error(nu) + _deterministic_error(correction),
        std_error=_combined_std_error(nu, correction),
    )


def _deterministic_error(result: MassValue | KernelResult) -> float:
    return 0.0 if result.std_error is not None else result.abs_error_bound


def _combined_std_error(*results: MassValue | KernelResult) -> float | None:
    errors = [result.std_error for result in results if result.std_error is not None]
    return math.sqrt(sum(e * e for e in errors)) if errors else None


def _geometric_grid(r_min: float, r_max: float, n_points: int) -> np.ndarray:
    if n_points < _MIN_POINTS:
        raise InvalidInputError(f"a profile needs at least {_MIN_POINTS} points, got {n_points}")
    if not 0 < r_min < r_max:
        raise InvalidInputError(f"profile radii must satisfy 0 < r_min < r_max, got {r_min:g}, {r_max:g}")
    return np.geomspace(r_min, r_max, n_points)


def nu_profile(
    S: ModelCurrent,
    phi: Weight,
    r_min: float,
    r_max: float,
    n_points: int = 32,
    engine: Engine | str = Engine.AUTO,
    quantity: Quantity | str = Quantity.NU,
    n_samples: int | None = None,
    seed: int = 0,
) -> NuProfile:
    """Sample ν(S, φ, ·) (or ν(dd^cS), f, ring masses) on a geometric grid in (0, R(φ))."""
    quantity = Quantity(quantity)
    grid = _geometric_grid(r_min, r_max, n_points)
    check_radius(phi, S, r_max, "r_max")
    logger.info(f"Profiling {quantity.value} on {n_points} points in [{r_min:g}, {r_max:g}]")

    evaluate: Callable[[float], MassValue]
    if quantity is Quantity.NU:

        def evaluate(r: float) -> MassValue:
            return nu_estimate(S, phi, r, engine, n_samples, seed)

    elif quantity is Quantity.NU_DDC:

        def evaluate(r: float) -> MassValue:
            return nu_ddc_estimate(S, phi, r, engine, n_samples, seed)

    elif quantity is Quantity.F:

        def evaluate(r: float) -> MassValue:
            f = f_function(S, phi, r, engine, n_samples, seed)
            if f.diverged:
                return MassValue(value=-math.inf, method=MassMethod.CLOSED_FORM)
            return MassValue(value=f.value, method=_method(f.method), abs_error_bound=f.abs_error_bound + (f.std_error or 0.0))

    else:

        def evaluate(r: float) -> MassValue:
            # grid points are the inner radii of rings ending at r_max
            return ring_alpha_mass(S, phi, r, r_max, engine, n_samples, seed)

    values, engines, errors = [], [], []
    for r in grid:
        result = evaluate(float(r))
        values.append(result.value)
        engines.append("diverged" if math.isinf(result.value) else result.method.value)
        errors.append(result.abs_error_bound)
    return NuProfile(
        grid=tuple(float(r) for r in grid),
        values=tuple(values),
        engines=tuple(engines),
        err_bounds=tuple(errors),
        quantity=quantity,
        bidim=S.bidim,
    )


def _method(tag: str) -> MassMethod:
    # mixed tags such as "closed_form+quadrature" report the less exact part
    return MassMethod(tag.split("+")[-1])


def nu_ddc_profile(S: ModelCurrent, phi: Weight, r_min: float, r_max: float, n_points: int = 32, **kwargs) -> NuProfile:
    return nu_profile(S, phi, r_min, r_max, n_points, quantity=Quantity.NU_DDC, **kwargs)


def f_profile(T: ModelCurrent, phi: Weight, r_min: float, r_max: float, n_points: int = 32, **kwargs) -> NuProfile:
    return nu_profile(T, phi, r_min, r_max, n_points, quantity=Quantity.F, **kwargs)


def ring_profile(
    T: ModelCurrent,
    phi: Weight,
    r: float,
    eps_grid: Sequence[float],
    engine: Engine | str = Engine.AUTO,
    n_samples: int | None = None,
    seed: int = 0,
) -> RingProfile:
    """Ring masses on B_φ(ε, r) for decreasing ε.

    This is an experiment on whether T∧α_φ^p extends across {φ = 0}; it
    reports whether the values settle and claims nothing beyond that.
    """
    eps = sorted((float(e) for e in eps_grid), reverse=True)
    if not eps or eps[-1] <= 0 or eps[0] >= r:
        raise InvalidInputError("ring profile needs 0 < eps < r")
    masses = [ring_alpha_mass(T, phi, e, r, engine, n_samples, seed) for e in eps]
    values = [m.value for m in masses]
    errors = [m.std_error if m.std_error is not None else m.abs_error_bound for m in masses]
    spread = abs(values[-1] - values[-2]) if len(values) > 1 else 0.0
    noise = Config.MC_SIGMAS * math.hypot(errors[-1], errors[-2]) if len(values) > 1 else 0.0
    stabilised = spread <= max(Config.TOL_LIMIT * max(1.0, abs(values[-1])), noise)
    return RingProfile(
        r=r, eps=tuple(eps), values=tuple(values), std_errors=tuple(errors), stabilised=stabilised, spread=spread
    )


# Limit extrapolation: variable projection over the nonlinear exponents,
# linear coefficients by least squares.


def _design(terms: List[Callable[[np.ndarray], np.ndarray]], r: np.ndarray) -> np.ndarray:
    return np.column_stack([term(r) for term in terms])


def _solve(terms: List[Callable[[np.ndarray], np.ndarray]], r: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, float]:
    mat = _design(terms, r)
    coeffs, *_ = np.linalg.lstsq(mat, v, rcond=None)
    rms = float(np.sqrt(np.mean((mat @ coeffs - v) ** 2)))
    return coeffs, rms


def _power_terms(*alphas: float) -> List[Callable[[np.ndarray], np.ndarray]]:
    terms: List[Callable[[np.ndarray], np.ndarray]] = [np.ones_like]
    for alpha in alphas:
        terms.append(lambda r, alpha=alpha: r**alpha)
    return terms


def _fit_power(r: np.ndarray, v: np.ndarray, scale: float) -> tuple[float, Dict[str, float]]:
    lo, hi = _ALPHA_RANGE
    alphas = np.geomspace(lo, hi, 121)

    def rms1(alpha: float) -> float:
        return _solve(_power_terms(alpha), r, v)[1]

    coarse = [rms1(a) for a in alphas]
    i = int(np.argmin(coarse))
    bracket = (alphas[max(i - 1, 0)], alphas[min(i + 1, alphas.size - 1)])
    best = minimize_scalar(rms1, bounds=bracket, method="bounded", options={"xatol": 1e-12})
    alpha = float(best.x) if best.fun <= coarse[i] else float(alphas[i])
    coeffs, rms = _solve(_power_terms(alpha), r, v)
    params = {"nu_inf": float(coeffs[0]), "A1": float(coeffs[1]), "alpha1": alpha}
    if rms / scale <= Config.FIT_REL_TOL * 1e-3:
        return rms / scale, params

    def rms2(x: np.ndarray) -> float:
        a1, a2 = np.clip(x, lo, hi)
        if abs(a2 - a1) < 1e-3:
            return math.inf
        return _solve(_power_terms(a1, a2), r, v)[1]

    pairs = np.geomspace(lo, hi, 41)
    start = min(((a1, a2) for a1 in pairs for a2 in pairs if a2 > a1 * 1.05), key=lambda x: rms2(np.array(x)))
    refined = minimize(rms2, np.array(start), method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-16})
    a1, a2 = sorted(np.clip(refined.x, lo, hi))
    coeffs2, rms_two = _solve(_power_terms(a1, a2), r, v)
    if rms_two < rms:
        rms = rms_two
        params = {
            "nu_inf": float(coeffs2[0]),
            "A1": float(coeffs2[1]),
            "alpha1": float(a1),
            "A2": float(coeffs2[2]),
            "alpha2": float(a2),
        }
    return rms / scale, params


def _fit_log(r: np.ndarray, v: np.ndarray, scale: float) -> tuple[float, Dict[str, float]]:
    coeffs, rms = _solve([np.log, np.ones_like], r, v)
    return rms / scale, {"A": float(coeffs[0]), "B": float(coeffs[1])}


def _fit_log_power(r: np.ndarray, v: np.ndarray, scale: float) -> tuple[float, Dict[str, float]]:
    def terms(delta: float) -> List[Callable[[np.ndarray], np.ndarray]]:
        return [lambda x: -((-np.log(x)) ** delta), np.ones_like]

    best = minimize_scalar(
        lambda d: _solve(terms(d), r, v)[1], bounds=_DELTA_RANGE, method="bounded", options={"xatol": 1e-10}
    )
    delta = float(best.x)
    coeffs, rms = _solve(terms(delta), r, v)
    return rms / scale, {"A": float(coeffs[0]), "B": float(coeffs[1]), "delta": delta}


_FITTERS = {
    LimitModel.POWER: _fit_power,
    LimitModel.LOG: _fit_log,
    LimitModel.LOG_POWER: _fit_log_power,
}


def _limit_value(model: LimitModel, params: Dict[str, float]) -> float:
    if model is LimitModel.POWER:
        return params["nu_inf"]
    # A log r and −A(−log r)^δ both tend to −∞·sign(A)
    return -math.inf if params["A"] > 0 else math.inf


def _fit_all(r: np.ndarray, v: np.ndarray) -> Dict[LimitModel, tuple[float, Dict[str, float]]]:
    scale = float(np.mean(np.abs(v))) or 1.0
    fits = {}
    for model, fitter in _FITTERS.items():
        try:
            fits[model] = fitter(r, v, scale)
        except (np.linalg.LinAlgError, ValueError) as e:
            logger.debug(f"{model.value} fit failed: {e}")
    return fits


def _select(fits: Dict[LimitModel, tuple[float, Dict[str, float]]], tol: float) -> LimitModel | None:
    accepted = [(res, i, m) for i, (m, (res, _)) in enumerate(fits.items()) if res <= tol]
    if not accepted:
        return None
    best = min(res for res, _, _ in accepted)
    # dict order is the tie-break order: power, log, log-power
    return min((i, m) for res, i, m in accepted if res <= best + _TIE)[1]


def estimate_limit(profile: NuProfile) -> LimitEstimate:
    """Extrapolate lim_{r→0⁺} of a profile by fitting three small-r models.

    Raises:
        InvalidInputError: fewer than 8 points or less than 3 decades
    """
    r = np.asarray(profile.grid)
    v = np.asarray(profile.values)
    if r.size < _MIN_POINTS or math.log10(r[-1] / r[0]) < _MIN_DECADES - 1e-9:
        raise InvalidInputError(f"limit estimation needs >= {_MIN_POINTS} points spanning >= {_MIN_DECADES:g} decades")

    finite = np.isfinite(v)
    if not np.all(finite):
        if np.all(v[~finite] < 0) and not np.any(finite):
            return LimitEstimate(value=-math.inf, model=LimitModel.NONE, fit_residual=0.0, diverged=True)
        r, v = r[finite], v[finite]
        if r.size < _MIN_POINTS:
            return LimitEstimate(value=None, model=LimitModel.NONE, fit_residual=math.inf, inconclusive=True)

    window = (float(r[0]), float(r[-1]))
    if np.ptp(v) <= 1e-14 * max(1.0, float(np.max(np.abs(v)))):
        return LimitEstimate(value=float(np.mean(v)), model=LimitModel.CONSTANT, fit_residual=0.0, fit_window=window)

    fits = _fit_all(r, v)
    model = _select(fits, Config.FIT_REL_TOL)
    if model is None:
        # the three smallest decades carry the asymptotics
        small = r <= r[0] * 10**_MIN_DECADES * (1 + 1e-9)
        if np.count_nonzero(small) >= _MIN_POINTS // 2:
            window = (float(r[small][0]), float(r[small][-1]))
            fits = _fit_all(r[small], v[small])
            model = _select(fits, Config.FIT_REL_TOL)

    if model is None:
        divergent = {m: f for m, f in fits.items() if m is not LimitModel.POWER}
        model = _select(divergent, Config.DIVERGENT_FIT_REL_TOL)
        if model is None:
            best = min(res for res, _ in fits.values()) if fits else math.inf
            logger.warning(f"No limit model fits below tolerance (best relative residual {best:.3g})")
            return LimitEstimate(value=None, model=LimitModel.NONE, fit_residual=best, inconclusive=True, fit_window=window)

    residual, params = fits[model]
    value = _limit_value(model, params)
    logger.info(f"Limit model {model.value}: value={value:.12g}, residual={residual:.3g}")
    return LimitEstimate(
        value=value,
        model=model,
        params=params,
        fit_residual=residual,
        diverged=math.isinf(value),
        fit_window=window,
    )


def _fitted_slope(values: np.ndarray, t: np.ndarray) -> float | None:
    if np.all(values == 0):
        return math.inf
    if np.any(values <= 0) or not np.all(np.isfinite(values)):
        return None
    slope, _ = np.polyfit(np.log(t), np.log(values), 1)
    return float(slope)


def check_condition_C(
    T: ModelCurrent,
    phi: Weight,
    engine: Engine | str = Engine.AUTO,
    n_samples: int | None = None,
    seed: int = 0,
) -> ConditionCReport:
    """Decide whether ν(dd^cT, φ, t)/t is integrable near 0.

    Radial configurations are decided exactly from the term exponents; the
    rest fit the slope of log ν(dd^cT, φ, t) over three decades above
    Config.SLOPE_T_FLOOR.
    """
    engine = as_engine(engine)
    red = radial_reduction(T, phi)
    if red is not None and engine is not Engine.MC:
        expansion = red.expansion()
        if expansion.has_constant_rate:
            return ConditionCReport(
                verdict=ConditionVerdict.FAILS,
                exponent_estimate=0.0,
                method="closed_form",
                message="ν(dd^cT, φ, t) does not tend to 0",
            )
        return ConditionCReport(
            verdict=ConditionVerdict.HOLDS, exponent_estimate=expansion.min_exponent, method="closed_form"
        )

    t_lo = Config.SLOPE_T_FLOOR
    t = np.geomspace(t_lo, t_lo * 1e3, 4)
    window = (float(t[0]), float(t[-1]))
    ddc_engine = Engine.MC if engine is Engine.AUTO else engine
    values = np.array([nu_ddc_estimate(T, phi, float(ti), ddc_engine, n_samples, seed).value for ti in t])
    slope = _fitted_slope(values, t)
    if slope is None:
        return ConditionCReport(
            verdict=ConditionVerdict.INCONCLUSIVE,
            exponent_estimate=math.nan,
            method="fitted",
            window=window,
            message="ν(dd^cT, φ, t) is not positive and finite across the window",
        )
    message = ""
    if slope > Config.SLOPE_WINDOW:
        verdict = ConditionVerdict.HOLDS
    elif slope < -Config.SLOPE_WINDOW:
        verdict = ConditionVerdict.FAILS
        message = "ν(dd^cT, φ, t) grows as t decreases"
    else:
        verdict = ConditionVerdict.INCONCLUSIVE
        message = f"flat rate: fitted slope {slope:.3g} is within ±{Config.SLOPE_WINDOW:g}, ν(dd^cT, φ, t) shows no decay"
    return ConditionCReport(verdict=verdict, exponent_estimate=slope, method="fitted", window=window, message=message)
