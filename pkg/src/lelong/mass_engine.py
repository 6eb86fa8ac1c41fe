"""Masses behind every ν-quantity.

For a subspace current with a pure-power restricted weight φ = σ|w|^(2k), or a
smooth current with an isotropic weight, everything reduces to one radial
variable. Writing r̃ = r/σ and ρ₀ = r̃^(1/(2k)):

* the (dd^cφ)^p-measure of {|w| < ρ} is C ρ^(2λ), with (C, λ) = ((2k)^p, kp)
  on a p-dimensional subspace and (2^n k^p, (n-p) + kp) for smooth currents;
* dd^cT ∧ (dd^cφ)^(p-1) of the same ball is ρu'(ρ)·D ρ^(2μ), with
  (D, μ) = ((2k)^(p-1), k(p-1)) or (2^(n-1) k^(p-1), (n-p) + k(p-1));
* (dd^c log φ)^p has cumulative measure C ρ^(2(n-p)) (a point mass at 0 on
  subspaces).

ν(dd^cT, φ, t) is then a finite sum of terms A t^γ [((−log t)/k)^(δ-1)]
(:class:`DdcExpansion`) whose moments have closed forms. Other configurations
go to the Monte Carlo engine.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import IntegrationWarning, quad
from scipy.special import gamma as gamma_fn
from scipy.special import gammaincc

from lelong.cache import cached_computation
from lelong.config import Config
from lelong.current_model import (
    ModelCurrent,
    RadialDensity,
    RestrictionForm,
    Weight,
    check_radius,
    laplacian_decomposition,
    restrict_weight,
)
from lelong.error_handling import InvalidInputError, NumericalError, UnsupportedConfigurationError
from lelong.mc_engine import Form, MCEstimate, mc_integral, mc_mass, mc_ring_mass

logger = logging.getLogger(__name__)

_FROZEN = ConfigDict(frozen=True)

# relative accuracy the quadrature path promises on top of QUAD_ABS_TOL
_ACCEPT_REL = 1e-9
_EXPONENT_EPS = 1e-14


class Engine(str, Enum):
    AUTO = "auto"
    CLOSED = "closed"
    QUAD = "quad"
    MC = "mc"


class MassMethod(str, Enum):
    CLOSED_FORM = "closed_form"
    TRANSFORM = "transform"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte_carlo"


class MassValue(BaseModel):
    """A mass (or a ν-value derived from one) with its error information."""

    model_config = _FROZEN

    value: float
    method: MassMethod
    abs_error_bound: float = Field(default=0.0, ge=0)
    std_error: float | None = None
    n_samples: int | None = None

    def divided(self, factor: float) -> "MassValue":
        return self.model_copy(
            update={
                "value": self.value / factor,
                "abs_error_bound": self.abs_error_bound / factor,
                "std_error": None if self.std_error is None else self.std_error / factor,
            }
        )

    @classmethod
    def from_mc(cls, estimate: MCEstimate) -> "MassValue":
        return cls(
            value=estimate.value,
            method=MassMethod.MONTE_CARLO,
            abs_error_bound=estimate.std_error,
            std_error=estimate.std_error,
            n_samples=estimate.n_samples,
        )


class DdcTerm(BaseModel):
    """A t^γ term of ν(dd^cT, φ, t), times ((−log t)/log_scale)^(δ−1) when δ is set."""

    model_config = _FROZEN

    coeff: float
    gamma: float = Field(ge=0)
    delta: float | None = None
    log_scale: float = 1.0

    @property
    def is_constant_rate(self) -> bool:
        """True when the term does not tend to 0 like a positive power."""
        return abs(self.gamma) < _EXPONENT_EPS

    def value(self, t: np.ndarray | float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = self.coeff * t**self.gamma
        if self.delta is not None:
            with np.errstate(divide="ignore"):
                out = out * (-np.log(t) / self.log_scale) ** (self.delta - 1)
        return out

    def integral(self, shift: float, lo: float, hi: float) -> float:
        """∫_lo^hi term(t)·t^(shift−1) dt; ±inf when it diverges at 0."""
        if self.coeff == 0 or hi <= lo:
            return 0.0
        beta = self.gamma + shift
        if self.delta is None:
            if abs(beta) < _EXPONENT_EPS:
                if lo == 0:
                    return math.copysign(math.inf, self.coeff)
                return self.coeff * math.log(hi / lo)
            return self.coeff * (hi**beta - lo**beta) / beta

        if hi >= 1:
            raise InvalidInputError("log-power terms need radii below 1")
        delta, kappa = self.delta, self.log_scale
        x_hi = -math.log(hi)
        x_lo = math.inf if lo == 0 else -math.log(lo)
        factor = self.coeff * kappa ** (1 - delta)
        if abs(beta) < _EXPONENT_EPS:
            if lo == 0:
                return math.copysign(math.inf, self.coeff)
            return factor * (x_lo**delta - x_hi**delta) / delta

        def upper(x: float) -> float:
            return 0.0 if math.isinf(x) else float(gamma_fn(delta) * gammaincc(delta, beta * x))

        return factor * beta ** (-delta) * (upper(x_hi) - upper(x_lo))


class DdcExpansion(BaseModel):
    """ν(dd^cT, φ, t) = Σ term(t / scale)."""

    model_config = _FROZEN

    terms: Tuple[DdcTerm, ...]
    scale: float = 1.0

    @property
    def min_exponent(self) -> float:
        exponents = [term.gamma for term in self.terms if term.coeff != 0]
        return min(exponents) if exponents else math.inf

    @property
    def has_constant_rate(self) -> bool:
        return any(term.coeff != 0 and term.is_constant_rate for term in self.terms)

    def value(self, t: np.ndarray | float) -> np.ndarray:
        t = np.asarray(t, dtype=float) / self.scale
        out = np.zeros_like(t)
        for term in self.terms:
            out = out + term.value(t)
        return out

    def moment(self, shift: float, lo: float, hi: float) -> float:
        """∫_lo^hi ν(dd^cT, φ, t)·t^(shift−1) dt, inf when divergent."""
        parts = [term.integral(shift, lo / self.scale, hi / self.scale) for term in self.terms]
        if any(math.isinf(part) for part in parts):
            return math.inf
        return self.scale**shift * math.fsum(parts)

    def diverges(self, shift: float, lo: float) -> bool:
        return lo == 0 and any(
            term.coeff != 0 and abs(term.gamma + shift) < _EXPONENT_EPS for term in self.terms
        )


@dataclass(frozen=True)
class RadialReduction:
    """One-variable reduction of a radial current/weight pair."""

    density: RadialDensity
    k: float
    scale: float
    p: int
    codim: int

    @property
    def mass_coeff(self) -> float:
        return 2.0 ** (self.p + self.codim) * self.k**self.p

    @property
    def mass_exponent(self) -> float:
        return self.codim + self.k * self.p

    @property
    def ddc_coeff(self) -> float:
        return 2.0 ** (self.p - 1 + self.codim) * self.k ** (self.p - 1)

    @property
    def ddc_exponent(self) -> float:
        return self.codim + self.k * (self.p - 1)

    @property
    def has_closed_mass(self) -> bool:
        return self.codim == 0 and (self.p == 1 or self.k == 1)

    def with_k(self, k: float) -> "RadialReduction":
        return RadialReduction(self.density, k, self.scale, self.p, self.codim)

    def key(self) -> Dict[str, Any]:
        return {
            "density": self.density.model_dump(mode="json"),
            "k": self.k,
            "scale": self.scale,
            "p": self.p,
            "codim": self.codim,
        }

    def expansion(self) -> DdcExpansion:
        k, eta, coeff = self.k, self.codim / self.k, self.ddc_coeff
        terms = []
        for c, a in self.density.monomials:
            if a and c:
                terms.append(DdcTerm(coeff=coeff * 2 * a * c, gamma=a / k + eta))
        if self.density.log_coeff:
            terms.append(DdcTerm(coeff=coeff * 2 * self.density.log_coeff, gamma=eta))
        for e, delta in self.density.log_powers:
            if e:
                terms.append(
                    DdcTerm(
                        coeff=coeff * 2 * e * delta,
                        gamma=eta,
                        delta=None if delta == 1 else delta,
                        log_scale=k,
                    )
                )
        return DdcExpansion(terms=tuple(terms), scale=self.scale)


def radial_reduction(T: ModelCurrent, phi: Weight) -> RadialReduction | None:
    """Reduction of (T, φ) to one radial variable, or None for general profiles."""
    restricted = restrict_weight(phi, T)
    if restricted.form is not RestrictionForm.PURE_POWER:
        return None
    return RadialReduction(T.density, restricted.k, restricted.scale, T.bidim, T.codim)


def adaptive_quad(f: Callable[[float], float], a: float, b: float, what: str) -> tuple[float, float]:
    """QUADPACK integral of f over [a, b] within the configured budget.

    Raises:
        NumericalError: the evaluation budget is exceeded or the error
            estimate misses the tolerance
    """
    limit = Config.quad_limit()
    if math.isinf(b):
        # the infinite-range rule spends 30 evaluations per subinterval
        limit = max(1, Config.MAX_EVALS // 30)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        result = quad(
            f, a, b, epsabs=Config.QUAD_ABS_TOL, epsrel=Config.QUAD_REL_TOL, limit=limit, full_output=1
        )
    value, abserr, info = result[0], result[1], result[2]
    neval = int(info["neval"])
    logger.debug(f"quad {what}: value={value:.16g} err={abserr:.3g} neval={neval}")
    if neval > Config.MAX_EVALS:
        raise NumericalError(f"{what}: evaluation budget of {Config.MAX_EVALS} exceeded ({neval})")
    if not math.isfinite(value) or abserr > max(Config.QUAD_ABS_TOL, _ACCEPT_REL * abs(value)):
        raise NumericalError(
            f"{what}: quadrature did not converge (estimated error {abserr:.3g} after {neval} evaluations)"
        )
    return value, abserr


def _nu_closed(red: RadialReduction, rt: float) -> float:
    """ν at r̃ from the exact radial antiderivatives."""
    C, lam, k, p, codim = red.mass_coeff, red.mass_exponent, red.k, red.p, red.codim
    d = red.density
    parts = [c * C * lam / (a + lam) * rt ** ((a + codim) / k) for c, a in d.monomials]
    log_rt = math.log(rt)
    if d.log_coeff:
        parts.append(d.log_coeff * C / lam * rt ** (codim / k) * (lam / k * log_rt - 1))
    for e, delta in d.log_powers:
        upper_x = -(lam / k) * log_rt
        incomplete = float(gamma_fn(delta + 1) * gammaincc(delta + 1, upper_x))
        parts.append(-e * C * lam ** (-delta) * incomplete * rt ** (-p))
    return math.fsum(parts)


def _nu_transform(red: RadialReduction, rt: float) -> float:
    """ν(T, |w|^(2k), r̃) from the k = 1 closed forms and the power-scaling kernel."""
    base = red.with_k(1.0)
    k, p = red.k, red.p
    x = rt ** (1.0 / k)
    expansion = base.expansion()
    kernel = x**-p * expansion.moment(p, 0.0, x) - x ** (-k * p) * expansion.moment(k * p, 0.0, x)
    return k**p * (_nu_closed(base, x) + kernel)


def _nu_quad(red: RadialReduction, rt: float) -> tuple[float, float]:
    C, lam, k, p = red.mass_coeff, red.mass_exponent, red.k, red.p
    log_rho0_sq = math.log(rt) / k
    u = red.density
    if u.has_log_terms or 2 * lam < 1:

        def integrand(s: float) -> float:
            return float(u.value_at_log(log_rho0_sq - 2 * s)) * math.exp(-2 * lam * s)

        J, err = adaptive_quad(integrand, 0.0, math.inf, "nu")
    else:

        def integrand(x: float) -> float:
            if x == 0:
                return 0.0 if 2 * lam > 1 else float(u.value_at_log(-math.inf))
            return float(u.value_at_log(log_rho0_sq + 2 * math.log(x))) * x ** (2 * lam - 1)

        J, err = adaptive_quad(integrand, 0.0, 1.0, "nu")
    factor = C * 2 * lam * rt ** (lam / k - p)
    return factor * J, factor * err


def as_engine(engine: Engine | str) -> Engine:
    try:
        return Engine(engine)
    except ValueError as e:
        raise InvalidInputError(f"unknown engine {engine!r}") from e


def nu_estimate(
    S: ModelCurrent,
    phi: Weight,
    r: float,
    engine: Engine | str = Engine.AUTO,
    n_samples: int | None = None,
    seed: int = 0,
) -> MassValue:
    """ν(S, φ, r) with method and error bound."""
    engine = as_engine(engine)
    check_radius(phi, S, r)
    red = radial_reduction(S, phi)
    p = S.bidim

    if engine is Engine.MC or (engine is Engine.AUTO and red is None):
        return MassValue.from_mc(mc_mass(S, phi, r, n_samples, seed)).divided(r**p)
    if red is None:
        raise UnsupportedConfigurationError(
            f"no {engine.value} path for a general-profile weight; use the Monte Carlo engine"
        )

    rt = r / red.scale
    if engine in (Engine.AUTO, Engine.CLOSED) and red.codim == 0:
        if red.has_closed_mass:
            return MassValue(value=_nu_closed(red, rt), method=MassMethod.CLOSED_FORM)
        return MassValue(value=_nu_transform(red, rt), method=MassMethod.TRANSFORM)
    if engine is Engine.CLOSED:
        raise UnsupportedConfigurationError("smooth currents have no closed-form mass; use quad or mc")

    value, err = cached_computation("quad_nu", {"reduction": red.key(), "rt": rt}, lambda: _nu_quad(red, rt))
    return MassValue(value=value, method=MassMethod.QUADRATURE, abs_error_bound=err)


def mass_T(
    T: ModelCurrent,
    phi: Weight,
    r: float,
    engine: Engine | str = Engine.AUTO,
    n_samples: int | None = None,
    seed: int = 0,
) -> MassValue:
    """∫_{B_φ(r)} T ∧ (dd^cφ)^p."""
    return nu_estimate(T, phi, r, engine, n_samples, seed).divided(r**-T.bidim)


def nu_value(S: ModelCurrent, phi: Weight, r: float, engine: Engine | str = Engine.AUTO, **mc: Any) -> float:
    """ν(S, φ, r)."""
    return nu_estimate(S, phi, r, engine, **mc).value


def ddc_expansion(T: ModelCurrent, phi: Weight) -> DdcExpansion:
    """Term expansion of ν(dd^cT, φ, ·).

    Raises:
        UnsupportedConfigurationError: the weight restricts to a general profile
    """
    red = radial_reduction(T, phi)
    if red is None:
        raise UnsupportedConfigurationError("ν(dd^cT, φ, ·) has no term expansion for a general-profile weight")
    return red.expansion()


def _nu_ddc_quad(red: RadialReduction, tt: float) -> tuple[float, float]:
    mu = red.ddc_exponent
    u = red.density
    log_rho0_sq = math.log(tt) / red.k

    def integrand(s: float) -> float:
        log_sq = log_rho0_sq - 2 * s
        slope = float(u.flux_slope_at_log(log_sq))
        if mu:
            slope += 2 * mu * float(u.radial_flux_at_log(log_sq))
        return slope * math.exp(-2 * mu * s)

    J, err = adaptive_quad(integrand, 0.0, math.inf, "nu_ddc")
    if mu == 0:
        atom_mass, _ = laplacian_decomposition(u, 1)
        J += atom_mass
    factor = red.ddc_coeff * tt ** (red.codim / red.k)
    return factor * J, factor * err


def nu_ddc_estimate(
    T: ModelCurrent,
    phi: Weight,
    t: float,
    engine: Engine | str = Engine.AUTO,
    n_samples: int | None = None,
    seed: int = 0,
) -> MassValue:
    """ν(dd^cT, φ, t) with method and error bound."""
    engine = as_engine(engine)
    check_radius(phi, T, t, "t")
    red = radial_reduction(T, phi)
    p = T.bidim

    if engine is Engine.MC or (engine is Engine.AUTO and red is None):
        return MassValue.from_mc(mc_mass(T, phi, t, n_samples, seed, form=Form.DDC)).divided(t ** (p - 1))
    if red is None:
        raise UnsupportedConfigurationError(
            f"no {engine.value} path for a general-profile weight; use the Monte Carlo engine"
        )
    if engine is Engine.QUAD:
        tt = t / red.scale
        value, err = cached_computation(
            "quad_nu_ddc", {"reduction": red.key(), "tt": tt}, lambda: _nu_ddc_quad(red, tt)
        )
        return MassValue(value=value, method=MassMethod.QUADRATURE, abs_error_bound=err)
    return MassValue(value=float(red.expansion().value(t)), method=MassMethod.CLOSED_FORM)


def nu_ddc(T: ModelCurrent, phi: Weight, t: float, engine: Engine | str = Engine.AUTO, **mc: Any) -> float:
    """ν(dd^cT, φ, t) = t^(1−p) ∫_{B_φ(t)} dd^cT ∧ (dd^cφ)^(p−1)."""
    return nu_ddc_estimate(T, phi, t, engine, **mc).value


def _alpha_quad(red: RadialReduction, rt1: float, rt2: float) -> tuple[float, float]:
    codim, k = red.codim, red.k
    log_rho2_sq = math.log(rt2) / k
    upper = math.inf if rt1 == 0 else math.log(rt2 / rt1) / (2 * k)

    def integrand(s: float) -> float:
        return float(red.density.value_at_log(log_rho2_sq - 2 * s)) * math.exp(-2 * codim * s)

    J, err = adaptive_quad(integrand, 0.0, upper, "alpha_mass")
    factor = red.mass_coeff * 2 * codim * rt2 ** (codim / k)
    return factor * J, factor * err


def ring_alpha_mass(
    T: ModelCurrent,
    phi: Weight,
    r1: float,
    r2: float,
    engine: Engine | str = Engine.AUTO,
    n_samples: int | None = None,
    seed: int = 0,
) -> MassValue:
    """∫_{r1 <= φ < r2} T ∧ (dd^c log φ)^p; ``r1 = 0`` gives the mass off {φ = 0}."""
    engine = as_engine(engine)
    check_radius(phi, T, r2, "r2")
    if not 0 <= r1 <= r2:
        raise InvalidInputError(f"ring radii must satisfy 0 <= r1 <= r2, got r1={r1:g}, r2={r2:g}")
    if r1 == r2:
        return MassValue(value=0.0, method=MassMethod.CLOSED_FORM)

    red = radial_reduction(T, phi)
    if engine is Engine.MC or (engine is Engine.AUTO and red is None):
        return MassValue.from_mc(mc_ring_mass(T, phi, r1, r2, n_samples, seed))
    if red is None:
        raise UnsupportedConfigurationError(
            f"no {engine.value} path for a general-profile weight; use the Monte Carlo engine"
        )
    if red.codim == 0 or T.is_zero:
        # (dd^c log φ)^p is carried by {φ = 0}
        return MassValue(value=0.0, method=MassMethod.CLOSED_FORM)
    if engine is Engine.CLOSED:
        raise UnsupportedConfigurationError("smooth currents have no closed-form ring mass; use quad or mc")
    rt1, rt2 = r1 / red.scale, r2 / red.scale
    value, err = cached_computation(
        "quad_alpha", {"reduction": red.key(), "rt1": rt1, "rt2": rt2}, lambda: _alpha_quad(red, rt1, rt2)
    )
    return MassValue(value=value, method=MassMethod.QUADRATURE, abs_error_bound=err)


class KernelKind(str, Enum):
    F_CORRECTION = "f_correction"  # (t^p/r^p − 1)
    POWER_SCALING = "power_scaling"  # (t^p/r^p − t^(kp)/r^(kp))
    MASS_BOUND = "mass_bound"  # t^p/r^p


class Kernel(BaseModel):
    """Weight g(t) of a kernel integral ∫₀^r g(t)·ν(dd^cT, φ, t)/t dt."""

    model_config = _FROZEN

    kind: KernelKind
    k: float | None = Field(default=None, gt=0)

    @classmethod
    def f_correction(cls) -> "Kernel":
        return cls(kind=KernelKind.F_CORRECTION)

    @classmethod
    def power_scaling(cls, k: float) -> "Kernel":
        return cls(kind=KernelKind.POWER_SCALING, k=k)

    @classmethod
    def mass_bound(cls) -> "Kernel":
        return cls(kind=KernelKind.MASS_BOUND)

    def moments(self, p: int, r: float) -> list["Moment"]:
        head = Moment(r**-p, p, 0.0, r)
        if self.kind is KernelKind.F_CORRECTION:
            return [head, Moment(-1.0, 0.0, 0.0, r)]
        if self.kind is KernelKind.POWER_SCALING:
            assert self.k is not None
            return [head, Moment(-(r ** (-self.k * p)), self.k * p, 0.0, r)]
        return [head]


@dataclass(frozen=True)
class Moment:
    """coeff · ∫_lo^hi ν(dd^cT, φ, t)·t^(shift−1) dt."""

    coeff: float
    shift: float
    lo: float
    hi: float

    def kernel_weight(self, p: int) -> Callable[[np.ndarray], np.ndarray]:
        """G(s) = coeff·∫_{max(s, lo)}^{hi} t^(shift−p) dt, the same integral after Fubini."""
        e = self.shift - p + 1

        def antiderivative(x: np.ndarray) -> np.ndarray:
            with np.errstate(divide="ignore"):
                return np.log(x) if abs(e) < _EXPONENT_EPS else x**e / e

        def weight(s: np.ndarray) -> np.ndarray:
            lower = np.maximum(s, self.lo)
            out = self.coeff * (antiderivative(np.asarray(self.hi)) - antiderivative(lower))
            return np.where(s < self.hi, out, 0.0)

        return weight


def lelong_jensen_moments(p: int, r1: float, r2: float) -> list[Moment]:
    """dd^c part of the Lelong-Jensen formula as moments of ν(dd^cT, φ, ·)."""
    return [
        Moment(1.0, 0.0, r1, r2),
        Moment(-(r2**-p), p, r1, r2),
        Moment(r1**-p - r2**-p, p, 0.0, r1),
    ]


class KernelResult(BaseModel):
    """Value of a kernel integral, or a divergence flag."""

    model_config = _FROZEN

    value: float | None
    diverged: bool = False
    method: MassMethod
    abs_error_bound: float = 0.0
    std_error: float | None = None


def _moment_quad(expansion: DdcExpansion, moment: Moment) -> tuple[float, float]:
    hi, shift = moment.hi, moment.shift
    upper = math.inf if moment.lo == 0 else math.log(hi / moment.lo)

    def integrand(s: float) -> float:
        t = hi * math.exp(-s)
        return float(expansion.value(t)) * t**shift

    return adaptive_quad(integrand, 0.0, upper, "kernel")


def _diverges_without_expansion(T: ModelCurrent, moment: Moment) -> bool:
    # log-type densities keep a constant ν(dd^cT) rate whenever nothing damps it
    return T.codim == 0 and T.density.has_log_terms and moment.lo == 0 and moment.shift == 0


def integrate_moments(
    T: ModelCurrent,
    phi: Weight,
    moments: Sequence[Moment],
    engine: Engine | str = Engine.AUTO,
    n_samples: int | None = None,
    seed: int = 0,
) -> KernelResult:
    """Σ coeff·∫ ν(dd^cT, φ, t) t^(shift−1) dt over the given moments."""
    engine = as_engine(engine)
    red = radial_reduction(T, phi)
    moments = [m for m in moments if m.coeff != 0 and m.hi > m.lo]

    if red is not None and engine is not Engine.MC:
        expansion = red.expansion()
        if any(expansion.diverges(m.shift, m.lo) for m in moments):
            method = MassMethod.QUADRATURE if engine is Engine.QUAD else MassMethod.CLOSED_FORM
            return KernelResult(value=None, diverged=True, method=method)
        if engine is Engine.QUAD:
            total, err = 0.0, 0.0
            for m in moments:
                value, m_err = _moment_quad(expansion, m)
                total += m.coeff * value
                err += abs(m.coeff) * m_err
            return KernelResult(value=total, method=MassMethod.QUADRATURE, abs_error_bound=err)
        value = math.fsum(m.coeff * expansion.moment(m.shift, m.lo, m.hi) for m in moments)
        return KernelResult(value=value, method=MassMethod.CLOSED_FORM)

    if engine in (Engine.CLOSED, Engine.QUAD):
        raise UnsupportedConfigurationError(
            f"no {engine.value} path for a general-profile weight; use the Monte Carlo engine"
        )
    if any(_diverges_without_expansion(T, m) for m in moments):
        return KernelResult(value=None, diverged=True, method=MassMethod.MONTE_CARLO)
    if not moments:
        return KernelResult(value=0.0, method=MassMethod.MONTE_CARLO, std_error=0.0)

    p = T.bidim
    weights = [m.kernel_weight(p) for m in moments]

    def kernel_weight(s: np.ndarray) -> np.ndarray:
        return sum((w(s) for w in weights), np.zeros_like(s))

    bound = max(m.hi for m in moments)
    key = {"moments": [[m.coeff, m.shift, m.lo, m.hi] for m in moments]}
    estimate = mc_integral(T, phi, Form.DDC, kernel_weight, bound, n_samples, seed, cache_key=key)
    if not math.isfinite(estimate.value):
        return KernelResult(value=None, diverged=True, method=MassMethod.MONTE_CARLO)
    return KernelResult(
        value=estimate.value,
        method=MassMethod.MONTE_CARLO,
        abs_error_bound=estimate.std_error,
        std_error=estimate.std_error,
    )


def kernel_integral(
    T: ModelCurrent,
    phi: Weight,
    r: float,
    kernel: Kernel,
    engine: Engine | str = Engine.AUTO,
    n_samples: int | None = None,
    seed: int = 0,
) -> KernelResult:
    """∫₀^r g(t)·ν(dd^cT, φ, t)/t dt for the kernel g; divergence is flagged, not raised."""
    check_radius(phi, T, r)
    return integrate_moments(T, phi, kernel.moments(T.bidim, r), engine, n_samples, seed)


def lelong_jensen_ddc_part(
    T: ModelCurrent,
    phi: Weight,
    r1: float,
    r2: float,
    engine: Engine | str = Engine.AUTO,
    n_samples: int | None = None,
    seed: int = 0,
) -> KernelResult:
    """∫_{r1}^{r2}(t^−p − r2^−p) t^(p−1) ν_dd dt + (r1^−p − r2^−p) ∫₀^{r1} t^(p−1) ν_dd dt."""
    check_radius(phi, T, r2, "r2")
    if r1 == r2:
        return KernelResult(value=0.0, method=MassMethod.CLOSED_FORM)
    return integrate_moments(T, phi, lelong_jensen_moments(T.bidim, r1, r2), engine, n_samples, seed)


def current_key(T: ModelCurrent) -> Dict[str, Any]:
    """JSON-ready description of a current, without the cached diagnostics."""
    return T.model_dump(mode="json", include={"kind", "domain", "bidim", "density"})
