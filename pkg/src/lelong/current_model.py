"""Model currents, radial densities, weights and domains.

A model current is either ``u(|w|)·[z_1 = ... = z_{n-p} = 0]`` (subspace kind,
``w`` the coordinates of the subspace) or ``u(|z|)·β₀^{n-p}`` (smooth kind).
Weights are isotropic powers, anisotropic monomial sums and shifted powers,
each with an overall exponent ``k`` and a positive scale.

All normalisations follow ``dd^c = (i/π)∂∂̄``.
"""

from __future__ import annotations

import json
import logging
import math
from enum import Enum
from functools import lru_cache
from typing import Any, Callable, Mapping, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator
from scipy.optimize import brentq

from lelong.config import Config
from lelong.error_handling import InvalidInputError
from lelong.schemas import CurrentSpec, WeightSpec

logger = logging.getLogger(__name__)

_FROZEN = ConfigDict(frozen=True)


class CurrentKind(str, Enum):
    """Support of a model current."""

    SUBSPACE = "subspace"
    SMOOTH = "smooth"


class SignClass(str, Enum):
    """Sign of the density on (0, ball_radius]."""

    NONPOSITIVE = "nonpositive"
    NONNEGATIVE = "nonnegative"
    MIXED = "mixed"
    ZERO = "zero"  # satisfies both sign predicates

    @property
    def is_nonpositive(self) -> bool:
        return self in (SignClass.NONPOSITIVE, SignClass.ZERO)

    @property
    def is_nonnegative(self) -> bool:
        return self in (SignClass.NONNEGATIVE, SignClass.ZERO)


class WeightKind(str, Enum):
    """Weight families; values match the ``kind`` field of weight specs."""

    ISOTROPIC = "pow"
    ANISOTROPIC = "aniso"
    SHIFTED = "shifted"


class RestrictionForm(str, Enum):
    PURE_POWER = "pure_power"
    GENERAL = "general"


class ProfileKind(str, Enum):
    """Inner function ψ of a weight φ = scale·ψ^k."""

    QUADRATIC = "quadratic"  # |w - c|^2 + offset
    MONOMIAL = "monomial"  # Σ |w_j|^(2 b_j)


def _log_sq(rho: ArrayLike) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    with np.errstate(divide="ignore"):
        return 2.0 * np.log(rho)


class Domain(BaseModel):
    """Ball of radius ``ball_radius`` centred at 0 in ℂⁿ."""

    model_config = _FROZEN

    ball_radius: float = Field(default=1.0, gt=0)
    ambient_dim: int = Field(ge=1)


class RadialDensity(BaseModel):
    """u(ρ) = Σ c ρ^(2a) + d log ρ² − Σ e (−log ρ²)^δ."""

    model_config = _FROZEN

    monomials: Tuple[Tuple[float, float], ...] = ()
    log_coeff: float = 0.0
    log_powers: Tuple[Tuple[float, float], ...] = ()

    @field_validator("monomials")
    @classmethod
    def _check_monomials(cls, v: Tuple[Tuple[float, float], ...]) -> Tuple[Tuple[float, float], ...]:
        exponents = [a for _, a in v]
        if any(a < 0 for a in exponents):
            raise ValueError("monomial exponents must be >= 0")
        if len(set(exponents)) != len(exponents):
            raise ValueError("monomial exponents must be pairwise distinct")
        return v

    @field_validator("log_powers")
    @classmethod
    def _check_log_powers(cls, v: Tuple[Tuple[float, float], ...]) -> Tuple[Tuple[float, float], ...]:
        if any(not 0 < delta <= 1 for _, delta in v):
            raise ValueError("log-power exponents must lie in (0, 1]")
        return v

    @property
    def is_zero(self) -> bool:
        return (
            all(c == 0 for c, _ in self.monomials)
            and self.log_coeff == 0
            and all(e == 0 for e, _ in self.log_powers)
        )

    @property
    def has_log_terms(self) -> bool:
        return self.log_coeff != 0 or any(e != 0 for e, _ in self.log_powers)

    @property
    def atom_weight(self) -> float:
        """Coefficient of log ρ² in the small-ρ behaviour (δ = 1 log powers included)."""
        return self.log_coeff + sum(e for e, delta in self.log_powers if delta == 1)

    # The *_at_log forms take L = log ρ² so that quadrature in s = -log ρ
    # never underflows ρ.

    def value_at_log(self, log_sq: ArrayLike) -> np.ndarray:
        log_sq = np.asarray(log_sq, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            s = np.maximum(-log_sq, 0.0)
            out = np.zeros_like(log_sq)
            for c, a in self.monomials:
                out = out + (c if a == 0 else c * np.exp(a * log_sq))
            if self.log_coeff:
                out = out + self.log_coeff * log_sq
            for e, delta in self.log_powers:
                out = out - e * s**delta
        return out

    def radial_flux_at_log(self, log_sq: ArrayLike) -> np.ndarray:
        log_sq = np.asarray(log_sq, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            s = np.maximum(-log_sq, 0.0)
            out = np.full_like(log_sq, 2.0 * self.log_coeff)
            for c, a in self.monomials:
                if a:
                    out = out + 2 * a * c * np.exp(a * log_sq)
            for e, delta in self.log_powers:
                out = out + 2 * e * delta * s ** (delta - 1)
        return out

    def flux_slope_at_log(self, log_sq: ArrayLike) -> np.ndarray:
        """ρ · d/dρ (ρ·u'(ρ)) as a function of log ρ²."""
        log_sq = np.asarray(log_sq, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            s = np.maximum(-log_sq, 0.0)
            out = np.zeros_like(log_sq)
            for c, a in self.monomials:
                if a:
                    out = out + 4 * a * a * c * np.exp(a * log_sq)
            for e, delta in self.log_powers:
                if delta != 1:
                    out = out - 4 * e * delta * (delta - 1) * s ** (delta - 2)
        return out

    def value(self, rho: ArrayLike) -> np.ndarray:
        return self.value_at_log(_log_sq(rho))

    def radial_flux(self, rho: ArrayLike) -> np.ndarray:
        """ρ·u'(ρ)."""
        return self.radial_flux_at_log(_log_sq(rho))

    def radial_flux_derivative(self, rho: ArrayLike) -> np.ndarray:
        """d/dρ (ρ·u'(ρ))."""
        rho = np.asarray(rho, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.flux_slope_at_log(_log_sq(rho)) / rho

    def laplacian(self, rho: ArrayLike, dim: int) -> np.ndarray:
        """Absolutely continuous part of the Laplacian of u(|x|) on ℝ^(2·dim)."""
        rho = np.asarray(rho, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.radial_flux_derivative(rho) / rho
            # on ℝ² the flux term vanishes identically, even where the flux is infinite
            if dim > 1:
                out = out + (2 * dim - 2) * self.radial_flux(rho) / (rho * rho)
            return out

    def scaled(self, factor: float) -> "RadialDensity":
        return RadialDensity(
            monomials=tuple((factor * c, a) for c, a in self.monomials),
            log_coeff=factor * self.log_coeff,
            log_powers=tuple((factor * e, d) for e, d in self.log_powers),
        )

    def __add__(self, other: "RadialDensity") -> "RadialDensity":
        monomials: dict[float, float] = {}
        for c, a in (*self.monomials, *other.monomials):
            monomials[a] = monomials.get(a, 0.0) + c
        log_powers: dict[float, float] = {}
        for e, d in (*self.log_powers, *other.log_powers):
            log_powers[d] = log_powers.get(d, 0.0) + e
        return RadialDensity(
            monomials=tuple((c, a) for a, c in sorted(monomials.items())),
            log_coeff=self.log_coeff + other.log_coeff,
            log_powers=tuple((e, d) for d, e in sorted(log_powers.items())),
        )


class PshReport(BaseModel):
    """Outcome of the plurisubharmonicity grid check."""

    model_config = _FROZEN

    passed: bool
    atom_mass: float
    min_ac_density: float
    complex_hessian_ok: bool
    first_failure_rho: float | None = None
    first_failure_value: float | None = None
    grid_points: int
    tolerance: float
    message: str = ""


class ModelCurrent(BaseModel):
    """A model current with cached sign class and psh report."""

    model_config = _FROZEN

    kind: CurrentKind
    domain: Domain
    bidim: int = Field(ge=1)
    density: RadialDensity
    sign_class: SignClass
    psh: PshReport

    @property
    def ambient_dim(self) -> int:
        return self.domain.ambient_dim

    @property
    def ball_radius(self) -> float:
        return self.domain.ball_radius

    @property
    def codim(self) -> int:
        """Number of β₀ factors of a smooth current; 0 on subspaces."""
        return self.ambient_dim - self.bidim if self.kind is CurrentKind.SMOOTH else 0

    @property
    def support_dim(self) -> int:
        """Complex dimension of the support the density lives on."""
        return self.bidim if self.kind is CurrentKind.SUBSPACE else self.ambient_dim

    @property
    def is_zero(self) -> bool:
        return self.density.is_zero

    @classmethod
    def build(
        cls,
        density: RadialDensity,
        *,
        ambient_dim: int = 2,
        bidim: int = 1,
        kind: CurrentKind | str = CurrentKind.SUBSPACE,
        ball_radius: float = 1.0,
        require_psh: bool = True,
    ) -> "ModelCurrent":
        """Validate a density and wrap it as a current.

        Raises:
            InvalidInputError: bad dimensions, log terms on a ball larger than
                the unit ball, or (with ``require_psh``) a failed psh check
        """
        kind = CurrentKind(kind)
        if not 1 <= bidim <= ambient_dim:
            raise InvalidInputError(f"bidimension must satisfy 1 <= p <= n, got p={bidim}, n={ambient_dim}")
        if kind is CurrentKind.SUBSPACE and bidim > ambient_dim - 1:
            raise InvalidInputError("a subspace current must have p <= n - 1")
        if density.has_log_terms and ball_radius > 1:
            raise InvalidInputError("ball_radius must be <= 1 when log or log-power terms are present")

        domain = Domain(ball_radius=ball_radius, ambient_dim=ambient_dim)
        support_dim = bidim if kind is CurrentKind.SUBSPACE else ambient_dim
        report = _psh_report(density, support_dim, ball_radius)
        if require_psh and not report.passed:
            raise InvalidInputError(f"current is not plurisubharmonic: {report.message}")
        return cls(
            kind=kind,
            domain=domain,
            bidim=bidim,
            density=density,
            sign_class=_sign_class(density, ball_radius),
            psh=report,
        )

    def with_density(self, density: RadialDensity, *, require_psh: bool = True) -> "ModelCurrent":
        """Same support and domain, new density."""
        return ModelCurrent.build(
            density,
            ambient_dim=self.ambient_dim,
            bidim=self.bidim,
            kind=self.kind,
            ball_radius=self.ball_radius,
            require_psh=require_psh,
        )


def _validation_grid(ball_radius: float) -> np.ndarray:
    return np.geomspace(ball_radius * 1e-6, ball_radius, Config.PSH_GRID_POINTS)


def _sign_class(density: RadialDensity, ball_radius: float) -> SignClass:
    if density.is_zero:
        return SignClass.ZERO
    values = density.value(_validation_grid(ball_radius))
    if np.all(values <= Config.TOL_PSH):
        return SignClass.NONPOSITIVE
    if np.all(values >= -Config.TOL_PSH):
        return SignClass.NONNEGATIVE
    return SignClass.MIXED


def laplacian_decomposition(d: RadialDensity, p: int) -> tuple[float, Callable[[ArrayLike], np.ndarray]]:
    """Split the Laplacian of u(|x|) on ℝ^(2p) into a point atom and a density.

    Returns:
        (atom_mass, ac_density); the atom is the dd^c-mass carried by the
        origin, nonzero only for p = 1 and log-type terms
    """
    atom_mass = 2.0 * d.atom_weight if p == 1 else 0.0

    def ac_density(rho: ArrayLike) -> np.ndarray:
        return d.laplacian(rho, p)

    return atom_mass, ac_density


def _psh_report(density: RadialDensity, dim: int, ball_radius: float) -> PshReport:
    tol = Config.TOL_PSH
    grid = _validation_grid(ball_radius)
    atom_mass, ac_density = laplacian_decomposition(density, dim)
    ac = ac_density(grid)
    # +inf at rho = 1 for log powers is harmless; nan is not
    ac = np.where(np.isnan(ac), -np.inf, ac)

    flux = density.radial_flux(grid)
    radial = density.radial_flux_derivative(grid) / (4 * grid)
    complex_ok = bool(np.all(np.nan_to_num(radial, nan=-np.inf) >= -tol))
    if dim > 1:
        complex_ok = complex_ok and bool(np.all(np.nan_to_num(flux, nan=-np.inf) >= -tol))

    failures = np.flatnonzero(ac < -tol)
    first_rho = first_value = None
    if atom_mass < 0:
        message = f"negative point atom {atom_mass:g} at 0"
    elif failures.size:
        idx = int(failures[0])
        first_rho, first_value = float(grid[idx]), float(ac[idx])
        message = f"Laplacian {first_value:.6g} < 0 at rho={first_rho:.6g}"
    else:
        message = "ok"
    return PshReport(
        passed=atom_mass >= 0 and failures.size == 0,
        atom_mass=atom_mass,
        min_ac_density=float(np.min(ac)),
        complex_hessian_ok=complex_ok,
        first_failure_rho=first_rho,
        first_failure_value=first_value,
        grid_points=grid.size,
        tolerance=tol,
        message=message,
    )


def validate_psh(T: ModelCurrent) -> PshReport:
    """Re-run the plurisubharmonicity grid check for ``T``."""
    return _psh_report(T.density, T.support_dim, T.ball_radius)


class Weight(BaseModel):
    """Semi-exhaustive weight φ = scale·ψ^k.

    ψ is |z|² (isotropic), Σ|z_j|^(2b_j) (anisotropic) or |z − center|² (shifted).
    """

    model_config = _FROZEN

    kind: WeightKind
    k: float = Field(default=1.0, gt=0)
    b: Tuple[float, ...] | None = None
    center: Tuple[Tuple[float, float], ...] | None = None
    scale: float = Field(default=1.0, gt=0)
    radius: float | None = Field(default=None, gt=0, description="Explicit R(φ)")

    @classmethod
    def isotropic(cls, k: float = 1.0, scale: float = 1.0) -> "Weight":
        return cls(kind=WeightKind.ISOTROPIC, k=k, scale=scale)

    @classmethod
    def anisotropic(cls, b: Sequence[float], k: float = 1.0, scale: float = 1.0) -> "Weight":
        if not b or any(bj <= 0 for bj in b):
            raise InvalidInputError("anisotropic exponents must be positive")
        return cls(kind=WeightKind.ANISOTROPIC, b=tuple(float(bj) for bj in b), k=k, scale=scale)

    @classmethod
    def shifted(cls, center: Sequence[complex], k: float = 1.0, scale: float = 1.0) -> "Weight":
        pairs = tuple((float(complex(c).real), float(complex(c).imag)) for c in center)
        return cls(kind=WeightKind.SHIFTED, center=pairs, k=k, scale=scale)

    @property
    def center_vector(self) -> np.ndarray:
        if self.center is None:
            return np.zeros(0, dtype=complex)
        return np.array([complex(re, im) for re, im in self.center])

    def power(self, j: float) -> "Weight":
        """φ^j."""
        if j <= 0:
            raise InvalidInputError("weight powers must be positive")
        return self.model_copy(
            update={
                "k": self.k * j,
                "scale": self.scale**j,
                "radius": None if self.radius is None else self.radius**j,
            }
        )

    def scaled(self, s: float) -> "Weight":
        """s·φ."""
        if s <= 0:
            raise InvalidInputError("weight scale factors must be positive")
        return self.model_copy(
            update={"scale": self.scale * s, "radius": None if self.radius is None else self.radius * s}
        )

    def check_dimension(self, n: int) -> None:
        size = len(self.b) if self.b is not None else len(self.center) if self.center is not None else n
        if size != n:
            raise InvalidInputError(f"{self.kind.value} weight has {size} coordinates, the domain has {n}")

    def containment_bound(self, ball_radius: float, factor: float = 1.0) -> float:
        """Largest R with B_φ(R) inside the ball, its reach shrunk by ``factor``."""
        reach = factor * ball_radius
        if self.kind is WeightKind.ISOTROPIC:
            return self.scale * reach ** (2 * self.k)
        if self.kind is WeightKind.SHIFTED:
            offset = float(np.linalg.norm(self.center_vector))
            if offset >= ball_radius:
                raise InvalidInputError(f"shifted center |c|={offset:g} must lie inside the ball of radius {ball_radius:g}")
            return self.scale * (factor * (ball_radius - offset)) ** (2 * self.k)
        # polydisc |z_j| < Q^(1/(2 b_j)) must fit: Σ Q^(1/b_j) <= reach²
        b = np.asarray(self.b, dtype=float)
        target = reach * reach
        q_hi = float(np.max(target**b))
        q = brentq(lambda q: float(np.sum(q ** (1.0 / b))) - target, 0.0, q_hi, xtol=1e-300, rtol=1e-15)
        return self.scale * q**self.k

    def domain_radius(self, ball_radius: float) -> float:
        """R(φ) on the ball of radius ``ball_radius``.

        Raises:
            InvalidInputError: an explicit radius whose sublevel set is not
                relatively compact in the ball
        """
        if self.radius is not None:
            bound = self.containment_bound(ball_radius)
            if self.radius >= bound:
                raise InvalidInputError(
                    f"R={self.radius:g} exceeds the containment bound {bound:g} of the ball of radius {ball_radius:g}"
                )
            return self.radius
        # the shrunken ball keeps R(φ^j) = R(φ)^j and R(sφ) = s·R(φ)
        return self.containment_bound(ball_radius, Config.R_FACTOR)

    def label(self) -> str:
        """Micro-syntax rendering, accepted back by :func:`parse_weight`."""
        parts = [f"k={self.k:g}"]
        if self.b is not None:
            parts.append("b=" + ",".join(f"{bj:g}" for bj in self.b))
        if self.center is not None:
            parts.append("c=" + ",".join(repr(c) for c in self.center_vector))
        if self.scale != 1:
            parts.append(f"s={self.scale:g}")
        if self.radius is not None:
            parts.append(f"R={self.radius:g}")
        return f"{self.kind.value}:" + ",".join(parts)


class RestrictedWeight(BaseModel):
    """Trace of a weight on the support of a current, φ = scale·ψ(w)^k."""

    model_config = _FROZEN

    form: RestrictionForm
    k: float = Field(gt=0)
    scale: float = Field(default=1.0, gt=0)
    dim: int = Field(ge=1)
    profile_kind: ProfileKind = ProfileKind.QUADRATIC
    b: Tuple[float, ...] | None = None
    center: Tuple[Tuple[float, float], ...] | None = None
    offset: float = Field(default=0.0, ge=0)

    @classmethod
    def pure_power(cls, k: float, dim: int, scale: float = 1.0) -> "RestrictedWeight":
        return cls(form=RestrictionForm.PURE_POWER, k=k, scale=scale, dim=dim)

    @property
    def center_vector(self) -> np.ndarray:
        if self.center is None:
            return np.zeros(self.dim, dtype=complex)
        return np.array([complex(re, im) for re, im in self.center])

    @property
    def profile(self) -> Callable[[np.ndarray], np.ndarray]:
        """w ↦ φ(w) for support coordinates of shape (N, dim)."""
        return self.evaluate

    def inner(self, w: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """ψ, its holomorphic gradient ∂ψ and its complex Hessian ∂∂̄ψ."""
        w = np.asarray(w, dtype=complex)
        n_pts = w.shape[0]
        if self.profile_kind is ProfileKind.QUADRATIC:
            x = w - self.center_vector
            psi = np.sum(np.abs(x) ** 2, axis=1) + self.offset
            grad = np.conj(x)
            hess = np.broadcast_to(np.eye(self.dim, dtype=complex), (n_pts, self.dim, self.dim))
            return psi, grad, hess
        b = np.asarray(self.b, dtype=float)
        mod = np.abs(w)
        with np.errstate(divide="ignore", invalid="ignore"):
            psi = np.sum(mod ** (2 * b), axis=1)
            grad = b * np.conj(w) * mod ** (2 * b - 2)
            diag = b * b * mod ** (2 * b - 2)
        hess = np.zeros((n_pts, self.dim, self.dim), dtype=complex)
        idx = np.arange(self.dim)
        hess[:, idx, idx] = diag
        return psi, grad, hess

    def evaluate(self, w: np.ndarray) -> np.ndarray:
        psi, _, _ = self.inner(w)
        return self.scale * psi**self.k

    def hessians(self, w: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """φ(w), ∂∂̄φ(w) and ∂∂̄ log φ(w), batched over the first axis."""
        psi, grad, hess = self.inner(w)
        k = self.k
        outer = grad[:, :, None] * np.conj(grad)[:, None, :]
        psi_ = psi[:, None, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            phi = self.scale * psi**k
            ddc_phi = self.scale * (k * (k - 1) * psi_ ** (k - 2) * outer + k * psi_ ** (k - 1) * hess)
            ddc_log = k * (hess / psi_ - outer / psi_**2)
        return phi, ddc_phi, ddc_log

    def value_at(self, w: Sequence[complex]) -> float:
        return float(self.evaluate(np.asarray([w], dtype=complex))[0])

    def sublevel_polydisc(self, r: float) -> tuple[np.ndarray, np.ndarray] | None:
        """Centre and per-coordinate radii of a polydisc containing {φ < r}; None if empty."""
        q = (r / self.scale) ** (1.0 / self.k)
        if self.profile_kind is ProfileKind.QUADRATIC:
            if q <= self.offset:
                return None
            radii = np.full(self.dim, math.sqrt(q - self.offset))
            return self.center_vector, radii
        b = np.asarray(self.b, dtype=float)
        return np.zeros(self.dim, dtype=complex), q ** (1.0 / (2 * b))


@lru_cache(maxsize=256)
def restrict_weight(phi: Weight | RestrictedWeight, T: ModelCurrent) -> RestrictedWeight:
    """Trace of ``phi`` on the support of ``T``.

    The support is {z_1 = ... = z_{n-p} = 0} for subspace currents and all of
    ℂⁿ for smooth ones. Pure powers are detected exactly; everything else is
    returned as a general profile.
    """
    if isinstance(phi, RestrictedWeight):
        return phi

    n, m = T.ambient_dim, T.support_dim
    phi.check_dimension(n)
    first = n - m  # support coordinates are z_{first+1..n}

    if phi.kind is WeightKind.ISOTROPIC:
        return RestrictedWeight.pure_power(phi.k, m, phi.scale)

    if phi.kind is WeightKind.ANISOTROPIC:
        assert phi.b is not None
        b_support = phi.b[first:]
        if m == 1:
            return RestrictedWeight.pure_power(phi.k * b_support[0], m, phi.scale)
        if all(bj == 1 for bj in b_support):
            return RestrictedWeight.pure_power(phi.k, m, phi.scale)
        return RestrictedWeight(
            form=RestrictionForm.GENERAL,
            k=phi.k,
            scale=phi.scale,
            dim=m,
            profile_kind=ProfileKind.MONOMIAL,
            b=b_support,
        )

    center = phi.center_vector
    if not np.any(center):
        return RestrictedWeight.pure_power(phi.k, m, phi.scale)
    offset = float(np.sum(np.abs(center[:first]) ** 2))
    if offset > 0:
        logger.warning(
            f"Center of {phi.label()} is off the support of the current; sublevel sets are off-center disks"
        )
    support_center = center[first:]
    return RestrictedWeight(
        form=RestrictionForm.GENERAL,
        k=phi.k,
        scale=phi.scale,
        dim=m,
        profile_kind=ProfileKind.QUADRATIC,
        center=tuple((float(c.real), float(c.imag)) for c in support_center),
        offset=offset,
    )


class PowersDomain(BaseModel):
    """Interval of admissible powers k of a weight."""

    model_config = _FROZEN

    k_min: float = Field(default=0.0, ge=0)
    k_max: float = math.inf
    method: str = "pure_power"

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.k_max)

    def contains(self, k: float) -> bool:
        return self.k_min < k <= self.k_max


def powers_domain(T: ModelCurrent, phi: Weight) -> PowersDomain:
    """I_T(φ) for the model class, always (0, ∞).

    ``method`` records why: a pure-power restriction, a general profile
    whose zero set meets the support (T∧(dd^cφ)^m({φ < s}) = O(s^m) for
    quasi-homogeneous ψ, which absorbs the log singularities of u), or a
    profile with no zero set on the support.
    """
    restricted = restrict_weight(phi, T)
    if restricted.form is RestrictionForm.PURE_POWER:
        return PowersDomain()
    if restricted.profile_kind is ProfileKind.QUADRATIC and restricted.offset > 0:
        return PowersDomain(method="no_zero_set")
    return PowersDomain(method="local_mass_exponent")


def _substitute(node: Any, params: Mapping[str, float]) -> Any:
    if isinstance(node, str):
        if node not in params:
            raise InvalidInputError(f"unresolved placeholder {node!r} in spec")
        return params[node]
    if isinstance(node, list):
        return [_substitute(item, params) for item in node]
    if isinstance(node, dict):
        return {key: (value if key == "kind" else _substitute(value, params)) for key, value in node.items()}
    return node


def _load_json(text: str | Mapping[str, Any]) -> dict[str, Any]:
    if isinstance(text, Mapping):
        return dict(text)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"spec is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise InvalidInputError("spec must be a JSON object")
    return data


def parse_current(spec_text: str | Mapping[str, Any], params: Mapping[str, float] | None = None) -> ModelCurrent:
    """Parse, validate and classify a current spec.

    Args:
        spec_text: JSON text or an already decoded mapping
        params: values for string placeholders such as ``"eps"``

    Raises:
        InvalidInputError: schema violations, unresolved placeholders, failed psh check
    """
    data = _substitute(_load_json(spec_text), params or {})
    try:
        spec = CurrentSpec.model_validate(data)
    except ValidationError as e:
        raise InvalidInputError(f"invalid current spec: {e}") from e

    density = RadialDensity(
        monomials=tuple((float(c), float(a)) for c, a in spec.monomials),
        log_coeff=spec.log_coeff,
        log_powers=tuple((float(e), float(d)) for e, d in spec.log_powers),
    )
    current = ModelCurrent.build(
        density,
        ambient_dim=spec.n,
        bidim=spec.subspace_dim,
        kind=spec.kind,
        ball_radius=spec.ball_radius,
    )
    logger.debug(f"Parsed {current.kind.value} current, p={current.bidim}, sign={current.sign_class.value}")
    return current


_MICRO_LIST_KEYS = {"b", "c"}


def _parse_micro(text: str) -> dict[str, Any]:
    kind, _, rest = text.strip().partition(":")
    data: dict[str, Any] = {"kind": kind.strip()}
    key: str | None = None
    for token in filter(None, (t.strip() for t in rest.split(","))):
        if "=" in token:
            key, _, value = token.partition("=")
            key = key.strip()
            data[key] = [value.strip()] if key in _MICRO_LIST_KEYS else value.strip()
        elif key in _MICRO_LIST_KEYS:
            data[key].append(token)
        else:
            raise InvalidInputError(f"cannot parse weight token {token!r} in {text!r}")

    try:
        if "b" in data:
            data["b"] = [float(v) for v in data["b"]]
        if "c" in data:
            data["center"] = [(z.real, z.imag) for z in (complex(v) for v in data.pop("c"))]
        for name in ("k", "s", "R"):
            if name in data:
                data[name] = float(data[name])
    except ValueError as e:
        raise InvalidInputError(f"invalid number in weight spec {text!r}: {e}") from e
    return data


def parse_weight(text: str | Mapping[str, Any], params: Mapping[str, float] | None = None) -> Weight:
    """Parse a weight from JSON or micro-syntax (``pow:k=2``, ``aniso:b=1,2``, ``shifted:k=1,c=0.1j,0``)."""
    if isinstance(text, Mapping) or text.lstrip().startswith("{"):
        data = _substitute(_load_json(text), params or {})
    else:
        data = _parse_micro(text)
    try:
        spec = WeightSpec.model_validate(data)
    except ValidationError as e:
        raise InvalidInputError(f"invalid weight spec: {e}") from e
    return Weight(
        kind=WeightKind(spec.kind),
        k=spec.k,
        b=tuple(spec.b) if spec.b is not None else None,
        center=tuple(tuple(c) for c in spec.center) if spec.center is not None else None,
        scale=spec.s,
        radius=spec.R,
    )


def domain_radius(phi: Weight, T: ModelCurrent) -> float:
    """R(φ) for the domain of ``T``, after checking the weight's dimension."""
    phi.check_dimension(T.ambient_dim)
    return phi.domain_radius(T.ball_radius)


def check_radius(phi: Weight, T: ModelCurrent, r: float, name: str = "r") -> float:
    """Return R(φ) after checking 0 < r < R(φ)."""
    bound = domain_radius(phi, T)
    if not 0 < r < bound:
        raise InvalidInputError(f"{name}={r:g} out of range: must satisfy 0 < {name} < R(phi)={bound:g}")
    return bound
