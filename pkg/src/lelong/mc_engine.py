"""Seeded Monte Carlo integration of current-weight wedge products.

Every form is reduced to a top-degree density on the support of the current
(ℂ^p for subspace currents, ℂⁿ for smooth ones):

    (2/π)^m · Σ_σ det[column i of H_σ(i)]

where the H_i are the complex Hessians of the factors (u, φ, log φ, |z|²).
Samples are drawn uniformly in a polydisc bounding {φ < r}. The sample count
is split into Config.MC_PARTITIONS partitions with independent generators
spawned from one SeedSequence, and their partial statistics are merged in
partition order so results do not depend on scheduling.
"""

from __future__ import annotations

import itertools
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from lelong.cache import cached_computation
from lelong.config import Config
from lelong.current_model import (
    CurrentKind,
    ModelCurrent,
    RestrictedWeight,
    Weight,
    laplacian_decomposition,
    restrict_weight,
)
from lelong.error_handling import InvalidInputError, NumericalError

logger = logging.getLogger(__name__)

_CHUNK = 1 << 16

WeightFn = Callable[[np.ndarray], np.ndarray]


class Form(str, Enum):
    """Top-degree forms the sampler knows how to evaluate."""

    BETA = "beta"  # T ∧ (dd^c φ)^p
    ALPHA = "alpha"  # T ∧ (dd^c log φ)^p
    DDC = "ddc"  # dd^c T ∧ (dd^c φ)^(p-1)


class MCEstimate(BaseModel):
    """Monte Carlo estimate with its standard error."""

    model_config = ConfigDict(frozen=True)

    value: float
    std_error: float = Field(ge=0)
    n_samples: int
    seed: int


@dataclass(frozen=True)
class _Moments:
    """Count, mean and centred second moment of a batch."""

    n: int
    mean: float
    m2: float

    def merge(self, other: "_Moments") -> "_Moments":
        if self.n == 0:
            return other
        if other.n == 0:
            return self
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * other.n / n
        m2 = self.m2 + other.m2 + delta * delta * self.n * other.n / n
        return _Moments(n, mean, m2)

    @property
    def variance(self) -> float:
        return self.m2 / (self.n - 1) if self.n > 1 else 0.0


def mixed_discriminant(mats: list[np.ndarray]) -> np.ndarray:
    """m!·D(H_1, ..., H_m) for batches of Hermitian m×m matrices.

    Args:
        mats: m arrays of shape (N, m, m)

    Returns:
        Real array of shape (N,)
    """
    m = len(mats)
    stacked = np.stack([np.broadcast_to(h, mats[0].shape) for h in mats])
    total = np.zeros(stacked.shape[1], dtype=complex)
    for perm in itertools.permutations(range(m)):
        columns = np.stack([stacked[perm[i], :, :, i] for i in range(m)], axis=-1)
        total += np.linalg.det(columns)
    return total.real


def _density_hessian(T: ModelCurrent, w: np.ndarray) -> np.ndarray:
    """Complex Hessian of u(|w|) away from the origin."""
    rho = np.sqrt(np.sum(np.abs(w) ** 2, axis=1))
    flux = T.density.radial_flux(rho)
    flux_prime = T.density.radial_flux_derivative(rho)
    with np.errstate(divide="ignore", invalid="ignore"):
        v1 = flux / (2 * rho**2)
        v2 = (flux_prime / rho - 2 * flux / rho**2) / (4 * rho**2)
    m = w.shape[1]
    outer = np.conj(w)[:, :, None] * w[:, None, :]
    return v1[:, None, None] * np.eye(m) + v2[:, None, None] * outer


def _form_density(T: ModelCurrent, restricted: RestrictedWeight, form: Form, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(φ(w), density of the form at w) on the support coordinates."""
    n_pts, m = w.shape
    p = T.bidim
    phi, ddc_phi, ddc_log = restricted.hessians(w)
    identity = np.broadcast_to(np.eye(m, dtype=complex), (n_pts, m, m))
    flat = [identity] * T.codim

    if form is Form.BETA:
        mats = flat + [ddc_phi] * p
    elif form is Form.ALPHA:
        mats = flat + [ddc_log] * p
    else:
        mats = [_density_hessian(T, w)] + flat + [ddc_phi] * (p - 1)

    density = (2 / math.pi) ** m * mixed_discriminant(mats)
    if form is not Form.DDC:
        density = density * T.density.value(np.sqrt(np.sum(np.abs(w) ** 2, axis=1)))
    return phi, density


def _sample_partition(
    T: ModelCurrent,
    restricted: RestrictedWeight,
    form: Form,
    weight_fn: WeightFn,
    bound_r: float,
    center: np.ndarray,
    radii: np.ndarray,
    n: int,
    seed_seq: np.random.SeedSequence,
) -> list[_Moments]:
    rng = np.random.default_rng(seed_seq)
    m = radii.size
    stats = []
    remaining = n
    while remaining > 0:
        size = min(_CHUNK, remaining)
        remaining -= size
        modulus = radii * np.sqrt(rng.random((size, m)))
        angle = 2 * math.pi * rng.random((size, m))
        w = center + modulus * np.exp(1j * angle)
        phi, density = _form_density(T, restricted, form, w)
        inside = phi < bound_r
        values = np.zeros(size)
        if np.any(inside):
            values[inside] = density[inside] * weight_fn(phi[inside])
        if not np.all(np.isfinite(values)):
            raise NumericalError("Monte Carlo integrand produced nan or inf values")
        mean = float(np.mean(values))
        stats.append(_Moments(size, mean, float(np.sum((values - mean) ** 2))))
    return stats


def _check_variance(chunks: list[_Moments]) -> None:
    """Flag heavy tails by comparing the running variance at a quarter and at the end."""
    if len(chunks) < 4:
        return
    quarter = _merge(chunks[: math.ceil(len(chunks) / 4)])
    full = _merge(chunks)
    if quarter.variance > 0 and full.variance > Config.MC_VARIANCE_GROWTH * quarter.variance:
        raise NumericalError(
            f"infinite variance suspected: sample variance grew from {quarter.variance:.3g} to {full.variance:.3g}"
        )


def _merge(chunks: list[_Moments]) -> _Moments:
    total = _Moments(0, 0.0, 0.0)
    for chunk in chunks:
        total = total.merge(chunk)
    return total


def _atom_contribution(T: ModelCurrent, restricted: RestrictedWeight, weight_fn: WeightFn, bound_r: float) -> float:
    atom_mass, _ = laplacian_decomposition(T.density, T.support_dim)
    if atom_mass == 0:
        return 0.0
    phi0 = restricted.value_at([0j] * restricted.dim)
    if phi0 >= bound_r:
        return 0.0
    return atom_mass * float(weight_fn(np.array([phi0]))[0])


def mc_integral(
    T: ModelCurrent,
    phi: Weight | RestrictedWeight,
    form: Form | str,
    weight_fn: WeightFn,
    bound_r: float,
    n_samples: int | None = None,
    seed: int = 0,
    cache_key: Dict[str, Any] | None = None,
) -> MCEstimate:
    """Estimate ∫_{φ < bound_r} form · weight_fn(φ).

    Point atoms of dd^cT (log terms on a line) are added exactly.

    Args:
        weight_fn: vectorised function of φ-values
        cache_key: JSON description of ``weight_fn``; the result is memoised only when given

    Raises:
        InvalidInputError: fewer than Config.MC_MIN_SAMPLES samples
        NumericalError: nan values or suspected infinite variance
    """
    form = Form(form)
    n_samples = Config.MC_SAMPLES if n_samples is None else n_samples
    if n_samples < Config.MC_MIN_SAMPLES:
        raise InvalidInputError(f"n_samples={n_samples} must be at least {Config.MC_MIN_SAMPLES}")

    def compute() -> MCEstimate:
        return _mc_integral(T, phi, form, weight_fn, bound_r, n_samples, seed)

    if cache_key is None:
        return compute()
    params = {
        "current": T.model_dump(mode="json", include={"kind", "domain", "bidim", "density"}),
        "weight": phi.model_dump(mode="json"),
        "form": form.value,
        "bound_r": bound_r,
        "n_samples": n_samples,
        "seed": seed,
        "weight_fn": cache_key,
    }
    return cached_computation("mc_integral", params, compute)


def _mc_integral(
    T: ModelCurrent,
    phi: Weight | RestrictedWeight,
    form: Form,
    weight_fn: WeightFn,
    bound_r: float,
    n_samples: int,
    seed: int,
) -> MCEstimate:
    restricted = restrict_weight(phi, T)
    atom = _atom_contribution(T, restricted, weight_fn, bound_r) if form is Form.DDC else 0.0

    region = restricted.sublevel_polydisc(bound_r)
    if T.is_zero or region is None:
        return MCEstimate(value=atom, std_error=0.0, n_samples=n_samples, seed=seed)
    center, radii = region
    volume = float(np.prod(math.pi * radii**2))

    partitions = max(1, min(Config.MC_PARTITIONS, n_samples))
    sizes = [n_samples // partitions + (1 if i < n_samples % partitions else 0) for i in range(partitions)]
    children = np.random.SeedSequence(seed).spawn(partitions)
    logger.debug(
        f"MC {form.value} integral: {n_samples} samples in {partitions} partitions, "
        f"{T.kind.value} current, bound {bound_r:g}, seed {seed}"
    )

    def run(i: int) -> list[_Moments]:
        return _sample_partition(T, restricted, form, weight_fn, bound_r, center, radii, sizes[i], children[i])

    workers = min(partitions, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map keeps partition order
        results = list(pool.map(run, range(partitions)))

    chunks = [chunk for partition in results for chunk in partition]
    _check_variance(chunks)
    total = _merge(chunks)
    value = volume * total.mean + atom
    std_error = volume * math.sqrt(total.variance / total.n)
    return MCEstimate(value=value, std_error=std_error, n_samples=n_samples, seed=seed)


def _unit_weight(s: np.ndarray) -> np.ndarray:
    return np.ones_like(s)


def mc_mass(
    T: ModelCurrent,
    phi: Weight | RestrictedWeight,
    r: float,
    n_samples: int | None = None,
    seed: int = 0,
    form: Form | str = Form.BETA,
) -> MCEstimate:
    """Monte Carlo mass of ``form`` over B_φ(r)."""
    return mc_integral(T, phi, form, _unit_weight, r, n_samples, seed, cache_key={"kind": "mass"})


def mc_ring_mass(
    T: ModelCurrent,
    phi: Weight | RestrictedWeight,
    r1: float,
    r2: float,
    n_samples: int | None = None,
    seed: int = 0,
) -> MCEstimate:
    """Monte Carlo T∧α_φ^p mass of the ring r1 <= φ < r2."""
    if T.kind is CurrentKind.SUBSPACE and T.bidim == 1 and restrict_weight(phi, T).offset == 0:
        # α_φ on a line is a point mass at the zero of φ, outside every ring
        return MCEstimate(value=0.0, std_error=0.0, n_samples=n_samples or Config.MC_SAMPLES, seed=seed)

    def ring(s: np.ndarray) -> np.ndarray:
        return (s >= r1).astype(float)

    return mc_integral(T, phi, Form.ALPHA, ring, r2, n_samples, seed, cache_key={"kind": "ring", "r1": r1})
