"""Input schemas for current and weight specifications.

These are the JSON documents accepted on the command line. They are
validated here and turned into domain objects by ``lelong.current_model``.
"""

from __future__ import annotations

from typing import List, Literal, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class CurrentSpec(BaseModel):
    """JSON schema of a model current."""

    model_config = ConfigDict(extra="forbid")

    n: int = Field(ge=1, description="Ambient dimension")
    kind: Literal["subspace", "smooth"] = "subspace"
    subspace_dim: int = Field(ge=1, description="Bidimension p of the current")
    ball_radius: float = Field(default=1.0, gt=0)
    monomials: List[Tuple[float, float]] = Field(default_factory=list, description="[c, a] pairs for c*rho^(2a)")
    log_coeff: float = Field(default=0.0, description="Coefficient d of log(rho^2)")
    log_powers: List[Tuple[float, float]] = Field(
        default_factory=list, description="[e, delta] pairs for -e*(-log rho^2)^delta"
    )

    @field_validator("monomials")
    @classmethod
    def _exponents_valid(cls, v: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
        exponents = [a for _, a in v]
        if any(a < 0 for a in exponents):
            raise ValueError("monomial exponents must be >= 0")
        if len(set(exponents)) != len(exponents):
            raise ValueError("monomial exponents must be pairwise distinct")
        return v

    @field_validator("log_powers")
    @classmethod
    def _deltas_valid(cls, v: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
        for _, delta in v:
            if not 0 < delta <= 1:
                raise ValueError("log-power exponents delta must lie in (0, 1]")
        return v

    @model_validator(mode="after")
    def _dimensions_valid(self) -> "CurrentSpec":
        if self.subspace_dim > self.n:
            raise ValueError("subspace_dim must be <= n")
        if self.kind == "subspace" and self.subspace_dim > self.n - 1:
            raise ValueError("a subspace current must have subspace_dim <= n - 1")
        has_log = self.log_coeff != 0 or any(e != 0 for e, _ in self.log_powers)
        if has_log and self.ball_radius > 1:
            raise ValueError("ball_radius must be <= 1 when log or log-power terms are present")
        return self


class WeightSpec(BaseModel):
    """JSON schema of a weight."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    kind: Literal["pow", "aniso", "shifted"]
    k: float = Field(default=1.0, gt=0)
    b: List[float] | None = None
    center: List[Tuple[float, float]] | None = None
    R: float | None = Field(default=None, gt=0)
    s: float = Field(default=1.0, gt=0, description="Scale factor of the weight")

    @model_validator(mode="after")
    def _kind_fields(self) -> "WeightSpec":
        if self.kind == "aniso":
            if not self.b:
                raise ValueError("an aniso weight must give its exponents b")
            if any(bj <= 0 for bj in self.b):
                raise ValueError("aniso exponents b must be positive")
        elif self.b is not None:
            raise ValueError(f"b is only valid for aniso weights, not {self.kind}")
        if self.kind == "shifted":
            if not self.center:
                raise ValueError("a shifted weight must give its center")
        elif self.center is not None:
            raise ValueError(f"center is only valid for shifted weights, not {self.kind}")
        return self
