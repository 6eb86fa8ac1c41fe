"""Registry of the catalog cases behind the verification panel.

Each case is a current spec, a weight and the identities (with options)
whose hypotheses it satisfies. The deterministic panel runs every entry of
``CATALOG``; ``MC_CATALOG`` adds Monte Carlo cases on smooth currents.
"""

from __future__ import annotations

import logging
from typing import Any, Dict, List, Mapping, Tuple

from pydantic import BaseModel, ConfigDict, Field

from lelong.current_model import ModelCurrent, Weight, parse_current, parse_weight
from lelong.error_handling import InvalidInputError

logger = logging.getLogger(__name__)


class CatalogCase(BaseModel):
    """A current/weight pair and the identity runs it takes part in."""

    model_config = ConfigDict(frozen=True)

    case_id: str
    description: str
    current: Dict[str, Any]
    params: Dict[str, float] = Field(default_factory=dict)
    weight: str = "pow:k=1"
    engine: str = "auto"
    identities: Dict[str, Tuple[Dict[str, Any], ...]] = Field(default_factory=dict)

    def load(self) -> tuple[ModelCurrent, Weight]:
        """Parse the current and the weight."""
        return parse_current(self.current, self.params), parse_weight(self.weight)


def _line(*monomials: Tuple[Any, float], log_coeff: float = 0.0, log_powers: Tuple[Tuple[float, float], ...] = (), ball_radius: float = 1.0) -> Dict[str, Any]:
    """Density times the integration current of the z₂-axis in ℂ²."""
    return {
        "n": 2,
        "subspace_dim": 1,
        "ball_radius": ball_radius,
        "monomials": [list(m) for m in monomials],
        "log_coeff": log_coeff,
        "log_powers": [list(lp) for lp in log_powers],
    }


def _plane(*monomials: Tuple[float, float], log_coeff: float = 0.0) -> Dict[str, Any]:
    """Density on the (z₂, z₃)-plane of ℂ³."""
    return {"n": 3, "subspace_dim": 2, "monomials": [list(m) for m in monomials], "log_coeff": log_coeff}


def _smooth(*monomials: Tuple[float, float]) -> Dict[str, Any]:
    """u(|z|)·dd^c|z|² on ℂ², of bidimension (1,1)."""
    return {"n": 2, "kind": "smooth", "subspace_dim": 1, "monomials": [list(m) for m in monomials]}


def _s_eps() -> Dict[str, Any]:
    return _line((1.0, "eps"), (-1.0, 0.0))


# Option sets shared by many cases
_LJ = ({"r1": 0.1, "r2": 0.2},)
_F = ({},)
_PS = ({"k": 2.0, "r": 0.3},)
_LS = ({"k": 2.0},)
_DS = ({"k": 2.0, "s": 0.3},)
_CV = ({"k": 2.0, "r0": 0.25},)
_MB = ({"r": 0.3, "s": 1.0}, {"r": 0.3, "s": 2.0}, {"r": 0.3, "s": 4.0})
_EXT = ({"r": 0.3},)
_PB = ({"k": 0.5, "r": 0.3}, {"k": 2.0, "r": 0.3})
_PM = ({"r": 0.3, "ks": [0.5, 1.0, 2.0, 4.0]},)
_CMP_AXIS = ({"psi": "aniso:b=1,2", "ell": 2.0}, {"psi": "aniso:b=1,2", "ell": 1.0})


def _negative_identities(**extra: Tuple[Dict[str, Any], ...]) -> Dict[str, Tuple[Dict[str, Any], ...]]:
    """Runs for nonpositive currents satisfying condition (C)."""
    runs = {
        "lelong_jensen": _LJ,
        "f_monotone": _F,
        "power_scaling": _PS,
        "limit_scaling": _LS,
        "ddc_scaling": _DS,
        "change_of_variable": _CV,
        "ddc_mass_bound": _MB,
        "extension": _EXT,
        "power_bounds": _PB,
        "power_monotone": _PM,
    }
    runs.update(extra)
    return runs


def _divergent_identities() -> Dict[str, Tuple[Dict[str, Any], ...]]:
    """Runs whose hypotheses hold without condition (C)."""
    return {
        "lelong_jensen": _LJ,
        "power_scaling": _PS,
        "ddc_scaling": _DS,
        "change_of_variable": _CV,
        "ddc_mass_bound": _MB,
        "power_bounds": _PB,
    }


def _build_catalog() -> List[CatalogCase]:
    cases: List[CatalogCase] = []
    for eps in (0.25, 0.5, 1.0):
        for k in (0.5, 1.0, 2.0):
            extra: Dict[str, Tuple[Dict[str, Any], ...]] = {}
            if k == 1.0:
                extra["comparison"] = _CMP_AXIS + (
                    {"psi": "pow:k=0.5", "ell": 0.5},
                    {"psi": "pow:k=2", "ell": 2.0},
                    {"psi": "pow:k=4", "ell": 2.0},
                )
            cases.append(
                CatalogCase(
                    case_id=f"s_eps_{eps:g}_k{k:g}",
                    description=f"(|z₂|^(2ε) − 1)[z₁=0], ε={eps:g}, against |z|^(2k), k={k:g}",
                    current=_s_eps(),
                    params={"eps": eps},
                    weight=f"pow:k={k:g}",
                    identities=_negative_identities(**extra),
                )
            )

    cases += [
        CatalogCase(
            case_id="constant_line",
            description="u ≡ −1 on the z₂-axis",
            current=_line((-1.0, 0.0)),
            identities={**_negative_identities(), "limit_scaling": ({"k": 3.0},), "power_scaling": ({"k": 3.0, "r": 0.3},)},
        ),
        CatalogCase(
            case_id="zero",
            description="the zero current",
            current=_line(),
            identities={
                **_negative_identities(),
                "comparison": ({"psi": "pow:k=2", "ell": 2.0},),
                "positive_monotone": _F,
            },
        ),
        CatalogCase(
            case_id="log_line",
            description="log|z₂|² on the z₂-axis: ν(dd^cT, φ₀, t) ≡ 2",
            current=_line(log_coeff=1.0),
            identities=_divergent_identities(),
        ),
        CatalogCase(
            case_id="log_power_half",
            description="−(−log|z₂|²)^(1/2) on the z₂-axis",
            current=_line(log_powers=((1.0, 0.5),)),
            identities=_divergent_identities(),
        ),
        CatalogCase(
            case_id="log_power_one",
            description="−(−log|z₂|²) on the z₂-axis",
            current=_line(log_powers=((1.0, 1.0),)),
            identities=_divergent_identities(),
        ),
        CatalogCase(
            case_id="log_power_half_small_ball",
            description="−(−log|z₂|²)^(1/2) on the ball of radius 1/2",
            current=_line(log_powers=((1.0, 0.5),), ball_radius=0.5),
            identities={"lelong_jensen": ({"r1": 0.05, "r2": 0.2},), "ddc_mass_bound": ({"r": 0.2, "s": 2.0},)},
        ),
        CatalogCase(
            case_id="log_plus_monomial",
            description="log|z₂|² + |z₂|² − 1 on the z₂-axis",
            current=_line((1.0, 1.0), (-1.0, 0.0), log_coeff=1.0),
            identities=_divergent_identities(),
        ),
        CatalogCase(
            case_id="positive_line",
            description="|z₂| on the z₂-axis (nonnegative)",
            current=_line((1.0, 0.5)),
            identities={
                "lelong_jensen": _LJ,
                "power_scaling": _PS,
                "limit_scaling": _LS,
                "ddc_scaling": _DS,
                "power_bounds": _PB,
                "positive_monotone": _F,
                "comparison": _CMP_AXIS + ({"psi": "pow:k=4", "ell": 2.0},),
            },
        ),
        CatalogCase(
            case_id="mixed_sign_line",
            description="|z₂|² − 1/2 on the z₂-axis (mixed sign)",
            current=_line((1.0, 1.0), (-0.5, 0.0)),
            identities={
                "lelong_jensen": _LJ,
                "power_scaling": _PS,
                "limit_scaling": _LS,
                "ddc_scaling": _DS,
                "change_of_variable": _CV,
                "power_bounds": _PB,
            },
        ),
        CatalogCase(
            case_id="two_term_line",
            description="|z₂| + |z₂|⁴ − 2 on the z₂-axis",
            current=_line((1.0, 0.5), (1.0, 2.0), (-2.0, 0.0)),
            identities=_negative_identities(),
        ),
        CatalogCase(
            case_id="plane_k1",
            description="(|w| − 1) on a plane of ℂ³ against |z|²",
            current=_plane((1.0, 0.5), (-1.0, 0.0)),
            identities={**_negative_identities(), "power_scaling": ({"k": 1.0, "r": 0.3},)},
        ),
        CatalogCase(
            case_id="plane_k2",
            description="(|w| − 1) on a plane of ℂ³ against |z|⁴",
            current=_plane((1.0, 0.5), (-1.0, 0.0)),
            weight="pow:k=2",
            identities={"lelong_jensen": _LJ, "f_monotone": _F, "ddc_mass_bound": _MB, "ddc_scaling": _DS},
        ),
        CatalogCase(
            case_id="plane_log",
            description="log|w|² on a plane of ℂ³",
            current=_plane(log_coeff=1.0),
            identities={"lelong_jensen": _LJ, "ddc_mass_bound": _MB, "power_bounds": ({"k": 2.0, "r": 0.3},)},
        ),
        CatalogCase(
            case_id="plane_positive",
            description="|w|² on a plane of ℂ³ (nonnegative)",
            current=_plane((1.0, 1.0)),
            identities={"lelong_jensen": _LJ, "positive_monotone": _F, "limit_scaling": _LS},
        ),
        CatalogCase(
            case_id="smooth_k1",
            description="(|z|² − 1)·dd^c|z|² on ℂ² against |z|²",
            current=_smooth((1.0, 1.0), (-1.0, 0.0)),
            identities=_negative_identities(),
        ),
        CatalogCase(
            case_id="smooth_k2",
            description="(|z| − 1)·dd^c|z|² on ℂ² against |z|⁴",
            current=_smooth((1.0, 0.5), (-1.0, 0.0)),
            weight="pow:k=2",
            identities={
                "lelong_jensen": _LJ,
                "f_monotone": _F,
                "power_scaling": ({"k": 0.5, "r": 0.3},),
                "ddc_scaling": ({"k": 0.5, "s": 0.3},),
                "ddc_mass_bound": _MB,
                "power_bounds": _PB,
            },
        ),
        CatalogCase(
            case_id="smooth_positive",
            description="|z|²·dd^c|z|² on ℂ² (nonnegative)",
            current=_smooth((1.0, 1.0)),
            identities={"lelong_jensen": _LJ, "positive_monotone": _F, "power_bounds": _PB},
        ),
        CatalogCase(
            case_id="aniso_axis_b2",
            description="S_ε, ε=1/2, against |z₁|² + |z₂|⁴ (restricts to |z₂|⁴)",
            current=_s_eps(),
            params={"eps": 0.5},
            weight="aniso:b=1,2",
            identities={
                "lelong_jensen": _LJ,
                "f_monotone": _F,
                "power_scaling": _PS,
                "limit_scaling": _LS,
                "ddc_mass_bound": _MB,
            },
        ),
        CatalogCase(
            case_id="aniso_axis_b_half",
            description="S_ε, ε=1, against |z₁|² + |z₂| (restricts to |z₂|)",
            current=_s_eps(),
            params={"eps": 1.0},
            weight="aniso:b=1,0.5",
            identities={"lelong_jensen": _LJ, "f_monotone": _F, "ddc_scaling": _DS, "extension": _EXT},
        ),
        CatalogCase(
            case_id="shifted_centered",
            description="S_ε, ε=1/2, against |z − 0|² given as a shifted weight",
            current=_s_eps(),
            params={"eps": 0.5},
            weight="shifted:k=1,c=0,0",
            identities={"lelong_jensen": _LJ, "f_monotone": _F, "power_scaling": _PS},
        ),
        CatalogCase(
            case_id="scaled_weight",
            description="S_ε, ε=1/2, against 2|z|²",
            current=_s_eps(),
            params={"eps": 0.5},
            weight="pow:k=1,s=2",
            identities={
                "lelong_jensen": ({"r1": 0.2, "r2": 0.5},),
                "ddc_mass_bound": ({"r": 0.5, "s": 2.0},),
                "limit_scaling": _LS,
            },
        ),
    ]
    return cases


CATALOG: Dict[str, CatalogCase] = {case.case_id: case for case in _build_catalog()}


def _mc_case(case_id: str, description: str, weight: str, identities: Mapping[str, Tuple[Dict[str, Any], ...]]) -> CatalogCase:
    return CatalogCase(
        case_id=case_id,
        description=description,
        current=_smooth((1.0, 1.0), (-1.0, 0.0)),
        weight=weight,
        engine="mc",
        identities=dict(identities),
    )


_MC_LJ = ({"r1": 0.2, "r2": 0.4},)

MC_CATALOG: Dict[str, CatalogCase] = {
    case.case_id: case
    for case in (
        _mc_case("mc_smooth_k1", "(|z|² − 1)·dd^c|z|², |z|², sampled", "pow:k=1", {"lelong_jensen": _MC_LJ, "ddc_scaling": ({"k": 2.0, "s": 0.3},)}),
        _mc_case("mc_smooth_k2", "(|z|² − 1)·dd^c|z|², |z|⁴, sampled", "pow:k=2", {"lelong_jensen": _MC_LJ}),
        _mc_case("mc_shifted_real", "(|z|² − 1)·dd^c|z|², |z − (0.2, 0)|²", "shifted:k=1,c=0.2,0", {"lelong_jensen": _MC_LJ}),
        _mc_case("mc_shifted_imag", "(|z|² − 1)·dd^c|z|², |z − (0, 0.1i)|²", "shifted:k=1,c=0,0.1j", {"lelong_jensen": _MC_LJ}),
        _mc_case("mc_aniso", "(|z|² − 1)·dd^c|z|², |z₁|² + |z₂|⁴", "aniso:b=1,2", {"lelong_jensen": ({"r1": 0.1, "r2": 0.25},), "power_bounds": ({"k": 2.0, "r": 0.2},)}),
    )
}


def get_case(case_id: str) -> CatalogCase:
    """Look a case up in either catalog."""
    case = CATALOG.get(case_id) or MC_CATALOG.get(case_id)
    if case is None:
        raise InvalidInputError(f"unknown catalog case {case_id!r}")
    return case


def panel_tasks(include_mc: bool = False) -> List[Dict[str, Any]]:
    """One task per (identity, case, option set), in catalog order."""
    cases = list(CATALOG.values())
    if include_mc:
        cases += list(MC_CATALOG.values())
    tasks = [
        {"identity": identity, "case_id": case.case_id, "options": dict(options), "engine": case.engine}
        for case in cases
        for identity, option_sets in case.identities.items()
        for options in option_sets
    ]
    logger.info(f"Panel of {len(tasks)} runs over {len(cases)} cases")
    return tasks


def cases_for(identity_id: str) -> List[str]:
    """Ids of the deterministic cases that run ``identity_id``."""
    return [case.case_id for case in CATALOG.values() if identity_id in case.identities]
