"""warpcurv: multiply-warped metrics with negative sectional curvature.

Builds the bent-and-mollified warping profiles used to deform a complex
hyperbolic metric on a hyperplane complement, evaluates sectional curvature
through closed-form component formulas, and verifies negativity and the
asymptotic regularity of the resulting metrics.

Submodules are imported lazily so a CLI entry point can pin BLAS thread
environment variables before numpy is loaded.
"""
from __future__ import annotations

import importlib
from typing import Any

__version__ = "0.1.0"

_SUBMODULES = (
    "errors",
    "reporting",
    "mollifier",
    "expressions",
    "smoothing",
    "profiles",
    "frames",
    "curvature",
    "tailring",
    "verify",
    "cli",
)

# name -> submodule that defines it, for top-level convenience access
_EXPORTS = {
    "WarpcurvError": "errors",
    "ParameterError": "errors",
    "DomainError": "errors",
    "ConstructionError": "errors",
    "ConvexityError": "errors",
    "ContinuityError": "errors",
    "ComplexStructureError": "errors",
    "Report": "reporting",
    "CheckEntry": "reporting",
    "MollifierSpec": "mollifier",
    "mollify": "mollifier",
    "EpsilonParams": "profiles",
    "GridSpec": "profiles",
    "build_v": "profiles",
    "build_h": "profiles",
    "build_g": "profiles",
    "eval_profile": "profiles",
    "solve_r_epsilon": "profiles",
    "verify_profile_invariants": "profiles",
    "StructureConstants": "frames",
    "structure_from_complex": "frames",
    "coordinate_curvatures": "curvature",
    "sup_sectional": "curvature",
    "chn_reference": "curvature",
    "verify_chn_suite": "verify",
    "verify_negative_curvature": "verify",
    "verify_aregularity": "verify",
}

__all__ = ["__version__", *sorted(set(_SUBMODULES) | set(_EXPORTS))]


def __getattr__(name: str) -> Any:
    if name in _SUBMODULES:
        return importlib.import_module(f".{name}", __name__)
    owner = _EXPORTS.get(name)
    if owner is not None:
        module = importlib.import_module(f".{owner}", __name__)
        return getattr(module, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__() -> list[str]:
    return list(__all__)
