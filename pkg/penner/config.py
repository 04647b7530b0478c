"""
Engine parameter configuration.

Every numeric default of the engine is read here from the environment and
checked against its admissible range. Settings import fails fast with
ImproperlyConfigured when the geometry inequalities do not hold.
"""
from __future__ import annotations

import math
import os
from typing import Any

from django.core.exceptions import ImproperlyConfigured

PLATEAU_PROFILE = "plateau"
SLOPED_PROFILE = "sloped"
VALID_PROFILES = frozenset({PLATEAU_PROFILE, SLOPED_PROFILE})

DEFAULT_R0 = 0.5
DEFAULT_R1 = 0.125
DEFAULT_R2 = 0.125
DEFAULT_TRIVIAL_SCALE = 0.0625
DEFAULT_TRIVIAL_OFFSET = 0.75

DEFAULT_EPSILON = 0.5
DEFAULT_FD_STEP = 1e-5
DEFAULT_FD_TOL = 1e-6

DEFAULT_GRID_R = 64
DEFAULT_GRID_THETA = 256
DEFAULT_INNER_RADIUS = 0.1
DEFAULT_SIGN_MARGIN = 1e-4

DEFAULT_CENSUS_LIMIT = 200_000
MIN_GRID_SIZE = 8


def _env(key: str, default: str = "") -> str:
    return os.environ.get(key, default).strip()


def _env_float(key: str, default: float) -> float:
    raw = _env(key, repr(default))
    try:
        return float(raw)
    except ValueError as exc:
        raise ImproperlyConfigured(f"{key} must be a number, got {raw!r}.") from exc


def _env_int(key: str, default: int) -> int:
    raw = _env(key, str(default))
    try:
        return int(raw)
    except ValueError as exc:
        raise ImproperlyConfigured(f"{key} must be an integer, got {raw!r}.") from exc


def validate_geometry(params: dict[str, float]) -> None:
    """Check the radius inequalities every transfer atom relies on."""
    r0, r1, r2 = params["r0"], params["r1"], params["r2"]
    scale, offset = params["trivial_scale"], params["trivial_offset"]

    if not 0 < r1 < 1:
        raise ImproperlyConfigured(f"Scaling radius r1 must lie in (0, 1), got {r1}.")
    if not 0 < r2 < 1:
        raise ImproperlyConfigured(f"Singular radius r2 must lie in (0, 1), got {r2}.")
    if not 0 < r0 < 1:
        raise ImproperlyConfigured(f"Center offset r0 must lie in (0, 1), got {r0}.")
    if r1 + r2 >= r0:
        raise ImproperlyConfigured(
            f"Radii must satisfy r1 + r2 < r0, got {r1} + {r2} >= {r0}."
        )
    if r0 + r2 >= 1:
        raise ImproperlyConfigured(
            f"Singular tubes must stay inside the unit disk: r0 + r2 = {r0 + r2} >= 1."
        )
    if not 0 < scale < 1:
        raise ImproperlyConfigured(f"Trivial scale must lie in (0, 1), got {scale}.")
    if offset + scale >= 1:
        raise ImproperlyConfigured(
            f"Trivial tubes must stay inside the unit disk: offset + scale = {offset + scale} >= 1."
        )
    # Trivial tubes sit in the annulus outside the singular family.
    if offset - scale <= r0 + r2:
        raise ImproperlyConfigured(
            f"Trivial tubes must clear the singular annulus: "
            f"offset - scale = {offset - scale} <= r0 + r2 = {r0 + r2}."
        )


def build_geometry_settings() -> dict[str, float]:
    """Build the transfer-atom radii from environment variables."""
    params = {
        "r0": _env_float("PENNER_R0", DEFAULT_R0),
        "r1": _env_float("PENNER_R1", DEFAULT_R1),
        "r2": _env_float("PENNER_R2", DEFAULT_R2),
        "trivial_scale": _env_float("PENNER_TRIVIAL_SCALE", DEFAULT_TRIVIAL_SCALE),
        "trivial_offset": _env_float("PENNER_TRIVIAL_OFFSET", DEFAULT_TRIVIAL_OFFSET),
    }
    validate_geometry(params)
    return params


def max_trivial_tubes(params: dict[str, float]) -> int:
    """Largest number of equally spaced trivial tubes that stay disjoint."""
    scale, offset = params["trivial_scale"], params["trivial_offset"]
    if scale >= offset:
        return 1
    return max(1, int(math.pi / math.asin(scale / offset)))


def resolve_profile() -> str:
    requested = _env("PENNER_PROFILE", PLATEAU_PROFILE).lower()
    if requested not in VALID_PROFILES:
        raise ImproperlyConfigured(
            f"Invalid PENNER_PROFILE={requested!r}. "
            f"Use one of: {', '.join(sorted(VALID_PROFILES))}."
        )
    return requested


def build_geomlab_settings() -> dict[str, Any]:
    epsilon = _env_float("PENNER_EPSILON", DEFAULT_EPSILON)
    fd_step = _env_float("PENNER_FD_STEP", DEFAULT_FD_STEP)
    fd_tol = _env_float("PENNER_FD_TOL", DEFAULT_FD_TOL)
    if epsilon <= 0:
        raise ImproperlyConfigured(f"PENNER_EPSILON must be positive, got {epsilon}.")
    if fd_step <= 0 or fd_tol <= 0:
        raise ImproperlyConfigured("Finite-difference step and tolerance must be positive.")
    return {
        "epsilon": epsilon,
        "profile": resolve_profile(),
        "fd_step": fd_step,
        "fd_tol": fd_tol,
    }


def build_lamsolve_settings() -> dict[str, Any]:
    grid_r = _env_int("PENNER_GRID_R", DEFAULT_GRID_R)
    grid_theta = _env_int("PENNER_GRID_THETA", DEFAULT_GRID_THETA)
    inner_radius = _env_float("PENNER_INNER_RADIUS", DEFAULT_INNER_RADIUS)
    margin = _env_float("PENNER_SIGN_MARGIN", DEFAULT_SIGN_MARGIN)
    if grid_r < MIN_GRID_SIZE or grid_theta < MIN_GRID_SIZE:
        raise ImproperlyConfigured(
            f"Grid sizes must be at least {MIN_GRID_SIZE}, got {grid_r}x{grid_theta}."
        )
    if not 0 < inner_radius < 1:
        raise ImproperlyConfigured(f"PENNER_INNER_RADIUS must lie in (0, 1), got {inner_radius}.")
    if margin < 0:
        raise ImproperlyConfigured(f"PENNER_SIGN_MARGIN must be non-negative, got {margin}.")
    return {
        "grid_r": grid_r,
        "grid_theta": grid_theta,
        "inner_radius": inner_radius,
        "margin": margin,
    }


def build_census_settings() -> dict[str, int]:
    limit = _env_int("PENNER_CENSUS_LIMIT", DEFAULT_CENSUS_LIMIT)
    if limit < 1:
        raise ImproperlyConfigured(f"PENNER_CENSUS_LIMIT must be positive, got {limit}.")
    return {"limit": limit}


def engine_settings(section: str) -> dict[str, Any]:
    """Return one parameter section from Django settings, falling back to the env."""
    from django.conf import settings

    builders = {
        "geometry": ("PENNER_GEOMETRY", build_geometry_settings),
        "geomlab": ("PENNER_GEOMLAB", build_geomlab_settings),
        "lamsolve": ("PENNER_LAMSOLVE", build_lamsolve_settings),
        "census": ("PENNER_CENSUS", build_census_settings),
    }
    name, builder = builders[section]
    value = getattr(settings, name, None)
    return dict(value) if value is not None else builder()


def engine_seed() -> int:
    """Seed for every random start vector and sample set."""
    from django.conf import settings

    return int(getattr(settings, "PENNER_SEED", _env_int("PENNER_SEED", 0)))


def engine_tolerance() -> float:
    from django.conf import settings

    return float(getattr(settings, "PENNER_TOLERANCE", _env_float("PENNER_TOLERANCE", 1e-9)))
