"""
Points of the model cotangent bundle, twist profiles and oracle reports.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from django.db import models
from scipy.interpolate import CubicHermiteSpline

POINT_TOLERANCE = 1e-12


class ProfileVariant(models.TextChoices):
    PLATEAU = 'plateau', 'Constant pi near the zero section'
    SLOPED = 'sloped', 'Strictly decreasing from the zero section'


@dataclass(frozen=True, eq=False)
class CotangentPoint:
    """(u; v) in T*S^n seen inside R^{n+1} x R^{n+1}."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if u.shape != v.shape or u.ndim != 1 or u.size < 2:
            raise ValueError(f'u and v must be vectors of one length >= 2, got {u.shape} and {v.shape}.')
        object.__setattr__(self, 'u', u)
        object.__setattr__(self, 'v', v)

    @classmethod
    def from_vector(cls, z) -> CotangentPoint:
        z = np.asarray(z, dtype=float)
        half = z.size // 2
        return cls(z[:half], z[half:])

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.u, self.v])

    @property
    def n(self) -> int:
        return self.u.size - 1

    @property
    def mu(self) -> float:
        return float(np.linalg.norm(self.v))

    def problems(self, tol: float = POINT_TOLERANCE) -> list[str]:
        out = []
        if abs(np.linalg.norm(self.u) - 1.0) > tol:
            out.append(f'|u| = {np.linalg.norm(self.u)!r} is not 1.')
        if abs(float(self.u @ self.v)) > tol:
            out.append(f'<u, v> = {float(self.u @ self.v)!r} is not 0.')
        return out

    def distance(self, other: CotangentPoint) -> float:
        return float(np.max(np.abs(self.vector - other.vector)))

    def as_dict(self) -> dict:
        return {'u': self.u.tolist(), 'v': self.v.tolist()}


@dataclass
class TwistProfile:
    """
    Non-increasing angle function, zero for t >= epsilon, stored as a C^1
    cubic Hermite spline. Twist profiles start at pi.
    """

    epsilon: float
    variant: str
    spline: CubicHermiteSpline = field(repr=False)

    def __call__(self, t) -> np.ndarray | float:
        t = np.asarray(t, dtype=float)
        values = np.where(t >= self.epsilon, 0.0, self.spline(np.clip(t, 0.0, self.epsilon)))
        return float(values) if values.ndim == 0 else values

    def sample(self, count: int = 65) -> tuple[np.ndarray, np.ndarray]:
        ts = np.linspace(0.0, 1.5 * self.epsilon, count)
        return ts, np.asarray(self(ts))


@dataclass
class OracleCheck:
    name: str
    deviation: float
    tolerance: float
    samples: int = 0
    note: str = ''
    # Negative controls pass when the deviation is detected.
    expect_failure: bool = False

    @property
    def passed(self) -> bool:
        within = self.deviation <= self.tolerance
        return not within if self.expect_failure else within

    def as_dict(self) -> dict:
        return {
            'name': self.name,
            'passed': self.passed,
            'deviation': self.deviation,
            'tolerance': self.tolerance,
            'samples': self.samples,
            'note': self.note,
        }


@dataclass
class OracleReport:
    checks: list[OracleCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            'passed': self.passed,
            'max_deviation': max((c.deviation for c in self.checks if not c.expect_failure), default=0.0),
            'checks': [c.as_dict() for c in self.checks],
        }


@dataclass
class SurgeryReport:
    n: int
    variant: str
    slices: int
    samples_per_slice: int
    max_deviation: float
    tolerance: float = 1e-9

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance

    def as_dict(self) -> dict:
        return {
            'n': self.n,
            'profile': self.variant,
            'slices': self.slices,
            'samples_per_slice': self.samples_per_slice,
            'max_deviation': self.max_deviation,
            'passed': self.passed,
        }
