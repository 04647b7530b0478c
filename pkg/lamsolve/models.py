"""
Boundary sections, signed curve collections and potential solutions on the
polar grid of the unit disk.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from django.db import models
from scipy.signal import resample

OUTER_TOLERANCE = 1e-9


class CurveColor(models.TextChoices):
    RED = 'red', 'Horizontal local maximum'
    BLUE = 'blue', 'Horizontal local minimum'


def theta_grid(count: int) -> np.ndarray:
    return 2 * math.pi * np.arange(count) / count


@dataclass(eq=False)
class BoundarySection:
    """The section f d(theta) + g dr over the boundary circle, sampled at K angles."""

    f: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        self.f = np.asarray(self.f, dtype=float)
        self.g = np.asarray(self.g, dtype=float)
        if self.f.shape != self.g.shape or self.f.ndim != 1:
            raise ValueError(f'f and g must be sampled at the same angles, got {self.f.shape} and {self.g.shape}.')

    @classmethod
    def constant(cls, a: float, b: float, count: int) -> BoundarySection:
        """Restriction of a dx + b dy to the unit circle."""
        theta = theta_grid(count)
        return cls(-a * np.sin(theta) + b * np.cos(theta), a * np.cos(theta) + b * np.sin(theta))

    @property
    def samples(self) -> int:
        return self.f.size

    def resampled(self, count: int) -> BoundarySection:
        if count == self.samples:
            return self
        return BoundarySection(resample(self.f, count), resample(self.g, count))

    def distance(self, other: BoundarySection) -> float:
        """Sup over the boundary of the covector distance."""
        return float(np.max(np.hypot(self.f - other.f, self.g - other.g)))

    def as_dict(self) -> dict:
        return {'f': self.f.tolist(), 'g': self.g.tolist()}


@dataclass(frozen=True)
class Mark:
    level: int
    r: float
    theta: float
    color: str
    sign: int


@dataclass
class SignedCurve:
    """A traced curve of horizontal extrema; ``sign`` is the sign of the dr-component along it."""

    points: tuple[tuple[float, float], ...]
    colors: tuple[str, ...]
    sign: int
    closed: bool = False

    @property
    def endpoints(self) -> list[tuple[float, float, str]]:
        if self.closed:
            return []
        return [(*self.points[0], self.colors[0]), (*self.points[-1], self.colors[-1])]

    def as_dict(self) -> dict:
        return {
            'points': [list(p) for p in self.points],
            'colors': list(self.colors),
            'sign': self.sign,
            'closed': self.closed,
        }


@dataclass
class SignedCurveCollection:
    curves: list[SignedCurve]
    r_inner: float
    r_outer: float

    def _on(self, r: float, boundary: float) -> bool:
        return abs(r - boundary) <= OUTER_TOLERANCE

    def through_curves(self) -> list[int]:
        """Curves joining the inner and the outer boundary circles."""
        out = []
        for index, curve in enumerate(self.curves):
            ends = curve.endpoints
            if ends and {self._on(ends[0][0], self.r_inner), self._on(ends[1][0], self.r_inner)} == {True, False} \
                    and any(self._on(r, self.r_outer) for r, _, _ in ends):
                out.append(index)
        return out

    def outer_arcs(self) -> list[int]:
        return [
            index for index, curve in enumerate(self.curves)
            if curve.endpoints and all(self._on(r, self.r_outer) for r, _, _ in curve.endpoints)
        ]

    def outer_marks(self) -> list[tuple[float, str, int, int]]:
        """(theta, color, sign, curve index) of every endpoint on the outer circle, by angle."""
        marks = []
        for index, curve in enumerate(self.curves):
            for r, theta, color in curve.endpoints:
                if self._on(r, self.r_outer):
                    marks.append((theta % (2 * math.pi), color, curve.sign, index))
        return sorted(marks)

    def problems(self) -> list[str]:
        out = []
        for index, curve in enumerate(self.curves):
            for r, theta, _ in curve.endpoints:
                if not (self._on(r, self.r_inner) or self._on(r, self.r_outer)):
                    out.append(f'Curve {index} ends inside the annulus at (r={r:.4f}, theta={theta:.4f}).')
        through = self.through_curves()
        if len(through) != 2:
            out.append(f'Expected exactly two curves joining both boundary circles, found {len(through)}.')
        for index in through:
            colors = {c for *_, c in self.curves[index].endpoints}
            if len(colors) != 1:
                out.append(f'Curve {index} joins both boundaries with differently colored ends.')
        return out

    def as_dict(self) -> dict:
        return {
            'r_inner': self.r_inner,
            'r_outer': self.r_outer,
            'curves': [c.as_dict() for c in self.curves],
            'through_curves': self.through_curves(),
            'outer_arcs': self.outer_arcs(),
        }


@dataclass(eq=False)
class PotentialSolution:
    """phi_i sampled on the polar grid; ``linear`` holds the inner patch a x + b y per strand."""

    radii: np.ndarray
    thetas: np.ndarray
    values: np.ndarray
    linear: np.ndarray
    inner_radius: float
    sections: list[BoundarySection] = field(default_factory=list)

    @property
    def strands(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape[1], self.values.shape[2]

    def polar_gradient(self, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(d/dr, d/dtheta) of a grid function: one-sided in r at the ends, spectral in theta."""
        dr = self.radii[1] - self.radii[0]
        d_r = np.gradient(values, dr, axis=0, edge_order=1)
        k = np.fft.fftfreq(self.thetas.size, d=1.0 / self.thetas.size)
        if self.thetas.size % 2 == 0:
            k[self.thetas.size // 2] = 0
        d_theta = np.real(np.fft.ifft(1j * k * np.fft.fft(values, axis=1), axis=1))
        return d_r, d_theta

    def cartesian_gradient(self, values: np.ndarray, linear: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d_r, d_theta = self.polar_gradient(values)
        cos, sin = np.cos(self.thetas), np.sin(self.thetas)
        gx = np.empty_like(values)
        gy = np.empty_like(values)
        gx[0], gy[0] = linear[0], linear[1]
        r = self.radii[1:, None]
        gx[1:] = cos * d_r[1:] - sin * d_theta[1:] / r
        gy[1:] = sin * d_r[1:] + cos * d_theta[1:] / r
        return gx, gy

    def gradient(self, index: int) -> tuple[np.ndarray, np.ndarray]:
        return self.cartesian_gradient(self.values[index], self.linear[index])

    def boundary_error(self, index: int, section: BoundarySection) -> float:
        d_r, d_theta = self.polar_gradient(self.values[index])
        return float(max(np.max(np.abs(d_theta[-1] - section.f)), np.max(np.abs(d_r[-1] - section.g))))

    def min_gap(self, i: int, j: int) -> float:
        """min over the grid of |d(phi_i - phi_j)|."""
        gx, gy = self.cartesian_gradient(self.values[i] - self.values[j], self.linear[i] - self.linear[j])
        return float(np.min(np.hypot(gx, gy)))

    def section_distance(self, i: int, other: PotentialSolution, j: int) -> float:
        """Sup over the common grid of |d phi_i - d psi_j|; bounds the Hausdorff distance of the graphs."""
        ax, ay = self.gradient(i)
        bx, by = other.gradient(j)
        return float(np.max(np.hypot(ax - bx, ay - by)))

    def as_dict(self) -> dict:
        return {
            'grid': {'r': self.radii.size, 'theta': self.thetas.size},
            'inner_radius': self.inner_radius,
            'linear': self.linear.tolist(),
            'values': self.values.tolist(),
        }


@dataclass
class HomotopyReport:
    stages: list[dict] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return all(s['feasible'] for s in self.stages)

    def as_dict(self) -> dict:
        return {'feasible': self.feasible, 'stages': self.stages}


@dataclass
class TowerStrand:
    section: BoundarySection
    parent: int | None = None
    radius: float = 1.0
    label: str = ''


@dataclass
class NestReport:
    depth: int
    contraction: float
    strands_per_depth: list[int]
    distances: list[dict] = field(default_factory=list)
    normalization_error: float = 0.0

    @property
    def passed(self) -> bool:
        return all(d['passed'] for d in self.distances)

    def as_dict(self) -> dict:
        return {
            'passed': self.passed,
            'depth': self.depth,
            'contraction': self.contraction,
            'strands_per_depth': self.strands_per_depth,
            'distances': self.distances,
            'normalization_error': self.normalization_error,
        }
