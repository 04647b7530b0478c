"""
Plumbing data: spheres with signs glued at plumbing points.

These are immutable value types, not database tables.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from django.db import models


class Sign(models.TextChoices):
    POSITIVE = 'positive', 'Positive'
    NEGATIVE = 'negative', 'Negative'


class Gluing(models.TextChoices):
    F = 'f', 'Gluing f'
    G = 'g', 'Gluing g'


@dataclass(frozen=True)
class Sphere:
    id: str
    sign: str

    @property
    def is_positive(self) -> bool:
        return self.sign == Sign.POSITIVE


@dataclass(frozen=True)
class PlumbingPoint:
    """A transverse intersection of sphere ``a`` and sphere ``b``.

    ``pos_a`` / ``pos_b`` give the cyclic position of the point along the
    equator of each sphere.
    """

    id: str
    a: str
    b: str
    gluing: str = Gluing.F
    pos_a: int = 0
    pos_b: int = 0

    def position_on(self, sphere_id: str) -> int:
        if sphere_id == self.a:
            return self.pos_a
        if sphere_id == self.b:
            return self.pos_b
        raise KeyError(sphere_id)

    def other(self, sphere_id: str) -> str:
        if sphere_id == self.a:
            return self.b
        if sphere_id == self.b:
            return self.a
        raise KeyError(sphere_id)


@dataclass(frozen=True)
class PlumbingGraph:
    n: int
    spheres: tuple[Sphere, ...]
    points: tuple[PlumbingPoint, ...]

    @property
    def sphere_ids(self) -> list[str]:
        return [s.id for s in self.spheres]

    @property
    def point_ids(self) -> list[str]:
        return [p.id for p in self.points]

    def sphere(self, sphere_id: str) -> Sphere:
        for s in self.spheres:
            if s.id == sphere_id:
                return s
        raise KeyError(sphere_id)

    def point(self, point_id: str) -> PlumbingPoint:
        for p in self.points:
            if p.id == point_id:
                return p
        raise KeyError(point_id)

    def has_sphere(self, sphere_id: str) -> bool:
        return any(s.id == sphere_id for s in self.spheres)

    def points_on(self, sphere_id: str) -> list[PlumbingPoint]:
        """Points on a sphere in equator cyclic order (ties keep input order)."""
        on = [p for p in self.points if sphere_id in (p.a, p.b)]
        return sorted(on, key=lambda p: p.position_on(sphere_id))

    def positive_end(self, point: PlumbingPoint) -> str:
        """The positive sphere through a point of a Penner-type graph."""
        return point.a if self.sphere(point.a).is_positive else point.b

    def negative_end(self, point: PlumbingPoint) -> str:
        return point.b if self.sphere(point.a).is_positive else point.a

    def with_dimension(self, n: int) -> PlumbingGraph:
        return replace(self, n=n)


@dataclass(frozen=True)
class FixedSurfaceGraph:
    """The fixed surface of the anti-diagonal involution: a plumbing of circles."""

    graph: PlumbingGraph
    provenance: dict[str, str] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.graph.n


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    subject: str = ''


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def is_valid(self) -> bool:
        return not self.violations

    @property
    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def add(self, code: str, message: str, subject: str = '') -> None:
        self.violations.append(Violation(code, message, subject))

    def as_dict(self) -> dict:
        return {
            'valid': self.is_valid,
            'violations': [
                {'code': v.code, 'message': v.message, 'subject': v.subject}
                for v in self.violations
            ],
        }
