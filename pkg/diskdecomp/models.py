"""
Pieces of a branched track: surgery parts, singular disks, regular disks
and carried classes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from django.db import models

from twistsys.models import DiskChoice


class PartKind(models.TextChoices):
    SPHERE_COMPLEMENT = 'sphere_complement', 'Sphere complement'
    NECK = 'neck', 'Neck'
    DISK = 'disk', 'Disk D_p'
    ANTIPODAL_DISK = 'antipodal_disk', 'Antipodal disk'


class Flavor(models.TextChoices):
    S = 'S', 'S_p (on the branch locus)'
    SBAR_PLUS = 'Sbar+', 'Sbar_p^+'
    SBAR_MINUS = 'Sbar-', 'Sbar_p^-'


class Group(models.TextChoices):
    """Strand groups inside a singular disk boundary."""

    TILDE = 'tilde', 'Carried-through sheet'
    BAR = 'bar', 'Neck sheet'
    WHOLE = 'whole', 'Whole fiber'


@dataclass(frozen=True)
class TrackPart:
    id: str
    kind: str
    anchor: str
    sign: str = ''


@dataclass(frozen=True)
class SingularDisk:
    id: str
    point: str
    flavor: str
    sign: str
    center: str
    sphere: str

    @property
    def on_branch_locus(self) -> bool:
        return self.flavor == Flavor.S

    @property
    def groups(self) -> tuple[str, ...]:
        if self.on_branch_locus:
            return (Group.TILDE.value, Group.BAR.value)
        return (Group.WHOLE.value,)


@dataclass(frozen=True)
class RegularDisk:
    id: str
    parts: tuple[str, ...]
    adjacent_singular: tuple[str, ...]
    cuts: tuple[str, ...] = ()


@dataclass
class CarriedClass:
    """
    Strand counts on the sectors of a track.

    Locus sectors are keyed ``"<disk id>"`` for the full fiber and
    ``"<disk id>#tilde"`` / ``"<disk id>#bar"`` for the interior sheets.
    """

    carrier: DiskChoice
    counts: dict[str, int] = field(default_factory=dict)
    markers: list[tuple[str, str]] = field(default_factory=list)


@dataclass
class ConditionReport:
    failures: dict[int, list[str]] = field(default_factory=dict)

    def fail(self, condition: int, message: str) -> None:
        self.failures.setdefault(condition, []).append(message)

    @property
    def passed(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {
            'passed': self.passed,
            'conditions': {
                str(c): {'passed': c not in self.failures, 'failures': self.failures.get(c, [])}
                for c in range(1, 6)
            },
        }
