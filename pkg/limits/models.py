"""
Strand prefixes and their classification.

An infinite strand is stored as a finite prefix of atoms followed by a
period repeated forever.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from django.db import models

from transfer.models import MapAtom, Port


class StrandClass(models.TextChoices):
    DISK_BOUNDING = 'disk-bounding', 'Bounds a disk of the lamination'
    ACCUMULATION = 'accumulation', 'Accumulates on a limit leaf'
    UNDETERMINED = 'undetermined', 'Undetermined'


@dataclass(frozen=True)
class StrandPrefix:
    atoms: tuple[MapAtom, ...]
    target: Port

    @property
    def radius(self) -> float:
        return math.prod(a.fiber_scale for a in self.atoms)

    @property
    def classification(self) -> str:
        if any(a.is_trivial for a in self.atoms):
            return StrandClass.DISK_BOUNDING.value
        return StrandClass.UNDETERMINED.value

    @property
    def codes(self) -> list[str]:
        return [a.code for a in self.atoms]

    def __len__(self) -> int:
        return len(self.atoms)


@dataclass
class Extension:
    """Result of extending a prefix until it meets a trivial atom."""

    prefix: StrandPrefix
    added: tuple[MapAtom, ...]
    bound: int

    @property
    def n_k(self) -> int:
        return len(self.added)

    @property
    def atoms(self) -> tuple[MapAtom, ...]:
        return self.prefix.atoms + self.added

    def as_dict(self) -> dict:
        return {
            'target': str(self.prefix.target),
            'prefix_length': len(self.prefix),
            'n_k': self.n_k,
            'bound': self.bound,
            'added': [a.code for a in self.added],
            'radius': math.prod(a.fiber_scale for a in self.atoms),
        }


@dataclass
class DecayCertificate:
    depth: int
    r_max: float
    bound: float
    max_radius: float
    nesting_checked: bool
    nesting_problems: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.max_radius <= self.bound * (1 + 1e-12) and not self.nesting_problems

    def as_dict(self) -> dict:
        return {
            'depth': self.depth,
            'r_max': self.r_max,
            'bound': self.bound,
            'max_radius': self.max_radius,
            'nesting_checked': self.nesting_checked,
            'nesting_problems': self.nesting_problems,
            'passed': self.passed,
        }
