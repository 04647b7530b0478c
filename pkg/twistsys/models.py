"""
Twist words and disk choices (elements of the track sets B and B^op).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from django.db import models

PLUS = '+'
MINUS = '-'


def flip(sign: str) -> str:
    return MINUS if sign == PLUS else PLUS


class Orientation(models.TextChoices):
    STANDARD = 'standard', 'Standard (B)'
    OPPOSITE = 'opposite', 'Opposite (B^op)'


class Letter(models.TextChoices):
    TAU = 't', 'Twist along a positive sphere'
    SIGMA = 's', 'Twist along a negative sphere'


@dataclass(frozen=True)
class Factor:
    letter: str
    sphere: str
    exponent: int

    def __str__(self) -> str:
        if self.exponent == 1:
            return f"{self.letter}{self.sphere}"
        return f"{self.letter}{self.sphere}^{self.exponent}"

    def unit(self) -> Factor:
        return Factor(self.letter, self.sphere, 1 if self.exponent > 0 else -1)


@dataclass(frozen=True)
class TwistWord:
    """Factors in notation order; the rightmost factor is applied first."""

    factors: tuple[Factor, ...] = ()

    def __str__(self) -> str:
        return ' '.join(str(f) for f in self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    @property
    def spheres(self) -> set[str]:
        return {f.sphere for f in self.factors}

    def unit_factors(self) -> list[Factor]:
        """Expand exponents into repeated unit factors, preserving order."""
        expanded: list[Factor] = []
        for f in self.factors:
            expanded.extend([f.unit()] * abs(f.exponent))
        return expanded

    def power(self, k: int) -> TwistWord:
        return TwistWord(self.factors * k)


@dataclass(frozen=True)
class DiskChoice:
    """A choice of D_p^+ or D_p^- at every plumbing point."""

    orientation: str
    choice: tuple[tuple[str, str], ...]

    @classmethod
    def build(cls, orientation: str, mapping: Mapping[str, str] | Iterable[tuple[str, str]]) -> DiskChoice:
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        return cls(orientation=Orientation(orientation).value, choice=tuple(sorted(items)))

    def sign(self, point_id: str) -> str:
        for pid, sign in self.choice:
            if pid == point_id:
                return sign
        raise KeyError(point_id)

    def as_dict(self) -> dict[str, str]:
        return dict(self.choice)

    def with_signs(self, updates: Mapping[str, str]) -> DiskChoice:
        merged = self.as_dict()
        merged.update(updates)
        return DiskChoice.build(self.orientation, merged)

    @property
    def label(self) -> str:
        return ','.join(f"{pid}{sign}" for pid, sign in self.choice)
