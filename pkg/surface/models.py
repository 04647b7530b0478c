"""
Weight vectors on the parts of a dimension-one track and the reports built
from them.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import sympy

from twistsys.models import DiskChoice


@dataclass(frozen=True)
class WeightVector:
    """Non-negative weights keyed by track part id, in ``decompose`` order."""

    carrier: DiskChoice
    weights: tuple[tuple[str, object], ...]

    @classmethod
    def build(cls, carrier: DiskChoice, mapping: dict) -> WeightVector:
        return cls(carrier, tuple(mapping.items()))

    def as_dict(self) -> dict:
        return dict(self.weights)

    @property
    def parts(self) -> list[str]:
        return [key for key, _ in self.weights]

    def __getitem__(self, part_id: str):
        return self.as_dict()[part_id]

    def column(self) -> sympy.Matrix:
        return sympy.Matrix([value for _, value in self.weights])

    def scaled(self, factor) -> WeightVector:
        factor = sympy.nsimplify(factor)
        return WeightVector(self.carrier, tuple((k, v * factor) for k, v in self.weights))

    def is_zero(self) -> bool:
        return all(v == 0 for _, v in self.weights)

    def document(self) -> dict:
        return {
            'track': {'orientation': str(self.carrier.orientation), 'choice': self.carrier.as_dict()},
            'weights': {k: str(v) for k, v in self.weights},
        }


@dataclass
class WeightMatrix:
    """Integer action of a twist (or word) on part weights."""

    source: DiskChoice
    target: DiskChoice
    rows: list[str]
    cols: list[str]
    matrix: sympy.Matrix
    label: str = ''

    def apply(self, w: WeightVector) -> WeightVector:
        if w.carrier != self.source or w.parts != self.cols:
            raise ValueError(f'Weights on {w.carrier.label} do not match the domain of {self.label}.')
        values = self.matrix * w.column()
        return WeightVector(self.target, tuple(zip(self.rows, list(values))))


@dataclass
class StretchReport:
    word: str
    stretch_factor: float
    power_iteration: float
    eigvals: float
    charpoly_root: float
    iterations: int
    residual: float

    def as_dict(self) -> dict:
        return {
            'word': self.word,
            'stretch_factor': self.stretch_factor,
            'cross_checks': {
                'power_iteration': self.power_iteration,
                'eigvals': self.eigvals,
                'charpoly_root': self.charpoly_root,
            },
            'iterations': self.iterations,
            'residual': self.residual,
        }


@dataclass
class IntersectionReport:
    intersection: int
    hamiltonian_raw: int
    warnings: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            'intersection': self.intersection,
            'hamiltonian_raw': self.hamiltonian_raw,
            'warnings': self.warnings,
        }


@dataclass
class FloerReport:
    word0: str
    core0: str
    word1: str
    core1: str
    hf_sum: int
    intersection: IntersectionReport
    assumptions: list[dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            'word0': self.word0,
            'core0': self.core0,
            'word1': self.word1,
            'core1': self.core1,
            'hf_sum': self.hf_sum,
            'intersection': self.intersection.as_dict(),
            'assumptions': self.assumptions,
        }
