"""
Map atoms, atom chains and transfer matrices.

A map atom is one typed embedding of a solid torus S^1 x D^n into the
boundary neighbourhood of a singular disk. Chains keep the factorization
of composites; atoms are never flattened.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from django.db import models

from diskdecomp.models import SingularDisk
from twistsys.models import DiskChoice


class AtomKind(models.TextChoices):
    SCALING = 'scaling', 'Scaling'
    SINGULAR1 = 'singular1', 'First singular'
    SINGULAR2 = 'singular2', 'Second singular'
    TRIVIAL = 'trivial', 'Trivial'


class Port(NamedTuple):
    """A strand group of a singular disk."""

    disk: str
    group: str

    def __str__(self) -> str:
        return f"{self.disk}/{self.group}"


@dataclass(frozen=True)
class MapAtom:
    kind: str
    source: Port
    target: Port
    label: str
    angle_shift: float = 0.0
    fiber_scale: float = 1.0
    center_offset: float = 0.0
    center_phase: str = '+'
    fiber_rotation_degree: int = 0
    translation: tuple[float, float] = (0.0, 0.0)
    identity: bool = False

    @property
    def code(self) -> str:
        return f"{self.label}:{self.source}>{self.target}"

    @property
    def is_trivial(self) -> bool:
        return self.kind == AtomKind.TRIVIAL

    @property
    def antipodal(self) -> bool:
        return math.isclose(self.angle_shift, math.pi)

    @property
    def effective_phase(self) -> int:
        """Sign of the singular center family in terms of the target angle."""
        sign = 1 if self.center_phase == '+' else -1
        return -sign if self.antipodal else sign

    def as_dict(self) -> dict:
        return {
            'kind': str(self.kind),
            'label': self.label,
            'source': str(self.source),
            'target': str(self.target),
            'angle_shift': 'pi' if self.antipodal else '0',
            'fiber_scale': self.fiber_scale,
            'center_offset': self.center_offset,
            'center_phase': self.center_phase,
            'fiber_rotation_degree': self.fiber_rotation_degree,
            'translation': list(self.translation),
            'identity': self.identity,
        }


@dataclass(frozen=True)
class AtomChain:
    """Composite f_1 o f_2 o ... with ``atoms[0]`` applied last."""

    atoms: tuple[MapAtom, ...]
    target: Port
    source: Port

    @classmethod
    def of(cls, atom: MapAtom) -> AtomChain:
        return cls((atom,), atom.target, atom.source)

    @property
    def radius(self) -> float:
        return math.prod(a.fiber_scale for a in self.atoms)

    @property
    def code(self) -> str:
        return '|'.join(a.code for a in self.atoms) or f"id:{self.target}"

    @property
    def outermost(self) -> MapAtom | None:
        return self.atoms[0] if self.atoms else None

    @property
    def is_identity(self) -> bool:
        return all(a.identity for a in self.atoms)

    def then(self, inner: AtomChain) -> AtomChain:
        """``self o inner``."""
        return AtomChain(self.atoms + inner.atoms, self.target, inner.source)


@dataclass(frozen=True)
class TransferMatrix:
    source: DiskChoice
    target: DiskChoice
    row_disks: tuple[SingularDisk, ...]
    col_disks: tuple[SingularDisk, ...]
    entries: dict[tuple[str, str], tuple[AtomChain, ...]] = field(default_factory=dict, hash=False)
    label: str = field(default='', compare=False)

    def entry(self, row: str, col: str) -> tuple[AtomChain, ...]:
        return self.entries.get((row, col), ())

    @property
    def row_ids(self) -> list[str]:
        return [d.id for d in self.row_disks]

    @property
    def col_ids(self) -> list[str]:
        return [d.id for d in self.col_disks]

    def chains(self):
        for row in self.row_ids:
            for col in self.col_ids:
                yield from self.entry(row, col)

    def chains_into(self, port: Port):
        for col in self.col_ids:
            for chain in self.entry(port.disk, col):
                if chain.target == port:
                    yield chain

    @property
    def row_ports(self) -> list[Port]:
        return [Port(d.id, g) for d in self.row_disks for g in d.groups]

    @property
    def col_ports(self) -> list[Port]:
        return [Port(d.id, g) for d in self.col_disks for g in d.groups]

    @property
    def is_endo(self) -> bool:
        return self.source == self.target

    def labels(self, row: str, col: str) -> list[str]:
        """Entry as a formal sum: the labels of the outermost atoms."""
        return [c.outermost.label if c.outermost else 'I' for c in self.entry(row, col)]


@dataclass(frozen=True)
class Strand:
    chains: tuple[AtomChain, ...]
    target: Port
    source: Port

    @property
    def atoms(self) -> tuple[MapAtom, ...]:
        return tuple(a for c in self.chains for a in c.atoms)

    @property
    def id(self) -> str:
        return '|'.join(a.code for a in self.atoms) or f"id:{self.target}"

    @property
    def radius(self) -> float:
        return math.prod(c.radius for c in self.chains)

    @property
    def center(self) -> str:
        """Center family of the outermost non-identity atom."""
        for atom in self.atoms:
            if atom.identity:
                continue
            if atom.kind == AtomKind.SCALING:
                return 'origin'
            if atom.kind == AtomKind.TRIVIAL:
                return f"const({atom.translation[0]:.6g},{atom.translation[1]:.6g})"
            return f"circle{'+' if atom.effective_phase > 0 else '-'}({atom.center_offset:.6g})"
        return 'origin'


@dataclass
class StrandCensus:
    depth: int
    counts: dict[Port, int]
    max_radius: dict[Port, float]
    strands: dict[Port, list[Strand]] | None = None

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def disk_count(self, disk_id: str) -> int:
        return sum(n for port, n in self.counts.items() if port.disk == disk_id)

    def disk_strands(self, disk_id: str) -> list[Strand]:
        if self.strands is None:
            return []
        out = []
        for port, strands in self.strands.items():
            if port.disk == disk_id:
                out.extend(strands)
        return sorted(out, key=lambda s: s.id)
