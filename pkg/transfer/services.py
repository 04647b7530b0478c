"""
Transfer matrices: per-twist matrices, composition along a word, the strand
census and the geometric disjointness certificate.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from itertools import combinations

import networkx as nx
import numpy as np

from diskdecomp.models import CarriedClass, Flavor, Group
from diskdecomp.services import singular_disk_id, singular_disks
from penner.config import engine_settings
from penner.exceptions import DomainMismatchError, TransferError, UnknownSphereError
from plumbing.models import PlumbingGraph
from twistsys.models import PLUS, DiskChoice, Factor, TwistWord
from twistsys.services import apply_F, expected_exponent_sign, home_sign, invariant_track, require_penner

from .models import AtomChain, AtomKind, MapAtom, Port, Strand, StrandCensus, TransferMatrix
from .semirings import Counting, MaxTimes, step

logger = logging.getLogger(__name__)

# Labels per generator letter: three atoms into the antipodal disk, the
# scaling return and the two singular returns into the branch-locus disk.
ATOM_LABELS = {
    't': {'into': ('h1', 'h2', 'h3'), 'back': 'i', 'returns': ('j1', 'j2')},
    's': {'into': ('f1', 'f2', 'f3'), 'back': 'g3', 'returns': ('g1', 'g2')},
}
TRIVIAL_INTO_ANTIPODE = 'i_t'
TRIVIAL_INTO_LOCUS = 'h_t'

TILDE, BAR, WHOLE = Group.TILDE.value, Group.BAR.value, Group.WHOLE.value


def _identity_atoms(disk) -> list[MapAtom]:
    return [
        MapAtom(AtomKind.SCALING, Port(disk.id, g), Port(disk.id, g), 'id', identity=True)
        for g in disk.groups
    ]


def _place_trivial_centers(atoms: list[MapAtom], params: dict) -> list[MapAtom]:
    """Spread the trivial tubes landing in one port evenly on the offset circle."""
    by_target: dict[Port, list[int]] = {}
    for index, atom in enumerate(atoms):
        if atom.is_trivial:
            by_target.setdefault(atom.target, []).append(index)
    placed = list(atoms)
    offset = params['trivial_offset']
    for indices in by_target.values():
        count = len(indices)
        for j, index in enumerate(indices):
            angle = 2 * math.pi * j / count
            placed[index] = replace(
                atoms[index],
                translation=(round(offset * math.cos(angle), 15), round(offset * math.sin(angle), 15)),
            )
    return placed


def twist_matrix(
    generator: Factor,
    dc: DiskChoice,
    graph: PlumbingGraph,
    params: dict | None = None,
) -> TransferMatrix:
    """
    Transfer matrix of a single unit twist from the track ``dc`` to
    ``apply_F(generator, dc)``.

    Points off the twisted sphere keep their strands (identity atoms). For a
    point p on the sphere, the antipodal disk A on the home side receives a
    scaling atom from the sheet of S_p carried through, two singular atoms
    from the neck sheet and one trivial atom from every other point of the
    sphere. The branch-locus disk receives the scaling return from A and
    either the two singular returns (single-point sphere) or trivial atoms
    from the other points.
    """
    params = params or engine_settings('geometry')
    if abs(generator.exponent) != 1:
        raise TransferError(f'Transfer matrices take unit factors, got {generator}.', code='non_unit_factor')
    if not graph.has_sphere(generator.sphere):
        raise UnknownSphereError(f'Sphere {generator.sphere!r} is not in the graph.')
    expected = expected_exponent_sign(generator.sphere, graph, dc.orientation)
    if (generator.exponent > 0) != (expected > 0):
        raise TransferError(
            f'Generator {generator} is inconsistent with the {dc.orientation} track orientation.',
            code='sign_mismatch',
        )

    target = apply_F(generator, dc, graph)
    source_disks = singular_disks(dc, graph)
    target_disks = singular_disks(target, graph)
    labels = ATOM_LABELS[generator.letter]
    home = home_sign(generator.sphere, graph, dc.orientation)
    on_sphere = graph.points_on(generator.sphere)
    on_ids = {p.id for p in on_sphere}
    r0, r1, r2 = params['r0'], params['r1'], params['r2']
    r_trivial = params['trivial_scale']

    atoms: list[MapAtom] = []
    for point in graph.points:
        if point.id not in on_ids:
            for disk in source_disks:
                if disk.point == point.id:
                    atoms.extend(_identity_atoms(disk))
            continue

        locus_in = singular_disk_id(Flavor.S, point.id, dc.sign(point.id))
        locus_out = singular_disk_id(Flavor.S, point.id, home)
        home_flavor, away_flavor = (
            (Flavor.SBAR_PLUS, Flavor.SBAR_MINUS) if home == PLUS else (Flavor.SBAR_MINUS, Flavor.SBAR_PLUS)
        )
        antipode = singular_disk_id(home_flavor, point.id)
        away = next(d for d in source_disks if d.id == singular_disk_id(away_flavor, point.id))
        others = [x for x in on_sphere if x.id != point.id]
        into_antipode = Port(antipode, WHOLE)

        atoms.extend(_identity_atoms(away))
        atoms.extend([
            MapAtom(
                AtomKind.SCALING, Port(locus_in, TILDE), into_antipode, labels['into'][0],
                angle_shift=math.pi, fiber_scale=r1,
            ),
            MapAtom(
                AtomKind.SINGULAR1, Port(locus_in, BAR), into_antipode, labels['into'][1],
                angle_shift=math.pi, fiber_scale=r2, center_offset=r0, center_phase='+',
            ),
            MapAtom(
                AtomKind.SINGULAR2, Port(locus_in, BAR), into_antipode, labels['into'][2],
                angle_shift=math.pi, fiber_scale=r2, center_offset=r0, center_phase='-',
                fiber_rotation_degree=2,
            ),
        ])
        for other in others:
            other_locus = singular_disk_id(Flavor.S, other.id, dc.sign(other.id))
            atoms.append(MapAtom(
                AtomKind.TRIVIAL, Port(other_locus, BAR), into_antipode, TRIVIAL_INTO_ANTIPODE,
                fiber_scale=r_trivial,
            ))

        atoms.append(MapAtom(
            AtomKind.SCALING, into_antipode, Port(locus_out, TILDE), labels['back'],
            angle_shift=math.pi, fiber_scale=r1,
        ))
        if not others:
            atoms.extend([
                MapAtom(
                    AtomKind.SINGULAR1, Port(locus_in, BAR), Port(locus_out, BAR),
                    labels['returns'][0], fiber_scale=r2, center_offset=r0, center_phase='+',
                ),
                MapAtom(
                    AtomKind.SINGULAR2, Port(locus_in, BAR), Port(locus_out, BAR),
                    labels['returns'][1], fiber_scale=r2, center_offset=r0, center_phase='-',
                    fiber_rotation_degree=2,
                ),
            ])
        for other in others:
            other_locus = singular_disk_id(Flavor.S, other.id, dc.sign(other.id))
            atoms.append(MapAtom(
                AtomKind.TRIVIAL, Port(other_locus, BAR), Port(locus_out, BAR),
                TRIVIAL_INTO_LOCUS, fiber_scale=r_trivial,
            ))

    atoms = _place_trivial_centers(atoms, params)
    entries: dict[tuple[str, str], list[AtomChain]] = {}
    for atom in atoms:
        entries.setdefault((atom.target.disk, atom.source.disk), []).append(AtomChain.of(atom))
    return TransferMatrix(
        source=dc,
        target=target,
        row_disks=tuple(target_disks),
        col_disks=tuple(source_disks),
        entries={key: tuple(chains) for key, chains in entries.items()},
        label=f"{generator}@{dc.label}",
    )


def identity_matrix(dc: DiskChoice, graph: PlumbingGraph) -> TransferMatrix:
    """The unit for ``compose``: one empty chain per port."""
    disks = tuple(singular_disks(dc, graph))
    entries = {
        (d.id, d.id): tuple(AtomChain((), Port(d.id, g), Port(d.id, g)) for g in d.groups)
        for d in disks
    }
    return TransferMatrix(dc, dc, disks, disks, entries, label='I')


def compose(m2: TransferMatrix, m1: TransferMatrix) -> TransferMatrix:
    """``m2 . m1``: apply m1 first. Defined only when the tracks match."""
    if m2.source != m1.target:
        raise DomainMismatchError(
            f'Cannot compose {m2.label or "matrix"} after {m1.label or "matrix"}: '
            f'source track {m2.source.label} differs from target track {m1.target.label}.',
            details={'left_source': m2.source.as_dict(), 'right_target': m1.target.as_dict()},
        )
    entries: dict[tuple[str, str], tuple[AtomChain, ...]] = {}
    for row in m2.row_ids:
        for col in m1.col_ids:
            chains = [
                outer.then(inner)
                for mid in m2.col_ids
                for outer in m2.entry(row, mid)
                for inner in m1.entry(mid, col)
                if outer.source == inner.target
            ]
            if chains:
                entries[(row, col)] = tuple(chains)
    return TransferMatrix(
        source=m1.source,
        target=m2.target,
        row_disks=m2.row_disks,
        col_disks=m1.col_disks,
        entries=entries,
        label=f"{m2.label}.{m1.label}",
    )


def psi_factors(
    word: TwistWord,
    graph: PlumbingGraph,
    orientation: str | None = None,
    params: dict | None = None,
) -> list[TransferMatrix]:
    """Unit twist matrices in the order they act, starting on the invariant track."""
    orientation = require_penner(word, graph, orientation)
    dc = invariant_track(word, graph, orientation)
    factors = []
    for generator in reversed(word.unit_factors()):
        matrix = twist_matrix(generator, dc, graph, params)
        factors.append(matrix)
        dc = matrix.target
    return factors


def psi_matrix(
    word: TwistWord,
    graph: PlumbingGraph,
    orientation: str | None = None,
    params: dict | None = None,
) -> TransferMatrix:
    """Transfer matrix of the whole word; an endomorphism of the invariant track."""
    factors = psi_factors(word, graph, orientation, params)
    result = factors[0]
    for matrix in factors[1:]:
        result = compose(matrix, result)
    return replace(result, label=str(word))


@dataclass
class CountingMatrix:
    matrix: np.ndarray
    rows: list[Port]
    cols: list[Port]

    def value(self, row: Port, col: Port) -> int:
        return int(self.matrix[self.rows.index(row), self.cols.index(col)])


def counting_matrix(m: TransferMatrix) -> CountingMatrix:
    """Number of chains from each source port to each target port."""
    rows, cols = m.row_ports, m.col_ports
    row_index = {p: i for i, p in enumerate(rows)}
    col_index = {p: j for j, p in enumerate(cols)}
    matrix = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for chain in m.chains():
        matrix[row_index[chain.target], col_index[chain.source]] += 1
    return CountingMatrix(matrix, rows, cols)


def strand_census(psi: TransferMatrix, depth: int, limit: int | None = None) -> StrandCensus:
    """
    Strands of depth ``depth``: sequences of ``depth`` compatible chains of
    the endomorphism ``psi``, outermost first.

    Counts and largest radii come from a dynamic program; strands are only
    materialized while the total stays within ``limit``.
    """
    if depth < 0:
        raise TransferError(f'Census depth must be non-negative, got {depth}.', code='bad_depth')
    if not psi.is_endo:
        raise TransferError('Strand census needs a matrix from a track to itself.', code='not_endomorphism')
    limit = engine_settings('census')['limit'] if limit is None else limit

    ports = psi.row_ports
    incoming = {port: list(psi.chains_into(port)) for port in ports}
    count_weights = {p: [(c.source, Counting(1)) for c in chains] for p, chains in incoming.items()}
    radius_weights = {p: [(c.source, MaxTimes(c.radius)) for c in chains] for p, chains in incoming.items()}

    counts = {p: Counting.one for p in ports}
    radii = {p: MaxTimes.one for p in ports}
    for _ in range(depth):
        counts = step(count_weights, counts, Counting)
        radii = step(radius_weights, radii, MaxTimes)

    census = StrandCensus(
        depth=depth,
        counts={p: counts[p].value for p in ports},
        max_radius={p: radii[p].value for p in ports},
    )
    if census.total <= limit:
        census.strands = _enumerate_strands(incoming, ports, depth)
    else:
        logger.info(f"Census at depth {depth} has {census.total} strands; keeping counts only")
    return census


def _enumerate_strands(incoming: dict[Port, list[AtomChain]], ports: list[Port], depth: int):
    layer = {p: [Strand((), p, p)] for p in ports}
    for _ in range(depth):
        layer = {
            p: [
                Strand(s.chains + (c,), s.target, c.source)
                for s in strands
                for c in incoming[s.source]
            ]
            for p, strands in layer.items()
        }
    return {p: sorted(strands, key=lambda s: s.id) for p, strands in layer.items()}


def verify_nesting(shallow: StrandCensus, deep: StrandCensus) -> list[str]:
    """Every deeper strand must extend a shallower one inside a thinner tube."""
    if shallow.strands is None or deep.strands is None:
        raise TransferError('Nesting checks need materialized strands.', code='not_materialized')
    known = {}
    for strands in shallow.strands.values():
        for s in strands:
            known[(s.target, s.chains)] = s
    problems = []
    for strands in deep.strands.values():
        for s in strands:
            parent = known.get((s.target, s.chains[:shallow.depth]))
            if parent is None:
                problems.append(f'Strand {s.id} does not extend a depth-{shallow.depth} strand.')
            elif deep.depth > shallow.depth and not s.radius < parent.radius:
                problems.append(f'Strand {s.id} is not thinner than its parent.')
    return problems


@dataclass
class GeometryCertificate:
    passed: bool
    r_max: float
    min_gap: float
    checked_ports: int
    failures: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            'passed': self.passed,
            'r_max': self.r_max,
            'min_gap': self.min_gap,
            'checked_ports': self.checked_ports,
            'failures': self.failures,
        }


def _center(atom: MapAtom):
    if atom.kind in (AtomKind.SINGULAR1, AtomKind.SINGULAR2):
        return 'circle', atom.center_offset, atom.effective_phase
    if atom.is_trivial:
        return 'const', complex(*atom.translation), 0
    return 'const', 0j, 0


def center_distance(a: MapAtom, b: MapAtom) -> float:
    """Minimum over the circle parameter of the distance between tube centers."""
    kind_a, ca, phase_a = _center(a)
    kind_b, cb, phase_b = _center(b)
    if kind_a == 'const' and kind_b == 'const':
        return abs(ca - cb)
    if kind_a == 'const':
        return abs(abs(ca) - cb)
    if kind_b == 'const':
        return abs(abs(cb) - ca)
    if phase_a != phase_b:
        return ca + cb
    return abs(ca - cb)


def _outer_extent(atom: MapAtom) -> float:
    kind, center, _ = _center(atom)
    reach = center if kind == 'circle' else abs(center)
    return reach + atom.fiber_scale


def geometry_check(
    matrices: TransferMatrix | list[TransferMatrix],
    census: StrandCensus | None = None,
) -> GeometryCertificate:
    """
    Certify that every atom is a contraction into the unit disk and that the
    tubes landing in a common port are pairwise disjoint; with a census,
    also check every depth-m radius against r_max^m.
    """
    if isinstance(matrices, TransferMatrix):
        matrices = [matrices]
    failures: list[str] = []
    # Atoms are grouped by the factor they come from: chain position k of a
    # composite is its k-th factor.
    stages: dict[tuple[int, int, Port], dict[str, MapAtom]] = {}
    r_max = 0.0
    for index, matrix in enumerate(matrices):
        for chain in matrix.chains():
            if not chain.is_identity:
                r_max = max(r_max, chain.radius)
            for position, atom in enumerate(chain.atoms):
                if not atom.identity:
                    stages.setdefault((index, position, atom.target), {}).setdefault(atom.code, atom)
    r_max = r_max or 1.0

    seen = set()
    for stage_atoms in stages.values():
        for atom in stage_atoms.values():
            if atom.code in seen:
                continue
            seen.add(atom.code)
            if not 0 < atom.fiber_scale < 1:
                failures.append(f'Atom {atom.code} has scale {atom.fiber_scale} outside (0, 1).')
            if _outer_extent(atom) >= 1:
                failures.append(f'Atom {atom.code} leaves the unit disk (extent {_outer_extent(atom):.6g}).')

    min_gap = math.inf
    for (_, _, port), stage_atoms in sorted(stages.items()):
        for a, b in combinations(sorted(stage_atoms.values(), key=lambda x: x.code), 2):
            gap = center_distance(a, b) - a.fiber_scale - b.fiber_scale
            min_gap = min(min_gap, gap)
            if gap <= 0:
                message = f'Tubes {a.code} and {b.code} overlap in {port} (gap {gap:.6g}).'
                if message not in failures:
                    failures.append(message)

    if census is not None:
        bound = r_max ** census.depth
        for port, radius in sorted(census.max_radius.items()):
            if radius > bound * (1 + 1e-12):
                failures.append(f'Depth-{census.depth} radius {radius:.6g} in {port} exceeds {bound:.6g}.')

    certificate = GeometryCertificate(
        passed=not failures,
        r_max=r_max,
        min_gap=min_gap if min_gap != math.inf else 1.0,
        checked_ports=len({port for _, _, port in stages}),
        failures=failures,
    )
    if failures:
        logger.warning(f"Geometry check failed with {len(failures)} problem(s)")
    return certificate


def transition_digraph(counting: CountingMatrix) -> nx.DiGraph:
    """Edges run from source port to target port for every positive entry."""
    g = nx.DiGraph()
    g.add_nodes_from(counting.cols)
    g.add_nodes_from(counting.rows)
    for i, row in enumerate(counting.rows):
        for j, col in enumerate(counting.cols):
            if counting.matrix[i, j] > 0:
                g.add_edge(col, row, weight=int(counting.matrix[i, j]))
    return g


def _period(g: nx.DiGraph, nodes: set) -> int:
    sub = g.subgraph(nodes)
    root = min(nodes)
    levels = nx.single_source_shortest_path_length(sub, root)
    period = 0
    for u, v in sub.edges():
        period = math.gcd(period, levels[u] + 1 - levels[v])
    return abs(period)


def recurrent_classes(counting: CountingMatrix) -> list[dict]:
    """
    Strongly connected classes carrying at least one cycle, each with its
    period; a class is primitive when its period is one.
    """
    g = transition_digraph(counting)
    classes = []
    for component in nx.strongly_connected_components(g):
        nodes = set(component)
        if len(nodes) == 1:
            node = next(iter(nodes))
            if not g.has_edge(node, node):
                continue
        period = _period(g, nodes)
        closed = all(v in nodes for u in nodes for v in g.successors(u))
        classes.append({
            'ports': sorted(str(p) for p in nodes),
            'period': period,
            'primitive': period == 1,
            'closed': closed,
        })
    return sorted(classes, key=lambda c: c['ports'])


def carried_class_from_census(census: StrandCensus, psi: TransferMatrix) -> CarriedClass:
    """Strand counts per sector: full fiber per disk plus the sheets of locus disks."""
    counts: dict[str, int] = {}
    for disk in psi.row_disks:
        counts[disk.id] = census.disk_count(disk.id)
        if disk.on_branch_locus:
            for group in disk.groups:
                counts[f"{disk.id}#{group}"] = census.counts[Port(disk.id, group)]
    return CarriedClass(carrier=psi.target, counts=counts)


def matrix_document(m: TransferMatrix) -> dict:
    return {
        'label': m.label,
        'source': {'orientation': str(m.source.orientation), 'choice': m.source.as_dict()},
        'target': {'orientation': str(m.target.orientation), 'choice': m.target.as_dict()},
        'rows': m.row_ids,
        'cols': m.col_ids,
        'entries': [
            {
                'row': row,
                'col': col,
                'terms': [
                    {'atoms': [a.label for a in c.atoms], 'target': str(c.target),
                     'source': str(c.source), 'radius': c.radius}
                    for c in m.entry(row, col)
                ],
            }
            for row in m.row_ids
            for col in m.col_ids
            if m.entry(row, col)
        ],
    }


def census_document(census: StrandCensus) -> dict:
    document = {
        'depth': census.depth,
        'total': census.total,
        'counts': {str(p): n for p, n in sorted(census.counts.items())},
        'max_radius': {str(p): r for p, r in sorted(census.max_radius.items())},
        'materialized': census.strands is not None,
    }
    if census.strands is not None:
        document['strands'] = [
            {'id': s.id, 'disk': s.target.disk, 'group': s.target.group, 'radius': s.radius, 'center': s.center}
            for port in sorted(census.strands)
            for s in census.strands[port]
        ]
    return document
