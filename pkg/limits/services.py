"""
Limit braids: strand classification, approximation of accumulation strands
by disk-bounding ones, and radius decay certificates.
"""
from __future__ import annotations

import logging
import math

import networkx as nx

from penner.exceptions import LimitsError, SpinningFallback
from plumbing.models import PlumbingGraph
from transfer.models import MapAtom, Port, TransferMatrix
from transfer.services import geometry_check, strand_census, verify_nesting

from .models import DecayCertificate, Extension, StrandClass, StrandPrefix

logger = logging.getLogger(__name__)

SINK = 'trivial'


def factor_for_layer(layer: int, length: int) -> int:
    """
    Index into the application-ordered factor list of the atom at position
    ``layer`` of a strand (outermost first). The outermost atom comes from
    the factor applied last.
    """
    return length - 1 - (layer % length)


def _factor_atoms(factors: list[TransferMatrix]) -> list[list[MapAtom]]:
    out = []
    for matrix in factors:
        atoms = {a.code: a for chain in matrix.chains() for a in chain.atoms}
        out.append([atoms[code] for code in sorted(atoms)])
    return out


def transition_graph(factors: list[TransferMatrix]) -> nx.DiGraph:
    """
    Layered (layer, port) graph of one period of the word. An atom at layer
    j joins (j, target) to (j + 1 mod l, source); trivial atoms also reach
    the sink.
    """
    length = len(factors)
    per_factor = _factor_atoms(factors)
    g = nx.DiGraph()
    g.add_node(SINK)
    for layer in range(length):
        for atom in per_factor[factor_for_layer(layer, length)]:
            u = (layer, atom.target)
            v = ((layer + 1) % length, atom.source)
            if not g.has_edge(u, v):
                g.add_edge(u, v, atom=atom)
            if atom.is_trivial and not g.has_edge(u, SINK):
                g.add_edge(u, SINK, atom=atom)
    return g


def max_extension_length(factors: list[TransferMatrix]) -> int:
    """Upper bound on N_k: the farthest sink distance, rounded up to whole periods."""
    g = transition_graph(factors)
    distances = nx.single_source_shortest_path_length(g.reverse(copy=False), SINK)
    farthest = max(distances.values(), default=0)
    length = len(factors)
    return math.ceil(farthest / length) * length


def unreachable_nodes(factors: list[TransferMatrix]) -> list:
    """Layered ports from which no trivial atom can be reached."""
    g = transition_graph(factors)
    reaching = set(nx.ancestors(g, SINK))
    return sorted((n for n in g.nodes if n != SINK and n not in reaching), key=str)


def check_realizable(atoms: tuple[MapAtom, ...], target: Port, factors: list[TransferMatrix]) -> None:
    length = len(factors)
    codes = [{a.code for a in atoms_} for atoms_ in _factor_atoms(factors)]
    expected = target
    for layer, atom in enumerate(atoms):
        if atom.target != expected:
            raise LimitsError(
                f'Atom {atom.code} at position {layer} does not land in {expected}.',
                code='unrealizable',
            )
        if atom.code not in codes[factor_for_layer(layer, length)]:
            raise LimitsError(
                f'Atom {atom.code} does not belong to the factor acting at position {layer}.',
                code='unrealizable',
            )
        expected = atom.source


def classify_strand(
    prefix: StrandPrefix,
    period: tuple[MapAtom, ...] = (),
    factors: list[TransferMatrix] | None = None,
) -> str:
    """
    Disk-bounding when a trivial atom occurs in the prefix or the period;
    otherwise the strand accumulates.
    """
    if factors is not None:
        if len(prefix) % len(factors) or len(period) % len(factors):
            raise LimitsError('Prefix and period must cover whole repetitions of the word.', code='bad_period')
        check_realizable(prefix.atoms + period * 2, prefix.target, factors)
    if prefix.classification == StrandClass.DISK_BOUNDING or any(a.is_trivial for a in period):
        return StrandClass.DISK_BOUNDING.value
    if not period:
        return StrandClass.UNDETERMINED.value
    return StrandClass.ACCUMULATION.value


def has_multi_point_sphere(graph: PlumbingGraph) -> bool:
    return any(len(graph.points_on(s.id)) >= 2 for s in graph.spheres)


def approximate_sequence(
    prefix: StrandPrefix,
    k: int,
    factors: list[TransferMatrix],
    graph: PlumbingGraph,
) -> Extension:
    """
    Extend a depth-k prefix (k periods of the word) by the shortest
    realizable run of atoms ending in a trivial atom.

    The returned strand agrees with the input on its first k*l atoms.
    """
    length = len(factors)
    if len(prefix) != k * length:
        raise LimitsError(
            f'Prefix has {len(prefix)} atoms; expected k*l = {k * length}.', code='bad_prefix_length'
        )
    if not has_multi_point_sphere(graph):
        raise SpinningFallback(
            'No sphere carries two plumbing points, so no trivial atom exists; '
            'the lamination is obtained by spinning instead.',
        )
    check_realizable(prefix.atoms, prefix.target, factors)
    bound = max_extension_length(factors)
    if prefix.classification == StrandClass.DISK_BOUNDING:
        return Extension(prefix, (), bound)

    g = transition_graph(factors)
    start = (len(prefix) % length, prefix.atoms[-1].source if prefix.atoms else prefix.target)
    if start not in g or not nx.has_path(g, start, SINK):
        raise LimitsError(f'No trivial atom is reachable from {start[1]}.', code='unreachable')
    path = nx.shortest_path(g, start, SINK)
    added = tuple(g.edges[u, v]['atom'] for u, v in zip(path, path[1:]))
    logger.debug(f"Extended prefix of length {len(prefix)} by {len(added)} atom(s)")
    return Extension(prefix, added, bound)


def all_scaling_prefixes(psi: TransferMatrix, depth: int) -> list[StrandPrefix]:
    """Depth-``depth`` strands of psi without a trivial atom, as atom prefixes."""
    census = strand_census(psi, depth)
    if census.strands is None:
        raise LimitsError(f'Too many strands at depth {depth} to enumerate.', code='census_too_large')
    prefixes = []
    for strands in census.strands.values():
        for strand in strands:
            prefix = StrandPrefix(strand.atoms, strand.target)
            if prefix.classification != StrandClass.DISK_BOUNDING:
                prefixes.append(prefix)
    return prefixes


def decay_certificate(psi: TransferMatrix, m: int, limit: int | None = None) -> DecayCertificate:
    """
    Certify radius decay at depth m: every strand radius is at most
    r_max^m, and depth-(m+1) strands nest in depth-m strands when both
    levels are small enough to enumerate.
    """
    geometry = geometry_check(psi)
    if not geometry.passed:
        raise LimitsError(
            'Geometry check failed; decay cannot be certified.',
            code='geometry_failed',
            details={'failures': geometry.failures},
        )
    shallow = strand_census(psi, m, limit)
    deep = strand_census(psi, m + 1, limit)
    nesting_checked = shallow.strands is not None and deep.strands is not None
    problems = verify_nesting(shallow, deep) if nesting_checked else []
    certificate = DecayCertificate(
        depth=m,
        r_max=geometry.r_max,
        bound=geometry.r_max ** m,
        max_radius=max(shallow.max_radius.values(), default=0.0),
        nesting_checked=nesting_checked,
        nesting_problems=problems,
    )
    logger.info(f"Decay certificate at depth {m}: bound {certificate.bound:.3e}, passed={certificate.passed}")
    return certificate
