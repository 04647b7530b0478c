"""
Validation and structural operations on plumbing graphs.
"""
from __future__ import annotations

import logging
from collections import Counter

import networkx as nx
import numpy as np
from networkx.algorithms.isomorphism import categorical_node_match

from penner.exceptions import PlumbingError

from .models import FixedSurfaceGraph, Gluing, PlumbingGraph, Sign, ValidationReport

logger = logging.getLogger(__name__)


def sphere_graph(graph: PlumbingGraph) -> nx.MultiGraph:
    """Incidence multigraph: one node per sphere, one edge per plumbing point."""
    g = nx.MultiGraph()
    for sphere in graph.spheres:
        g.add_node(sphere.id, sign=sphere.sign)
    for point in graph.points:
        if g.has_node(point.a) and g.has_node(point.b):
            g.add_edge(point.a, point.b, key=point.id, gluing=point.gluing)
    return g


def validate(graph: PlumbingGraph) -> ValidationReport:
    """
    Collect every violation of the Penner-type plumbing invariants.

    An empty report means the graph is a connected plumbing of Penner type.
    """
    report = ValidationReport()

    if graph.n < 1:
        report.add('bad_dimension', f'Dimension must be a positive integer, got {graph.n}.')

    sphere_counts = Counter(s.id for s in graph.spheres)
    for sid, count in sorted(sphere_counts.items()):
        if count > 1:
            report.add('duplicate_sphere', f'Sphere id {sid!r} is used {count} times.', sid)

    for sphere in graph.spheres:
        if sphere.sign not in Sign.values:
            report.add('bad_sign', f'Sphere {sphere.id!r} has unknown sign {sphere.sign!r}.', sphere.id)

    point_counts = Counter(p.id for p in graph.points)
    for pid, count in sorted(point_counts.items()):
        if count > 1:
            report.add('duplicate_point', f'Point id {pid!r} is used {count} times.', pid)

    known = set(sphere_counts)
    signs = {s.id: s.sign for s in graph.spheres}
    for point in graph.points:
        missing = [sid for sid in (point.a, point.b) if sid not in known]
        if missing:
            report.add(
                'unknown_sphere',
                f'Point {point.id!r} references unknown sphere(s) {", ".join(missing)}.',
                point.id,
            )
            continue
        if point.a == point.b:
            report.add('self_intersection', f'Point {point.id!r} joins sphere {point.a!r} to itself.', point.id)
        elif signs[point.a] == signs[point.b]:
            report.add(
                'sign_clash',
                f'Point {point.id!r} joins two {signs[point.a]} spheres '
                f'{point.a!r} and {point.b!r}; same-sign spheres must be disjoint.',
                point.id,
            )
        if point.gluing not in Gluing.values:
            report.add('bad_gluing', f'Point {point.id!r} has unknown gluing {point.gluing!r}.', point.id)

    for sphere in graph.spheres:
        positions = Counter(p.position_on(sphere.id) for p in graph.points_on(sphere.id))
        clashes = sorted(pos for pos, count in positions.items() if count > 1)
        if clashes:
            report.add(
                'position_clash',
                f'Sphere {sphere.id!r} has several points at equator position(s) {clashes}.',
                sphere.id,
            )

    if len(graph.spheres) < 2 or not graph.points:
        report.add(
            'degenerate',
            'A plumbing needs at least one positive and one negative sphere joined at a point.',
        )
    else:
        g = sphere_graph(graph)
        if not nx.is_connected(g):
            components = sorted(sorted(c) for c in nx.connected_components(g))
            report.add(
                'disconnected',
                f'The incidence graph has {len(components)} components: {components}.',
            )

    if report.violations:
        logger.debug(f"Plumbing graph rejected with codes {sorted(report.codes)}")
    return report


def require_valid(graph: PlumbingGraph) -> PlumbingGraph:
    report = validate(graph)
    if not report.is_valid:
        first = report.violations[0]
        raise PlumbingError(first.message, code=first.code, details=report.as_dict())
    return graph


def fixed_surface(graph: PlumbingGraph | FixedSurfaceGraph) -> FixedSurfaceGraph:
    """Reduce a plumbing of n-spheres to the plumbing of their equator circles."""
    if isinstance(graph, FixedSurfaceGraph):
        return graph
    require_valid(graph)
    surface = graph.with_dimension(1)
    return FixedSurfaceGraph(graph=surface, provenance={s.id: s.id for s in graph.spheres})


def incidence_matrix(graph: PlumbingGraph) -> np.ndarray:
    """Spheres x spheres matrix counting plumbing points, in sphere input order."""
    index = {sid: i for i, sid in enumerate(graph.sphere_ids)}
    matrix = np.zeros((len(index), len(index)), dtype=np.int64)
    for point in graph.points:
        i, j = index[point.a], index[point.b]
        matrix[i, j] += 1
        matrix[j, i] += 1
    return matrix


def isomorphic(first: PlumbingGraph, second: PlumbingGraph, *, compare_dimension: bool = False) -> bool:
    """Sign-preserving isomorphism of the incidence multigraphs; gluing tags are ignored."""
    if compare_dimension and first.n != second.n:
        return False
    return nx.is_isomorphic(
        sphere_graph(first),
        sphere_graph(second),
        node_match=categorical_node_match("sign", None),
    )
