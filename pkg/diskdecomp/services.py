"""
Decomposition of a branched track into surgery parts, singular disks and
regular disks.
"""
from __future__ import annotations

import logging
from collections import Counter

import networkx as nx

from penner.exceptions import DecompositionError
from plumbing.models import PlumbingGraph
from twistsys.models import MINUS, PLUS, DiskChoice

from .models import (
    CarriedClass,
    ConditionReport,
    Flavor,
    Group,
    PartKind,
    RegularDisk,
    SingularDisk,
    TrackPart,
)

logger = logging.getLogger(__name__)


def complement_id(sphere_id: str) -> str:
    return f"{sphere_id}'"


def singular_disk_id(flavor: str, point_id: str, sign: str = '') -> str:
    if flavor == Flavor.S:
        return f"S{sign}:{point_id}"
    return f"{flavor}:{point_id}"


def _check_choice(dc: DiskChoice, graph: PlumbingGraph) -> None:
    if sorted(dc.as_dict()) != sorted(graph.point_ids):
        raise DecompositionError(
            f'Disk choice covers {sorted(dc.as_dict())} but the graph has points {sorted(graph.point_ids)}.',
            code='choice_mismatch',
        )


def decompose(dc: DiskChoice, graph: PlumbingGraph) -> list[TrackPart]:
    """Sphere complements, then neck, D_p and both antipodal disks per point."""
    _check_choice(dc, graph)
    parts = [TrackPart(complement_id(s.id), PartKind.SPHERE_COMPLEMENT, s.id) for s in graph.spheres]
    for point in graph.points:
        parts.extend([
            TrackPart(f"N:{point.id}", PartKind.NECK, point.id),
            TrackPart(f"D:{point.id}", PartKind.DISK, point.id, dc.sign(point.id)),
            TrackPart(f"Dbar+:{point.id}", PartKind.ANTIPODAL_DISK, point.id, PLUS),
            TrackPart(f"Dbar-:{point.id}", PartKind.ANTIPODAL_DISK, point.id, MINUS),
        ])
    return parts


def singular_disks(dc: DiskChoice, graph: PlumbingGraph) -> list[SingularDisk]:
    """Three disks per point in the order S_p, Sbar_p^+, Sbar_p^-."""
    _check_choice(dc, graph)
    disks = []
    for point in graph.points:
        sign = dc.sign(point.id)
        alpha, beta = graph.positive_end(point), graph.negative_end(point)
        disks.extend([
            SingularDisk(
                singular_disk_id(Flavor.S, point.id, sign), point.id, Flavor.S, sign,
                point.id, alpha if sign == PLUS else beta,
            ),
            SingularDisk(
                singular_disk_id(Flavor.SBAR_PLUS, point.id), point.id, Flavor.SBAR_PLUS, PLUS,
                f"tau({point.id})", alpha,
            ),
            SingularDisk(
                singular_disk_id(Flavor.SBAR_MINUS, point.id), point.id, Flavor.SBAR_MINUS, MINUS,
                f"sigma^-1({point.id})", beta,
            ),
        ])
    return disks


def equator_marks(sphere_id: str, dc: DiskChoice, graph: PlumbingGraph) -> list[str]:
    """
    Singular disks along the equator of a sphere in angular order.

    The k points sit at angles pi*i/k and their antipodal disks at
    pi*i/k + pi, so the list is the k branch-locus disks followed by the
    k antipodal disks.
    """
    points = graph.points_on(sphere_id)
    positive = graph.sphere(sphere_id).is_positive
    marks = [singular_disk_id(Flavor.S, p.id, dc.sign(p.id)) for p in points]
    bar = Flavor.SBAR_PLUS if positive else Flavor.SBAR_MINUS
    marks.extend(singular_disk_id(bar, p.id) for p in points)
    return marks


def regular_disks(dc: DiskChoice, graph: PlumbingGraph) -> list[RegularDisk]:
    """
    Components of the track minus singular-disk interiors, cut along the
    equators.

    In dimension one each sphere is a circle cut into arcs at its marked
    disks; in higher dimension the equator cut leaves two hemispheres per
    sphere. Each point leaves one neck remainder.
    """
    _check_choice(dc, graph)
    pieces: list[RegularDisk] = []
    for sphere in graph.spheres:
        marks = equator_marks(sphere.id, dc, graph)
        part = complement_id(sphere.id)
        if graph.n == 1:
            if not marks:
                pieces.extend(
                    RegularDisk(f"arc:{sphere.id}:{i}", (part,), (), (f"{sphere.id}:eq{i}", f"{sphere.id}:eq{1 - i}"))
                    for i in range(2)
                )
                continue
            count = len(marks)
            for i in range(count):
                ends = (marks[i], marks[(i + 1) % count])
                pieces.append(RegularDisk(f"arc:{sphere.id}:{i}", (part,), tuple(dict.fromkeys(ends))))
        else:
            for side in ('north', 'south'):
                pieces.append(
                    RegularDisk(f"hemi:{sphere.id}:{side}", (part,), tuple(marks), (f"{sphere.id}:equator",))
                )
    for point in graph.points:
        sign = dc.sign(point.id)
        pieces.append(
            RegularDisk(
                f"neck:{point.id}",
                (f"N:{point.id}", f"D:{point.id}"),
                (singular_disk_id(Flavor.S, point.id, sign),),
            )
        )
    return pieces


def shadow_graph(dc: DiskChoice, graph: PlumbingGraph) -> nx.MultiGraph:
    """
    One-dimensional shadow of a track: nodes flagged ``cut`` are singular
    disks or equator cuts, every edge is a stretch of track between them.

    In dimension one each sphere is its circle of equator marks; in higher
    dimension it is a north and a south hemisphere hanging off the equator.
    """
    g = nx.MultiGraph()
    for sphere in graph.spheres:
        if graph.n == 1:
            marks = equator_marks(sphere.id, dc, graph) or [f"{sphere.id}:eq0", f"{sphere.id}:eq1"]
            g.add_nodes_from(marks, cut=True)
            for i, mark in enumerate(marks):
                g.add_edge(mark, marks[(i + 1) % len(marks)])
        else:
            equator = f"{sphere.id}:equator"
            g.add_node(equator, cut=True)
            for side in ('north', 'south'):
                g.add_node(f"{sphere.id}:{side}", cut=False)
                g.add_edge(equator, f"{sphere.id}:{side}")
    for point in graph.points:
        node = singular_disk_id(Flavor.S, point.id, dc.sign(point.id))
        g.add_node(node, cut=True)
        g.add_node(f"neck-end:{point.id}", cut=False)
        g.add_edge(node, f"neck-end:{point.id}")
    return g


def shadow_piece_count(dc: DiskChoice, graph: PlumbingGraph) -> int:
    """Connected components of the shadow once its cut nodes are removed."""
    shadow = shadow_graph(dc, graph)
    pieces = nx.Graph()
    for index, (u, v) in enumerate(shadow.edges()):
        pieces.add_node(index)
        for end in (u, v):
            if not shadow.nodes[end]['cut']:
                pieces.add_edge(index, end)
    return nx.number_connected_components(pieces)


def check_decomposition(
    dc: DiskChoice,
    graph: PlumbingGraph,
    disks: list[SingularDisk],
    pieces: list[RegularDisk] | None = None,
) -> ConditionReport:
    """
    Check the five decomposition conditions combinatorially:

    1. every branch-locus point lies in a singular disk;
    2. singular disks are pairwise disjoint;
    3. each singular disk lies inside a single sector of the track;
    4. regular pieces meet singular disks only along listed boundaries;
    5. no regular piece contains a singular-disk interior.
    """
    report = ConditionReport()
    pieces = regular_disks(dc, graph) if pieces is None else pieces

    for point in graph.points:
        expected = singular_disk_id(Flavor.S, point.id, dc.sign(point.id))
        if not any(d.id == expected for d in disks):
            report.fail(1, f'Branch point {point.id} is not covered by {expected}.')

    slots = Counter((d.point, d.flavor) for d in disks)
    for (point_id, flavor), count in sorted(slots.items()):
        if count > 1:
            report.fail(2, f'{count} singular disks of flavor {flavor} at point {point_id}.')
    centers = Counter((d.center, d.sphere) for d in disks)
    for (center, sphere), count in sorted(centers.items()):
        if count > 1:
            report.fail(2, f'{count} singular disks centered at {center} on sphere {sphere}.')

    sphere_ids = set(graph.sphere_ids)
    for disk in disks:
        try:
            point = graph.point(disk.point)
        except KeyError:
            report.fail(3, f'Singular disk {disk.id} sits at unknown point {disk.point}.')
            continue
        if disk.sphere not in sphere_ids or disk.sphere not in (point.a, point.b):
            report.fail(3, f'Singular disk {disk.id} is not inside a sector at {disk.point}.')
        if disk.flavor == Flavor.S and disk.sign != dc.sign(disk.point):
            report.fail(3, f'Singular disk {disk.id} disagrees with the track sign at {disk.point}.')

    known = {d.id for d in disks}
    for piece in pieces:
        unknown = [d for d in piece.adjacent_singular if d not in known]
        if unknown:
            report.fail(4, f'Regular piece {piece.id} borders unknown singular disk(s) {unknown}.')
        covered = [p for p in piece.parts if p in known]
        if covered:
            report.fail(5, f'Regular piece {piece.id} overlaps singular interior(s) {covered}.')

    if not report.passed:
        logger.info(f"Decomposition check failed conditions {sorted(report.failures)}")
    return report


def check_switch_conditions(carried: CarriedClass, graph: PlumbingGraph) -> list[str]:
    """
    Violations of the carried-class invariants: non-negative counts, markers
    only inside singular disks, and full-fiber count = tilde + bar at every
    branch-locus disk.
    """
    violations = []
    disk_ids = {d.id for d in singular_disks(carried.carrier, graph)}
    for key, value in sorted(carried.counts.items()):
        if value < 0:
            violations.append(f'Negative count {value} on sector {key}.')
    for disk_id, marker in carried.markers:
        if disk_id not in disk_ids:
            violations.append(f'Singular component {marker!r} lies outside the singular disks ({disk_id}).')
    for disk in singular_disks(carried.carrier, graph):
        if not disk.on_branch_locus:
            continue
        keys = [disk.id] + [f"{disk.id}#{g}" for g in (Group.TILDE, Group.BAR)]
        full, *sheets = [carried.counts.get(key) for key in keys]
        missing = [key for key in keys if key not in carried.counts]
        if missing:
            violations.append(f'Switch condition at {disk.id} cannot be checked: no count on {missing}.')
            continue
        if full != sum(sheets):
            violations.append(
                f'Switch condition fails at {disk.id}: full fiber {full} != {sheets[0]} + {sheets[1]}.'
            )
    return violations


def decomposition_document(dc: DiskChoice, graph: PlumbingGraph) -> dict:
    return {
        'track': {'orientation': str(dc.orientation), 'choice': dc.as_dict()},
        'parts': [
            {'id': p.id, 'kind': str(p.kind), 'anchor': p.anchor, 'sign': p.sign}
            for p in decompose(dc, graph)
        ],
        'singular': [
            {
                'id': d.id, 'point': d.point, 'flavor': str(d.flavor), 'center': d.center,
                'sphere': d.sphere, 'on_branch_locus': d.on_branch_locus,
            }
            for d in singular_disks(dc, graph)
        ],
        'regular': [
            {'id': r.id, 'parts': list(r.parts), 'adjacent': list(r.adjacent_singular)}
            for r in regular_disks(dc, graph)
        ],
    }
