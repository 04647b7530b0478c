"""
Generating functions of Lagrangian disks on the unit disk.

A Lagrangian disk that is the graph of an exact one-form is d(phi) for a
potential phi on D^2. Boundary data are sampled sections f d(theta) + g dr of
the cotangent bundle over the unit circle. Each potential is the energy
minimizer with that boundary: linear (a x + b y) on the inner patch
r < inner_radius and harmonic in between, with the outer ring fixed by
phi = Phi and the last difference in r fixed by g.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from itertools import combinations

import networkx as nx
import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import spsolve

from geomlab.services import evaluate_atom
from penner.config import engine_settings
from penner.exceptions import InfeasibleConstraintError, LamsolveError
from transfer.models import Port, Strand, TransferMatrix
from transfer.services import geometry_check, strand_census

from .models import (
    BoundarySection,
    CurveColor,
    HomotopyReport,
    Mark,
    NestReport,
    PotentialSolution,
    SignedCurve,
    SignedCurveCollection,
    TowerStrand,
    theta_grid,
)

logger = logging.getLogger(__name__)

BOUNDARY_TOLERANCE = 1e-6
EXACTNESS_TOLERANCE = 1e-9
ORIGIN_TOLERANCE = 1e-12
MATCH_TOLERANCE = 0.1
# Largest angular move of a mark between neighbouring levels.
MAX_JUMP = 0.5
NEST_FACTOR = 4.0


def lamsolve_settings(options: dict | None = None) -> dict:
    params = engine_settings('lamsolve')
    params.update({k: v for k, v in (options or {}).items() if v is not None})
    if not 0 < params['inner_radius'] < 1:
        raise LamsolveError(f"Inner radius must lie in (0, 1), got {params['inner_radius']}.", code='bad_option')
    return params


def _cyclic(delta):
    return np.abs((np.asarray(delta) + math.pi) % (2 * math.pi) - math.pi)


def integrate_theta(f: np.ndarray) -> np.ndarray:
    """Zero-mean periodic antiderivative of f, computed spectrally."""
    count = f.size
    coefficients = np.fft.fft(f)
    if abs(coefficients[0].real) / count > EXACTNESS_TOLERANCE:
        raise LamsolveError(
            'The boundary section is not exact: f d(theta) has non-zero mean.',
            code='not_exact',
            details={'mean': coefficients[0].real / count},
        )
    k = np.fft.fftfreq(count, d=1.0 / count)
    integrated = np.zeros_like(coefficients)
    nonzero = k != 0
    integrated[nonzero] = coefficients[nonzero] / (1j * k[nonzero])
    if count % 2 == 0:
        integrated[count // 2] = 0
    return np.real(np.fft.ifft(integrated))


def _laplace_system(radii: np.ndarray, count: int, first: int, last: int, psi: np.ndarray):
    """Five-point polar Laplacian on rings first..last with the other rings as Dirichlet data."""
    dr = radii[1] - radii[0]
    dtheta = 2 * math.pi / count
    rows, cols, data = [], [], []
    rhs = np.zeros((last - first + 1) * count)

    def index(j, k):
        return (j - first) * count + (k % count)

    for j in range(first, last + 1):
        r = radii[j]
        outer = (r + dr / 2) / (r * dr * dr)
        inner = (r - dr / 2) / (r * dr * dr)
        angular = 1.0 / (r * r * dtheta * dtheta)
        for k in range(count):
            row = index(j, k)
            rows += [row, row, row]
            cols += [row, index(j, k + 1), index(j, k - 1)]
            data += [-(outer + inner + 2 * angular), angular, angular]
            for neighbour, weight in ((j + 1, outer), (j - 1, inner)):
                if first <= neighbour <= last:
                    rows.append(row)
                    cols.append(index(neighbour, k))
                    data.append(weight)
                else:
                    rhs[row] -= weight * psi[neighbour, k]
    size = rhs.size
    return coo_matrix((data, (rows, cols)), shape=(size, size)).tocsr(), rhs


def solve_potential(section: BoundarySection, radii: np.ndarray, inner_radius: float) -> tuple[np.ndarray, np.ndarray]:
    """One potential on the grid and its inner linear part (a, b); phi(0) = 0."""
    thetas = theta_grid(section.samples)
    cos, sin = np.cos(thetas), np.sin(thetas)
    dr = radii[1] - radii[0]

    boundary = integrate_theta(section.f)
    a = 2 * float(np.mean(boundary * cos))
    b = 2 * float(np.mean(boundary * sin))
    linear = a * radii[:, None] * cos + b * radii[:, None] * sin

    psi = np.zeros_like(linear)
    psi[-1] = boundary - (a * cos + b * sin)
    psi[-2] = psi[-1] - dr * (section.g - (a * cos + b * sin))

    first = max(1, int(np.searchsorted(radii, inner_radius)))
    last = radii.size - 3
    if first > last:
        raise LamsolveError(
            f'Inner radius {inner_radius} leaves no interior ring on a {radii.size}-ring grid.',
            code='bad_option',
        )
    if np.max(np.abs(psi[-2:])) > 1e-14:
        matrix, rhs = _laplace_system(radii, thetas.size, first, last, psi)
        psi[first:last + 1] = spsolve(matrix, rhs).reshape(last - first + 1, thetas.size)
    return linear + psi, np.array([a, b])


def _gradients(solution: PotentialSolution) -> list[tuple[np.ndarray, np.ndarray]]:
    return [solution.gradient(i) for i in range(solution.strands)]


def _min_gaps(gradients) -> dict[tuple[int, int], float]:
    return {
        (i, j): float(np.min(np.hypot(gradients[i][0] - gradients[j][0], gradients[i][1] - gradients[j][1])))
        for i, j in combinations(range(len(gradients)), 2)
    }


def check_sections(sections: Sequence[BoundarySection]) -> None:
    """Boundary sections must be pairwise disjoint over the circle."""
    for (i, a), (j, b) in combinations(enumerate(sections), 2):
        gap = float(np.min(np.hypot(a.f - b.f, a.g - b.g)))
        if gap <= 0:
            raise LamsolveError(
                f'Boundary sections {i} and {j} meet over the circle.',
                code='boundary_overlap',
                details={'pair': [i, j]},
            )


def solve_potentials(
    sections: Sequence[BoundarySection],
    collection: SignedCurveCollection | None = None,
    options: dict | None = None,
) -> PotentialSolution:
    """
    Potentials phi_0..phi_{k-1} with d(phi_i) matching each boundary section,
    pairwise disjoint graphs and, when a collection is given, the extrema
    pattern of d(phi_1 - phi_0) matching it on the outer circle.

    Raises InfeasibleConstraintError when a constraint fails.
    """
    if not sections:
        raise LamsolveError('At least one boundary section is required.', code='empty_boundary')
    params = lamsolve_settings(options)
    count = params['grid_theta']
    sections = [s.resampled(count) for s in sections]
    check_sections(sections)

    radii = np.linspace(0.0, 1.0, params['grid_r'])
    values, linear = zip(*(solve_potential(s, radii, params['inner_radius']) for s in sections))
    solution = PotentialSolution(
        radii=radii,
        thetas=theta_grid(count),
        values=np.stack(values),
        linear=np.stack(linear),
        inner_radius=params['inner_radius'],
        sections=sections,
    )
    logger.info(f"Solved {solution.strands} potential(s) on a {radii.size}x{count} grid")

    for i, section in enumerate(sections):
        error = solution.boundary_error(i, section)
        if error > BOUNDARY_TOLERANCE:
            raise LamsolveError(
                f'Potential {i} misses its boundary data by {error:.3g}.',
                code='boundary_mismatch',
                details={'strand': i, 'error': error},
            )
    _check_disjoint(_min_gaps(_gradients(solution)), params['margin'])

    if collection is not None:
        if solution.strands < 2:
            raise LamsolveError('A curve collection constrains a pair of potentials.', code='missing_pair')
        problems = compare_collections(collection, solution_collection(solution, 1, 0))
        if problems:
            raise InfeasibleConstraintError(
                problems[0],
                code='curve_violation',
                details={'problems': problems},
            )
    return solution


def _check_disjoint(gaps: dict[tuple[int, int], float], margin: float) -> None:
    for (i, j), gap in sorted(gaps.items()):
        if gap <= margin:
            raise InfeasibleConstraintError(
                f'Graphs of d(phi_{i}) and d(phi_{j}) come within {gap:.3g} of each other.',
                code='touching',
                details={'pair': [i, j], 'gap': gap, 'margin': margin},
            )


def _level_marks(level: int, r: float, gamma: np.ndarray, thetas: np.ndarray) -> list[Mark]:
    f, g = gamma[:, 0], gamma[:, 1]
    dtheta = 2 * math.pi / thetas.size
    positive = f > 0
    marks = []
    for k in range(thetas.size):
        nxt = (k + 1) % thetas.size
        if positive[k] == positive[nxt]:
            continue
        t = f[k] / (f[k] - f[nxt])
        g_at = g[k] + t * (g[nxt] - g[k])
        if abs(g_at) <= ORIGIN_TOLERANCE:
            raise LamsolveError(
                f'The loop at r={r:.4f} passes through the origin.',
                code='origin_touched',
                details={'level': level, 'theta': float(thetas[k] + t * dtheta)},
            )
        color = CurveColor.RED if positive[k] else CurveColor.BLUE
        marks.append(Mark(level, float(r), float((thetas[k] + t * dtheta) % (2 * math.pi)), color.value, 1 if g_at > 0 else -1))
    return marks


def _match(lower: list[Mark], upper: list[Mark]) -> list[tuple[int, int]]:
    if not lower or not upper:
        return []
    cost = _cyclic(np.subtract.outer([m.theta for m in lower], [m.theta for m in upper]))
    rows, cols = linear_sum_assignment(cost)
    return [(i, j) for i, j in zip(rows, cols) if cost[i, j] <= MAX_JUMP]


def _pair_turns(marks: list[Mark], level: int) -> list[tuple[Mark, Mark]]:
    """Pair unmatched red and blue marks of one level into turning points."""
    reds = [m for m in marks if m.color == CurveColor.RED]
    blues = [m for m in marks if m.color == CurveColor.BLUE]
    if len(reds) != len(blues):
        raise LamsolveError(
            f'Curves cannot be traced through level {level}: {len(reds)} red and {len(blues)} blue ends.',
            code='untraceable',
            details={'level': level},
        )
    if not reds:
        return []
    cost = _cyclic(np.subtract.outer([m.theta for m in reds], [m.theta for m in blues]))
    rows, cols = linear_sum_assignment(cost)
    return [(reds[i], blues[j]) for i, j in zip(rows, cols)]


def collection_from_isotopy(
    gamma: np.ndarray,
    radii: Sequence[float] | None = None,
) -> SignedCurveCollection:
    """
    Trace the signed curve collection of a loop isotopy.

    ``gamma`` has shape (levels, K, 2): level l holds the loop gamma_r(theta)
    = (d(theta)-component, dr-component) at radius radii[l] sampled at K
    angles. A crossing of the dr-axis from right to left marks a red point,
    from left to right a blue one; the sign is the side of the crossing.
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 3 or gamma.shape[2] != 2 or gamma.shape[0] < 2:
        raise LamsolveError(f'Loop isotopy must have shape (levels, K, 2), got {gamma.shape}.', code='bad_isotopy')
    levels, count, _ = gamma.shape
    radii = np.linspace(0.0, 1.0, levels + 1)[1:] if radii is None else np.asarray(radii, dtype=float)
    if radii.size != levels or np.any(np.diff(radii) <= 0):
        raise LamsolveError('Isotopy radii must increase, one per level.', code='bad_isotopy')

    thetas = theta_grid(count)
    marks = [_level_marks(level, radii[level], gamma[level], thetas) for level in range(levels)]

    g = nx.Graph()
    for level_marks in marks:
        g.add_nodes_from(level_marks)
    matched_down: set[Mark] = set()
    for level in range(levels - 1):
        matched_up: set[Mark] = set()
        for color in CurveColor.values:
            lower = [m for m in marks[level] if m.color == color]
            upper = [m for m in marks[level + 1] if m.color == color]
            for i, j in _match(lower, upper):
                g.add_edge(lower[i], upper[j])
                matched_up.add(lower[i])
                matched_down.add(upper[j])
        deaths = [m for m in marks[level] if m not in matched_up]
        births = [m for m in marks[level + 1] if m not in matched_down]
        for a, b in _pair_turns(deaths, level) + _pair_turns(births, level + 1):
            g.add_edge(a, b)

    curves = []
    for nodes in nx.connected_components(g):
        sub = g.subgraph(nodes)
        signs = {m.sign for m in nodes}
        if len(signs) != 1:
            raise LamsolveError(
                'A traced curve changes sign; the loops cross the origin.',
                code='inconsistent_sign',
                details={'marks': len(nodes)},
            )
        closed = len(nodes) > 2 and all(d == 2 for _, d in sub.degree())
        ends = [m for m, d in sub.degree() if d <= 1]
        start = max(ends, key=lambda m: (m.level, -m.theta)) if ends else min(nodes, key=lambda m: (m.level, m.theta))
        order = list(nx.dfs_preorder_nodes(sub, start))
        curves.append(SignedCurve(
            points=tuple((m.r, m.theta) for m in order),
            colors=tuple(m.color for m in order),
            sign=signs.pop(),
            closed=closed,
        ))
    curves.sort(key=lambda c: (-c.points[0][0], c.points[0][1]))
    return SignedCurveCollection(curves, float(radii[0]), float(radii[-1]))


def solution_loops(solution: PotentialSolution, i: int, j: int | None = None) -> np.ndarray:
    """gamma_r(theta) = (d_theta(phi_i - phi_j) / r, d_r(phi_i - phi_j)) on every ring r > 0."""
    values = solution.values[i] - (solution.values[j] if j is not None else 0)
    d_r, d_theta = solution.polar_gradient(values)
    return np.stack([d_theta[1:] / solution.radii[1:, None], d_r[1:]], axis=-1)


def solution_collection(solution: PotentialSolution, i: int, j: int | None = None) -> SignedCurveCollection:
    return collection_from_isotopy(solution_loops(solution, i, j), solution.radii[1:])


def compare_collections(expected: SignedCurveCollection, actual: SignedCurveCollection) -> list[str]:
    """Differences of the outer-circle pattern: marks, through-curves and arc pairings."""
    want, have = expected.outer_marks(), actual.outer_marks()
    if len(want) != len(have):
        return [f'Expected {len(want)} marks on the outer circle, found {len(have)}.']
    problems = []
    matched: dict[int, int] = {}
    if want:
        cost = _cyclic(np.subtract.outer([m[0] for m in want], [m[0] for m in have]))
        cost += 10.0 * np.not_equal.outer([m[1] for m in want], [m[1] for m in have])
        for i, j in zip(*linear_sum_assignment(cost)):
            theta, color, sign, curve = want[i]
            if cost[i, j] > MATCH_TOLERANCE:
                problems.append(f'Curve {curve}: no {color} mark near theta={theta:.4f}.')
            elif sign != have[j][2]:
                problems.append(f'Curve {curve}: the mark at theta={theta:.4f} has sign {have[j][2]:+d}, expected {sign:+d}.')
            else:
                matched[i] = j
    if len(expected.through_curves()) != len(actual.through_curves()):
        problems.append(
            f'Expected {len(expected.through_curves())} curve(s) crossing the annulus, '
            f'found {len(actual.through_curves())}.'
        )

    arcs = set(actual.outer_arcs())
    for curve in expected.outer_arcs():
        ends = [i for i, mark in enumerate(want) if mark[3] == curve]
        images = {have[matched[i]][3] for i in ends if i in matched}
        if len(ends) == 2 and all(i in matched for i in ends) and not (len(images) == 1 and images <= arcs):
            problems.append(f'Curve {curve}: its outer ends are not joined by one arc.')
    return problems


def homotopy_feasibility(
    phi: PotentialSolution,
    zeta: PotentialSolution,
    samples: int = 10,
    margin: float | None = None,
) -> HomotopyReport:
    """
    Check that the straight-line homotopy (1 - t) phi + t zeta stays
    admissible: same boundary data, disjoint graphs and the same extrema
    pattern on the outer circle at every sampled t.
    """
    if phi.values.shape != zeta.values.shape:
        raise LamsolveError(
            f'Solutions live on different grids: {phi.values.shape} and {zeta.values.shape}.',
            code='grid_mismatch',
        )
    margin = lamsolve_settings()['margin'] if margin is None else margin
    reference = solution_collection(phi, 1, 0) if phi.strands > 1 else None
    report = HomotopyReport()
    for t in np.linspace(0.0, 1.0, samples):
        stage = PotentialSolution(
            radii=phi.radii,
            thetas=phi.thetas,
            values=(1 - t) * phi.values + t * zeta.values,
            linear=(1 - t) * phi.linear + t * zeta.linear,
            inner_radius=phi.inner_radius,
            sections=phi.sections,
        )
        boundary = max(stage.boundary_error(i, s) for i, s in enumerate(phi.sections))
        gaps = _min_gaps(_gradients(stage))
        min_gap = min(gaps.values(), default=math.inf)
        problems = []
        if reference is not None:
            try:
                problems = compare_collections(reference, solution_collection(stage, 1, 0))
            except LamsolveError as exc:
                problems = [exc.message]
        report.stages.append({
            't': float(t),
            'boundary_error': boundary,
            'min_gap': min_gap if min_gap != math.inf else None,
            'problems': problems,
            'feasible': boundary <= BOUNDARY_TOLERANCE and min_gap > margin and not problems,
        })
    if not report.feasible:
        logger.warning(f"Homotopy leaves the admissible set at {sum(not s['feasible'] for s in report.stages)} stage(s)")
    return report


def strand_center(strand: Strand) -> complex:
    """Fiber center of the strand's tube over target angle 0."""
    theta = -sum(a.angle_shift for a in strand.atoms) % (2 * math.pi)
    x = y = 0.0
    for atom in reversed(strand.atoms):
        theta, x, y = evaluate_atom(atom, theta, x, y)
    return complex(x, y)


def tower_from_census(
    psi: TransferMatrix,
    depth: int,
    port: Port | None = None,
    samples: int | None = None,
) -> tuple[list[list[TowerStrand]], float]:
    """
    Levels 0..depth of constant boundary sections, one per strand landing in
    ``port``, with parents from the census prefixes. Returns the levels and
    the contraction bound r_max of the matrix.
    """
    if depth < 0:
        raise LamsolveError(f'Tower depth must be non-negative, got {depth}.', code='bad_depth')
    count = samples or lamsolve_settings()['grid_theta']
    censuses = [strand_census(psi, m) for m in range(depth + 1)]
    if any(c.strands is None for c in censuses):
        raise LamsolveError('The census is too large to materialize a tower.', code='too_large')
    if port is None:
        port = max(sorted(censuses[-1].strands, key=str), key=lambda p: len(censuses[-1].strands[p]))
    if port not in censuses[0].strands:
        raise LamsolveError(f'Port {port} is not on the matrix track.', code='unknown_port')

    levels: list[list[TowerStrand]] = []
    previous: dict[tuple, int] = {}
    for m, census in enumerate(censuses):
        level, known = [], {}
        for index, strand in enumerate(census.strands[port]):
            center = strand_center(strand)
            parent = previous.get(strand.chains[:m - 1]) if m else None
            level.append(TowerStrand(
                section=BoundarySection.constant(center.real, center.imag, count),
                parent=parent,
                radius=strand.radius,
                label=strand.id,
            ))
            known[strand.chains] = index
        levels.append(level)
        previous = known
    contraction = geometry_check(psi).r_max
    logger.info(f"Tower over {port}: {[len(level) for level in levels]} strand(s) per depth")
    return levels, contraction


def nest_disks(
    levels: Sequence[Sequence[TowerStrand]],
    contraction: float,
    depth: int | None = None,
    options: dict | None = None,
) -> NestReport:
    """
    Solve every depth of a tower and check that the solutions form a Cauchy
    family: each strand lies in its parent's tube and the sup distance of
    d(phi) between depth m and any descendant is at most 4 r^m.
    """
    depth = len(levels) if depth is None else depth
    if not 1 <= depth <= len(levels):
        raise LamsolveError(f'Depth must lie in 1..{len(levels)}, got {depth}.', code='bad_depth')
    if not 0 < contraction < 1:
        raise LamsolveError(f'Contraction must lie in (0, 1), got {contraction}.', code='bad_contraction')
    levels = [list(level) for level in levels[:depth]]

    for m in range(1, depth):
        for index, strand in enumerate(levels[m]):
            if strand.parent is None or not 0 <= strand.parent < len(levels[m - 1]):
                raise LamsolveError(f'Strand {index} at depth {m} has no parent.', code='orphan_strand')
            parent = levels[m - 1][strand.parent]
            distance = strand.section.distance(parent.section)
            if distance > parent.radius * (1 + 1e-9):
                raise LamsolveError(
                    f'Strand {index} at depth {m} leaves its parent tube by {distance - parent.radius:.3g}.',
                    code='containment_violated',
                    details={'depth': m, 'strand': index, 'distance': distance, 'radius': parent.radius},
                )

    params = lamsolve_settings(options)
    solutions = []
    for m, level in enumerate(levels):
        # Sibling tubes shrink with depth; the margin shrinks with them.
        scale = min(s.radius for s in level)
        level_options = {**params, 'margin': params['margin'] * min(1.0, scale)}
        solutions.append(solve_potentials([s.section for s in level], options=level_options))

    report = NestReport(
        depth=depth,
        contraction=contraction,
        strands_per_depth=[len(level) for level in levels],
        normalization_error=max(float(np.max(np.abs(s.values[:, 0, :]))) for s in solutions),
    )
    gradients = [_gradients(s) for s in solutions]
    for n in range(1, depth):
        for m in range(n):
            worst = 0.0
            for index in range(len(levels[n])):
                ancestor = index
                for level in range(n, m, -1):
                    ancestor = levels[level][ancestor].parent
                (ax, ay), (bx, by) = gradients[n][index], gradients[m][ancestor]
                worst = max(worst, float(np.max(np.hypot(ax - bx, ay - by))))
            bound = NEST_FACTOR * contraction ** m
            report.distances.append({
                'm': m,
                'n': n,
                'max_distance': worst,
                'bound': bound,
                'passed': worst <= bound,
            })
    logger.info(f"Nested solve to depth {depth}: {'passed' if report.passed else 'FAILED'}")
    return report
