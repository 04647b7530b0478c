"""
Weight linear algebra on dimension-one tracks: twist actions, stretch
factors, invariant weights, intersection numbers and Floer counts.

A carried multicurve is determined by its weights on the circle cores
(its cone coordinates x). A twist along core c acts on them by
Q_c = I + D_c * Omega, where Omega counts plumbing points between cores
and D_c is the projection onto c. Part weights are recovered from cone
coordinates by the expansion E and read back by the projection P.
"""
from __future__ import annotations

import logging

import numpy as np
import sympy

from diskdecomp.services import decompose
from penner.config import engine_seed, engine_tolerance
from penner.exceptions import NotPennerError, SurfaceError
from plumbing.models import FixedSurfaceGraph, PlumbingGraph
from plumbing.services import fixed_surface, incidence_matrix
from twistsys.models import DiskChoice, Factor, Orientation, TwistWord
from twistsys.services import apply_F, expected_exponent_sign, invariant_track, parse_word, require_penner

from .models import FloerReport, IntersectionReport, StretchReport, WeightMatrix, WeightVector

logger = logging.getLogger(__name__)

CROSS_CHECK_TOLERANCE = 1e-7


def surface_of(graph: PlumbingGraph | FixedSurfaceGraph) -> PlumbingGraph:
    return fixed_surface(graph).graph


def intersection_form(graph: PlumbingGraph) -> sympy.Matrix:
    """Omega: plumbing points between each pair of cores, in sphere order."""
    return sympy.Matrix(incidence_matrix(graph).tolist())


def part_ids(dc: DiskChoice, graph: PlumbingGraph) -> list[str]:
    return [p.id for p in decompose(dc, graph)]


def expansion_matrix(dc: DiskChoice, graph: PlumbingGraph) -> sympy.Matrix:
    """E: cone coordinates to part weights on the track ``dc``."""
    spheres = {sid: j for j, sid in enumerate(graph.sphere_ids)}
    parts = decompose(dc, graph)
    E = sympy.zeros(len(parts), len(spheres))
    for i, part in enumerate(parts):
        if part.id.endswith("'"):
            E[i, spheres[part.anchor]] = 1
            continue
        point = graph.point(part.anchor)
        alpha, beta = graph.positive_end(point), graph.negative_end(point)
        if part.id.startswith('N:'):
            carried = alpha if dc.sign(point.id) == '+' else beta
            E[i, spheres[point.other(carried)]] = 1
        elif part.id.startswith('D:'):
            E[i, spheres[alpha]] = 1
            E[i, spheres[beta]] = 1
        elif part.id.startswith('Dbar+:'):
            E[i, spheres[alpha]] = 1
        else:
            E[i, spheres[beta]] = 1
    return E


def projection_matrix(dc: DiskChoice, graph: PlumbingGraph) -> sympy.Matrix:
    """P: read the cone coordinates off the sphere complements."""
    ids = part_ids(dc, graph)
    P = sympy.zeros(len(graph.sphere_ids), len(ids))
    for j, sid in enumerate(graph.sphere_ids):
        P[j, ids.index(f"{sid}'")] = 1
    return P


def cone_coordinates(w: WeightVector, graph: PlumbingGraph) -> sympy.Matrix:
    graph = surface_of(graph)
    return projection_matrix(w.carrier, graph) * w.column()


def weights_from_cone(x, dc: DiskChoice, graph: PlumbingGraph) -> WeightVector:
    graph = surface_of(graph)
    values = expansion_matrix(dc, graph) * sympy.Matrix(list(x))
    return WeightVector(dc, tuple(zip(part_ids(dc, graph), list(values))))


def core_weights(sphere_id: str, dc: DiskChoice, graph: PlumbingGraph) -> WeightVector:
    """Weights of the core circle of a sphere on the track ``dc``."""
    graph = surface_of(graph)
    if not graph.has_sphere(sphere_id):
        raise SurfaceError(f'Sphere {sphere_id!r} is not in the graph.', code='unknown_sphere')
    x = [1 if sid == sphere_id else 0 for sid in graph.sphere_ids]
    return weights_from_cone(x, dc, graph)


def zero_weights(dc: DiskChoice, graph: PlumbingGraph) -> WeightVector:
    graph = surface_of(graph)
    return weights_from_cone([0] * len(graph.spheres), dc, graph)


def switch_violations(w: WeightVector, graph: PlumbingGraph) -> list[str]:
    """Negative weights, or a merged disk not equal to its two incoming branches."""
    graph = surface_of(graph)
    values = w.as_dict()
    tol = engine_tolerance()
    violations = [f'Negative weight {v} on {k}.' for k, v in values.items() if v < -tol]
    for point in graph.points:
        carried = graph.positive_end(point) if w.carrier.sign(point.id) == '+' else graph.negative_end(point)
        merged = values[f"D:{point.id}"]
        incoming = values[f"{carried}'"] + values[f"N:{point.id}"]
        if abs(merged - incoming) > tol * max(1, abs(merged)):
            violations.append(f'Switch condition fails at {point.id}: {merged} != {incoming}.')
    return violations


def cone_twist_matrix(generator: Factor, graph: PlumbingGraph) -> sympy.Matrix:
    """Q_c^|k| for the generator's core c."""
    graph = surface_of(graph)
    omega = intersection_form(graph)
    index = graph.sphere_ids.index(generator.sphere)
    D = sympy.zeros(omega.rows, omega.cols)
    D[index, index] = 1
    Q = sympy.eye(omega.rows) + D * omega
    return Q ** abs(generator.exponent)


def twist_weight_matrix(generator: Factor, dc: DiskChoice, graph: PlumbingGraph) -> WeightMatrix:
    """Action E * Q * P of one twist on part weights, from ``dc`` to ``F(dc)``."""
    graph = surface_of(graph)
    expected = expected_exponent_sign(generator.sphere, graph, dc.orientation)
    if (generator.exponent > 0) != (expected > 0):
        raise SurfaceError(
            f'Generator {generator} does not act on {dc.orientation} tracks.', code='sign_mismatch'
        )
    target = apply_F(generator, dc, graph)
    matrix = expansion_matrix(target, graph) * cone_twist_matrix(generator, graph) * projection_matrix(dc, graph)
    return WeightMatrix(dc, target, part_ids(target, graph), part_ids(dc, graph), matrix, str(generator))


def _word(word: TwistWord | str, graph: PlumbingGraph) -> TwistWord:
    return parse_word(word, graph) if isinstance(word, str) else word


def word_weight_matrix(
    word: TwistWord | str,
    graph: PlumbingGraph,
    orientation: str | None = None,
) -> WeightMatrix:
    """Composed action of the word on the weights of its invariant track."""
    graph = surface_of(graph)
    word = _word(word, graph)
    dc = invariant_track(word, graph, orientation)
    result = None
    for generator in reversed(word.unit_factors()):
        step = twist_weight_matrix(generator, dc if result is None else result.target, graph)
        if result is None:
            result = step
        else:
            result = WeightMatrix(result.source, step.target, step.rows, result.cols, step.matrix * result.matrix)
    result.label = str(word)
    return result


def cone_word_matrix(word: TwistWord | str, graph: PlumbingGraph, orientation: str | None = None) -> sympy.Matrix:
    """Product of the Q matrices in notation order (rightmost acts first)."""
    graph = surface_of(graph)
    word = _word(word, graph)
    require_penner(word, graph, orientation)
    Q = sympy.eye(len(graph.spheres))
    for generator in word.factors:
        Q = Q * cone_twist_matrix(generator, graph)
    return Q


def power_iteration(A, max_iter: int = 10000, tol: float | None = None, seed: int | None = None):
    """
    Perron eigenpair of a non-negative matrix; stops on the residual
    ||A x - lambda x|| relative to lambda.
    """
    A = np.asarray(A, dtype=float)
    tol = engine_tolerance() if tol is None else tol
    rng = np.random.default_rng(engine_seed() if seed is None else seed)
    x = np.abs(rng.normal(size=A.shape[0])) + 1.0
    x = x / np.linalg.norm(x)
    lam = 0.0
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        y = A @ x
        norm = np.linalg.norm(y)
        if norm == 0:
            raise SurfaceError('Matrix annihilates the positive cone.', code='degenerate_matrix')
        lam = float(x @ y)
        x = y / norm
        residual = float(np.linalg.norm(A @ x - lam * x)) / max(abs(lam), 1.0)
        if residual < tol:
            return lam, x, iteration, residual
    raise SurfaceError(
        f'Power iteration did not converge (residual {residual:.3e}).',
        code='no_convergence',
        details={'residual': residual},
    )


def stretch_report(word: TwistWord | str, graph: PlumbingGraph, orientation: str | None = None) -> StretchReport:
    """Stretch factor with independent eigenvalue and characteristic-polynomial checks."""
    graph = surface_of(graph)
    word = _word(word, graph)
    Q = cone_word_matrix(word, graph, orientation)
    lam, _, iterations, residual = power_iteration(np.array(Q.tolist(), dtype=float))

    eigvals = float(np.max(np.abs(np.linalg.eigvals(np.array(Q.tolist(), dtype=float)))))
    t = sympy.Symbol('t')
    poly = sympy.Poly(Q.charpoly(t).as_expr(), t)
    root = max(abs(complex(r)) for r in poly.nroots(n=30))
    for name, value in (('eigvals', eigvals), ('charpoly', root)):
        if abs(value - lam) > CROSS_CHECK_TOLERANCE * max(1.0, lam):
            logger.warning(f"Stretch factor of {word}: power iteration {lam} disagrees with {name} {value}")
    left, right = poly.eval(sympy.Float(root - 1e-7, 30)), poly.eval(sympy.Float(root + 1e-7, 30))
    if left * right > 0:
        logger.warning(f"Characteristic polynomial of {word} does not change sign around {root}")
    return StretchReport(str(word), lam, lam, eigvals, float(root), iterations, residual)


def stretch_factor(word: TwistWord | str, graph: PlumbingGraph, orientation: str | None = None) -> float:
    return stretch_report(word, graph, orientation).stretch_factor


def invariant_weights(word: TwistWord | str, graph: PlumbingGraph, orientation: str | None = None) -> WeightVector:
    """Projective fixed point of the word's weight action, normalized to total core weight one."""
    graph = surface_of(graph)
    word = _word(word, graph)
    Q = cone_word_matrix(word, graph, orientation)
    lam, x, _, _ = power_iteration(np.array(Q.tolist(), dtype=float))
    if np.any(x <= 0):
        raise SurfaceError(
            'Leading eigenvector is not strictly positive; the action is reducible.', code='reducible'
        )
    x = x / x.sum()
    dc = invariant_track(word, graph, orientation)
    values = np.array(expansion_matrix(dc, graph).tolist(), dtype=float) @ x
    return WeightVector(dc, tuple(zip(part_ids(dc, graph), (float(v) for v in values))))


def _check_pair(w0: WeightVector, w1: WeightVector, graph: PlumbingGraph) -> None:
    if w0.carrier.orientation != Orientation.STANDARD or w1.carrier.orientation != Orientation.OPPOSITE:
        raise SurfaceError(
            'Intersection pairs a standard track with an opposite track; '
            f'got {w0.carrier.orientation} and {w1.carrier.orientation}.',
            code='orientation_mismatch',
        )
    for w in (w0, w1):
        problems = switch_violations(w, graph)
        if problems:
            raise SurfaceError(problems[0], code='switch_condition', details={'violations': problems})


def intersection_number(w0: WeightVector, w1: WeightVector, graph: PlumbingGraph):
    """
    Sum over plumbing points of w0(alpha)w1(beta) + w0(beta)w1(alpha), i.e.
    x^T Omega y on cone coordinates. Exact in the weights' field.
    """
    graph = surface_of(graph)
    _check_pair(w0, w1, graph)
    x, y = w0.as_dict(), w1.as_dict()
    total = sympy.Integer(0)
    for point in graph.points:
        a, b = f"{point.a}'", f"{point.b}'"
        total += x[a] * y[b] + x[b] * y[a]
    return total


def intersection_report(w0: WeightVector, w1: WeightVector, graph: PlumbingGraph) -> IntersectionReport:
    graph = surface_of(graph)
    count = intersection_number(w0, w1, graph)
    x, y = w0.as_dict(), w1.as_dict()
    parallel = sum((x[f"{sid}'"] * y[f"{sid}'"] for sid in graph.sphere_ids), sympy.Integer(0))
    raw = count + 2 * parallel
    warnings = []
    if raw != count:
        warnings.append(
            f'Raw crossing count {raw} exceeds the minimal count {count}: '
            'the pair shares core weight and is not in minimal position before perturbation.'
        )
    return IntersectionReport(int(count), int(raw), warnings)


def floer_dims(
    word0: TwistWord | str,
    core0: str,
    word1: TwistWord | str,
    core1: str,
    graph: PlumbingGraph,
) -> FloerReport:
    """
    dim HF^0 + dim HF^1 of psi0(core0) and psi1(core1) as the intersection
    number of their weights; psi0 must be of standard and psi1 of opposite
    type.
    """
    graph = surface_of(graph)
    word0, word1 = _word(word0, graph), _word(word1, graph)
    try:
        require_penner(word0, graph, Orientation.STANDARD)
        require_penner(word1, graph, Orientation.OPPOSITE)
    except NotPennerError as exc:
        raise SurfaceError(
            'Floer counts need a standard-type first word and an opposite-type second word.',
            code='same_type',
            details={'reason': str(exc)},
        ) from exc

    m0 = word_weight_matrix(word0, graph, Orientation.STANDARD)
    m1 = word_weight_matrix(word1, graph, Orientation.OPPOSITE)
    w0 = m0.apply(core_weights(core0, m0.source, graph))
    w1 = m1.apply(core_weights(core1, m1.source, graph))
    report = intersection_report(w0, w1, graph)

    x, y = cone_coordinates(w0, graph), cone_coordinates(w1, graph)
    parallel = sympy.Matrix.hstack(x, y).rank() <= 1
    assumptions = [
        {'condition': 'eta_invariant', 'status': 'by_construction',
         'note': 'cores and twists commute with the anti-diagonal involution'},
        {'condition': 'carried', 'status': 'checked',
         'note': 'both weight vectors satisfy the switch conditions on their invariant tracks'},
        {'condition': 'transversal', 'status': 'by_construction',
         'note': 'standard and opposite tracks meet only at the crossing table'},
        {'condition': 'not_isotopic', 'status': 'heuristic_failed' if parallel else 'heuristic_passed',
         'note': 'decided by projective distinctness of core weights only'},
    ]
    logger.info(f"Floer count for {word0}({core0}) vs {word1}({core1}): {report.intersection}")
    return FloerReport(str(word0), core0, str(word1), core1, report.intersection, report, assumptions)
