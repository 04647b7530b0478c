"""
Numerical kernels for the model chart T*S^n: circle action, model Dehn
twist, spinning, the involution, the local Hamiltonian isotopy and
finite-difference symplecticity checks.

Points are (u; v) with |u| = 1 and <u, v> = 0; the symplectic form is
sum du_i ^ dv_i restricted to T*S^n.
"""
from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Callable, Iterable

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.linalg import null_space

from penner.config import engine_seed, engine_settings
from penner.exceptions import GeomlabError
from plumbing.catalog import running_example
from transfer.models import AtomKind, MapAtom, TransferMatrix
from transfer.services import center_distance, psi_factors
from twistsys.services import parse_word

from .models import CotangentPoint, OracleCheck, OracleReport, ProfileVariant, SurgeryReport, TwistProfile

logger = logging.getLogger(__name__)

SURGERY_TOLERANCE = 1e-9
EQUIVARIANCE_TOLERANCE = 1e-9
MU_TOLERANCE = 1e-12

# Levels of c1|x1| + c2|x2| bounding the plateau and the support of the flow cutoff.
FLOW_PLATEAU_END = 1.0
FLOW_SUPPORT_END = 2.0


def _hermite(knots, values, slopes) -> CubicHermiteSpline:
    return CubicHermiteSpline(np.asarray(knots, float), np.asarray(values, float), np.asarray(slopes, float))


def build_profile(epsilon: float | None = None, variant: str | None = None) -> TwistProfile:
    options = engine_settings('geomlab')
    epsilon = options['epsilon'] if epsilon is None else epsilon
    variant = ProfileVariant(options['profile'] if variant is None else variant).value
    if epsilon <= 0:
        raise GeomlabError(f'Profile width must be positive, got {epsilon}.', code='bad_profile')
    if variant == ProfileVariant.PLATEAU:
        spline = _hermite([0.0, epsilon / 2, epsilon], [math.pi, math.pi, 0.0], [0.0, 0.0, 0.0])
    else:
        spline = _hermite([0.0, epsilon], [math.pi, 0.0], [-math.pi / epsilon, 0.0])
    return TwistProfile(epsilon, variant, spline)


def flow_cutoff(c1: float = 1.0, c2: float = 1.0) -> TwistProfile:
    """
    delta as a function of |x|: pi/2 wherever c1|x1| + c2|x2| <= 1 and zero
    wherever c1|x1| + c2|x2| >= 2.

    The first set lies in the ball of radius 1/min(c) and the second
    outside the ball of radius 2/hypot(c1, c2), so the weights must keep
    the first radius below the second.
    """
    if c1 <= 0 or c2 <= 0:
        raise GeomlabError(f'Flow weights must be positive, got c1={c1}, c2={c2}.', code='bad_weights')
    plateau_end = FLOW_PLATEAU_END / min(c1, c2)
    support_end = FLOW_SUPPORT_END / math.hypot(c1, c2)
    if plateau_end >= support_end:
        raise GeomlabError(
            f'No radial cutoff fits weights c1={c1}, c2={c2}: the plateau radius {plateau_end:.6g} '
            f'reaches the support radius {support_end:.6g}.',
            code='incompatible_weights',
        )
    spline = _hermite([0.0, plateau_end, support_end], [math.pi / 2, math.pi / 2, 0.0], [0.0, 0.0, 0.0])
    return TwistProfile(support_end, ProfileVariant.PLATEAU.value, spline)


def circle_action(t: float, p: CotangentPoint) -> CotangentPoint:
    """Normalized geodesic flow for time t."""
    mu = p.mu
    if mu == 0:
        raise GeomlabError('The circle action is undefined on the zero section (v = 0).', code='zero_fiber')
    c, s = math.cos(t), math.sin(t)
    return CotangentPoint(c * p.u + s * p.v / mu, c * p.v - s * mu * p.u)


def model_twist(p: CotangentPoint, profile: TwistProfile | None = None) -> CotangentPoint:
    profile = profile or build_profile()
    mu = p.mu
    if mu == 0:
        return CotangentPoint(-p.u, np.zeros_like(p.v))
    return circle_action(profile(mu), p)


def involution(p: CotangentPoint) -> CotangentPoint:
    """Negate every coordinate after the second in both u and v."""
    mask = np.ones_like(p.u)
    mask[2:] = -1.0
    return CotangentPoint(p.u * mask, p.v * mask)


def validate_point(p: CotangentPoint) -> CotangentPoint:
    problems = p.problems()
    if problems:
        raise GeomlabError(' '.join(problems), code='invalid_point', details={'point': p.as_dict()})
    return p


def is_involution_fixed(p: CotangentPoint, tol: float = 0.0) -> bool:
    return p.distance(involution(p)) <= tol


def psi_y(theta, t, y) -> list[CotangentPoint]:
    """The symplectic embedding of T*S^1 into T*S^n through direction y."""
    y = np.asarray(y, dtype=float)
    if abs(np.linalg.norm(y) - 1.0) > MU_TOLERANCE:
        raise GeomlabError(f'Spin direction must be a unit vector, got |y| = {np.linalg.norm(y)}.', code='bad_direction')
    pole = np.zeros(y.size + 1)
    pole[-1] = 1.0
    horizontal = np.append(y, 0.0)
    theta, t = np.broadcast_arrays(np.atleast_1d(np.asarray(theta, float)), np.atleast_1d(np.asarray(t, float)))
    out = []
    for th, tt in zip(theta, t):
        c, s = math.cos(th), math.sin(th)
        out.append(CotangentPoint(c * pole + s * horizontal, tt * c * horizontal - tt * s * pole))
    return out


def spin(curve, y) -> list[CotangentPoint]:
    """Image of sampled (theta, t) pairs of T*S^1 under psi_y."""
    curve = np.asarray(curve, dtype=float).reshape(-1, 2)
    return psi_y(curve[:, 0], curve[:, 1], y)


def slice_twist(theta, t, profile: TwistProfile | None = None) -> np.ndarray:
    """Model twist of T*S^1 in (theta, t) coordinates."""
    profile = profile or build_profile()
    theta = np.asarray(theta, dtype=float)
    t = np.asarray(t, dtype=float)
    turned = theta + np.sign(t) * np.asarray(profile(np.abs(t)))
    return np.stack([np.where(t == 0, theta + math.pi, turned), t], axis=-1)


def sphere_directions(n: int, count: int | None = None) -> np.ndarray:
    """Unit vectors spread over S^{n-1}."""
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        count = count or 16
        angles = 2 * math.pi * np.arange(count) / count
        return np.column_stack([np.cos(angles), np.sin(angles)])
    if n == 3:
        count = count or 32
        k = np.arange(count) + 0.5
        z = 1 - 2 * k / count
        phi = math.pi * (1 + math.sqrt(5)) * k
        rho = np.sqrt(1 - z ** 2)
        return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    raise GeomlabError(f'Spinning is only sampled for n <= 3, got n = {n}.', code='bad_dimension')


def surgery_isotopy_demo(
    profile: TwistProfile | None = None,
    n: int = 2,
    slices: int | None = None,
    samples: int = 201,
) -> SurgeryReport:
    """
    Compare the twisted fiber disk with the spun image of the twisted fiber
    of T*S^1, one slice W_y at a time.
    """
    profile = profile or build_profile()
    ts = np.linspace(-2 * profile.epsilon, 2 * profile.epsilon, samples)
    directions = sphere_directions(n, slices)
    deviation = 0.0
    for y in directions:
        fiber = psi_y(np.zeros_like(ts), ts, y)
        twisted_slice = slice_twist(np.zeros_like(ts), ts, profile)
        spun = spin(twisted_slice, y)
        for direct, expected in zip((model_twist(p, profile) for p in fiber), spun):
            deviation = max(deviation, direct.distance(expected))
    report = SurgeryReport(n, profile.variant, len(directions), samples, deviation, SURGERY_TOLERANCE)
    logger.debug(f"Surgery slices (n={n}, {profile.variant}): max deviation {deviation:.3e}")
    return report


def rotate(x, s: float) -> np.ndarray:
    """H_s on R^4 = R^2 x R^2."""
    x = np.asarray(x, dtype=float)
    c, sn = math.cos(s), math.sin(s)
    x1, x2 = x[:2], x[2:]
    return np.concatenate([c * x1 - sn * x2, sn * x1 + c * x2])


def weighted_points(
    rng: np.random.Generator, count: int, low: float, high: float, c1: float = 1.0, c2: float = 1.0
) -> np.ndarray:
    """Random points of R^4 with c1|x1| + c2|x2| uniform in [low, high]."""
    points = rng.normal(size=(count, 4))
    levels = rng.uniform(low, high, size=count)
    current = c1 * np.linalg.norm(points[:, :2], axis=1) + c2 * np.linalg.norm(points[:, 2:], axis=1)
    return points * (levels / current)[:, None]


def hamiltonian_flow(x, t: float, c1: float = 1.0, c2: float = 1.0, cutoff: TwistProfile | None = None) -> np.ndarray:
    """
    Phi_t(x) = H_{t delta(|x|)}(x), the time-t flow of G(|x|^2 / 2) with
    G' = delta. H_s preserves |x|, so Phi_t is a Hamiltonian flow on all of
    R^4. It is the quarter turn H_{pi/2} where c1|x1| + c2|x2| <= 1 and the
    identity where c1|x1| + c2|x2| >= 2.
    """
    cutoff = cutoff or flow_cutoff(c1, c2)
    x = np.asarray(x, dtype=float)
    return rotate(x, t * cutoff(np.linalg.norm(x)))


def canonical_form(dimension: int) -> np.ndarray:
    half = dimension // 2
    return np.block([
        [np.zeros((half, half)), np.eye(half)],
        [-np.eye(half), np.zeros((half, half))],
    ])


def tangent_basis(p: CotangentPoint) -> np.ndarray:
    """Orthonormal basis of T_p(T*S^n): kernel of d|u|^2 and d<u, v>."""
    zeros = np.zeros_like(p.u)
    constraints = np.vstack([np.concatenate([p.u, zeros]), np.concatenate([p.v, p.u])])
    return null_space(constraints)


def symplectic_deviation(func: Callable, z: np.ndarray, basis: np.ndarray, step: float) -> float:
    """max |(J B)^T Omega (J B) - B^T Omega B| with J by central differences."""
    omega = canonical_form(z.size)
    columns = [(func(z + step * b) - func(z - step * b)) / (2 * step) for b in basis.T]
    pushed = np.column_stack(columns)
    return float(np.max(np.abs(pushed.T @ omega @ pushed - basis.T @ omega @ basis)))


def symplecticity_check(
    mapping: Callable,
    points: Iterable,
    step: float | None = None,
    singular_on_zero_section: bool = True,
) -> float:
    """
    Largest deviation of the pulled-back symplectic form over the sample
    points. Cotangent points are checked on their tangent space; plain
    vectors in R^{2k} on the whole space.
    """
    step = engine_settings('geomlab')['fd_step'] if step is None else step
    worst = 0.0
    for point in points:
        if isinstance(point, CotangentPoint):
            if singular_on_zero_section and point.mu == 0:
                raise GeomlabError('Sample lies on the zero section, where the map is singular.', code='singular_sample')

            def func(z):
                return mapping(CotangentPoint.from_vector(z)).vector

            z, basis = point.vector, tangent_basis(point)
        else:
            z = np.asarray(point, dtype=float)
            basis = np.eye(z.size)

            def func(w):
                return np.asarray(mapping(w), dtype=float)

        worst = max(worst, symplectic_deviation(func, z, basis, step))
    return worst


def random_points(n: int, count: int, rng: np.random.Generator, mu_range=(0.1, 1.0)) -> list[CotangentPoint]:
    points = []
    for _ in range(count):
        u = rng.normal(size=n + 1)
        u /= np.linalg.norm(u)
        w = rng.normal(size=n + 1)
        w -= (w @ u) * u
        w *= rng.uniform(*mu_range) / np.linalg.norm(w)
        points.append(CotangentPoint(u, w))
    return points


def _atom_center(atom: MapAtom, theta: float) -> complex:
    if atom.kind in (AtomKind.SINGULAR1, AtomKind.SINGULAR2):
        sign = 1 if atom.center_phase == '+' else -1
        return sign * atom.center_offset * cmath.exp(1j * theta)
    if atom.is_trivial:
        return complex(*atom.translation)
    return 0j


def evaluate_atom(atom: MapAtom, theta: float, x: float, y: float) -> tuple[float, float, float]:
    """Image of (theta, x, y) in S^1 x D^2 under the atom's solid-torus embedding."""
    z = complex(x, y)
    if atom.kind == AtomKind.SCALING:
        fiber = (-1 if atom.antipodal else 1) * atom.fiber_scale * z
    else:
        fiber = atom.fiber_scale * cmath.exp(1j * atom.fiber_rotation_degree * theta) * z
    image = _atom_center(atom, theta) + fiber
    return (theta + atom.angle_shift) % (2 * math.pi), image.real, image.imag


def tube_image(atom: MapAtom, samples: int = 64, ring: int = 16) -> np.ndarray:
    """Boundary torus of the atom's image, as (theta, x, y) rows."""
    rows = []
    for theta in np.linspace(0, 2 * math.pi, samples, endpoint=False):
        for phi in np.linspace(0, 2 * math.pi, ring, endpoint=False):
            rows.append(evaluate_atom(atom, theta, math.cos(phi), math.sin(phi)))
    return np.array(rows)


def numeric_gap(a: MapAtom, b: MapAtom, samples: int = 4096) -> float:
    """min over the target angle of |center_a - center_b| - r_a - r_b."""
    best = math.inf
    for phi in np.linspace(0, 2 * math.pi, samples, endpoint=False):
        ca = complex(*evaluate_atom(a, phi - a.angle_shift, 0.0, 0.0)[1:])
        cb = complex(*evaluate_atom(b, phi - b.angle_shift, 0.0, 0.0)[1:])
        best = min(best, abs(ca - cb))
    return best - a.fiber_scale - b.fiber_scale


def atom_gap_deviation(matrices: list[TransferMatrix], samples: int = 4096) -> tuple[float, int]:
    """Largest disagreement between sampled and symbolic tube gaps in each target port."""
    worst, pairs = 0.0, 0
    for matrix in matrices:
        by_port: dict = {}
        for chain in matrix.chains():
            for atom in chain.atoms:
                if not atom.identity:
                    by_port.setdefault(atom.target, {})[atom.code] = atom
        for atoms in by_port.values():
            ordered = [atoms[code] for code in sorted(atoms)]
            for i, a in enumerate(ordered):
                for b in ordered[i + 1:]:
                    symbolic = center_distance(a, b) - a.fiber_scale - b.fiber_scale
                    worst = max(worst, abs(numeric_gap(a, b, samples) - symbolic))
                    pairs += 1
    return worst, pairs


def _max_distance(pairs) -> float:
    return max((p.distance(q) for p, q in pairs), default=0.0)


def run_oracle_suite(samples: int = 100, seed: int | None = None, n: int = 2) -> OracleReport:
    """Every model-chart identity, each with its measured deviation."""
    options = engine_settings('geomlab')
    fd_tol = options['fd_tol']
    rng = np.random.default_rng(engine_seed() if seed is None else seed)
    plateau = build_profile(variant=ProfileVariant.PLATEAU)
    sloped = build_profile(variant=ProfileVariant.SLOPED)
    points = random_points(n, samples, rng, mu_range=(0.1, 2 * plateau.epsilon))
    times = rng.uniform(-2 * math.pi, 2 * math.pi, size=samples)
    report = OracleReport()
    checks = report.checks

    acted = [circle_action(t, p) for t, p in zip(times, points)]
    checks.append(OracleCheck(
        'circle_action_mu_invariance',
        max(abs(q.mu - p.mu) for p, q in zip(points, acted)), MU_TOLERANCE, samples,
    ))
    checks.append(OracleCheck(
        'circle_action_period',
        _max_distance((circle_action(2 * math.pi, p), p) for p in points), MU_TOLERANCE, samples,
    ))
    for profile in (plateau, sloped):
        checks.append(OracleCheck(
            f'model_twist_symplectic_{profile.variant}',
            symplecticity_check(lambda p, pr=profile: model_twist(p, pr), points),
            fd_tol, samples,
        ))
    zero_section = [CotangentPoint(p.u, np.zeros_like(p.v)) for p in points]
    checks.append(OracleCheck(
        'zero_section_antipodal',
        _max_distance((model_twist(p, plateau), CotangentPoint(-p.u, p.v)) for p in zero_section),
        0.0, samples,
    ))
    outside = [CotangentPoint(p.u, p.v * (plateau.epsilon + 1.0) / p.mu) for p in points]
    checks.append(OracleCheck(
        'model_twist_support',
        _max_distance((model_twist(p, plateau), p) for p in outside), 0.0, samples,
    ))
    checks.append(OracleCheck(
        'involution_involutive',
        _max_distance((involution(involution(p)), p) for p in points), EQUIVARIANCE_TOLERANCE, samples,
    ))
    checks.append(OracleCheck(
        'involution_twist_equivariance',
        _max_distance((involution(model_twist(p, plateau)), model_twist(involution(p), plateau)) for p in points),
        EQUIVARIANCE_TOLERANCE, samples,
    ))
    checks.append(OracleCheck(
        'non_symplectic_control',
        symplecticity_check(lambda p: CotangentPoint(p.u, 2 * p.v), points[:10]),
        fd_tol, 10, note='(u; v) -> (u; 2v) must be rejected', expect_failure=True,
    ))

    inner = weighted_points(rng, samples, 0.1, FLOW_PLATEAU_END)
    band = weighted_points(rng, samples, 1.1, 1.9)
    far = weighted_points(rng, samples, FLOW_SUPPORT_END, 3.0)
    checks.append(OracleCheck(
        'flow_outside_support',
        float(max(np.max(np.abs(hamiltonian_flow(x, 1.0) - x)) for x in far)), 0.0, samples,
    ))
    checks.append(OracleCheck(
        'flow_quarter_turn',
        float(max(np.max(np.abs(hamiltonian_flow(x, 1.0) - np.concatenate([-x[2:], x[:2]]))) for x in inner)),
        MU_TOLERANCE, samples,
    ))
    checks.append(OracleCheck(
        'flow_symplectic',
        symplecticity_check(lambda x: hamiltonian_flow(x, 1.0), np.vstack([inner, far])), fd_tol, 2 * samples,
    ))
    checks.append(OracleCheck(
        'flow_symplectic_transition_band',
        symplecticity_check(lambda x: hamiltonian_flow(x, 1.0), band), fd_tol, samples,
        note='1.1 < |x1| + |x2| < 1.9, where the cutoff varies',
    ))

    for profile in (plateau, sloped):
        surgery = surgery_isotopy_demo(profile, n=n)
        checks.append(OracleCheck(
            f'surgery_isotopy_{profile.variant}', surgery.max_deviation, SURGERY_TOLERANCE, surgery.slices,
        ))

    graph = running_example()
    factors = psi_factors(parse_word('t0 s1^-1 s2^-1', graph), graph)
    deviation, pairs = atom_gap_deviation(factors)
    checks.append(OracleCheck('atom_gap_cross_check', deviation, 1e-4, pairs))

    failed = [c.name for c in checks if not c.passed]
    if failed:
        logger.warning(f"Oracle suite failed: {', '.join(failed)}")
    else:
        logger.info(f"Oracle suite passed {len(checks)} check(s)")
    return report
