"""
Word parsing, the track actions F and the invariant branched track.
"""
from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass, field

from penner.exceptions import NotPennerError, TwistError, UnknownSphereError, WordSyntaxError
from plumbing.models import PlumbingGraph

from .models import MINUS, PLUS, DiskChoice, Factor, Letter, Orientation, TwistWord

logger = logging.getLogger(__name__)

TOKEN_RE = re.compile(r'^([ts])([A-Za-z0-9_]+)(?:\^([+-]?\d+))?$')

# Brute-force sweeps above this many points are refused.
MAX_SWEEP_POINTS = 16


def parse_word(text: str, graph: PlumbingGraph) -> TwistWord:
    """
    Parse a generator string such as ``"t0 s1^-1 s2^-1"``.

    ``t<i>`` twists the positive sphere ``i``, ``s<j>`` the negative sphere
    ``j``; an optional ``^k`` gives the (nonzero) exponent.
    """
    factors = []
    for token in text.split():
        match = TOKEN_RE.match(token)
        if not match:
            raise WordSyntaxError(f'Cannot parse twist generator {token!r}.', details={'token': token})
        letter, sphere_id, exponent_text = match.groups()
        exponent = int(exponent_text) if exponent_text is not None else 1
        if exponent == 0:
            raise WordSyntaxError(f'Generator {token!r} has a zero exponent.', code='zero_exponent')
        if not graph.has_sphere(sphere_id):
            raise UnknownSphereError(
                f'Generator {token!r} names sphere {sphere_id!r}, which is not in the graph.',
                details={'token': token, 'spheres': graph.sphere_ids},
            )
        positive = graph.sphere(sphere_id).is_positive
        if (letter == Letter.TAU) != positive:
            raise WordSyntaxError(
                f'Generator {token!r}: "t" names positive spheres and "s" negative ones.',
                code='letter_mismatch',
            )
        factors.append(Factor(letter, sphere_id, exponent))
    return TwistWord(tuple(factors))


def home_sign(sphere_id: str, graph: PlumbingGraph, orientation: str) -> str:
    """The disk sign a twist along the sphere forces on its points."""
    positive = graph.sphere(sphere_id).is_positive
    if orientation == Orientation.OPPOSITE:
        positive = not positive
    return PLUS if positive else MINUS


def expected_exponent_sign(sphere_id: str, graph: PlumbingGraph, orientation: str) -> int:
    return 1 if home_sign(sphere_id, graph, orientation) == PLUS else -1


@dataclass
class PennerCheck:
    ok: bool
    orientation: str
    diagnostics: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {'penner': self.ok, 'orientation': str(self.orientation), 'diagnostics': self.diagnostics}


def is_generalized_penner(
    word: TwistWord,
    graph: PlumbingGraph,
    orientation: str = Orientation.STANDARD,
) -> PennerCheck:
    """Sign conditions on every factor and every sphere occurring at least once."""
    diagnostics = []
    for f in word.factors:
        expected = expected_exponent_sign(f.sphere, graph, orientation)
        if (f.exponent > 0) != (expected > 0):
            diagnostics.append(
                f'Factor {f} has the wrong exponent sign for a '
                f'{graph.sphere(f.sphere).sign} sphere in {orientation} orientation.'
            )
    missing = [sid for sid in graph.sphere_ids if sid not in word.spheres]
    if missing:
        diagnostics.append(f'Spheres missing from the word: {", ".join(missing)}.')
    return PennerCheck(ok=not diagnostics, orientation=orientation, diagnostics=diagnostics)


def word_orientation(word: TwistWord, graph: PlumbingGraph) -> str | None:
    """The orientation for which the word is of generalized Penner type, if any."""
    for orientation in (Orientation.STANDARD, Orientation.OPPOSITE):
        if is_generalized_penner(word, graph, orientation).ok:
            return orientation
    return None


def require_penner(word: TwistWord, graph: PlumbingGraph, orientation: str | None = None) -> str:
    if orientation is None:
        orientation = word_orientation(word, graph)
        if orientation is None:
            check = is_generalized_penner(word, graph)
            raise NotPennerError(
                f'Word {str(word)!r} is not of generalized Penner type.',
                details={'diagnostics': check.diagnostics},
            )
        return orientation
    check = is_generalized_penner(word, graph, orientation)
    if not check.ok:
        raise NotPennerError(
            f'Word {str(word)!r} is not of generalized Penner type ({orientation}).',
            details={'diagnostics': check.diagnostics},
        )
    return orientation


def apply_F(generator: Factor, dc: DiskChoice, graph: PlumbingGraph) -> DiskChoice:
    """Every point on the twisted sphere takes the sphere's home sign."""
    if not graph.has_sphere(generator.sphere):
        raise UnknownSphereError(f'Sphere {generator.sphere!r} is not in the graph.')
    sign = home_sign(generator.sphere, graph, dc.orientation)
    return dc.with_signs({p.id: sign for p in graph.points_on(generator.sphere)})


def apply_word(word: TwistWord, dc: DiskChoice, graph: PlumbingGraph) -> DiskChoice:
    """F of the whole word: the rightmost factor acts first."""
    for f in reversed(word.unit_factors()):
        dc = apply_F(f, dc, graph)
    return dc


def all_disk_choices(graph: PlumbingGraph, orientation: str = Orientation.STANDARD):
    point_ids = graph.point_ids
    if len(point_ids) > MAX_SWEEP_POINTS:
        raise TwistError(
            f'Refusing to enumerate 2^{len(point_ids)} disk choices.', code='sweep_too_large'
        )
    for signs in itertools.product((PLUS, MINUS), repeat=len(point_ids)):
        yield DiskChoice.build(orientation, zip(point_ids, signs))


def sweep_constancy(
    word: TwistWord,
    graph: PlumbingGraph,
    orientation: str = Orientation.STANDARD,
) -> set[DiskChoice]:
    """Image of F over the whole track set; a singleton for Penner words."""
    images = {apply_word(word, dc, graph) for dc in all_disk_choices(graph, orientation)}
    logger.debug(f"F sweep of {str(word)!r}: {len(images)} distinct image(s)")
    return images


def invariant_track(
    word: TwistWord,
    graph: PlumbingGraph,
    orientation: str | None = None,
) -> DiskChoice:
    """
    The track fixed by F of a Penner word.

    At a point p on spheres a and b the sign is the home sign of whichever
    sphere occurs leftmost in the word, i.e. is twisted last.
    """
    orientation = require_penner(word, graph, orientation)
    leftmost: dict[str, int] = {}
    for index, f in enumerate(word.factors):
        leftmost.setdefault(f.sphere, index)
    signs = {}
    for point in graph.points:
        last = point.a if leftmost[point.a] < leftmost[point.b] else point.b
        signs[point.id] = home_sign(last, graph, orientation)
    return DiskChoice.build(orientation, signs)
