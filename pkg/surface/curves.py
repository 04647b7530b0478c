"""
Curves on the fixed surface as cyclically reduced edge paths in its ribbon
graph.

Vertices are plumbing points and edges are the arcs of the core circles
between consecutive points. Each vertex carries the four darts
[alpha out, beta out, alpha in, beta in] in counterclockwise order, where
alpha is the positive circle through the point. Dehn twists insert loops
along a core; intersection numbers count linked pairs of passages.
"""
from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field

from penner.exceptions import SurfaceError
from plumbing.models import FixedSurfaceGraph, PlumbingGraph
from plumbing.services import fixed_surface
from twistsys.models import TwistWord

logger = logging.getLogger(__name__)

OUT, IN = 'out', 'in'


@dataclass(frozen=True)
class Edge:
    """An arc of a core circle traversed in one direction."""

    circle: str
    index: int
    forward: bool = True

    def reverse(self) -> Edge:
        return Edge(self.circle, self.index, not self.forward)

    def __str__(self) -> str:
        return f"{self.circle}{self.index}{'+' if self.forward else '-'}"


class RibbonGraph:
    def __init__(self, graph: PlumbingGraph | FixedSurfaceGraph):
        graph = fixed_surface(graph).graph
        self.graph = graph
        self.circles = {sid: [p.id for p in graph.points_on(sid)] for sid in graph.sphere_ids}
        self.rotation = {}
        for point in graph.points:
            a, b = graph.positive_end(point), graph.negative_end(point)
            self.rotation[point.id] = [(a, OUT), (b, OUT), (a, IN), (b, IN)]

    def tail(self, edge: Edge) -> tuple[str, int]:
        points = self.circles[edge.circle]
        if edge.forward:
            vertex, dart = points[edge.index], (edge.circle, OUT)
        else:
            vertex, dart = points[(edge.index + 1) % len(points)], (edge.circle, IN)
        return vertex, self.rotation[vertex].index(dart)

    def head(self, edge: Edge) -> tuple[str, int]:
        return self.tail(edge.reverse())

    def loop(self, circle: str, vertex: str, forward: bool) -> list[Edge]:
        """The whole core starting and ending at ``vertex``."""
        points = self.circles[circle]
        i, k = points.index(vertex), len(points)
        if forward:
            return [Edge(circle, (i + j) % k, True) for j in range(k)]
        return [Edge(circle, (i - 1 - j) % k, False) for j in range(k)]

    def left_dart(self, circle: str, vertex: str) -> int:
        return (self.rotation[vertex].index((circle, OUT)) + 1) % 4


def free_reduce(edges) -> list[Edge]:
    """Cancel backtracking, including across the cyclic seam."""
    stack: list[Edge] = []
    for e in edges:
        if stack and stack[-1] == e.reverse():
            stack.pop()
        else:
            stack.append(e)
    path = deque(stack)
    while len(path) >= 2 and path[0] == path[-1].reverse():
        path.popleft()
        path.pop()
    return list(path)


@dataclass(frozen=True)
class NormalCurve:
    ribbon: RibbonGraph = field(compare=False, repr=False)
    edges: tuple[Edge, ...]

    @classmethod
    def core(cls, ribbon: RibbonGraph, circle: str) -> NormalCurve:
        points = ribbon.circles.get(circle)
        if not points:
            raise SurfaceError(f'Circle {circle!r} has no plumbing points to walk along.', code='bad_core')
        return cls(ribbon, tuple(ribbon.loop(circle, points[0], forward=True)))

    def __len__(self) -> int:
        return len(self.edges)

    def __str__(self) -> str:
        return ' '.join(str(e) for e in self.edges)

    def passages(self) -> list[tuple[str, int, int]]:
        """(vertex, in dart, out dart) before each edge."""
        out = []
        for k, edge in enumerate(self.edges):
            vertex, in_dart = self.ribbon.head(self.edges[k - 1])
            _, out_dart = self.ribbon.tail(edge)
            out.append((vertex, in_dart, out_dart))
        return out

    def reversed(self) -> NormalCurve:
        return NormalCurve(self.ribbon, tuple(e.reverse() for e in reversed(self.edges)))

    def twist(self, circle: str, sign: int) -> NormalCurve:
        """
        Dehn twist along a core, supported on a parallel copy on its left.
        Every crossing of that copy gains a full loop; sign +1 turns right.
        """
        if not self.edges:
            return self
        on_circle = set(self.ribbon.circles[circle])
        out: list[Edge] = []
        for edge, (vertex, in_dart, out_dart) in zip(self.edges, self.passages()):
            if vertex in on_circle:
                left = self.ribbon.left_dart(circle, vertex)
                if in_dart == left:
                    out.extend(self.ribbon.loop(circle, vertex, forward=sign < 0))
                elif out_dart == left:
                    out.extend(self.ribbon.loop(circle, vertex, forward=sign > 0))
            out.append(edge)
        return NormalCurve(self.ribbon, tuple(free_reduce(out)))

    def apply_word(self, word: TwistWord) -> NormalCurve:
        curve = self
        for generator in reversed(word.unit_factors()):
            curve = curve.twist(generator.sphere, 1 if generator.exponent > 0 else -1)
        return curve

    def intersection(self, other: NormalCurve) -> int:
        """Geometric intersection number of two primitive reduced curves."""
        if not self.edges or not other.edges:
            return 0
        count = 0
        theirs = other.passages()
        for vertex, g_in, g_out in self.passages():
            for w, d_in, d_out in theirs:
                if vertex == w and len({g_in, g_out, d_in, d_out}) == 4 and (g_out - g_in) % 4 == 2:
                    count += 1
        return count + self._segment_crossings(other) + self._segment_crossings(other.reversed())

    def _segment_crossings(self, other: NormalCurve) -> int:
        """
        Crossings along maximal common segments traversed in the same
        direction, counted once at the start of each segment.
        """
        mine, theirs = self.passages(), other.passages()
        m, n = len(mine), len(theirs)
        count = 0
        for i, (v, g_in, g_out) in enumerate(mine):
            for j, (w, d_in, d_out) in enumerate(theirs):
                if v != w or g_out != d_out or g_in == d_in:
                    continue
                k = 1
                while True:
                    _, end_in, end_g = mine[(i + k) % m]
                    _, _, end_d = theirs[(j + k) % n]
                    if end_g != end_d:
                        break
                    k += 1
                    if k > m + n:
                        break
                if k > m + n:
                    continue
                left_at_start = (g_in - g_out) % 4 < (d_in - g_out) % 4
                left_at_end = (end_g - end_in) % 4 > (end_d - end_in) % 4
                if left_at_start != left_at_end:
                    count += 1
        return count


def curve_after_word(word: TwistWord, core: str, graph: PlumbingGraph) -> NormalCurve:
    ribbon = RibbonGraph(graph)
    return NormalCurve.core(ribbon, core).apply_word(word)


def intersection_sequence(
    word: TwistWord,
    graph: PlumbingGraph,
    start: str,
    reference: str,
    iterations: int = 12,
) -> list[int]:
    """i(psi^k(start), reference) for k = 1..iterations."""
    ribbon = RibbonGraph(graph)
    curve = NormalCurve.core(ribbon, start)
    target = NormalCurve.core(ribbon, reference)
    counts = []
    for _ in range(iterations):
        curve = curve.apply_word(word)
        counts.append(curve.intersection(target))
    logger.debug(f"Intersection growth of {word}: {counts}")
    return counts


def growth_rate(word: TwistWord, graph: PlumbingGraph, start: str, reference: str, iterations: int = 12) -> float:
    """Log of the ratio of the last two intersection counts; tends to log of the stretch factor."""
    counts = intersection_sequence(word, graph, start, reference, iterations)
    if len(counts) < 2 or counts[-2] == 0:
        raise SurfaceError('Intersection counts do not grow; no growth rate.', code='no_growth')
    return math.log(counts[-1] / counts[-2])
