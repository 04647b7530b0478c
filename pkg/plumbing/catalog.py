"""
Standard plumbing graphs used by the commands and the test-suite.
"""
from __future__ import annotations

import numpy as np

from .models import Gluing, PlumbingGraph, PlumbingPoint, Sign, Sphere

POINT_NAMES = "pqrsuvwxyz"


def _point_name(index: int) -> str:
    return POINT_NAMES[index] if index < len(POINT_NAMES) else f"p{index}"


def two_sphere(points: int = 1, n: int = 1, gluings: list[str] | None = None) -> PlumbingGraph:
    """P(alpha, beta): sphere "0" positive, sphere "1" negative, ``points`` plumbing points."""
    gluings = gluings or [Gluing.F] * points
    return PlumbingGraph(
        n=n,
        spheres=(Sphere("0", Sign.POSITIVE), Sphere("1", Sign.NEGATIVE)),
        points=tuple(
            PlumbingPoint(_point_name(i), "0", "1", gluings[i], pos_a=i, pos_b=i)
            for i in range(points)
        ),
    )


def running_example(n: int = 2) -> PlumbingGraph:
    """P(alpha, beta_1, beta_2) with p on alpha and beta_1, q on alpha and beta_2."""
    return PlumbingGraph(
        n=n,
        spheres=(
            Sphere("0", Sign.POSITIVE),
            Sphere("1", Sign.NEGATIVE),
            Sphere("2", Sign.NEGATIVE),
        ),
        points=(
            PlumbingPoint("p", "0", "1", pos_a=0, pos_b=0),
            PlumbingPoint("q", "0", "2", pos_a=1, pos_b=0),
        ),
    )


def two_positive_one_negative(n: int = 2) -> PlumbingGraph:
    """P(alpha_1, alpha_2, beta) with beta carrying both points."""
    return PlumbingGraph(
        n=n,
        spheres=(
            Sphere("0", Sign.POSITIVE),
            Sphere("1", Sign.POSITIVE),
            Sphere("2", Sign.NEGATIVE),
        ),
        points=(
            PlumbingPoint("p", "0", "2", pos_a=0, pos_b=0),
            PlumbingPoint("q", "1", "2", pos_a=0, pos_b=1),
        ),
    )


CATALOG = {
    "two_sphere": two_sphere,
    "running_example": running_example,
    "two_positive_one_negative": two_positive_one_negative,
}


def random_penner_graph(
    rng: np.random.Generator,
    positives: int = 2,
    negatives: int = 2,
    extra_points: int = 1,
    n: int = 2,
) -> PlumbingGraph:
    """
    A connected Penner-type graph: a random spanning tree on the bipartite
    sphere set plus ``extra_points`` further positive/negative intersections.
    """
    pos_ids = [f"a{i}" for i in range(positives)]
    neg_ids = [f"b{j}" for j in range(negatives)]
    spheres = tuple(
        [Sphere(s, Sign.POSITIVE) for s in pos_ids] + [Sphere(s, Sign.NEGATIVE) for s in neg_ids]
    )

    pairs: list[tuple[str, str]] = []
    placed_pos, placed_neg = [pos_ids[0]], []
    pending = [(s, True) for s in pos_ids[1:]] + [(s, False) for s in neg_ids]
    order = rng.permutation(len(pending))
    pending = [pending[i] for i in order]
    # Negatives first so every later positive has something to attach to.
    pending.sort(key=lambda item: item[1])
    for sid, positive in pending:
        if positive:
            partner = placed_neg[int(rng.integers(len(placed_neg)))]
            pairs.append((sid, partner))
            placed_pos.append(sid)
        else:
            partner = placed_pos[int(rng.integers(len(placed_pos)))]
            pairs.append((partner, sid))
            placed_neg.append(sid)
    for _ in range(extra_points):
        pairs.append((pos_ids[int(rng.integers(positives))], neg_ids[int(rng.integers(negatives))]))

    counts: dict[str, int] = {}
    points = []
    for index, (a, b) in enumerate(pairs):
        points.append(PlumbingPoint(_point_name(index), a, b, pos_a=counts.get(a, 0), pos_b=counts.get(b, 0)))
        counts[a] = counts.get(a, 0) + 1
        counts[b] = counts.get(b, 0) + 1
    return PlumbingGraph(n=n, spheres=spheres, points=tuple(points))
