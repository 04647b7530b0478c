import logging
import time

from celery import shared_task

from plumbing.serializers import graph_from_document
from transfer.services import psi_matrix
from twistsys.services import parse_word

from .services import nest_disks, tower_from_census

logger = logging.getLogger(__name__)


@shared_task
def run_nested_solve(graph_document, word, depth, orientation=None, options=None):
    """
    Solve the disk tower of the strands of ``word`` to ``depth`` and check
    that it is Cauchy. Returns the nest report with timing.
    """
    started = time.perf_counter()
    graph = graph_from_document(graph_document)
    psi = psi_matrix(parse_word(word, graph), graph, orientation)
    levels, contraction = tower_from_census(psi, depth)
    report = nest_disks(levels, contraction, options=options)
    elapsed = time.perf_counter() - started
    logger.info(f"Nested solve of {word!r} to depth {depth} in {elapsed:.3f}s")

    return {
        'word': word,
        **report.as_dict(),
        'elapsed_seconds': round(elapsed, 6),
    }
