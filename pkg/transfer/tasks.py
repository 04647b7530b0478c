import logging
import time

from celery import shared_task

from plumbing.serializers import graph_from_document
from twistsys.services import parse_word

from .services import census_document, geometry_check, psi_matrix, strand_census

logger = logging.getLogger(__name__)


@shared_task
def run_strand_census(graph_document, word, depth, orientation=None):
    """
    Build the transfer matrix of ``word`` and count its strands to ``depth``.

    Runs in the worker for deep censuses; eager mode (the default) runs it
    inline. Returns the census document with the geometry certificate.
    """
    started = time.perf_counter()
    graph = graph_from_document(graph_document)
    psi = psi_matrix(parse_word(word, graph), graph, orientation)
    census = strand_census(psi, depth)
    certificate = geometry_check(psi, census)
    elapsed = time.perf_counter() - started
    logger.info(f"Census of {word!r} to depth {depth}: {census.total} strand(s) in {elapsed:.3f}s")

    return {
        'word': word,
        'census': census_document(census),
        'geometry': certificate.as_dict(),
        'elapsed_seconds': round(elapsed, 6),
    }
