import logging
import time

from celery import shared_task

from .services import run_oracle_suite as oracle_suite

logger = logging.getLogger(__name__)


@shared_task
def run_oracle_suite(samples=100, seed=None, n=2):
    """Run every model-chart check and return the pass/fail report."""
    started = time.perf_counter()
    report = oracle_suite(samples=samples, seed=seed, n=n)
    elapsed = time.perf_counter() - started
    logger.info(f"Oracle suite with {samples} sample(s): passed={report.passed} in {elapsed:.3f}s")

    return {
        **report.as_dict(),
        'samples': samples,
        'elapsed_seconds': round(elapsed, 6),
    }
