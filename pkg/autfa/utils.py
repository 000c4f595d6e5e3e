"""Utility functions for seeding and running batches of checks."""

import logging
import random
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple

from autfa.config import DEFAULT_SEED
from autfa.errors import ValidationError
from autfa.reports import SuiteReport

logger = logging.getLogger(__name__)

# (family, instance key, check); a check returns None on success or a failure detail
Check = Tuple[str, str, Callable[[], Optional[str]]]


def make_rng(seed: Optional[int] = None) -> random.Random:
    """
    Create an isolated random generator.

    Parameters
    ----------
    seed : Optional[int], default=None
        Seed; None uses DEFAULT_SEED so runs stay reproducible.

    Returns
    -------
    random.Random
        A generator that does not touch the global random state.
    """
    return random.Random(DEFAULT_SEED if seed is None else seed)


def run_checks(report: SuiteReport, checks: Sequence[Check], jobs: int = 1) -> SuiteReport:
    """
    Run independent checks and record them in ``report``.

    Results are recorded in (family, instance) order whatever the
    execution order was.

    Parameters
    ----------
    report : SuiteReport
        Report to fill.
    checks : Sequence[Check]
        The checks.
    jobs : int, default=1
        Worker threads; 1 runs inline.

    Returns
    -------
    SuiteReport
        The same report.
    """
    if jobs < 1:
        raise ValidationError(f"jobs must be positive, got {jobs}")
    if jobs == 1:
        outcomes = [check() for _, _, check in checks]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(lambda c: c[2](), checks))

    results: List[Tuple[str, str, Optional[str]]] = sorted(
        ((family, key, outcome) for (family, key, _), outcome in zip(checks, outcomes)),
        key=lambda r: (r[0], r[1]),
    )
    for family, key, outcome in results:
        report.record(family, key, outcome is None, outcome or "")
    logger.info("%s: ran %d checks, %d failed", report.suite, len(results), len(report.failures))
    return report
