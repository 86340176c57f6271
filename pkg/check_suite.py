"""
All-checks suite runner.
Collects the verification operations of every module into one CheckReport,
running them concurrently up to a job bound.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from typing import Callable, List, Tuple

import numpy as np

from analytic import (
    DilogParams,
    RInfiniteParams,
    classical_limit_check,
    five_term_check,
    flip_dihedral_check,
    fourier_transform_check,
    inversion_check,
    mode_agreement_check,
    r_infinite_quadrature_check,
    shift_check,
)
from braid_classical import (
    build_braid_matrix,
    verify_braid_relations,
    verify_definition_consistency,
    verify_naturality,
)
from check_report import CheckEntry, CheckReport, CheckStatus, check_entry
from cluster_core import verify_mutation_properties
from operator_calculus import replay_braid_proof, verify_adjoint
from quantum_torus import (
    verify_heisenberg_realisation,
    verify_quantum_braid,
    verify_quantum_involution,
    verify_Rq_equals_mutations,
)
from root_of_unity import (
    build_RK,
    check_clock_shift,
    delta_limit_study,
    fourier_w_check,
    lambda_checks,
    limit_qY_check,
    verify_braid_matrix,
    verify_rk,
)

logger = logging.getLogger(__name__)

__all__ = ["LEVELS", "suite_tasks", "run_check_suite", "negative_control"]

LEVELS = ("fast", "full")
Task = Tuple[str, Callable[[], CheckReport]]
# tasks that change the global mpmath precision run one at a time
SERIAL_PREFIXES = ("rk.limit.", "phi.modes", "phi.fourier", "rinf.")

PHI_B = 0.8 * np.exp(1j * np.pi / 8)
FLIP_Y = (0.3 + 0.2j, -1.1 + 0.4j, 0.7 - 0.5j, 2.0 + 0.1j, -0.4 - 0.9j)


def negative_control(N: int = 2) -> CheckReport:
    """The braid check must reject R^K with one entry's sign flipped."""
    inner = verify_braid_matrix(build_RK(N, "cyclotomic", corrupt=True), N, label="corrupt")
    report = CheckReport(title="negative control")
    report.add(check_entry(f"rk.negative_control.N{N}", "a corrupted R^K violates the braid relation",
                           inner.status == CheckStatus.FAIL, metric=inner.entries[0].metric))
    return report


def _corrupted_rk(N: int) -> CheckReport:
    return verify_braid_matrix(build_RK(N, "cyclotomic", corrupt=True), N, label="RK.cyclotomic")


def suite_tasks(level: str = "fast", seed: int = 42, corrupt_rk: bool = False) -> List[Task]:
    """
    Named zero-argument check callables for a suite level.

    Args:
        level (str): ``fast`` (n=3, N <= 3, coarse grids) or ``full``
        seed (int): seed for every randomised check
        corrupt_rk (bool): replace the N=2 Kashaev matrix by its corrupted variant

    Raises:
        ValueError: For an unknown level
    """
    if level not in LEVELS:
        raise ValueError(f"Unknown suite level: {level!r} (expected one of {', '.join(LEVELS)})")
    fast = level == "fast"
    phi = DilogParams(PHI_B)

    tasks: List[Task] = [
        ("cluster.mutation", partial(verify_mutation_properties, samples=200, seed=seed)),
        ("braid.n3.x", partial(verify_braid_relations, 3, "x")),
        ("braid.n3.y", partial(verify_braid_relations, 3, "y")),
        ("braid.definition.n3", partial(verify_definition_consistency, 3, "x")),
        ("braid.naturality.n3", partial(verify_naturality, 3)),
        ("qtorus.heisenberg.n3", partial(verify_heisenberg_realisation, 3)),
        ("qtorus.Rq.N3", partial(verify_Rq_equals_mutations, N=3, n=2, mode="cyclotomic", seed=seed)),
        ("qtorus.braid.n3", partial(verify_quantum_braid, n=3, N=3, seed=seed)),
        ("opcalc.adjoint", partial(verify_adjoint, 1, Ns=(3,), seed=seed)),
        ("opcalc.proof", replay_braid_proof),
        ("rk.negative_control", negative_control),
        ("rk.limit.qY", limit_qY_check),
        ("phi.shift", partial(shift_check, phi)),
        ("phi.inversion", partial(inversion_check, phi)),
        ("phi.classical", classical_limit_check),
        ("volume.five_term", partial(five_term_check, samples=20 if fast else 100, seed=seed)),
        ("volume.flip", partial(flip_dihedral_check, FLIP_Y)),
    ]
    for N in (1, 2, 3):
        tasks.append((f"rk.clock.N{N}", partial(check_clock_shift, N)))
    for N in (2, 3):
        tasks.append((f"rk.fourier.N{N}", partial(fourier_w_check, N, samples=20 if fast else 100, seed=seed)))
        tasks.append((f"rk.lambda.N{N}", partial(lambda_checks, N, samples=10, seed=seed)))
    rk_sizes = (1, 2, 3) if fast else (1, 2, 3, 4, 5, 6)
    for N in rk_sizes:
        check = partial(_corrupted_rk, N) if corrupt_rk and N == 2 else partial(verify_rk, N, "cyclotomic")
        tasks.append((f"rk.exact.N{N}", check))

    if not fast:
        tasks += [
            ("braid.n4.x", partial(verify_braid_relations, 4, "x")),
            ("braid.n4.y", partial(verify_braid_relations, 4, "y")),
            ("braid.definition.n4", partial(verify_definition_consistency, 4, "y")),
            ("qtorus.involution.n3", partial(verify_quantum_involution, build_braid_matrix(3), N=5, seed=seed)),
            ("qtorus.Rq.N5", partial(verify_Rq_equals_mutations, N=5, n=3, mode="complex", seed=seed)),
            ("opcalc.adjoint.i2", partial(verify_adjoint, 2, Ns=(3, 5), seed=seed)),
            ("rk.limit.N3", partial(delta_limit_study, 3)),
            ("phi.modes", mode_agreement_check),
            ("phi.fourier", partial(fourier_transform_check, p=phi)),
            ("rinf.quadrature", partial(r_infinite_quadrature_check, RInfiniteParams(0.1, 0.2, phi))),
        ]
        for N in range(4, 13):
            tasks.append((f"rk.fourier.N{N}", partial(fourier_w_check, N, seed=seed)))
        for N in (7, 8):
            tasks.append((f"rk.complex.N{N}", partial(verify_rk, N, "complex")))
    return tasks


def _run_task(name: str, task: Callable[[], CheckReport]) -> CheckReport:
    start = time.perf_counter()
    try:
        report = task()
    except Exception as exc:
        logger.error("Check task %s raised %s: %s", name, type(exc).__name__, exc)
        report = CheckReport(title=name)
        report.add(CheckEntry(f"suite.{name}", "check task completed", CheckStatus.FAIL,
                              message=f"{type(exc).__name__}: {exc}"))
    logger.info("%s finished in %.2fs: %s", name, time.perf_counter() - start, report.status.value)
    return report


def run_check_suite(level: str = "fast", seed: int = 42, jobs: int = 4, corrupt_rk: bool = False) -> CheckReport:
    """
    Run every check of a level. Failures and task exceptions become FAIL
    entries; the entry order of the serialised report is by check-id.

    Args:
        level (str): ``fast`` or ``full``
        seed (int): seed for randomised checks
        jobs (int): maximum number of concurrently running tasks
        corrupt_rk (bool): negative-control switch for the N=2 Kashaev matrix

    Returns:
        CheckReport: the merged report
    """
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    tasks = suite_tasks(level, seed, corrupt_rk)
    logger.info("Running %d %s checks with %d jobs", len(tasks), level, jobs)
    report = CheckReport(title=f"check suite ({level})")
    parallel = [t for t in tasks if not t[0].startswith(SERIAL_PREFIXES)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_run_task, name, task) for name, task in parallel]
        for future in futures:
            report.extend(future.result())
    for name, task in tasks:
        if name.startswith(SERIAL_PREFIXES):
            report.extend(_run_task(name, task))
    return report
