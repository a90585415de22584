"""Shared fixtures: reference parameter sets, ground states, box ladders.

The expensive pieces (2D box ladders, 1D ground states) are session-scoped
and timed; the acceptance tests charge the fixture cost against their
runtime budgets and report one PASS/FAIL line per criterion at the end of
the run.
"""

import time

import pytest

from spectran.analysis1d import gamma0
from spectran.eigensolve import extremal_sparse_eigs
from spectran.grids import Grid2D, assemble_H
from spectran.model import ModelParams, make_potential

LAMBDA_CRITICAL = 2.8663043376800488
LAMBDA_SUBCRITICAL = 1.4331521688400244

TIMINGS = {}
ACCEPTANCE_LINES = {}


def _timed(key, fn):
    start = time.perf_counter()
    value = fn()
    TIMINGS[key] = time.perf_counter() - start
    return value


@pytest.fixture(scope="session")
def timings():
    return TIMINGS


@pytest.fixture(scope="session")
def acceptance_lines():
    return ACCEPTANCE_LINES


@pytest.fixture(scope="session")
def free_params():
    return ModelParams(1.0, 0.0, make_potential("cosine-bump", 1.0, 1.0))


@pytest.fixture(scope="session")
def subcritical_params():
    return ModelParams(1.0, LAMBDA_SUBCRITICAL, make_potential("cosine-bump", 1.0, 1.0))


@pytest.fixture(scope="session")
def critical_params():
    return ModelParams(1.0, LAMBDA_CRITICAL, make_potential("cosine-bump", 1.0, 1.0))


@pytest.fixture(scope="session")
def free_state(free_params):
    return _timed("free_state", lambda: gamma0(free_params))


@pytest.fixture(scope="session")
def subcritical_state(subcritical_params):
    return _timed("subcritical_state", lambda: gamma0(subcritical_params))


@pytest.fixture(scope="session")
def critical_state(critical_params):
    return _timed("critical_state", lambda: gamma0(critical_params))


def _solve_ladder(params, grids, count=6, tol=1e-6, seed=0):
    results = []
    for grid in grids:
        op = assemble_H(params, grid)
        results.append(extremal_sparse_eigs(op, count=count, tol=tol, seed=seed))
    return list(zip(grids, results))


@pytest.fixture(scope="session")
def subcritical_ladder(subcritical_params):
    """The reference growing-box ladder of the subcritical fixture config."""
    grids = [
        Grid2D(10.0, 4.5, 720, 216),
        Grid2D(12.0, 4.5, 864, 216),
        Grid2D(14.0, 4.5, 1008, 216),
    ]
    return _timed("subcritical_ladder", lambda: _solve_ladder(subcritical_params, grids))


@pytest.fixture(scope="session")
def critical_ladder(critical_params):
    """The reference growing-box ladder of the critical fixture config."""
    grids = [
        Grid2D(3.0, 3.0, 301, 301),
        Grid2D(4.0, 4.0, 301, 301),
        Grid2D(5.0, 5.0, 401, 401),
    ]
    return _timed("critical_ladder", lambda: _solve_ladder(critical_params, grids))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
