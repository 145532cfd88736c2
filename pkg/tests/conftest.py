import logging
import sys

import pytest

from cubicurve.grid import RegionDescriptor, describe_region
from cubicurve.solver import SolutionVector, all_solutions

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)
logger.addHandler(logging.StreamHandler(stream=sys.stdout))


def pytest_report_header(config):
    from importlib.metadata import version

    from cubicurve import __version__ as __cubicurve_version__

    return [
        f"cubicurve version: {__cubicurve_version__}",
        f"numpy version: {version('numpy')}",
        f"numba version: {version('numba')}",
    ]


@pytest.fixture(autouse=True)
def _isolated_config(monkeypatch: pytest.MonkeyPatch, tmp_path) -> None:
    """Keep a user's ~/.cubicurve.yaml and CUBICURVE_* variables out of the tests."""
    monkeypatch.setenv("CUBICURVE_CONFIG", str(tmp_path / "absent.yaml"))
    for name in ("THREADS", "TRUNC", "ESCAPE_ITERATIONS", "A_MIN", "FIBER_RADIUS", "SEED"):
        monkeypatch.delenv(f"CUBICURVE_{name}", raising=False)


@pytest.fixture(scope="session")
def solutions() -> dict[int, list[SolutionVector]]:
    """Solved series of every region for periods one through four."""
    return {p: all_solutions(p) for p in range(1, 5)}


@pytest.fixture(scope="session")
def regions(solutions: dict[int, list[SolutionVector]]) -> dict[int, list[RegionDescriptor]]:
    return {p: [describe_region(s) for s in sols] for p, sols in solutions.items()}
