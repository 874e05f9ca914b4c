import random

import pytest

from rnscomp import base_new
from rnscomp.bench import generate_base
from rnscomp.kernels import HAVE_NUMBA

BACKENDS = ["numpy"] + (["numba"] if HAVE_NUMBA else [])


@pytest.fixture
def b357():
    return base_new((3, 5, 7), 11)


@pytest.fixture(scope="session")
def big_base():
    """32 moduli of 60 bits, M around 2^1900."""
    return generate_base(32, 60, 42)


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return random.Random(20240601)


_criteria = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        prev = _criteria.get(name)
        if prev is None or prev == "PASS":
            _criteria[name] = "PASS" if report.outcome == "passed" else report.outcome.upper()


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict in _criteria.items():
        terminalreporter.write_line(f"{verdict:6} {name}")
