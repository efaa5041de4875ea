import sys

import pytest

from lfvdw import AtomModel, MaterialModel

# Layer 1 and the three layer-2 variants of the two-layer figure.
MEDIUM_1 = MaterialModel(1.03, 0.75, 0.001, 1.0, 2.3, 0.001)


def host(omega_pe2: float) -> MaterialModel:
    return MaterialModel(1.03, omega_pe2, 0.001, 1.0, 0.4, 0.001)


CASES = {1: host(1.0), 2: host(0.4), 3: host(0.2)}
EQUAL_ELECTRIC = MaterialModel(1.03, 0.75, 0.001, 1.0, 0.4, 0.001)
ELECTRIC_ONLY = MaterialModel(omega_te=1.03, omega_pe=0.4, gamma_e=0.001)
MAGNETIC_ONLY = MaterialModel(omega_tm=1.0, omega_pm=0.4, gamma_m=0.001)
VACUUM = MaterialModel()


@pytest.fixture
def atom():
    return AtomModel()


@pytest.fixture
def medium1():
    return MEDIUM_1


@pytest.fixture(params=[1, 2, 3], ids=["case1", "case2", "case3"])
def case_host(request):
    return request.param, CASES[request.param]


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[number])
