from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from debategame.config_io import load_config

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# criterion number -> (title, passed, detail); filled by test_acceptance.py
ACCEPTANCE_RESULTS = {}


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def f1_uniform():
    return load_config(FIXTURES / "f1_uniform.json")


@pytest.fixture(scope="session")
def f1_normal():
    return load_config(FIXTURES / "f1_normal.json")


@pytest.fixture(scope="session")
def nodebate():
    return load_config(FIXTURES / "nodebate_negexp.json")


@pytest.fixture(scope="session")
def gamma_logistic():
    return load_config(FIXTURES / "gamma_logistic.json")


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_RESULTS


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        title, ok, detail = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"AC{number} {'PASS' if ok else 'FAIL'}  {title}  [{detail}]")
