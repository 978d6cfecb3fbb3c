import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nesscrit.experiments.reference import quantum_optical_model
from nesscrit.model import LatticeModel, LindbladGenerator

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_odd_generator(rng, n_max=5, n_min=1):
    n = int(rng.integers(n_min, n_max + 1))
    s = rng.normal(size=n) + 1j * rng.normal(size=n)
    return LindbladGenerator.from_values(s)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_site():
    return LindbladGenerator.from_values([1.0, np.exp(0.1j)])


@pytest.fixture
def qo_model():
    return quantum_optical_model(1.0, 0.5, 0.3)


def odd_model(*values):
    return LatticeModel((LindbladGenerator.from_values(values),))


ACCEPTANCE = []  # (criterion, passed, seconds, limit, detail) recorded by test_acceptance


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit, ok, secs, limit, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {crit:>2}: {status}  {secs:6.2f}s (limit {limit:g}s)  {detail}")
