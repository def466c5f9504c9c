import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("polylab", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("polylab")


@pytest.fixture
def example_field():
    """Field on {0..2} x {0..1}; the three paths to (2, 1) have energies 4, 6 and 8."""
    from polylab.env import EnvField

    values = np.zeros((3, 2))
    values[1, 0], values[2, 0] = 1.0, -2.0
    values[0, 1], values[1, 1], values[2, 1] = 3.0, 0.0, 5.0
    return EnvField.from_array(values)


_CRITERIA = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_CRITERIA] = []


@pytest.fixture
def record_criterion(request):
    """Log one PASS/FAIL line for an acceptance criterion; the lines are repeated in the terminal summary."""

    def record(number, label: str, passed: bool, detail: str = "") -> bool:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} {label}" + (f" ({detail})" if detail else "")
        print(line)
        request.config.stash[_CRITERIA].append(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_CRITERIA, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
