import numpy as np
import pytest

from lqu import tolerances


@pytest.fixture(autouse=True)
def default_tolerances():
    # the CLI installs process-wide tolerances; keep tests independent
    tolerances.configure(tolerances.Tolerances())
    yield
    tolerances.configure(tolerances.Tolerances())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(number, title, passed, detail, seconds, limit):
        ok = passed and seconds < limit
        line = (f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}; {detail}; "
                f"runtime {seconds:.3f}s (limit {limit:g}s)")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
