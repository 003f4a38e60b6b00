import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    for name, mod in list(sys.modules.items()):
        if name.endswith("test_acceptance") and getattr(mod, "VERDICTS", None):
            terminalreporter.section("acceptance criteria")
            for line in mod.VERDICTS:
                terminalreporter.write_line(line)
