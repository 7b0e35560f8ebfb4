import numpy as np
import pytest

from sntrain.kernels import KernelSpec

ALL_KERNELS = [KernelSpec("linear", 0.0), KernelSpec("affine", 1.0), KernelSpec("gaussian", 1.0),
               KernelSpec("gaussian", 0.3)]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
