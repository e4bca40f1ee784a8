import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


def random_orthonormal(rng, m, n):
    Q, _ = np.linalg.qr(rng.standard_normal((m, n)))
    return Q


@pytest.fixture
def example1_config():
    from rowsampling import ExperimentConfig, MatrixSource, Method, BoundId

    return ExperimentConfig(
        m=500, n=4, c=list(range(4, 501)), mu=2 * 4 / 500, delta=0.01, runs=10,
        samplers=[Method.WITH_REPLACEMENT], bounds=[BoundId.B1],
        matrix=MatrixSource("givens", "one_big"), seed=11,
    )


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split()[0])):
            terminalreporter.write_line(line)
