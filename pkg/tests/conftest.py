import numpy as np
import pytest

from quiverstab.quiver import DimensionVector, Quiver, QuiverSetup, StabilityParameter

ACCEPTANCE_LINES: list[str] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if not item.nodeid.split("::")[0].endswith("test_acceptance.py"):
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        label = (item.function.__doc__ or item.name).strip().splitlines()[0]
        status = "PASS" if report.passed else "FAIL"
        ACCEPTANCE_LINES.append(f"{status}  {label}  ({report.duration:.2f}s)")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_setup(rng: np.random.Generator, max_vertices=4, max_dim=3, max_edges=5) -> QuiverSetup:
    m = int(rng.integers(1, max_vertices + 1))
    verts = tuple(f"v{i}" for i in range(m))
    edges = tuple(
        (verts[int(rng.integers(m))], verts[int(rng.integers(m))]) for _ in range(int(rng.integers(0, max_edges + 1)))
    )
    dims = tuple(int(x) for x in rng.integers(0, max_dim + 1, size=m))
    if sum(dims) == 0:
        dims = (1,) + dims[1:]
    alpha = tuple(int(rng.integers(-6, 7)) for _ in range(m))
    from fractions import Fraction

    alpha = tuple(Fraction(a, int(rng.integers(1, 4))) for a in alpha)
    return QuiverSetup(Quiver(verts, edges), DimensionVector(verts, dims), StabilityParameter(verts, alpha))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
