import pytest

from ghor import kernels
from ghor.instances import (build_center_deficient, build_conifold_torus, build_genus2, build_polynomial,
                            load_suite)


@pytest.fixture(scope="session")
def warm_kernels():
    """Compile (or load cached) numba kernels once, outside any timed region."""
    kernels.exact_cover([[0, 1], [0, 1]], 2)
    kernels.label_closure(0, [0], [0], [[1]], 2)
    return kernels.use_numba()


@pytest.fixture
def conifold():
    return build_conifold_torus()


@pytest.fixture
def deficient():
    return build_center_deficient()


@pytest.fixture
def genus2():
    return build_genus2()


@pytest.fixture(params=[2, 3, 4], ids=lambda n: f"N{n}")
def polynomial(request):
    return build_polynomial(request.param)


@pytest.fixture(scope="session")
def suite():
    return [(e.spec, e.quiver) for e in load_suite()]


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
