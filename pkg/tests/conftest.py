import pytest

from bakerlab import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile once up front so no individual test pays the JIT cost
    _kernels.warmup()
