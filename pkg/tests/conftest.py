import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

settings.register_profile("gpot", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("gpot")


def random_psd(rng, n, rank=None, scale=1.0):
    """Random PSD matrix ``B B^T / k`` with optional rank deficiency."""
    k = n if rank is None else rank
    b = rng.standard_normal((n, k))
    return scale * (b @ b.T) / max(k, 1)


def random_sym(rng, n):
    a = rng.standard_normal((n, n))
    return a + a.T


@st.composite
def psd_matrices(draw, min_dim=1, max_dim=8, dim=None):
    n = dim if dim is not None else draw(st.integers(min_dim, max_dim))
    k = draw(st.integers(1, n))
    b = draw(
        arrays(np.float64, (n, k), elements=st.floats(-2.0, 2.0, allow_nan=False, width=64))
    )
    return b @ b.T


@st.composite
def psd_pairs(draw, min_dim=1, max_dim=8):
    n = draw(st.integers(min_dim, max_dim))
    return draw(psd_matrices(dim=n)), draw(psd_matrices(dim=n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE = pytest.StashKey[list]()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
