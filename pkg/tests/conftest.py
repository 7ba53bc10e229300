import numpy as np
import pytest
from hypothesis import settings, strategies as st

from symdom.domains import DomainSpec, spectral_values, split

settings.register_profile("symdom", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("symdom")

CLASSICAL = [
    DomainSpec.type_i(2, 2),
    DomainSpec.type_i(2, 3),
    DomainSpec.type_ii(4),
    DomainSpec.type_iii(2),
    DomainSpec.type_iv(3),
]
ALL_KINDS = CLASSICAL + [
    DomainSpec.disk(),
    DomainSpec.polydisk(2),
    DomainSpec.type_ii(5),
    DomainSpec.product([DomainSpec.disk(), DomainSpec.type_iv(3)]),
]


def reach(d, u):
    """Ray parameter at which ``t u`` leaves the domain."""
    return max(float(np.max(spectral_values(f, uf))) for f, uf in split(d, u))


def ray_point(d, u, t):
    return t * np.asarray(u) / reach(d, u)


@st.composite
def directions(draw, dim):
    parts = draw(st.lists(st.floats(-1, 1, allow_nan=False), min_size=2 * dim, max_size=2 * dim))
    u = np.array(parts[:dim]) + 1j * np.array(parts[dim:])
    if np.linalg.norm(u) < 1e-3:
        u = u + 1.0
    return u


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "SUMMARY", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
