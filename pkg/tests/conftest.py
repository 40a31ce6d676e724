import numpy as np
from hypothesis import HealthCheck, settings, strategies as st

from paba.solvers import Instance

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def tiny(a, c, n_params=1.0, t0=0.0):
    """Instance from nested lists of per-worker compute and upload seconds per parameter."""
    return Instance(a, c, t0, n_params)


@st.composite
def instances(draw, max_groups=5, max_workers=4):
    """Random instances with realistic magnitudes (seconds per parameter ~1e-6..1e-4)."""
    k = draw(st.integers(1, max_groups))
    sizes = [draw(st.integers(1, max_workers)) for _ in range(k)]
    seed = draw(st.integers(0, 2**31 - 1))
    rng = np.random.default_rng(seed)
    a = [10 ** rng.uniform(-6, -4, n) for n in sizes]
    c = [10 ** rng.uniform(-7, -5, n) for n in sizes]
    t0 = float(rng.uniform(0.0, 0.5))
    n_params = float(rng.integers(1_000, 2_000_000))
    return Instance(a, c, t0, n_params)


# acceptance criteria report one line each; collected here and echoed in the summary
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
