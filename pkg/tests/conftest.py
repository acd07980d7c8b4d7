import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# frozen gain sets used throughout the tests
EX1 = (6.0, 0.0, 0.3, 0.0)  # class II, islands
EX2 = (0.0, 0.0, 1.0, 1.5)  # class I
S0 = (2.0, 3.0, 1.5, 1.2)  # class 0, absolutely stable
EXU = (-3.0, 0.0, 1.5, -3.0)  # class U
COUPLING = (3.0, 3.0, -0.5, 0.0)
FIG10_P0 = (3.0, 6.0, 0.0, 0.0)
FIG10_PBAR = (0.0, 0.0, -2.0, 0.0)
FIG9_P0 = (0.0, 6.0, 1.5, 3.0)
FIG9_PBAR = (3.0, 1.0, 0.0, 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def assert_multiset_close(a, b, atol):
    """Greedy nearest matching of two complex multisets."""
    a = list(np.asarray(a, dtype=complex).ravel())
    b = list(np.asarray(b, dtype=complex).ravel())
    assert len(a) == len(b), (len(a), len(b))
    for z in a:
        d = [abs(z - w) for w in b]
        k = int(np.argmin(d))
        assert d[k] <= atol, (z, b[k], d[k])
        b.pop(k)


# acceptance bookkeeping: criterion -> [(part, ok, detail)]
ACCEPTANCE = {}


def record(criterion, part, ok, detail=""):
    ACCEPTANCE.setdefault(criterion, []).append((part, bool(ok), detail))
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[crit]
        ok = all(p[1] for p in parts)
        info = "; ".join(f"{p[0]}{' ' if p[0] else ''}{'ok' if p[1] else 'FAILED'} {p[2]}".strip() for p in parts)
        terminalreporter.write_line(f"criterion {crit:>2}: {'PASS' if ok else 'FAIL'}  [{info}]")
