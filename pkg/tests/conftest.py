import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cliffwave.clifford import Multivector

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", deadline=None, max_examples=20)
settings.load_profile("default")

SEED = 20240917


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


def gaussian_ints(bound=4):
    return st.tuples(st.integers(-bound, bound), st.integers(-bound, bound))


@st.composite
def exact_multivectors(draw, m):
    bits = draw(st.lists(st.integers(0, (1 << m) - 1), max_size=1 << m, unique=True))
    from cliffwave.clifford import QQ_I

    return Multivector(m, {b: QQ_I(*draw(gaussian_ints())) for b in bits})


@st.composite
def float_multivectors(draw, m):
    vals = draw(
        st.lists(
            st.floats(-3, 3, allow_nan=False, allow_infinity=False), min_size=2 << m, max_size=2 << m
        )
    )
    arr = np.array(vals[::2]) + 1j * np.array(vals[1::2])
    return Multivector.from_array(m, arr)


# criterion number -> list of (item, ok, detail); filled by test_acceptance
ACCEPTANCE: dict = {}

TITLES = {
    1: "Clifford axioms",
    2: "Spin double cover",
    3: "eigenvalue battery",
    4: "operator identities",
    5: "transform round-trip",
    6: "convolution theorem",
    7: "heat semigroup",
    8: "admissibility",
    9: "Spin(m) eigenfunctions",
}


def record(n, item, ok, detail=""):
    ACCEPTANCE.setdefault(n, []).append((item, bool(ok), detail))
    line = f"criterion {n} [{item}]: {'PASS' if ok else 'FAIL'} {detail}".rstrip()
    print(line)
    return ok


def acceptance_lines():
    lines = []
    for n in sorted(ACCEPTANCE):
        items = ACCEPTANCE[n]
        ok = all(o for _, o, _ in items)
        failed = [i for i, o, _ in items if not o]
        tail = f" (failed: {', '.join(failed)})" if failed else ""
        lines.append(f"criterion {n} {TITLES[n]}: {'PASS' if ok else 'FAIL'}{tail}")
    return lines


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines():
            terminalreporter.write_line(line)
