from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from wdirichlet.series import CoeffTable

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

index = st.integers(min_value=1, max_value=64)
small_fraction = st.fractions(min_value=-8, max_value=8, max_denominator=12)


@st.composite
def exact_tables(draw, max_size=20, unit=False):
    entries = draw(st.dictionaries(st.tuples(index, index), small_fraction, max_size=max_size))
    if unit:
        entries[(1, 1)] = draw(small_fraction.filter(lambda x: x != 0))
    return CoeffTable(entries, "exact")


@st.composite
def float_tables(draw, max_size=12, max_index=16, unit=False):
    idx = st.integers(min_value=1, max_value=max_index)
    val = st.complex_numbers(max_magnitude=4, allow_nan=False, allow_infinity=False)
    entries = draw(st.dictionaries(st.tuples(idx, idx), val, max_size=max_size))
    if unit:
        entries[(1, 1)] = draw(st.complex_numbers(min_magnitude=0.5, max_magnitude=4, allow_nan=False,
                                                  allow_infinity=False))
    return CoeffTable(entries, "float")


@pytest.fixture
def two_plus():
    return CoeffTable({(1, 1): Fraction(2), (2, 1): Fraction(1)}, "exact")


def max_entry_diff(a, b) -> float:
    d = a.to_float() - b.to_float()
    return max((abs(complex(c)) for _, c in d.items()), default=0.0)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[k])
