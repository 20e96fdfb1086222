import re

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ubblab.tensor import ALL_BIPARTITIONS, Ket

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

amplitudes = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


@st.composite
def kets(draw, d=None, min_terms=1, max_terms=12):
    d = d if d is not None else draw(st.integers(2, 3))
    idx = st.tuples(*[st.integers(0, d - 1)] * 4)
    terms = draw(st.dictionaries(idx, amplitudes.filter(lambda z: abs(z) > 1e-3),
                                 min_size=min_terms, max_size=max_terms))
    return Ket(d, terms)


@st.composite
def ket_pairs(draw):
    d = draw(st.integers(2, 3))
    return draw(kets(d=d)), draw(kets(d=d))


bipartitions = st.sampled_from(ALL_BIPARTITIONS)


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_CRITERIA: dict[str, list[str]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    if report.when == "call" or report.outcome != "passed":
        _CRITERIA.setdefault(m.group(1), []).append("PASS" if report.passed else
                                                    "SKIP" if report.skipped else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    names = {
        "1": "counts", "2": "orthogonality", "3": "biseparability", "4": "GES basis",
        "5": "unextendibility", "6": "strong nonlocality", "7": "distillability",
        "8": "property suites",
    }
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=int):
        outcomes = _CRITERIA[key]
        verdict = "FAIL" if "FAIL" in outcomes else ("PASS" if "PASS" in outcomes else "SKIP")
        terminalreporter.write_line(f"criterion {key} ({names.get(key, '?')}): {verdict}")
