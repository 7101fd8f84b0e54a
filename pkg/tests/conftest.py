from fractions import Fraction

from hypothesis import strategies as st

from tsallis_lab.simplex import StochasticVector

_acceptance = []


@st.composite
def stochastic_vectors(draw, max_denominator=30, max_length=6, min_length=1):
    n = draw(st.integers(min_length, max_length))
    d = draw(st.integers(1, max_denominator))
    cuts = sorted(draw(st.lists(st.integers(0, d), min_size=n - 1, max_size=n - 1)))
    edges = [0] + cuts + [d]
    return StochasticVector(tuple(Fraction(edges[i + 1] - edges[i], d) for i in range(n)))


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
