import pytest

from gradedkap import examples
from gradedkap.connections import Connection
from gradedkap.functions import FormalFunction, q_from_spec
from gradedkap.linfty import parse_connection, parse_spec

ACCEPTANCE_LINES: list[str] = []


def load(name):
    spec, opts = parse_spec(examples.document(name))
    chart = spec.chart()
    conn = parse_connection(spec, chart, opts["connection"])
    return spec, chart, conn


def setup(name):
    """(spec, chart, Q, connection) for a builtin document."""
    spec, chart, conn = load(name)
    return spec, chart, q_from_spec(spec, chart), conn


def christoffel(chart, entries):
    """entries: {(k, i, j): {monomial: c}}"""
    return Connection(chart, {k: FormalFunction(chart, {m: c for m, c in v.items()})
                              for k, v in entries.items()})


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
