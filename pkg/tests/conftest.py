import itertools

import pytest

from eccprover.codes import build_code


@pytest.fixture(scope="session")
def hamming7():
    return build_code("hamming", m=3)


@pytest.fixture(scope="session")
def ebch16():
    return build_code("extended-bch", m=4, t=3)


@pytest.fixture(scope="session")
def ebch32():
    return build_code("extended-bch", m=5, t=3)


@pytest.fixture(scope="session")
def hsiao22():
    return build_code("hsiao", k=16)


def brute_force_sat(num_vars, clauses):
    """Truth-table satisfiability, independent of the CDCL solver."""
    for bits in itertools.product((False, True), repeat=num_vars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            return True
    return False


def model_satisfies(model, clauses):
    return all(any(bool(model[abs(l) - 1]) == (l > 0) for l in c) for c in clauses)


def pigeonhole(pigeons, holes):
    var = lambda p, h: p * holes + h + 1  # noqa: E731
    clauses = [[var(p, h) for h in range(holes)] for p in range(pigeons)]
    for h in range(holes):
        for p in range(pigeons):
            for q in range(p + 1, pigeons):
                clauses.append([-var(p, h), -var(q, h)])
    return pigeons * holes, clauses


# Acceptance verdicts, collected by tests/test_acceptance.py and echoed once
# at the end of the session so they show up without ``-s``.
ACCEPTANCE_VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)
