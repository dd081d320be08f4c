import os
import sys
from collections import defaultdict

import pytest

sys.path.insert(0, os.path.dirname(__file__))

CRITERIA = {
    1: "closed-form numbers (lens, Poincare h, E8 bound, SW traces)",
    2: "chamber structure for S^3, m in [-5, 5]",
    3: "fundamental sequence exact on 200 random instances",
    4: "chamber invariance of lambda~, reduced groups and zeta",
    5: "duality on corpus plus 100 random instances",
    6: "cobordism axioms",
    7: "trace-window lemma",
    8: "Morse / Mayer-Vietoris oracle agreement",
    9: "spectral flow barrier count and additivity",
    10: "integral torsion transport",
}

_outcomes: dict[int, list[str]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n): test belongs to acceptance criterion n")
    config.addinivalue_line("markers", "slow: long-running test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    n = mark.args[0]
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _outcomes[n].append(rep.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in CRITERIA.items():
        res = _outcomes.get(n)
        if not res:
            status = "NOT RUN"
        elif all(r == "passed" for r in res):
            status = "PASS"
        else:
            status = "FAIL"
        tr.write_line(f"AC{n:<2} {status:7} {title} ({len(res or [])} tests)")
