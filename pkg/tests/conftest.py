from fractions import Fraction

import pytest
import sympy
from hypothesis import strategies as st

from gkmcalc.poly import Polynomial
from gkmcalc.roots import build_root_system


def P(text: str, n: int = 3) -> Polynomial:
    return Polynomial.parse(text, n)


T = sympy.symbols("t1:6")


def to_sympy(p: Polynomial):
    expr = sympy.Integer(0)
    for exps, c in p.terms():
        term = sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else sympy.Integer(c)
        for x, e in zip(T, exps):
            term *= x ** e
        expr += term
    return sympy.expand(expr)


def polynomials(nvars: int, max_degree: int = 4, max_terms: int = 6, rational: bool = True):
    exps = st.lists(st.integers(0, max_degree), min_size=nvars, max_size=nvars).filter(
        lambda e: sum(e) <= max_degree).map(tuple)
    ints = st.integers(-9, 9)
    coeffs = st.one_of(ints, st.fractions(-5, 5, max_denominator=6)) if rational else ints
    return st.dictionaries(exps, coeffs, max_size=max_terms).map(lambda d: Polynomial(nvars, d))


@pytest.fixture
def A2():
    return build_root_system("A", 2)


@pytest.fixture
def A3():
    return build_root_system("A", 3)


@pytest.fixture
def cp2():
    from gkmcalc.graph import moment_graph

    R = build_root_system("A", 2)
    return moment_graph(R, (2,))


@pytest.fixture
def g24():
    from gkmcalc.graph import moment_graph

    R = build_root_system("A", 3)
    return moment_graph(R, (1, 3))


__all__ = ["P", "T", "to_sympy", "polynomials", "Fraction"]


# --- acceptance summary: one PASS/FAIL line per criterion ---

_CRITERIA: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "seconds": 0.0, "why": ""})
    entry["seconds"] += report.duration
    if report.failed:
        entry["ok"] = False
        if report.longrepr is not None and not entry["why"]:
            crash = getattr(report.longrepr, "reprcrash", None)
            entry["why"] = crash.message.splitlines()[0] if crash else str(report.longrepr).splitlines()[-1]
    elif report.skipped:
        entry["ok"] = False
        entry["why"] = "skipped"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        line = f"criterion {number}: {'PASS' if e['ok'] else 'FAIL'}  {e['title']} ({e['seconds']:.1f} s)"
        if not e["ok"]:
            line += f"\n    {e['why'][:400]}"
        terminalreporter.write_line(line)
