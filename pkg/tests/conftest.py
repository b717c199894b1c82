"""Shared fixtures: the worked example automaton and small helpers."""

from __future__ import annotations

import pytest

from ftakit import Fta, RankedAlphabet, Transition, Tree

_ACCEPTANCE_LINES: list[str] = []


def record_criterion(name: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    line = f"criterion {name}: {status}"
    if detail:
        line += f"  ({detail})"
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ab_alphabet() -> RankedAlphabet:
    return RankedAlphabet.of(alpha=0, sigma=2)


@pytest.fixture(scope="session")
def example_fta(ab_alphabet) -> Fta:
    """Four-state nondeterministic automaton with a known determinization."""
    return Fta(
        states=frozenset({0, 1, 2, 3}),
        alphabet=ab_alphabet,
        finals=frozenset({3}),
        transitions=frozenset([
            Transition("alpha", (), 0),
            Transition("alpha", (), 2),
            Transition("sigma", (0, 0), 1),
            Transition("sigma", (1, 0), 1),
            Transition("sigma", (1, 2), 3),
            Transition("sigma", (1, 3), 3),
        ]),
    )


def tree(label: str, *children: Tree) -> Tree:
    return Tree.of(label, *children)


@pytest.fixture(scope="session")
def example_doc() -> str:
    return (
        "states 0 1 2 3\n"
        "finals 3\n"
        "alphabet alpha:0 sigma:2\n"
        "alpha -> 0\n"
        "alpha -> 2\n"
        "sigma(0,0) -> 1\n"
        "sigma(1,0) -> 1\n"
        "sigma(1,2) -> 3\n"
        "sigma(1,3) -> 3\n"
    )
