import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from entropylab.core import Alphabet, Sequence

CORPUS = Path(__file__).resolve().parent.parent / "corpus" / "python_stdlib.txt"


def random_sequence(rng: random.Random, max_sigma: int = 8, max_n: int = 200, min_n: int = 1) -> Sequence:
    sigma = rng.randint(1, max_sigma)
    n = rng.randint(min_n, max_n)
    # skewed symbol choice so low-entropy strings show up too
    weights = [rng.random() ** 3 for _ in range(sigma)]
    data = rng.choices(range(sigma), weights=weights, k=n)
    return Sequence(Alphabet.digits(sigma), tuple(data))


@st.composite
def sequences(draw, max_sigma=6, min_n=0, max_n=60):
    sigma = draw(st.integers(1, max_sigma))
    data = draw(st.lists(st.integers(0, sigma - 1), min_size=min_n, max_size=max_n))
    return Sequence(Alphabet.digits(sigma), tuple(data))


@pytest.fixture(scope="session")
def corpus_bytes() -> bytes:
    return CORPUS.read_bytes()


def toronto(alphabet="NORT") -> Sequence:
    return Sequence.from_text("TORONTO", alphabet)


_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.failed:
        if report.failed:
            _acceptance[name] = "FAIL"
        else:
            _acceptance.setdefault(name, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance.items():
        terminalreporter.write_line(f"{outcome}  {name}")
