import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from verbdyn.words import Word

settings.register_profile("repo", deadline=None, derandomize=True, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


def words(n, max_syllables=8, max_exp=3):
    """Hypothesis strategy for reduced words over n generators."""
    syl = st.tuples(st.integers(0, n - 1),
                    st.integers(-max_exp, max_exp).filter(lambda e: e != 0))
    return st.lists(syl, max_size=max_syllables).map(lambda ls: Word(n, tuple(ls)))


def random_word(rng: random.Random, n: int, length: int) -> Word:
    return Word(n, tuple((rng.randrange(n), rng.choice((1, -1))) for _ in range(length)))


@pytest.fixture
def rng():
    return random.Random(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("]")[0].split()[-1])):
            terminalreporter.write_line(line)
