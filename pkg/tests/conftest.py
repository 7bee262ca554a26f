import random

import pytest

from rawset.common import PreconditionFailed
from rawset.naive import NaiveState
from rawset.optimized import OptState
from rawset.orset import ORSetState

STATE_TYPES = {"naive": NaiveState, "optimized": OptState, "orset": ORSetState}


def random_reachable(variant, rng, n=3, steps=30, alphabet=3):
    """States of n replicas after a random mix of local ops and merges.

    removeWins is only issued under a locally true lookup, so every variant
    is driven through the same kind of history.
    """
    states = [STATE_TYPES[variant](n) for _ in range(n)]
    for _ in range(steps):
        i = rng.randrange(n)
        x = rng.random()
        e = rng.randrange(alphabet)
        st = states[i]
        if x < 0.2 and n > 1:
            j = rng.choice([k for k in range(n) if k != i])
            states[i] = st.merge(states[j])
        elif x < 0.55:
            st.add(e, i)
        elif not st.lookup(e):
            continue
        elif x < 0.8 or variant == "orset":
            st.remove(e)
        else:
            st.remove_wins(e, i)
    return states


def linear_extensions(items, before):
    """All orderings of ``items`` in which ``before(a, b)`` implies a precedes b."""
    if not items:
        yield []
        return
    for k, x in enumerate(items):
        if any(before(y, x) for y in items if y is not x):
            continue
        rest = items[:k] + items[k + 1:]
        for tail in linear_extensions(rest, before):
            yield [x] + tail


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return random.Random(1234)


__all__ = ["ACCEPTANCE_LINES", "PreconditionFailed", "STATE_TYPES", "linear_extensions", "random_reachable"]
