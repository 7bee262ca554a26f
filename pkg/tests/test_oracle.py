import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rawset.oracle import (
    Event,
    Op,
    check_history,
    contents,
    contents_by_cancellation,
    dump_history,
    load_history,
    member,
)

ADD, REM, RW = Op.ADD, Op.REMOVE, Op.REMOVE_WINS
DATA = __import__("pathlib").Path(__file__).parent / "data"


def ev(op, clock, origin=None, e=0):
    if origin is None:
        origin = max(range(len(clock)), key=lambda k: clock[k])
    return Event(op, e, origin, tuple(clock))


def test_single_add():
    assert member([ev(ADD, (1,))], 0)


def test_add_concurrent_with_remove_survives():
    assert member([ev(ADD, (1, 0)), ev(REM, (0, 1))], 0)


def test_add_concurrent_with_remove_wins_loses():
    assert not member([ev(ADD, (1, 0)), ev(RW, (0, 1))], 0)


def test_remove_wins_then_later_add():
    assert member([ev(RW, (1, 0)), ev(ADD, (1, 1))], 0)


def test_add_then_later_remove():
    assert not member([ev(ADD, (1, 0)), ev(REM, (1, 1))], 0)


def test_other_elements_are_ignored():
    h = [ev(ADD, (1, 0), e=1), ev(RW, (0, 1), e=2)]
    assert not member(h, 2)
    assert contents(h) == {1}


def test_empty_history():
    assert contents([]) == set()


def test_chat_bob_stays_online():
    # R0 connect, sync, R0 lost || R1 connect
    h = [ev(ADD, (1, 0), 0, e=1), ev(REM, (2, 0), 0, e=1), ev(ADD, (1, 1), 1, e=1)]
    assert contents(h) == {1}


def test_chat_logout_as_remove_wins():
    h = load_history(DATA / "chat_logout.history")
    check_history(h)
    assert contents(h) == set()


def test_chat_logout_with_plain_remove_keeps_bob():
    h = [Event(REM, x.element, x.origin, x.clock) if x.op is RW else x
         for x in load_history(DATA / "chat_logout.history")]
    assert contents(h) == {1}


def test_history_text_round_trip(tmp_path):
    h = load_history(DATA / "chat_logout.history")
    dump_history(h, tmp_path / "h.txt")
    assert load_history(tmp_path / "h.txt") == h
    assert (tmp_path / "h.txt").read_text().splitlines()[1] == "add 1 0 1,0"


def test_bad_history_line():
    with pytest.raises(ValueError, match="bad history line"):
        Event.from_line("add x 0 1,0")


def test_check_history_rejects_concurrent_events_of_one_replica():
    with pytest.raises(ValueError):
        check_history([ev(ADD, (1, 0), 0), ev(ADD, (1, 1), 0), ev(ADD, (2, 0), 0)])


def test_readings_differ_when_cancelling_add_is_removed():
    # a0 synced; p: w, a1 (cancels w), r (removes a0, a1); q: a2 concurrent with all of them
    h = [
        ev(ADD, (1, 0), 0),
        ev(RW, (2, 0), 0),
        ev(ADD, (3, 0), 0),
        ev(REM, (4, 0), 0),
        ev(ADD, (1, 1), 1),
    ]
    assert not member(h, 0)
    assert contents_by_cancellation(h) == {0}


def test_readings_agree_on_canonical_pairs():
    for h in (
        [ev(ADD, (1, 0)), ev(REM, (0, 1))],
        [ev(ADD, (1, 0)), ev(RW, (0, 1))],
        [ev(RW, (1, 0)), ev(ADD, (1, 1))],
        [ev(ADD, (1, 0)), ev(REM, (1, 1))],
    ):
        assert contents(h) == contents_by_cancellation(h)


def _random_history(rng, n=3, length=12, alphabet=3):
    clocks = [[0] * n for _ in range(n)]
    h = []
    for _ in range(length):
        i = rng.randrange(n)
        if rng.random() < 0.3:
            j = rng.randrange(n)
            clocks[i] = [max(a, b) for a, b in zip(clocks[i], clocks[j])]
        clocks[i][i] += 1
        h.append(Event(rng.choice(list(Op)), rng.randrange(alphabet), i, tuple(clocks[i])))
    return h


@given(st.integers(0, 10**6))
def test_shuffle_invariance(seed):
    rng = random.Random(seed)
    h = _random_history(rng)
    shuffled = list(h)
    rng.shuffle(shuffled)
    assert contents(shuffled) == contents(h)
    assert contents_by_cancellation(shuffled) == contents_by_cancellation(h)


@given(st.lists(st.tuples(st.sampled_from(list(Op)), st.integers(0, 3)), max_size=30))
def test_sequential_history_is_a_plain_set(ops):
    expected = set()
    h = []
    for k, (op, e) in enumerate(ops, 1):
        h.append(Event(op, e, 0, (k,)))
        if op is ADD:
            expected.add(e)
        else:
            expected.discard(e)
    assert contents(h) == expected
    assert contents_by_cancellation(h) == expected
