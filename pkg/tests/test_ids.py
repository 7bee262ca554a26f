import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rawset.ids import (
    UniqueId,
    VectorClock,
    VersionVector,
    decode_id,
    encode_id,
    fresh_id,
    vc_concurrent,
    vc_happens_before,
    vv_covers,
)


def test_fresh_id_from_zero_vector():
    v = VersionVector([0, 0, 0])
    assert fresh_id(0, v) == UniqueId(1, 0)
    assert v.entries == [1, 0, 0]


def test_fresh_id_pre_increments_own_entry():
    v = VersionVector([5, 1, 7])
    assert fresh_id(2, v) == UniqueId(8, 2)
    assert v.entries == [5, 1, 8]


def test_fresh_ids_strictly_increase():
    v = VersionVector.zero(2)
    assert fresh_id(1, v) == (1, 1)
    assert fresh_id(1, v) == (2, 1)


@pytest.mark.parametrize(
    "entries, uid, expected",
    [([3, 0], (2, 0), True), ([3, 0], (4, 0), False), ([0, 0], (1, 0), False), ([0, 0], (9, 1), False)],
)
def test_vv_covers(entries, uid, expected):
    assert vv_covers(VersionVector(entries), UniqueId(*uid)) is expected


@pytest.mark.parametrize(
    "a, b, expected",
    [([1, 0], [1, 1], True), ([1, 0], [0, 1], False), ([1, 1], [1, 1], False)],
)
def test_vc_happens_before_examples(a, b, expected):
    assert vc_happens_before(a, b) is expected


def test_vc_length_mismatch_is_an_error():
    with pytest.raises(ValueError):
        vc_happens_before([1], [1, 2])


def test_concurrent_clocks():
    assert vc_concurrent([1, 0], [0, 1])
    assert not vc_concurrent([1, 0], [1, 1])
    assert not vc_concurrent([1, 1], [1, 1])


def test_ids_unique_over_many_replicas():
    vs = [VersionVector.zero(4) for _ in range(4)]
    ids = [fresh_id(r, vs[r]) for _ in range(50) for r in range(4)]
    assert len(set(ids)) == len(ids)


def test_id_encoding_is_ten_bytes_little_endian():
    raw = encode_id(UniqueId(1, 2))
    assert raw == b"\x01" + b"\x00" * 7 + b"\x02\x00"
    assert decode_id(raw) == (UniqueId(1, 2), 10)


def test_vv_encoding_layout():
    v = VersionVector([1, 2, 3])
    raw = v.encode()
    assert len(raw) == 2 + 8 * 3
    assert raw[:2] == b"\x03\x00"
    assert VersionVector.decode(raw) == (v, len(raw))


def test_vector_clock_tick_and_join():
    c = VectorClock.zero(3)
    assert c.tick(1) == (0, 1, 0)
    c.join((2, 0, 5))
    assert c.snapshot() == (2, 1, 5)


vvs = st.lists(st.integers(0, 6), min_size=3, max_size=3).map(VersionVector)


@given(vvs, vvs, vvs)
def test_vv_merge_is_a_semilattice(a, b, c):
    assert a.merge(a) == a
    assert a.merge(b) == b.merge(a)
    assert a.merge(b).merge(c) == a.merge(b.merge(c))
    m = a.merge(b)
    assert m.dominates(a) and m.dominates(b)


clocks = st.lists(st.integers(0, 3), min_size=3, max_size=3)


@given(clocks, clocks, clocks)
def test_happens_before_is_a_strict_partial_order(a, b, c):
    assert not vc_happens_before(a, a)
    assert not (vc_happens_before(a, b) and vc_happens_before(b, a))
    if vc_happens_before(a, b) and vc_happens_before(b, c):
        assert vc_happens_before(a, c)


def test_happens_before_exhaustive_small_cube():
    cube = list(itertools.product(range(3), repeat=2))
    for a, b, c in itertools.product(cube, repeat=3):
        assert not vc_happens_before(a, a)
        assert not (vc_happens_before(a, b) and vc_happens_before(b, a))
        if vc_happens_before(a, b) and vc_happens_before(b, c):
            assert vc_happens_before(a, c)
