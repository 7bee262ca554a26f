"""Replica identities, unique ids, version vectors and vector clocks."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

ReplicaId = int

_ID = struct.Struct("<QH")
_U16 = struct.Struct("<H")
_U64 = struct.Struct("<Q")

ID_SIZE = _ID.size


class UniqueId(NamedTuple):
    """Tag of one add/removeWins instance: (counter value, origin replica)."""

    t: int
    r: ReplicaId


def encode_id(uid: UniqueId) -> bytes:
    return _ID.pack(uid.t, uid.r)


def decode_id(buf: bytes, offset: int = 0) -> tuple[UniqueId, int]:
    t, r = _ID.unpack_from(buf, offset)
    return UniqueId(t, r), offset + _ID.size


def encode_ids(ids: Iterable[UniqueId]) -> bytes:
    return b"".join(_ID.pack(t, r) for t, r in sorted(ids))


@dataclass
class VersionVector:
    """Per-replica highest counter seen. Initially all zero."""

    entries: list[int]

    @classmethod
    def zero(cls, n_replicas: int) -> VersionVector:
        return cls([0] * n_replicas)

    def __len__(self) -> int:
        return len(self.entries)

    def fresh_id(self, replica: ReplicaId) -> UniqueId:
        self.entries[replica] += 1
        return UniqueId(self.entries[replica], replica)

    def covers(self, uid: UniqueId) -> bool:
        return self.entries[uid.r] >= uid.t

    def observe(self, uid: UniqueId) -> None:
        if self.entries[uid.r] < uid.t:
            self.entries[uid.r] = uid.t

    def merge(self, other: VersionVector) -> VersionVector:
        if len(self.entries) != len(other.entries):
            raise ValueError(
                f"version vectors of different sizes: {len(self.entries)} vs {len(other.entries)}"
            )
        return VersionVector([max(a, b) for a, b in zip(self.entries, other.entries)])

    def dominates(self, other: VersionVector) -> bool:
        return all(a >= b for a, b in zip(self.entries, other.entries))

    def copy(self) -> VersionVector:
        return VersionVector(list(self.entries))

    def encode(self) -> bytes:
        return _U16.pack(len(self.entries)) + b"".join(_U64.pack(x) for x in self.entries)

    @classmethod
    def decode(cls, buf: bytes, offset: int = 0) -> tuple[VersionVector, int]:
        (n,) = _U16.unpack_from(buf, offset)
        offset += _U16.size
        entries = list(struct.unpack_from(f"<{n}Q", buf, offset))
        return cls(entries), offset + 8 * n


def fresh_id(replica: ReplicaId, v: VersionVector) -> UniqueId:
    """Bump ``v[replica]`` and return the new id."""
    return v.fresh_id(replica)


def vv_covers(v: VersionVector, uid: UniqueId) -> bool:
    """True iff the state summarized by ``v`` has observed ``uid``."""
    return v.covers(uid)


def vc_happens_before(a: Sequence[int], b: Sequence[int]) -> bool:
    """Strict happens-before on vector clocks: a <= b entrywise and a != b."""
    if len(a) != len(b):
        raise ValueError(f"vector clocks of different lengths: {len(a)} vs {len(b)}")
    strict = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            strict = True
    return strict


def vc_concurrent(a: Sequence[int], b: Sequence[int]) -> bool:
    return a != b and not vc_happens_before(a, b) and not vc_happens_before(b, a)


@dataclass
class VectorClock:
    """Causal timestamp of events at one replica."""

    entries: list[int] = field(default_factory=list)

    @classmethod
    def zero(cls, n_replicas: int) -> VectorClock:
        return cls([0] * n_replicas)

    def tick(self, replica: ReplicaId) -> tuple[int, ...]:
        self.entries[replica] += 1
        return tuple(self.entries)

    def join(self, other: Sequence[int]) -> None:
        self.entries = [max(a, b) for a, b in zip(self.entries, other)]

    def happens_before(self, other: VectorClock) -> bool:
        return vc_happens_before(self.entries, other.entries)

    def snapshot(self) -> tuple[int, ...]:
        return tuple(self.entries)
