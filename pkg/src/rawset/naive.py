"""Unoptimized state-based remove&add-wins set.

Every unique id ever created stays in the state. Cancelled ids are
referenced from the tombstone set, so merge is a plain union.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

from .common import (
    Element,
    IdMap,
    PreconditionFailed,
    copy_idmap,
    decode_idmap,
    decode_idset,
    encode_idmap,
    encode_idset,
    idmap_size,
)
from .ids import ID_SIZE, ReplicaId, UniqueId, VersionVector


@dataclass
class NaiveState:
    n_replicas: int
    removes: IdMap = field(default_factory=dict)
    adds: IdMap = field(default_factory=dict)
    tombstones: set[UniqueId] = field(default_factory=set)
    # id generator only; recoverable from the ids themselves, so not compared
    counters: VersionVector = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.counters is None:
            self.counters = _counters_from_ids(self.n_replicas, self.removes, self.adds)

    def lookup(self, e: Element) -> bool:
        tomb = self.tombstones
        for uid in self.removes.get(e, ()):
            if uid not in tomb:
                return False
        for uid in self.adds.get(e, ()):
            if uid not in tomb:
                return True
        return False

    def elements(self) -> set[Element]:
        return {e for e in self.adds if self.lookup(e)}

    def add(self, e: Element, replica: ReplicaId) -> UniqueId:
        uid = self.counters.fresh_id(replica)
        self.adds.setdefault(e, set()).add(uid)
        rw = self.removes.get(e)
        if rw:
            self.tombstones.update(rw)
        return uid

    def remove(self, e: Element) -> None:
        if not self.lookup(e):
            raise PreconditionFailed("remove", e)
        self.tombstones.update(self.adds[e])

    def remove_wins(self, e: Element, replica: ReplicaId) -> UniqueId:
        uid = self.counters.fresh_id(replica)
        self.removes.setdefault(e, set()).add(uid)
        return uid

    def merge(self, other: NaiveState) -> NaiveState:
        return NaiveState(
            self.n_replicas,
            removes=_union_maps(self.removes, other.removes),
            adds=_union_maps(self.adds, other.adds),
            tombstones=self.tombstones | other.tombstones,
            counters=self.counters.merge(other.counters),
        )

    def copy(self) -> NaiveState:
        return NaiveState(
            self.n_replicas,
            copy_idmap(self.removes),
            copy_idmap(self.adds),
            set(self.tombstones),
            self.counters.copy(),
        )

    def id_count(self) -> int:
        return (
            sum(map(len, self.removes.values()))
            + sum(map(len, self.adds.values()))
            + len(self.tombstones)
        )

    def encoded_size(self) -> int:
        return idmap_size(self.removes) + idmap_size(self.adds) + 4 + ID_SIZE * len(self.tombstones)

    def encode(self) -> bytes:
        return encode_idmap(self.removes) + encode_idmap(self.adds) + encode_idset(self.tombstones)

    @classmethod
    def decode(cls, buf: bytes, n_replicas: int) -> NaiveState:
        removes, off = decode_idmap(buf, 0)
        adds, off = decode_idmap(buf, off)
        tombstones, off = decode_idset(buf, off)
        if off != len(buf):
            raise ValueError(f"{len(buf) - off} trailing bytes after naive state")
        return cls(n_replicas, removes, adds, tombstones)


def _union_maps(x: IdMap, y: IdMap) -> IdMap:
    z = {e: set(ids) for e, ids in x.items()}
    for e, ids in y.items():
        if e in z:
            z[e] |= ids
        else:
            z[e] = set(ids)
    return z


def _counters_from_ids(n: int, *maps: IdMap) -> VersionVector:
    v = VersionVector.zero(n)
    for m in maps:
        for ids in m.values():
            for uid in ids:
                v.observe(uid)
    return v
