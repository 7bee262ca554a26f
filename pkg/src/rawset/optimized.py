"""Optimized state-based remove&add-wins set.

Ids are dropped as soon as they are cancelled. A version vector records
which ids a state has observed, so merge can tell an id that was never
seen from one that was seen and deleted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .common import (
    Element,
    IdMap,
    PreconditionFailed,
    copy_idmap,
    decode_idmap,
    encode_idmap,
    idmap_size,
)
from .ids import ReplicaId, UniqueId, VersionVector


@dataclass
class OptState:
    n_replicas: int
    removes: IdMap = field(default_factory=dict)
    adds: IdMap = field(default_factory=dict)
    vv: VersionVector = None

    def __post_init__(self):
        if self.vv is None:
            self.vv = VersionVector.zero(self.n_replicas)

    def lookup(self, e: Element) -> bool:
        return e in self.adds

    def elements(self) -> set[Element]:
        return set(self.adds)

    def add(self, e: Element, replica: ReplicaId) -> UniqueId:
        uid = self.vv.fresh_id(replica)
        self.removes.pop(e, None)
        ids = self.adds.get(e)
        if ids is None:
            self.adds[e] = {uid}
        else:
            ids.add(uid)
        return uid

    def remove(self, e: Element) -> None:
        if self.adds.pop(e, None) is None:
            raise PreconditionFailed("remove", e)

    def remove_wins(self, e: Element, replica: ReplicaId) -> UniqueId:
        if e not in self.adds:
            raise PreconditionFailed("removeWins", e)
        uid = self.vv.fresh_id(replica)
        ids = self.removes.get(e)
        if ids is None:
            self.removes[e] = {uid}
        else:
            ids.add(uid)
        del self.adds[e]
        return uid

    def merge(self, other: OptState) -> OptState:
        xv, yv = self.vv.entries, other.vv.entries
        if len(xv) != len(yv):
            raise ValueError("cannot merge states built for different replica sets")
        removes = _merge_map(self.removes, other.removes, xv, yv, None)
        adds = _merge_map(self.adds, other.adds, xv, yv, removes)
        return OptState(self.n_replicas, removes, adds, self.vv.merge(other.vv))

    def copy(self) -> OptState:
        return OptState(self.n_replicas, copy_idmap(self.removes), copy_idmap(self.adds), self.vv.copy())

    def id_count(self) -> int:
        return sum(map(len, self.removes.values())) + sum(map(len, self.adds.values()))

    def encoded_size(self) -> int:
        return idmap_size(self.removes) + idmap_size(self.adds) + 2 + 8 * self.n_replicas

    def encode(self) -> bytes:
        return encode_idmap(self.removes) + encode_idmap(self.adds) + self.vv.encode()

    @classmethod
    def decode(cls, buf: bytes) -> OptState:
        removes, off = decode_idmap(buf, 0)
        adds, off = decode_idmap(buf, off)
        vv, off = VersionVector.decode(buf, off)
        if off != len(buf):
            raise ValueError(f"{len(buf) - off} trailing bytes after optimized state")
        return cls(len(vv), removes, adds, vv)


def _merge_map(x: IdMap, y: IdMap, xv: list[int], yv: list[int], blockers: IdMap | None) -> IdMap:
    """Per element: ids held by both, plus ids one side holds that the other never saw.

    With ``blockers`` set, elements that keep a removeWins id there get no entry.
    """
    z: IdMap = {}
    for e in x.keys() | y.keys():
        if blockers is not None and e in blockers:
            continue
        xs = x.get(e)
        ys = y.get(e)
        if xs is None:
            ids = {u for u in ys if xv[u[1]] < u[0]}
        elif ys is None:
            ids = {u for u in xs if yv[u[1]] < u[0]}
        else:
            ids = xs & ys
            ids.update(u for u in xs if yv[u[1]] < u[0])
            ids.update(u for u in ys if xv[u[1]] < u[0])
        if ids:
            z[e] = ids
    return z
