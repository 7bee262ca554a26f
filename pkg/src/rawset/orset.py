"""Optimized add-wins OR-Set, the comparison baseline.

Same merge as :mod:`rawset.optimized` restricted to the add map. Kept as
separate code so the baseline does not pay for the removeWins map.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .common import Element, IdMap, PreconditionFailed, copy_idmap, decode_idmap, encode_idmap, idmap_size
from .ids import ReplicaId, UniqueId, VersionVector


@dataclass
class ORSetState:
    n_replicas: int
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
        ids = self.adds.get(e)
        if ids is None:
            self.adds[e] = {uid}
        else:
            ids.add(uid)
        return uid

    def remove(self, e: Element) -> None:
        if self.adds.pop(e, None) is None:
            raise PreconditionFailed("remove", e)

    def merge(self, other: ORSetState) -> ORSetState:
        xv, yv = self.vv.entries, other.vv.entries
        if len(xv) != len(yv):
            raise ValueError("cannot merge states built for different replica sets")
        x, y = self.adds, other.adds
        z: IdMap = {}
        for e in x.keys() | y.keys():
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
        return ORSetState(self.n_replicas, z, self.vv.merge(other.vv))

    def copy(self) -> ORSetState:
        return ORSetState(self.n_replicas, copy_idmap(self.adds), self.vv.copy())

    def id_count(self) -> int:
        return sum(map(len, self.adds.values()))

    def encoded_size(self) -> int:
        return idmap_size(self.adds) + 2 + 8 * self.n_replicas

    def encode(self) -> bytes:
        return encode_idmap(self.adds) + self.vv.encode()

    @classmethod
    def decode(cls, buf: bytes) -> ORSetState:
        adds, off = decode_idmap(buf, 0)
        vv, off = VersionVector.decode(buf, off)
        if off != len(buf):
            raise ValueError(f"{len(buf) - off} trailing bytes after OR-Set state")
        return cls(len(vv), adds, vv)
