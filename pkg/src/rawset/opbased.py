"""Op-based remove&add-wins set.

Updates are split into a prepare step at the source, which builds an
:class:`OpMessage` without touching the maps, and :meth:`OpState.effect`,
which every replica (the source included) applies in causal order.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, field
from typing import Optional

from .common import (
    Element,
    IdMap,
    PreconditionFailed,
    copy_idmap,
    decode_idset,
    encode_idmap,
    encode_idset,
    idmap_size,
)
from .ids import ID_SIZE, ReplicaId, UniqueId, VersionVector, decode_id, encode_id

_HEAD = struct.Struct("<BQ")


class OpKind(enum.IntEnum):
    ADD = 1
    REMOVE = 2
    REMOVE_WINS = 3


class CausalityError(RuntimeError):
    """A message was applied before the operations it depends on."""


@dataclass(frozen=True)
class OpMessage:
    kind: OpKind
    element: Element
    uid: Optional[UniqueId] = None
    tr: frozenset = frozenset()

    def __post_init__(self):
        if (self.uid is None) != (self.kind is OpKind.REMOVE):
            raise ValueError(f"{self.kind.name} message with uid={self.uid}")
        if self.kind is OpKind.REMOVE_WINS and self.tr:
            raise ValueError("REMOVE_WINS message carries no observed ids")

    def encode(self) -> bytes:
        out = _HEAD.pack(self.kind, self.element)
        if self.uid is not None:
            out += encode_id(self.uid)
        return out + encode_idset(self.tr)

    def encoded_size(self) -> int:
        return _HEAD.size + (ID_SIZE if self.uid is not None else 0) + 4 + ID_SIZE * len(self.tr)

    @classmethod
    def decode(cls, buf: bytes) -> OpMessage:
        tag, element = _HEAD.unpack_from(buf, 0)
        kind = OpKind(tag)
        off = _HEAD.size
        uid = None
        if kind is not OpKind.REMOVE:
            uid, off = decode_id(buf, off)
        tr, off = decode_idset(buf, off)
        if off != len(buf):
            raise ValueError(f"{len(buf) - off} trailing bytes after message")
        return cls(kind, element, uid, frozenset(tr))


@dataclass
class OpState:
    n_replicas: int
    removes: IdMap = field(default_factory=dict)
    adds: IdMap = field(default_factory=dict)
    # ids issued here or delivered; drives id generation and the causal check
    vv: VersionVector = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.vv is None:
            self.vv = VersionVector.zero(self.n_replicas)

    def lookup(self, e: Element) -> bool:
        return e not in self.removes and e in self.adds

    def elements(self) -> set[Element]:
        return {e for e in self.adds if e not in self.removes}

    def prepare_add(self, e: Element, replica: ReplicaId) -> OpMessage:
        return OpMessage(OpKind.ADD, e, self.vv.fresh_id(replica), frozenset(self.removes.get(e, ())))

    def prepare_remove(self, e: Element) -> OpMessage:
        if not self.lookup(e):
            raise PreconditionFailed("remove", e)
        return OpMessage(OpKind.REMOVE, e, None, frozenset(self.adds[e]))

    def prepare_remove_wins(self, e: Element, replica: ReplicaId) -> OpMessage:
        return OpMessage(OpKind.REMOVE_WINS, e, self.vv.fresh_id(replica))

    def effect(self, m: OpMessage) -> None:
        vv = self.vv
        for uid in m.tr:
            if not vv.covers(uid):
                raise CausalityError(f"{m.kind.name}({m.element}) depends on undelivered {uid}")
        e = m.element
        if m.kind is OpKind.ADD:
            rw = self.removes.get(e)
            if rw is not None:
                rw -= m.tr
                if not rw:
                    del self.removes[e]
            if e not in self.removes:
                self.adds.setdefault(e, set()).add(m.uid)
        elif m.kind is OpKind.REMOVE:
            ids = self.adds.get(e)
            if ids is not None:
                ids -= m.tr
                if not ids:
                    del self.adds[e]
        else:
            self.removes.setdefault(e, set()).add(m.uid)
            self.adds.pop(e, None)
        if m.uid is not None:
            vv.observe(m.uid)

    def copy(self) -> OpState:
        return OpState(self.n_replicas, copy_idmap(self.removes), copy_idmap(self.adds), self.vv.copy())

    def id_count(self) -> int:
        return sum(map(len, self.removes.values())) + sum(map(len, self.adds.values()))

    def encoded_size(self) -> int:
        return idmap_size(self.removes) + idmap_size(self.adds)

    def encode(self) -> bytes:
        return encode_idmap(self.removes) + encode_idmap(self.adds)


def state_equal(x: OpState, y: OpState) -> bool:
    return x.removes == y.removes and x.adds == y.adds
