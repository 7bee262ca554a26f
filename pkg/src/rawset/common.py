"""Pieces shared by the set variants: rejection signal and id-map encoding."""

from __future__ import annotations

import struct
from typing import Dict, Set

from .ids import ID_SIZE, UniqueId, decode_id, encode_ids

Element = int
IdMap = Dict[Element, Set[UniqueId]]

_U32 = struct.Struct("<I")
_ENTRY = struct.Struct("<QI")


class PreconditionFailed(ValueError):
    """An update was rejected because its source precondition does not hold."""

    def __init__(self, op: str, element: Element):
        super().__init__(f"{op}({element}) rejected: element not in set")
        self.op = op
        self.element = element


def encode_idset(ids) -> bytes:
    return _U32.pack(len(ids)) + encode_ids(ids)


def decode_idset(buf: bytes, offset: int) -> tuple[set[UniqueId], int]:
    (n,) = _U32.unpack_from(buf, offset)
    offset += _U32.size
    ids = set()
    for _ in range(n):
        uid, offset = decode_id(buf, offset)
        ids.add(uid)
    return ids, offset


def encode_idmap(m: IdMap) -> bytes:
    parts = [_U32.pack(len(m))]
    for e in sorted(m):
        ids = m[e]
        parts.append(_ENTRY.pack(e, len(ids)))
        parts.append(encode_ids(ids))
    return b"".join(parts)


def decode_idmap(buf: bytes, offset: int) -> tuple[IdMap, int]:
    (n,) = _U32.unpack_from(buf, offset)
    offset += _U32.size
    m: IdMap = {}
    for _ in range(n):
        e, count = _ENTRY.unpack_from(buf, offset)
        offset += _ENTRY.size
        ids = set()
        for _ in range(count):
            uid, offset = decode_id(buf, offset)
            ids.add(uid)
        m[e] = ids
    return m, offset


def idmap_size(m: IdMap) -> int:
    """Byte length of ``encode_idmap(m)`` without building it."""
    return _U32.size + _ENTRY.size * len(m) + ID_SIZE * sum(len(ids) for ids in m.values())


def copy_idmap(m: IdMap) -> IdMap:
    return {e: set(ids) for e, ids in m.items()}
