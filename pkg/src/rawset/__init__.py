"""Set CRDT offering both add-wins ``remove`` and remove-wins ``removeWins``."""

from .common import PreconditionFailed
from .ids import UniqueId, VectorClock, VersionVector, fresh_id, vc_happens_before, vv_covers
from .naive import NaiveState
from .opbased import CausalityError, OpKind, OpMessage, OpState, state_equal
from .optimized import OptState
from .oracle import Event, Op, contents, member
from .orset import ORSetState

__all__ = [
    "CausalityError",
    "Event",
    "NaiveState",
    "Op",
    "OpKind",
    "OpMessage",
    "OpState",
    "ORSetState",
    "OptState",
    "PreconditionFailed",
    "UniqueId",
    "VectorClock",
    "VersionVector",
    "contents",
    "fresh_id",
    "member",
    "state_equal",
    "vc_happens_before",
    "vv_covers",
]
