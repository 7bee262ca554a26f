"""Reference membership of a remove&add-wins set, computed from a history.

An element is in the set iff some ``add(e)`` is (i) not followed by any
``remove(e)`` and (ii) preceded by every ``removeWins(e)``. "Followed" and
"preceded" are happens-before as given by the event vector clocks; the
order of events in the history list is irrelevant.

This is deliberately the dumbest possible evaluation of the quantifiers.

:func:`contents_by_cancellation` evaluates a weaker condition: every
``removeWins(e)`` is followed by *some* ``add(e)``, not necessarily the
surviving one. That is the membership the tombstone-based state-based set
actually computes; the two differ when a removeWins is cancelled by an add
that is itself later removed while a concurrent add survives.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .ids import vc_happens_before


class Op(str, enum.Enum):
    ADD = "add"
    REMOVE = "remove"
    REMOVE_WINS = "removeWins"


@dataclass(frozen=True)
class Event:
    op: Op
    element: int
    origin: int
    clock: tuple[int, ...]

    def to_line(self) -> str:
        return f"{self.op.value} {self.element} {self.origin} {','.join(map(str, self.clock))}"

    @classmethod
    def from_line(cls, line: str) -> Event:
        try:
            op, element, origin, clock = line.split()
            return cls(Op(op), int(element), int(origin), tuple(int(c) for c in clock.split(",")))
        except ValueError as exc:
            raise ValueError(f"bad history line {line!r}: {exc}") from None


History = Sequence[Event]


def member(h: Iterable[Event], e: int) -> bool:
    adds, removes, rws = [], [], []
    for ev in h:
        if ev.element != e:
            continue
        if ev.op is Op.ADD:
            adds.append(ev.clock)
        elif ev.op is Op.REMOVE:
            removes.append(ev.clock)
        else:
            rws.append(ev.clock)
    return _member(adds, removes, rws)


def _member(adds, removes, rws) -> bool:
    for a in adds:
        if any(vc_happens_before(a, r) for r in removes):
            continue
        if all(vc_happens_before(w, a) for w in rws):
            return True
    return False


def _by_element(h: Iterable[Event]) -> dict[int, tuple[list, list, list]]:
    by_elem: dict[int, tuple[list, list, list]] = defaultdict(lambda: ([], [], []))
    slot = {Op.ADD: 0, Op.REMOVE: 1, Op.REMOVE_WINS: 2}
    for ev in h:
        by_elem[ev.element][slot[ev.op]].append(ev.clock)
    return by_elem


def contents(h: Iterable[Event]) -> set[int]:
    return {e for e, (a, r, w) in _by_element(h).items() if _member(a, r, w)}


def member_by_cancellation(h: Iterable[Event], e: int) -> bool:
    return e in contents_by_cancellation(ev for ev in h if ev.element == e)


def contents_by_cancellation(h: Iterable[Event]) -> set[int]:
    out = set()
    for e, (adds, removes, rws) in _by_element(h).items():
        live = any(not any(vc_happens_before(a, r) for r in removes) for a in adds)
        cancelled = all(any(vc_happens_before(w, a) for a in adds) for w in rws)
        if live and cancelled:
            out.add(e)
    return out


def check_history(h: History) -> None:
    """Raise ValueError unless each replica's own events form a causal chain."""
    per_origin: dict[int, list[tuple[int, ...]]] = defaultdict(list)
    for ev in h:
        per_origin[ev.origin].append(ev.clock)
    for origin, clocks in per_origin.items():
        clocks.sort(key=lambda c: c[origin])
        for prev, cur in zip(clocks, clocks[1:]):
            if not vc_happens_before(prev, cur):
                raise ValueError(f"replica {origin}: events {prev} and {cur} are not causally ordered")


def dump_history(h: History, path: str | Path) -> None:
    path = Path(path)
    with path.open("w") as f:
        f.write("# op element origin clock\n")
        for ev in h:
            f.write(ev.to_line() + "\n")


def load_history(path: str | Path) -> list[Event]:
    events = []
    with Path(path).open() as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#"):
                events.append(Event.from_line(line))
    return events
