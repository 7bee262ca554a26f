"""Deterministic multi-replica simulator.

Replicas run in lock-step rounds: in round ``k`` every replica has executed
``k`` local operations. A :class:`SyncSchedule` lists ``(round, source,
target)`` transfers applied once that round is reached; for state-based
variants the source state is merged into the target, for the op-based
variant every message the source has delivered is forwarded to the target
and delivered there in causal order. A closing round makes every replica
see everything.

Operations between two sync rounds do not interact across replicas, so
each replica runs its whole block at once and is timed per block.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .naive import NaiveState
from .opbased import CausalityError, OpKind, OpMessage, OpState
from .optimized import OptState
from .oracle import Event, Op
from .orset import ORSetState

MAX_REDRAWS = 64

STATE_VARIANTS = {
    "naive": NaiveState,
    "optimized": OptState,
    "orset": ORSetState,
}
VARIANTS = ("naive", "optimized", "opbased", "orset")


@dataclass(frozen=True)
class WorkloadSpec:
    n_replicas: int = 3
    ops_per_replica: int = 1000
    alphabet_size: int = 20000
    mix: tuple[float, float, float] = (0.5, 0.25, 0.25)
    sync_every: Optional[int] = 20000  # None: only the closing round
    seed: int = 0

    def __post_init__(self):
        if self.n_replicas < 1:
            raise ValueError(f"n_replicas must be >= 1, got {self.n_replicas}")
        if self.ops_per_replica < 0:
            raise ValueError(f"ops_per_replica must be >= 0, got {self.ops_per_replica}")
        if self.alphabet_size < 1:
            raise ValueError(f"alphabet_size must be >= 1, got {self.alphabet_size}")
        if len(self.mix) != 3 or any(p < 0 for p in self.mix) or abs(sum(self.mix) - 1) > 1e-9:
            raise ValueError(f"mix must be three non-negative probabilities summing to 1, got {self.mix}")
        if self.sync_every is not None and self.sync_every < 1:
            raise ValueError(f"sync_every must be >= 1 or None, got {self.sync_every}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")

    def for_orset(self) -> WorkloadSpec:
        """Same workload with removeWins folded into remove."""
        p_add, p_rem, p_rw = self.mix
        return WorkloadSpec(
            self.n_replicas, self.ops_per_replica, self.alphabet_size,
            (p_add, p_rem + p_rw, 0.0), self.sync_every, self.seed,
        )


@dataclass(frozen=True)
class SyncSchedule:
    pairs: tuple[tuple[int, int, int], ...]

    @classmethod
    def round_robin(cls, spec: WorkloadSpec) -> SyncSchedule:
        """Every ``sync_every`` ops, replica i sends its state to replica i+1."""
        n, x = spec.n_replicas, spec.sync_every
        if x is None or n < 2:
            return cls(())
        return cls(tuple(
            (k, i, (i + 1) % n)
            for k in range(x, spec.ops_per_replica + 1, x)
            for i in range(n)
        ))

    @classmethod
    def random(cls, rng: random.Random, spec: WorkloadSpec, n_pairs: int) -> SyncSchedule:
        n = spec.n_replicas
        if n < 2:
            return cls(())
        pairs = []
        for _ in range(n_pairs):
            src, dst = rng.sample(range(n), 2)
            pairs.append((rng.randint(0, spec.ops_per_replica), src, dst))
        pairs.sort(key=lambda p: p[0])
        return cls(tuple(pairs))

    def is_connected(self, n_replicas: int) -> bool:
        """Connectivity of the sync graph, ignoring direction."""
        parent = list(range(n_replicas))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for _, s, d in self.pairs:
            parent[find(s)] = find(d)
        return len({find(i) for i in range(n_replicas)}) == 1


def generate_op(rng: random.Random, spec: WorkloadSpec, state) -> tuple[Op, int]:
    """Draw an executable operation for a replica whose state is ``state``.

    A draw whose precondition fails locally (remove/removeWins of an absent
    element) is discarded and the kind and element are drawn again. After
    ``MAX_REDRAWS`` failures the last element is added instead.
    """
    p_add, p_rem, _ = spec.mix
    p_rem += p_add
    n = spec.alphabet_size
    lookup = state.lookup
    for _ in range(MAX_REDRAWS):
        x = rng.random()
        e = rng.randrange(n)
        if x < p_add:
            return Op.ADD, e
        if lookup(e):
            return (Op.REMOVE if x < p_rem else Op.REMOVE_WINS), e
    return Op.ADD, e


def state_stats(state) -> dict:
    """Size figures reported per replica."""
    return {
        "metadata_bytes": state.encoded_size(),
        "live_elements": len(state.elements()),
        "add_entries": len(state.adds),
        "rw_entries": len(getattr(state, "removes", ())),
        "ids": state.id_count(),
    }


@dataclass
class RunResult:
    variant: str
    spec: WorkloadSpec
    states: list
    history: Optional[list[Event]]
    op_seconds: list[float]
    merge_seconds: list[float]
    closing_seconds: float
    end_stats: list[dict]  # per replica, after its last op and before any later sync
    delivery_logs: Optional[list[list]] = None

    def converged(self) -> bool:
        first = self.states[0]
        return all(_same_state(first, s) for s in self.states[1:])

    def membership(self) -> set[int]:
        return self.states[0].elements()


def _same_state(x, y) -> bool:
    if isinstance(x, OpState):
        return x.adds == y.adds and x.removes == y.removes
    return x == y


def _segments(spec: WorkloadSpec, schedule: SyncSchedule):
    """Yield (ops to run per replica, syncs applied afterwards)."""
    by_round: dict[int, list[tuple[int, int]]] = {}
    for k, s, d in schedule.pairs:
        if not 0 <= k <= spec.ops_per_replica:
            raise ValueError(f"sync round {k} outside [0, {spec.ops_per_replica}]")
        if s == d or not (0 <= s < spec.n_replicas and 0 <= d < spec.n_replicas):
            raise ValueError(f"bad sync pair {s}->{d}")
        by_round.setdefault(k, []).append((s, d))
    done = 0
    for k in sorted(by_round):
        yield k - done, by_round[k]
        done = k
    if done < spec.ops_per_replica:
        yield spec.ops_per_replica - done, []


def _closing_rounds(spec: WorkloadSpec, closing: str) -> list[list[tuple[int, int]]]:
    """Sync rounds run after the last op; transfers within a round use pre-round state."""
    n = spec.n_replicas
    if closing == "all-pairs":
        return [[(s, d) for d in range(n) for s in range(n) if s != d]]
    if closing == "ring":
        # twice around a shuffled ring: the first lap gathers, the second spreads
        order = list(range(n))
        random.Random(f"{spec.seed}/ring").shuffle(order)
        ring = [(order[k], order[(k + 1) % n]) for k in range(n)] if n > 1 else []
        return [[p] for p in ring + ring]
    raise ValueError(f"unknown closing round {closing!r}")


def _rngs(spec: WorkloadSpec) -> list[random.Random]:
    return [random.Random(f"{spec.seed}/{i}") for i in range(spec.n_replicas)]


def run_state_based(
    spec: WorkloadSpec,
    variant: str,
    schedule: Optional[SyncSchedule] = None,
    capture_history: bool = True,
    closing: str = "all-pairs",
) -> RunResult:
    if variant not in STATE_VARIANTS:
        raise ValueError(f"unknown state-based variant {variant!r}")
    if variant == "orset":
        spec = spec.for_orset()
    if schedule is None:
        schedule = SyncSchedule.round_robin(spec)
    n = spec.n_replicas
    make = STATE_VARIANTS[variant]
    states = [make(n) for _ in range(n)]
    clocks = [[0] * n for _ in range(n)]
    rngs = _rngs(spec)
    history: Optional[list[Event]] = [] if capture_history else None
    op_s = [0.0] * n
    merge_s = [0.0] * n
    clock = time.process_time

    def sync(pairs, timed=True):
        snaps = [(states[s], list(clocks[s])) for s, _ in pairs]
        for (_, d), (st, vc) in zip(pairs, snaps):
            t0 = clock()
            states[d] = states[d].merge(st)
            if timed:
                merge_s[d] += clock() - t0
            clocks[d] = [max(a, b) for a, b in zip(clocks[d], vc)]

    done = 0
    end_stats = None
    for count, pairs in _segments(spec, schedule):
        for i in range(n):
            st, rng, vc = states[i], rngs[i], clocks[i]
            add, remove = st.add, st.remove
            remove_wins = getattr(st, "remove_wins", None)
            t0 = clock()
            for _ in range(count):
                op, e = generate_op(rng, spec, st)
                if op is Op.ADD:
                    add(e, i)
                elif op is Op.REMOVE:
                    remove(e)
                else:
                    remove_wins(e, i)
                vc[i] += 1
                if history is not None:
                    history.append(Event(op, e, i, tuple(vc)))
            op_s[i] += clock() - t0
        done += count
        if done == spec.ops_per_replica and end_stats is None:
            end_stats = [state_stats(s) for s in states]
        if pairs:
            sync(pairs)

    if end_stats is None:
        end_stats = [state_stats(s) for s in states]
    t0 = clock()
    for pairs in _closing_rounds(spec, closing):
        sync(pairs, timed=False)
    closing_s = clock() - t0
    return RunResult(variant, spec, states, history, op_s, merge_s, closing_s, end_stats)


@dataclass
class Envelope:
    origin: int
    clock: tuple[int, ...]
    msg: OpMessage


@dataclass
class _OpReplica:
    index: int
    state: OpState
    delivered: list[int]  # per origin: messages delivered so far
    log: list[Envelope] = field(default_factory=list)  # delivery order
    pending: dict = field(default_factory=dict)  # (origin, seq) -> Envelope
    received: set = field(default_factory=set)

    def deliverable(self, env: Envelope) -> bool:
        j = env.origin
        d = self.delivered
        if env.clock[j] != d[j] + 1:
            return False
        return all(c <= d[k] for k, c in enumerate(env.clock) if k != j)

    def deliver(self, env: Envelope) -> None:
        if not self.deliverable(env):
            raise CausalityError(f"replica {self.index}: message {env.origin}:{env.clock} delivered out of causal order")
        self.state.effect(env.msg)
        self.delivered[env.origin] += 1
        self.log.append(env)

    def receive(self, envs: Sequence[Envelope]) -> None:
        for env in envs:
            key = (env.origin, env.clock[env.origin])
            if key not in self.received:
                self.received.add(key)
                self.pending[key] = env
        progress = True
        while progress and self.pending:
            progress = False
            for j in range(len(self.delivered)):
                while True:
                    env = self.pending.get((j, self.delivered[j] + 1))
                    if env is None or not self.deliverable(env):
                        break
                    del self.pending[(j, env.clock[j])]
                    self.deliver(env)
                    progress = True


def run_op_based(
    spec: WorkloadSpec,
    schedule: Optional[SyncSchedule] = None,
    capture_history: bool = True,
    closing: str = "all-pairs",
) -> RunResult:
    if schedule is None:
        schedule = SyncSchedule.round_robin(spec)
    n = spec.n_replicas
    reps = [_OpReplica(i, OpState(n), [0] * n) for i in range(n)]
    rngs = _rngs(spec)
    net = random.Random(f"{spec.seed}/net")
    forwarded: dict[tuple[int, int], int] = {}
    op_s = [0.0] * n
    merge_s = [0.0] * n
    clock = time.process_time

    def sync(pairs, timed=True):
        for s, d in pairs:
            src, dst = reps[s], reps[d]
            start = forwarded.get((s, d), 0)
            batch = src.log[start:]
            forwarded[(s, d)] = len(src.log)
            batch = list(batch)
            net.shuffle(batch)
            t0 = clock()
            dst.receive(batch)
            if timed:
                merge_s[d] += clock() - t0

    done = 0
    end_stats = None
    for count, pairs in _segments(spec, schedule):
        for i in range(n):
            rep, rng = reps[i], rngs[i]
            st = rep.state
            t0 = clock()
            for _ in range(count):
                op, e = generate_op(rng, spec, st)
                if op is Op.ADD:
                    msg = st.prepare_add(e, i)
                elif op is Op.REMOVE:
                    msg = st.prepare_remove(e)
                else:
                    msg = st.prepare_remove_wins(e, i)
                vc = list(rep.delivered)
                vc[i] += 1
                env = Envelope(i, tuple(vc), msg)
                rep.received.add((i, vc[i]))
                rep.deliver(env)
            op_s[i] += clock() - t0
        done += count
        if done == spec.ops_per_replica and end_stats is None:
            end_stats = [state_stats(r.state) for r in reps]
        if pairs:
            sync(pairs)

    if end_stats is None:
        end_stats = [state_stats(r.state) for r in reps]
    t0 = clock()
    for pairs in _closing_rounds(spec, closing):
        sync(pairs, timed=False)
    closing_s = clock() - t0
    for r in reps:
        if r.pending:
            raise CausalityError(f"replica {r.index}: {len(r.pending)} messages stuck undeliverable")
    history = None
    if capture_history:
        history = [
            Event(_OP_OF_KIND[env.msg.kind], env.msg.element, env.origin, env.clock)
            for env in sorted(reps[0].log, key=lambda env: (env.origin, env.clock[env.origin]))
        ]
    return RunResult(
        "opbased", spec, [r.state for r in reps], history, op_s, merge_s, closing_s,
        end_stats, delivery_logs=[r.log for r in reps],
    )


_OP_OF_KIND = {OpKind.ADD: Op.ADD, OpKind.REMOVE: Op.REMOVE, OpKind.REMOVE_WINS: Op.REMOVE_WINS}


def run(spec: WorkloadSpec, variant: str, **kwargs) -> RunResult:
    if variant == "opbased":
        return run_op_based(spec, **kwargs)
    return run_state_based(spec, variant, **kwargs)


def write_manifest(spec: WorkloadSpec, variant: str, path: str | Path, **extra) -> None:
    data = {"variant": variant, "spec": asdict(spec), "schedule": "round-robin", **extra}
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def run_script(
    steps: Sequence[tuple],
    variant: str,
    n_replicas: int,
    closing: Optional[str] = "all-pairs",
) -> RunResult:
    """Replay explicit steps: ``(op, replica, element)`` or ``("sync", src, dst)``.

    ``op`` is an :class:`Op` or its string value. Each sync step is its own
    round. Preconditions are not checked here; the variants raise
    :class:`~rawset.common.PreconditionFailed` themselves.
    """
    n = n_replicas
    spec = WorkloadSpec(n_replicas=n, ops_per_replica=0, alphabet_size=1, sync_every=None)
    history: list[Event] = []
    clocks = [[0] * n for _ in range(n)]
    if variant == "opbased":
        reps = [_OpReplica(i, OpState(n), [0] * n) for i in range(n)]
        states = [r.state for r in reps]
    else:
        states = [STATE_VARIANTS[variant](n) for _ in range(n)]

    def sync(s, d):
        if variant == "opbased":
            reps[d].receive(list(reps[s].log))
        else:
            states[d] = states[d].merge(states[s])
        clocks[d] = [max(a, b) for a, b in zip(clocks[d], clocks[s])]

    for step in steps:
        if step[0] == "sync":
            sync(step[1], step[2])
            continue
        op, i, e = Op(step[0]), step[1], step[2]
        if variant == "opbased":
            st = reps[i].state
            if op is Op.ADD:
                msg = st.prepare_add(e, i)
            elif op is Op.REMOVE:
                msg = st.prepare_remove(e)
            else:
                msg = st.prepare_remove_wins(e, i)
            vc = list(reps[i].delivered)
            vc[i] += 1
            reps[i].received.add((i, vc[i]))
            reps[i].deliver(Envelope(i, tuple(vc), msg))
        else:
            st = states[i]
            if op is Op.ADD:
                st.add(e, i)
            elif op is Op.REMOVE:
                st.remove(e)
            else:
                st.remove_wins(e, i)
        clocks[i][i] += 1
        history.append(Event(op, e, i, tuple(clocks[i])))

    if closing is not None:
        for pairs in _closing_rounds(spec, closing):
            if variant == "opbased":
                for s, d in pairs:
                    sync(s, d)
            else:
                snaps = [states[s] for s, _ in pairs]
                for (s, d), st in zip(pairs, snaps):
                    states[d] = states[d].merge(st)
    if variant == "opbased":
        states = [r.state for r in reps]
    zero = [0.0] * n
    return RunResult(
        variant, spec, states, history, zero, list(zero), 0.0,
        [state_stats(s) for s in states],
        delivery_logs=[r.log for r in reps] if variant == "opbased" else None,
    )
