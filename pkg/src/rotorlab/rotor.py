"""The deterministic walk: rotor state, stepping, cover runs, and the
structural checkers (traversal balance, edge-interleaving, concentration).

Step rule: the walk moves to the vertex the current rotor points at, then
that rotor advances cyclically. Self-loop entries (lazy walks) keep the
walk in place, count a step and a visit, and cover no edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .backend import kernels
from .errors import (CapExceeded, ChainMismatch, DimensionMismatch,
                     DivisibilityError, InvalidParameters)
from .graphs import Graph

__all__ = [
    "RotorConfiguration",
    "WalkState",
    "Trace",
    "canonical_config",
    "lazify",
    "step",
    "run_steps",
    "run_until_vertex_cover",
    "run_until_edge_cover",
    "run_recorded",
    "check_edge_interleaving",
    "check_balance",
    "concentration_check",
    "validate_config",
    "config_text",
    "config_from_text",
    "trace_text",
    "default_cap",
]

STOP_NONE = 0
STOP_VERTEX_COVER = 1
STOP_EDGE_COVER = 2


@dataclass
class RotorConfiguration:
    """Per-vertex rotor sequences plus the current rotor pointers.

    ``seq_targets[seq_indptr[u]:seq_indptr[u+1]]`` lists the vertices served
    by u in rotor order; an entry equal to u is a self-loop. ``pointers`` are
    0-based indices into each sequence (the serialized form is 1-based).
    """

    seq_indptr: np.ndarray
    seq_targets: np.ndarray
    pointers: np.ndarray

    @property
    def n(self) -> int:
        return len(self.seq_indptr) - 1

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.seq_indptr)

    def sequence(self, u: int) -> np.ndarray:
        return self.seq_targets[self.seq_indptr[u]:self.seq_indptr[u + 1]]

    def kappa(self, g: Graph) -> float:
        """max over vertices of sequence length / degree."""
        return float((self.lengths / g.degrees).max())

    def copy(self) -> "RotorConfiguration":
        return RotorConfiguration(self.seq_indptr.copy(), self.seq_targets.copy(),
                                  self.pointers.copy())


def canonical_config(g: Graph) -> RotorConfiguration:
    """Rotor sequences in canonical (ascending neighbor) order, pointers at
    the first entry."""
    return RotorConfiguration(
        seq_indptr=g.indptr.astype(np.int64).copy(),
        seq_targets=g.indices.astype(np.int64).copy(),
        pointers=np.zeros(g.n, dtype=np.int64),
    )


def lazify(g: Graph, config: RotorConfiguration):
    """Extend rotor sequences with self-loops to match the symmetric walk.

    New lengths are (Delta+1)/deg(u) * len(u); the original entries stay in
    place and the padding entries point at u itself. Returns the symmetric
    chain and the padded configuration.
    """
    if np.any(g.weights != 1):
        raise InvalidParameters("lazification is defined for unit weights")
    dmax = g.max_degree
    deg = g.degrees
    lens = config.lengths
    if np.any(((dmax + 1) * lens) % deg != 0):
        bad = int(np.nonzero(((dmax + 1) * lens) % deg)[0][0])
        raise DivisibilityError(
            f"(Delta+1)*len({bad}) = {(dmax + 1) * int(lens[bad])} not divisible "
            f"by deg({bad}) = {int(deg[bad])}")
    new_lens = (dmax + 1) * lens // deg
    indptr = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(new_lens, out=indptr[1:])
    targets = np.empty(int(indptr[-1]), dtype=np.int64)
    for u in range(g.n):
        a, b = indptr[u], indptr[u + 1]
        old = config.sequence(u)
        targets[a:a + len(old)] = old
        targets[a + len(old):b] = u
    lazy = RotorConfiguration(indptr, targets, config.pointers.copy())
    from .analytics import build_chain
    return build_chain(g, lazy=True), lazy


def _seq_slots(g: Graph, config: RotorConfiguration) -> np.ndarray:
    """CSR slot of each sequence entry; -1 for self-loops.

    Raises if an entry is neither u itself nor a neighbor of u.
    """
    n = g.n
    counts = config.lengths
    owner = np.repeat(np.arange(n, dtype=np.int64), counts)
    tgt = config.seq_targets
    # CSR rows are contiguous and sorted, so u*n+v keys are globally sorted
    graph_key = np.repeat(np.arange(n, dtype=np.int64), g.degrees) * n + g.indices
    key = owner * n + tgt
    pos = np.searchsorted(graph_key, key)
    slots = np.full(len(tgt), -1, dtype=np.int64)
    nonself = tgt != owner
    pos_ns = pos[nonself]
    ok = (pos_ns < len(graph_key)) & (graph_key[np.minimum(pos_ns, len(graph_key) - 1)]
                                      == key[nonself])
    if not np.all(ok):
        bad = int(np.nonzero(nonself)[0][np.nonzero(~ok)[0][0]])
        raise InvalidParameters(
            f"sequence entry {int(tgt[bad])} is not adjacent to vertex {int(owner[bad])}")
    slots[nonself] = pos_ns
    return slots


@dataclass
class WalkState:
    """Mutable state of one deterministic walk (exclusively owned by a run)."""

    graph: Graph
    config: RotorConfiguration
    start: int
    seq_slot: np.ndarray
    visits: np.ndarray
    slot_count: np.ndarray
    loop_count: np.ndarray
    first_visit: np.ndarray
    edge_seen: np.ndarray
    dir_seen: np.ndarray
    scal: np.ndarray

    @classmethod
    def begin(cls, g: Graph, config: RotorConfiguration, start: int) -> "WalkState":
        if not 0 <= start < g.n:
            raise InvalidParameters(f"start {start} out of range")
        cfg = config.copy()
        seq_slot = _seq_slots(g, cfg)
        visits = np.zeros(g.n, dtype=np.int64)
        visits[start] = 1
        first_visit = np.full(g.n, -1, dtype=np.int64)
        first_visit[start] = 0
        scal = np.zeros(8, dtype=np.int64)
        scal[0] = start
        scal[2] = 1
        return cls(
            graph=g, config=cfg, start=start, seq_slot=seq_slot,
            visits=visits,
            slot_count=np.zeros(len(g.indices), dtype=np.int64),
            loop_count=np.zeros(g.n, dtype=np.int64),
            first_visit=first_visit,
            edge_seen=np.zeros(g.m, dtype=np.uint8),
            dir_seen=np.zeros(len(g.indices), dtype=np.uint8),
            scal=scal,
        )

    @property
    def current(self) -> int:
        return int(self.scal[0])

    @property
    def t(self) -> int:
        return int(self.scal[1])

    @property
    def visited_count(self) -> int:
        return int(self.scal[2])

    @property
    def covered_edge_count(self) -> int:
        return int(self.scal[3])

    @property
    def distinct_directed(self) -> int:
        return int(self.scal[4])

    def edge_traversals(self, u: int, v: int) -> int:
        """Directed traversal count of u->v (self-loop steps for u == v)."""
        if u == v:
            return int(self.loop_count[u])
        s = self.graph.slot(u, v)
        if s < 0:
            raise InvalidParameters(f"({u},{v}) is not an edge")
        return int(self.slot_count[s])

    def covered_edges(self) -> set[tuple[int, int]]:
        out = set()
        for u, v, _ in self.graph.edges():
            if self.edge_seen[self.graph.edge_ids[self.graph.slot(u, v)]]:
                out.add((u, v))
        return out

    def counters_consistent(self) -> bool:
        """Sum of visits equals t+1 and sum of traversals (incl. loops) equals t."""
        return (int(self.visits.sum()) == self.t + 1
                and int(self.slot_count.sum() + self.loop_count.sum()) == self.t)

    def _kernel_args(self):
        g = self.graph
        return (g.indptr, g.indices, g.edge_ids, self.config.seq_indptr,
                self.config.seq_targets, self.seq_slot, self.config.pointers,
                self.visits, self.slot_count, self.loop_count, self.first_visit,
                self.edge_seen, self.dir_seen, self.scal)


def default_cap(g: Graph) -> int:
    """64 n m: comfortably above the classical O(nm) cover bounds."""
    return 64 * g.n * g.m


def step(g: Graph, state: WalkState) -> WalkState:
    """Advance one rotor step (mutates and returns the state)."""
    kernels().walk(*state._kernel_args(), STOP_NONE, 1)
    return state


def run_steps(g: Graph, state: WalkState, budget: int,
              stop_mode: int = STOP_NONE) -> int:
    """Advance up to ``budget`` steps; returns the kernel status code."""
    return kernels().walk(*state._kernel_args(), stop_mode, budget)


@dataclass
class CheckedRun:
    """Bookkeeping arrays for the per-step structural checks."""

    last_seen: np.ndarray
    second_last: np.ndarray
    viol: np.ndarray

    @classmethod
    def begin(cls, g: Graph) -> "CheckedRun":
        slots = len(g.indices)
        return cls(last_seen=np.full(slots, -1, dtype=np.int64),
                   second_last=np.full(slots, -1, dtype=np.int64),
                   viol=np.zeros(6, dtype=np.int64))

    def witness(self) -> dict:
        kind = {2: "balance", 3: "edge_interleaving"}.get(int(self.viol[0]), "none")
        return {"kind": kind, "data": [int(x) for x in self.viol]}


def run_steps_checked(g: Graph, state: WalkState, checked: CheckedRun,
                      budget: int, stop_mode: int = STOP_NONE) -> int:
    """Advance with per-step balance and edge-interleaving checks.

    Returns the kernel status code (2 = balance violation, 3 = interleaving
    violation, with the witness in ``checked.viol``).
    """
    args = state._kernel_args()
    return kernels().walk_checked(
        args[0], args[1], args[2], g.rev_slot, *args[3:], stop_mode, budget,
        checked.last_seen, checked.second_last, checked.viol)


def _run_cover(g, config, start, step_cap, mode):
    if step_cap is None:
        step_cap = default_cap(g)
    if step_cap <= 0:
        raise InvalidParameters("step_cap must be positive")
    state = WalkState.begin(g, config, start)
    status = kernels().walk(*state._kernel_args(), mode, step_cap)
    if status != 1:
        kind = "vertex" if mode == STOP_VERTEX_COVER else "edge"
        raise CapExceeded(f"{kind} cover not reached within {step_cap} steps",
                          state=state, steps=state.t)
    return state.t, state


def run_until_vertex_cover(g: Graph, config: RotorConfiguration, start: int,
                           step_cap: int | None = None):
    """Smallest t with every vertex visited; raises CapExceeded otherwise."""
    return _run_cover(g, config, start, step_cap, STOP_VERTEX_COVER)


def run_until_edge_cover(g: Graph, config: RotorConfiguration, start: int,
                         step_cap: int | None = None):
    """Smallest t with every undirected edge traversed in some direction."""
    return _run_cover(g, config, start, step_cap, STOP_EDGE_COVER)


@dataclass
class Trace:
    """Recorded walk: one (from, to, rotor index used) triple per step."""

    u: np.ndarray
    v: np.ndarray
    ridx: np.ndarray

    def __len__(self) -> int:
        return len(self.u)

    def directed_slots(self, g: Graph) -> np.ndarray:
        """Directed CSR slot per step; -1 for self-loop steps."""
        out = np.empty(len(self.u), dtype=np.int64)
        for i in range(len(self.u)):
            ui, vi = int(self.u[i]), int(self.v[i])
            out[i] = -1 if ui == vi else g.slot(ui, vi)
        return out

    def vertices(self, start: int) -> np.ndarray:
        """The visited vertex sequence x_0..x_T (including the start)."""
        return np.concatenate(([start], self.v))


def run_recorded(g: Graph, config: RotorConfiguration, start: int, budget: int,
                 stop_mode: int = STOP_NONE) -> tuple[WalkState, Trace]:
    """Run with a full step log (one line per step for golden-file tests)."""
    state = WalkState.begin(g, config, start)
    trace_u = np.empty(budget, dtype=np.int64)
    trace_v = np.empty(budget, dtype=np.int64)
    trace_r = np.empty(budget, dtype=np.int64)
    kernels().walk_recorded(*state._kernel_args(), stop_mode, budget,
                            trace_u, trace_v, trace_r)
    steps = state.t
    return state, Trace(trace_u[:steps], trace_v[:steps], trace_r[:steps])


def trace_text(trace: Trace) -> str:
    """One line per step: "t u v r" with 1-based rotor index."""
    lines = [f"{i + 1} {int(trace.u[i])} {int(trace.v[i])} {int(trace.ridx[i]) + 1}"
             for i in range(len(trace))]
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------------
# Structural checkers
# ----------------------------------------------------------------------------

def check_edge_interleaving(edge_sequence: Sequence[int]):
    """Check the edge-interleaving property on a directed-edge log.

    Between two successive occurrences of the same directed edge no other
    directed edge may occur twice (strictly in between). Entries < 0 (loop
    steps) are ignored. Returns (ok, witness); the witness names the closing
    edge, the doubly-visited edge, and the three step indices involved.
    """
    last: dict[int, int] = {}
    second: dict[int, int] = {}
    top1_val, top1_edge, top2_val = -1, -1, -1
    for t, e in enumerate(edge_sequence, start=1):
        e = int(e)
        if e < 0:
            continue
        prev = last.get(e, -1)
        if prev >= 0:
            other = top2_val if top1_edge == e else top1_val
            if other > prev:
                for f, sf in second.items():
                    if f != e and sf > prev:
                        return False, {
                            "edge": e, "prev_step": prev, "step": t,
                            "other_edge": f,
                            "other_steps": (sf, last[f]),
                        }
        second[e] = prev
        if top1_edge == e:
            top1_val = prev
        elif prev > top1_val:
            top2_val = top1_val
            top1_val, top1_edge = prev, e
        elif prev > top2_val:
            top2_val = prev
        last[e] = t
    return True, None


def check_balance(state: WalkState):
    """Every in-edge count of v is within 2 of every out-edge count of v.

    Returns (ok, witness) where the witness carries the offending directed
    pair and both counts.
    """
    g = state.graph
    rev = g.rev_slot
    for v in range(g.n):
        lo, hi = int(g.indptr[v]), int(g.indptr[v + 1])
        if lo == hi:
            continue
        out_counts = state.slot_count[lo:hi]
        in_counts = state.slot_count[rev[lo:hi]]
        if in_counts.max() - out_counts.min() > 2:
            u_idx, w_idx = int(np.argmax(in_counts)), int(np.argmin(out_counts))
        elif out_counts.max() - in_counts.min() > 2:
            u_idx, w_idx = int(np.argmin(in_counts)), int(np.argmax(out_counts))
        else:
            continue
        u = int(g.indices[lo + u_idx])
        w = int(g.indices[lo + w_idx])
        return False, {
            "pair": ((u, v), (v, w)),
            "counts": (state.edge_traversals(u, v), state.edge_traversals(v, w)),
        }
    return True, None


def concentration_check(state: WalkState, pi: np.ndarray, K: np.ndarray,
                        chain=None) -> float:
    """Max over v of |pi_v - N_t(v)/t| * t - K(v) pi_v; nonpositive = pass.

    If ``chain`` is given, the walk's rotor multiplicities are validated
    against it first (ChainMismatch on disagreement).
    """
    if state.t < 1:
        raise InvalidParameters("need t >= 1")
    if len(pi) != state.graph.n or len(K) != state.graph.n:
        raise DimensionMismatch("pi/K length != n")
    if chain is not None:
        rep = validate_config(state.graph, state.config, chain=chain)
        if not rep.multiplicities_ok:
            raise ChainMismatch(str(rep.problems[:1]))
    t = state.t
    dev = np.abs(pi - state.visits / t) * t - K * pi
    return float(dev.max())


@dataclass
class ConfigReport:
    """Validation result for a rotor configuration."""

    membership_ok: bool = True
    pointers_ok: bool = True
    multiplicities_ok: bool = True
    problems: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.membership_ok and self.pointers_ok and self.multiplicities_ok


def validate_config(g: Graph, config: RotorConfiguration,
                    chain=None) -> ConfigReport:
    """Check membership, pointer ranges and (optionally) that sequence
    multiplicities reproduce the transition probabilities of ``chain``."""
    rep = ConfigReport()
    if config.n != g.n:
        rep.membership_ok = False
        rep.problems.append(("size", config.n, g.n))
        return rep
    lens = config.lengths
    if np.any(lens < 1):
        rep.pointers_ok = False
        rep.problems.append(("empty sequence", int(np.argmin(lens))))
    if np.any((config.pointers < 0) | (config.pointers >= lens)):
        bad = int(np.nonzero((config.pointers < 0) | (config.pointers >= lens))[0][0])
        rep.pointers_ok = False
        rep.problems.append(("pointer out of range", bad, int(config.pointers[bad])))
    try:
        _seq_slots(g, config)
    except InvalidParameters as exc:
        rep.membership_ok = False
        rep.problems.append(("membership", str(exc)))
        return rep
    if chain is not None:
        P = chain.P
        for u in range(g.n):
            seq = config.sequence(u)
            d = len(seq)
            vals, counts = np.unique(seq, return_counts=True)
            prob = np.zeros(g.n)
            prob[vals] = counts / d
            if not np.allclose(prob, P[u], atol=1e-12):
                bad = int(np.argmax(np.abs(prob - P[u])))
                rep.multiplicities_ok = False
                rep.problems.append(("multiplicity", u, bad,
                                     float(prob[bad]), float(P[u][bad])))
                break
    return rep


# ----------------------------------------------------------------------------
# Configuration serialization: "u r(u) : s(u,1) s(u,2) ..." (1-based rotor)
# ----------------------------------------------------------------------------

def config_text(config: RotorConfiguration) -> str:
    lines = []
    for u in range(config.n):
        seq = " ".join(str(int(x)) for x in config.sequence(u))
        lines.append(f"{u} {int(config.pointers[u]) + 1} : {seq}")
    return "\n".join(lines) + "\n"


def config_from_text(text: str) -> RotorConfiguration:
    rows = [ln for ln in text.strip().splitlines() if ln.strip()]
    n = len(rows)
    seqs: list[list[int]] = [[] for _ in range(n)]
    pointers = np.zeros(n, dtype=np.int64)
    for ln in rows:
        head, _, tail = ln.partition(":")
        u_s, r_s = head.split()
        u = int(u_s)
        if not 0 <= u < n:
            raise InvalidParameters(f"vertex {u} out of range in config text")
        pointers[u] = int(r_s) - 1
        seqs[u] = [int(x) for x in tail.split()]
    indptr = np.zeros(n + 1, dtype=np.int64)
    for u in range(n):
        if not seqs[u]:
            raise InvalidParameters(f"vertex {u} has an empty sequence")
        indptr[u + 1] = indptr[u] + len(seqs[u])
    targets = np.fromiter((x for s in seqs for x in s), dtype=np.int64,
                          count=int(indptr[-1]))
    return RotorConfiguration(indptr, targets, pointers)
