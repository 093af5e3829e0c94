"""Rotor configurations that realize the worst-case cover-time constructions,
each paired with its prescribed start vertex.

All builders produce unit-multiplicity sequences (kappa = 1). Euler tours are
computed by Hierholzer's algorithm on the bidirected graph with ascending
successor choice, so repeated builds are deterministic.
"""

from __future__ import annotations

import numpy as np

from .errors import EvenSide, GraphTooSmall, InvalidParameters, WrongFamily
from .graphs import (Graph, hypercube_graph, kary_tree_graph, torus_graph)
from .rotor import RotorConfiguration

__all__ = [
    "euler_avoid_config",
    "cycle_inward_config",
    "tree_mixed_config",
    "lollipop_config",
    "torus_origin_config",
    "hypercube_lex_config",
    "expander_tree_config",
    "random_config",
    "euler_exit_orders",
    "torus_label",
    "torus_vertex",
    "BUILDERS",
]


def _config_from_lists(seqs: list[list[int]], pointers=None) -> RotorConfiguration:
    n = len(seqs)
    indptr = np.zeros(n + 1, dtype=np.int64)
    for u in range(n):
        indptr[u + 1] = indptr[u] + len(seqs[u])
    targets = np.fromiter((x for s in seqs for x in s), dtype=np.int64,
                          count=int(indptr[-1]))
    if pointers is None:
        ptr = np.zeros(n, dtype=np.int64)
    else:
        ptr = np.asarray(pointers, dtype=np.int64).copy()
    return RotorConfiguration(indptr, targets, ptr)


def euler_exit_orders(out_lists: list[list[int]], start: int):
    """Hierholzer on a directed multigraph (ascending successor consumption).

    Returns the closed tour as a vertex list and, per vertex, its successors
    in tour order. Raises if the edges do not form one Eulerian circuit.
    """
    n = len(out_lists)
    total = sum(len(lst) for lst in out_lists)
    it = [0] * n
    stack = [start]
    path: list[int] = []
    while stack:
        u = stack[-1]
        if it[u] < len(out_lists[u]):
            v = out_lists[u][it[u]]
            it[u] += 1
            stack.append(v)
        else:
            path.append(stack.pop())
    path.reverse()
    if len(path) != total + 1 or path[0] != start or path[-1] != start:
        raise InvalidParameters("edge set has no single Eulerian circuit from start")
    exits: list[list[int]] = [[] for _ in range(n)]
    for i in range(len(path) - 1):
        exits[path[i]].append(path[i + 1])
    return path, exits


def _connected_without(g: Graph, w: int) -> bool:
    n = g.n
    if n <= 1:
        return False
    root = 0 if w != 0 else 1
    seen = np.zeros(n, dtype=bool)
    seen[root] = True
    stack = [root]
    count = 1
    while stack:
        u = stack.pop()
        for v in g.neighbors(u):
            v = int(v)
            if v != w and not seen[v]:
                seen[v] = True
                count += 1
                stack.append(v)
    return count == n - 1


def euler_avoid_config(g: Graph, w: int | None = None):
    """Rotors follow an Euler tour of the bidirected graph without w, so the
    walk traverses every remaining edge (twice each, once per direction)
    before w is first visited. Vertex cover therefore needs >= m - deg(w)
    steps.

    If w is not given, picks a minimum-degree vertex whose removal keeps the
    graph connected.
    """
    if g.n < 3:
        raise GraphTooSmall("need n >= 3")
    if w is None:
        order = sorted(range(g.n), key=lambda u: (g.degree(u), u))
        w = next((u for u in order if _connected_without(g, u)), None)
        if w is None:
            raise InvalidParameters("every vertex removal disconnects the graph")
    elif not _connected_without(g, w):
        raise InvalidParameters(f"removing {w} disconnects the graph")
    out_lists: list[list[int]] = [[] for _ in range(g.n)]
    for u in range(g.n):
        if u != w:
            out_lists[u] = [int(v) for v in g.neighbors(u) if v != w]
    start = 0 if w != 0 else 1
    _, exits = euler_exit_orders(out_lists, start)
    seqs: list[list[int]] = []
    for u in range(g.n):
        if u == w:
            seqs.append([int(v) for v in g.neighbors(u)])
        else:
            seq = exits[u]
            if g.has_edge(u, w):
                seq = seq + [w]
            seqs.append(seq)
    return _config_from_lists(seqs), start


def _is_consecutive_cycle(g: Graph) -> bool:
    n = g.n
    if n < 3 or len(g.indices) != 2 * n:
        return False
    u = np.arange(n, dtype=np.int64)
    lo, hi = (u - 1) % n, (u + 1) % n
    want = np.stack([np.minimum(lo, hi), np.maximum(lo, hi)], axis=1)
    return bool(np.array_equal(g.indices.reshape(n, 2), want))


def _is_consecutive_path(g: Graph) -> bool:
    n = g.n
    if n < 2 or len(g.indices) != 2 * (n - 1):
        return False
    if n == 2:
        want = np.array([1, 0], dtype=np.int64)
    else:
        inner = np.empty((n - 2, 2), dtype=np.int64)
        inner[:, 0] = np.arange(n - 2)        # neighbor u-1 of vertex u
        inner[:, 1] = np.arange(2, n)         # neighbor u+1
        want = np.concatenate([[1], inner.ravel(), [n - 2]])
    return bool(np.array_equal(g.indices, want))


def cycle_inward_config(g: Graph):
    """Every rotor starts toward the neighbor closer to vertex 0 along the
    numbering (vertex 0 toward 1); start at 0.

    On an odd cycle with N vertices the walk covers in exactly (N-1)N/2
    steps; on a path with N vertices it covers in (N-1)^2 steps, i.e. the
    ((N-1)^2+1)-th distinct walk position ends the cover.
    """
    n = g.n
    if _is_consecutive_cycle(g):
        if n % 2 == 0:
            raise WrongFamily("inward cycle construction needs an odd cycle")
        half = n // 2
        u = np.arange(n, dtype=np.int64)
        lo, hi = (u - 1) % n, (u + 1) % n

        def lab(v):
            return np.where(v <= half, v, v - n)

        first = np.where(np.abs(lab(lo)) < np.abs(lab(hi)), lo, hi)
        first[0] = 1
        other = lo + hi - first
        targets = np.stack([first, other], axis=1).ravel()
        indptr = np.arange(0, 2 * n + 1, 2, dtype=np.int64)
        return RotorConfiguration(indptr, targets,
                                  np.zeros(n, dtype=np.int64)), 0
    if _is_consecutive_path(g):
        seqs = [[1]] + [[u - 1, u + 1] for u in range(1, n - 1)] + [[n - 2]]
        return _config_from_lists(seqs), 0
    raise WrongFamily("needs a consecutively labeled cycle or path")


def _kary_shape(g: Graph) -> tuple[int, int]:
    """(k, depth) if g is a consecutively labeled complete k-ary tree."""
    k = g.degree(0)
    if k < 2:
        raise WrongFamily("not a k-ary tree (root degree < 2)")
    n, depth, total = g.n, 0, 1
    while total < n:
        depth += 1
        total += k ** depth
    if total != n:
        raise WrongFamily("vertex count does not match a complete k-ary tree")
    probe = kary_tree_graph(k, depth)
    if not (np.array_equal(probe.indptr, g.indptr)
            and np.array_equal(probe.indices, g.indices)):
        raise WrongFamily("edges do not match the level-order k-ary tree")
    return k, depth


def tree_mixed_config(g: Graph):
    """Leftmost root subtree points up, the rest point down, the root starts
    at its rightmost child; start at the root.

    Rotor order at internal vertices is (children ascending, parent); the
    walk then alternates breadth-first progress in the leftmost subtree with
    full depth-first sweeps of the others, which forces Omega(n log n).
    """
    k, _depth = _kary_shape(g)
    n = g.n
    in_leftmost = np.zeros(n, dtype=bool)
    stack = [1]
    while stack:
        v = stack.pop()
        in_leftmost[v] = True
        stack.extend(c for c in range(k * v + 1, k * v + k + 1) if c < n)
    seqs: list[list[int]] = []
    pointers = np.zeros(n, dtype=np.int64)
    for v in range(n):
        children = [c for c in range(k * v + 1, k * v + k + 1) if c < n]
        if v == 0:
            seqs.append(children)
            pointers[0] = k - 1
            continue
        parent = (v - 1) // k
        seqs.append(children + [parent])
        if in_leftmost[v]:
            pointers[v] = len(seqs[v])  - 1
    return _config_from_lists(seqs, pointers), 0


def _lollipop_shape(g: Graph) -> int:
    n = g.n
    if n < 6 or n % 2:
        raise WrongFamily("lollipop graphs have even n >= 6")
    h = n // 2
    if g.m != h * (h - 1) // 2 + (n - h):
        raise WrongFamily("edge count does not match a lollipop graph")
    for u in range(h):
        want = sorted(set(range(h)) - {u} | ({h} if u == h - 1 else set()))
        if list(g.neighbors(u)) != want:
            raise WrongFamily("clique part malformed")
    for u in range(h, n):
        want = sorted(v for v in (u - 1, u + 1) if v < n)
        if list(g.neighbors(u)) != want:
            raise WrongFamily("path part malformed")
    return h


def lollipop_config(g: Graph):
    """Path rotors point toward the clique; clique rotors follow an Euler
    tour of the bidirected clique with the junction's path exit placed last,
    so every return to the clique replays a full tour. Start in the clique.
    """
    h = _lollipop_shape(g)
    n = g.n
    out_lists: list[list[int]] = [[] for _ in range(n)]
    for u in range(h):
        out_lists[u] = [v for v in range(h) if v != u]
    start = 0
    _, exits = euler_exit_orders(out_lists, start)
    seqs: list[list[int]] = []
    for u in range(h):
        seq = exits[u]
        if u == h - 1:
            seq = seq + [h]
        seqs.append(seq)
    for u in range(h, n - 1):
        seqs.append([u - 1, u + 1])
    seqs.append([n - 2])
    return _config_from_lists(seqs), start


def torus_label(side: int, v: int) -> tuple[int, int]:
    """Canonical coordinates (x, y) in [-L, L] of a torus vertex id."""
    half = (side - 1) // 2
    a, b = divmod(v, side)
    x = a if a <= half else a - side
    y = b if b <= half else b - side
    return x, y


def torus_vertex(side: int, x: int, y: int) -> int:
    return (x % side) * side + (y % side)


def torus_origin_config(g: Graph):
    """Clockwise rotor order (up, right, down, left), each rotor initially
    facing the origin by the quadrant case split; start at the origin.

    Covers the side*side torus (odd side) in exactly (2/3)(n^{3/2}-sqrt(n))
    steps.
    """
    n = g.n
    side = int(round(np.sqrt(n)))
    if side * side != n:
        raise WrongFamily("needs a square 2D torus")
    if side % 2 == 0:
        raise EvenSide("origin-pointing construction needs an odd side")
    probe = torus_graph((side, side))
    if not (np.array_equal(probe.indptr, g.indptr)
            and np.array_equal(probe.indices, g.indices)):
        raise WrongFamily("edges do not match the row-major square torus")

    def neighbor(v: int, direction: int) -> int:
        x, y = torus_label(side, v)
        if direction == 0:      # up
            return torus_vertex(side, x, y + 1)
        if direction == 1:      # right
            return torus_vertex(side, x + 1, y)
        if direction == 2:      # down
            return torus_vertex(side, x, y - 1)
        return torus_vertex(side, x - 1, y)  # left

    seqs: list[list[int]] = []
    for v in range(n):
        x, y = torus_label(side, v)
        if (y <= -1 and y <= -x and y < x) or (x == 0 and y == 0):
            first = 0
        elif x <= -1 and -x > y and x <= y:
            first = 1
        elif y >= 1 and y >= -x and y > x:
            first = 2
        elif x >= 1 and -x < y and x >= y:
            first = 3
        else:
            raise InvalidParameters(f"case split missed vertex {v} at {(x, y)}")
        seqs.append([neighbor(v, (first + i) % 4) for i in range(4)])
    return _config_from_lists(seqs), 0


def hypercube_lex_config(g: Graph):
    """All rotor sequences sorted lexicographically by neighbor bitstring,
    pointers at the first entry; start at vertex 0 (the all-zero string).

    The far corner 1^d then becomes the (d+1+d(d-1)2^{d-1})-th distinct walk
    position (= step d + d(d-1)2^{d-1}).
    """
    n = g.n
    d = n.bit_length() - 1
    if 1 << d != n:
        raise WrongFamily("vertex count is not a power of two")
    probe = hypercube_graph(d)
    if not (np.array_equal(probe.indptr, g.indptr)
            and np.array_equal(probe.indices, g.indices)):
        raise WrongFamily("edges do not match the hypercube")
    # integer order on equal-length bitstrings == lexicographic order
    seqs = [[int(v) for v in g.neighbors(u)] for u in range(n)]
    return _config_from_lists(seqs), 0


def expander_tree_config(g: Graph):
    """Expander rotors follow an Euler tour with the leaf-matching exits
    appended, so the whole expander part is toured before any tree vertex is
    seen; tree rotors keep the parent direction last. Start on the tour.
    """
    meta = g.meta
    if meta.get("family") != "tree_anchored_expander":
        raise WrongFamily("needs a tree_anchored_expander graph (with metadata)")
    n_tree = meta["n_tree"]
    n = g.n
    out_lists: list[list[int]] = [[] for _ in range(n)]
    for u in range(n_tree, n):
        out_lists[u] = [int(v) for v in g.neighbors(u) if v >= n_tree]
    start = n_tree
    _, exits = euler_exit_orders(out_lists, start)
    leaves = set(meta["leaves"])
    seqs: list[list[int]] = []
    for u in range(n):
        if u >= n_tree:
            matching = [int(v) for v in g.neighbors(u) if v < n_tree]
            seqs.append(exits[u] + matching)
        elif u == 0:
            seqs.append([int(v) for v in g.neighbors(u)])
        elif u in leaves:
            partners = [int(v) for v in g.neighbors(u) if v >= n_tree]
            parent = next(int(v) for v in g.neighbors(u) if v < u)
            seqs.append(partners + [parent])
        else:
            parent = next(int(v) for v in g.neighbors(u) if v < u)
            children = [int(v) for v in g.neighbors(u) if u < v < n_tree]
            seqs.append(children + [parent])
    return _config_from_lists(seqs), start


def random_config(g: Graph, seed: int) -> RotorConfiguration:
    """Uniformly random neighbor permutation and pointer per vertex."""
    rng = np.random.default_rng(seed)
    seqs = []
    pointers = np.zeros(g.n, dtype=np.int64)
    for u in range(g.n):
        nbrs = g.neighbors(u)
        seqs.append([int(v) for v in rng.permutation(nbrs)])
        pointers[u] = int(rng.integers(len(nbrs)))
    return _config_from_lists(seqs, pointers)


def _canonical_builder(g: Graph, seed: int | None = None):
    from .rotor import canonical_config
    return canonical_config(g), 0


def _lazy_builder(g: Graph, seed: int | None = None):
    from .rotor import canonical_config, lazify
    _, config = lazify(g, canonical_config(g))
    return config, 0


def _random_builder(g: Graph, seed: int | None = None):
    cfg = random_config(g, 0 if seed is None else seed)
    return cfg, 0


BUILDERS = {
    "canonical": _canonical_builder,
    "lazy": _lazy_builder,
    "random": _random_builder,
    "euler_avoid": lambda g, seed=None: euler_avoid_config(g),
    "cycle_inward": lambda g, seed=None: cycle_inward_config(g),
    "tree_mixed": lambda g, seed=None: tree_mixed_config(g),
    "lollipop": lambda g, seed=None: lollipop_config(g),
    "torus_origin": lambda g, seed=None: torus_origin_config(g),
    "hypercube_lex": lambda g, seed=None: hypercube_lex_config(g),
    "expander_tree": lambda g, seed=None: expander_tree_config(g),
}
