"""Undirected weighted graphs and the generator families the experiments run on.

Graphs are immutable CSR structures with adjacency lists sorted ascending by
vertex id (the canonical neighbor order used by default rotor configurations).
Vertex labelings per family:

* cycle / path: consecutive ids around the cycle / along the path
* star: center 0, leaves 1..n-1
* complete: any
* kary_tree: level order, children of v are k*v+1 .. k*v+k
* hypercube: bitstrings as integers, neighbors differ in one bit
* torus: row-major mixed-radix coordinates
* lollipop: clique 0..n/2-1, then path n/2..n-1, joined at (n/2-1, n/2)
* random_regular: arbitrary
* tree_anchored_expander: tree nodes first (level order), then expander nodes
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InvalidParameters

__all__ = [
    "Graph",
    "FamilyId",
    "ValidationReport",
    "graph_from_edges",
    "build_family",
    "bfs_layers",
    "validate",
    "cycle_graph",
    "path_graph",
    "complete_graph",
    "star_graph",
    "kary_tree_graph",
    "hypercube_graph",
    "torus_graph",
    "lollipop_graph",
    "random_regular_graph",
    "tree_anchored_expander_graph",
    "random_connected_graph",
    "write_edge_list",
    "read_edge_list",
    "edge_list_text",
    "graph_from_edge_list_text",
]

FAMILY_TAGS = (
    "cycle",
    "path",
    "complete",
    "star",
    "kary_tree",
    "hypercube",
    "torus",
    "lollipop",
    "random_regular",
    "tree_anchored_expander",
)


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple connected graph in CSR form.

    ``indices[indptr[u]:indptr[u+1]]`` holds the neighbors of ``u`` sorted
    ascending; ``weights`` carries the positive integer weight of each
    directed slot (symmetric across the two slots of an edge).
    """

    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def min_degree(self) -> int:
        return int(self.degrees.min())

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max())

    def degree(self, u: int) -> int:
        return int(self.indptr[u + 1] - self.indptr[u])

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def slot(self, u: int, v: int) -> int:
        """CSR slot of the directed edge u->v, or -1 if absent."""
        lo, hi = self.indptr[u], self.indptr[u + 1]
        j = lo + np.searchsorted(self.indices[lo:hi], v)
        if j < hi and self.indices[j] == v:
            return int(j)
        return -1

    def has_edge(self, u: int, v: int) -> bool:
        return self.slot(u, v) >= 0

    def weight(self, u: int, v: int) -> int:
        s = self.slot(u, v)
        return int(self.weights[s]) if s >= 0 else 0

    @cached_property
    def _slot_owner(self) -> np.ndarray:
        return np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)

    @cached_property
    def edge_ids(self) -> np.ndarray:
        """Undirected edge index per CSR slot: both slots of {u,v} share an id.

        Ids enumerate edges in sorted (min, max) order, matching ``edges()``.
        """
        lo = np.minimum(self._slot_owner, self.indices)
        hi = np.maximum(self._slot_owner, self.indices)
        _, inverse = np.unique(lo * self.n + hi, return_inverse=True)
        return inverse.astype(np.int64)

    @cached_property
    def rev_slot(self) -> np.ndarray:
        """For each slot of u->v, the slot of v->u."""
        # CSR rows are contiguous and sorted, so u*n+v keys are globally sorted
        key = self._slot_owner * self.n + self.indices
        return np.searchsorted(key, self.indices * self.n + self._slot_owner
                               ).astype(np.int64)

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """Yield (u, v, w) with u < v in sorted order."""
        for u in range(self.n):
            for j in range(self.indptr[u], self.indptr[u + 1]):
                v = int(self.indices[j])
                if u < v:
                    yield u, v, int(self.weights[j])

    @property
    def total_conductance(self) -> int:
        """Sum of c(u) over vertices (= 2 * sum of edge weights)."""
        return int(self.weights.sum())


@dataclass(frozen=True)
class FamilyId:
    """Names a graph family instance: a tag plus family-specific integers.

    Parameter order per tag:
    cycle/path/complete/star/lollipop: (n,); hypercube: (d,);
    kary_tree: (k, depth); torus: side lengths; random_regular: (n, d, seed);
    tree_anchored_expander: (d, levels, seed).
    """

    tag: str
    params: tuple[int, ...]


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def graph_from_edges(n: int, edges: Iterable[tuple[int, int]],
                     weights: dict[tuple[int, int], int] | None = None,
                     meta: dict | None = None,
                     check: bool = True) -> Graph:
    """Build a Graph from an undirected edge list (duplicates rejected)."""
    arr = np.array(sorted(edges) if isinstance(edges, set) else list(edges),
                   dtype=np.int64).reshape(-1, 2)
    if len(arr) == 0:
        raise InvalidParameters("graph needs at least one edge")
    if np.any((arr < 0) | (arr >= n)):
        bad = arr[np.any((arr < 0) | (arr >= n), axis=1)][0]
        raise InvalidParameters(f"edge {tuple(bad)} out of range for n={n}")
    if np.any(arr[:, 0] == arr[:, 1]):
        u = int(arr[arr[:, 0] == arr[:, 1]][0][0])
        raise InvalidParameters(f"self-loop at vertex {u}")
    lo = np.minimum(arr[:, 0], arr[:, 1])
    hi = np.maximum(arr[:, 0], arr[:, 1])
    key = lo * n + hi
    uniq, counts = np.unique(key, return_counts=True)
    if len(uniq) != len(key):
        k = int(uniq[np.argmax(counts > 1)])
        raise InvalidParameters(f"duplicate edge {(k // n, k % n)}")
    w_edge = np.ones(len(lo), dtype=np.int64)
    if weights:
        wkey = {}
        for (a, b), c in weights.items():
            if c <= 0:
                raise InvalidParameters(f"weight of edge ({a},{b}) must be positive")
            wkey[min(a, b) * n + max(a, b)] = int(c)
        for i, k in enumerate(key):
            w_edge[i] = wkey.get(int(k), 1)
    owner = np.concatenate([lo, hi])
    target = np.concatenate([hi, lo])
    w_dir = np.concatenate([w_edge, w_edge])
    order = np.lexsort((target, owner))
    indices = target[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(owner, minlength=n), out=indptr[1:])
    g = Graph(_freeze(indptr), _freeze(indices), _freeze(w_dir[order]),
              meta=dict(meta or {}))
    if check:
        report = validate(g)
        if not report.ok:
            raise InvalidParameters(f"constructed graph is invalid: {report.failures()}")
    return g


# ----------------------------------------------------------------------------
# Traversal primitives
# ----------------------------------------------------------------------------

def bfs_layers(g: Graph, v: int) -> list[set[int]]:
    """Partition V by distance from v: layers Gamma^0(v), Gamma^1(v), ..."""
    if not 0 <= v < g.n:
        raise InvalidParameters(f"vertex {v} out of range")
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[v] = 0
    frontier = [v]
    layers = [{v}]
    while frontier:
        nxt = []
        for u in frontier:
            for w in g.neighbors(u):
                w = int(w)
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    nxt.append(w)
        if nxt:
            layers.append(set(nxt))
        frontier = nxt
    return layers


def _connected(indptr: np.ndarray, indices: np.ndarray, n: int) -> bool:
    if n == 0:
        return False
    if n == 1:
        return True
    import scipy.sparse as sp
    import scipy.sparse.csgraph as csgraph
    mat = sp.csr_matrix((np.ones(len(indices), dtype=np.int8), indices, indptr),
                        shape=(n, n))
    return int(csgraph.connected_components(mat, directed=False,
                                            return_labels=False)) == 1


@dataclass
class ValidationReport:
    """Pass/fail per Graph invariant with the first counterexample found."""

    simple: bool = True
    symmetric: bool = True
    connected: bool = True
    sorted_adjacency: bool = True
    positive_weights: bool = True
    witness: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return (self.simple and self.symmetric and self.connected
                and self.sorted_adjacency and self.positive_weights)

    def failures(self) -> dict:
        out = {}
        for name in ("simple", "symmetric", "connected", "sorted_adjacency",
                     "positive_weights"):
            if not getattr(self, name):
                out[name] = self.witness.get(name)
        return out


def validate(g: Graph) -> ValidationReport:
    """Check every Graph invariant; returns a report, never raises."""
    rep = ValidationReport()
    n = g.n
    owner = np.repeat(np.arange(n, dtype=np.int64), np.diff(g.indptr))
    loops = g.indices == owner
    if np.any(loops):
        rep.simple = False
        rep.witness.setdefault("simple", ("self-loop", int(owner[np.argmax(loops)])))
    if len(g.indices) > 1:
        inner = np.ones(len(g.indices) - 1, dtype=bool)
        inner[g.indptr[1:-1] - 1] = False  # pairs straddling a row boundary
        bad = inner & (np.diff(g.indices) <= 0)
        if np.any(bad):
            j = int(np.argmax(bad))
            rep.sorted_adjacency = False
            rep.witness.setdefault("sorted_adjacency", int(owner[j]))
            if g.indices[j] == g.indices[j + 1]:
                rep.simple = False
                rep.witness.setdefault("simple", ("parallel edges", int(owner[j])))
    if rep.sorted_adjacency and len(g.indices):
        # rows sorted, so u*n+v keys are globally sorted: locate reverse slots
        key = owner * n + g.indices
        rkey = g.indices * n + owner
        pos = np.searchsorted(key, rkey)
        pos_c = np.minimum(pos, len(key) - 1)
        missing = key[pos_c] != rkey
        if np.any(missing):
            j = int(np.argmax(missing))
            rep.symmetric = False
            rep.witness.setdefault("symmetric", (int(owner[j]), int(g.indices[j])))
        else:
            wmismatch = g.weights != g.weights[pos_c]
            if np.any(wmismatch):
                j = int(np.argmax(wmismatch))
                rep.symmetric = False
                rep.witness.setdefault("symmetric",
                                       ("weight", int(owner[j]), int(g.indices[j])))
    nonpos = g.weights <= 0
    if np.any(nonpos):
        j = int(np.argmax(nonpos))
        rep.positive_weights = False
        rep.witness.setdefault("positive_weights", (int(owner[j]), int(g.indices[j])))
    if not _connected(g.indptr, g.indices, g.n):
        rep.connected = False
        rep.witness.setdefault("connected", "BFS from 0 misses vertices")
    return rep


# ----------------------------------------------------------------------------
# Families
# ----------------------------------------------------------------------------

def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise InvalidParameters("cycle needs n >= 3")
    return graph_from_edges(n, [(i, (i + 1) % n) for i in range(n)],
                            meta={"family": "cycle"})


def path_graph(n: int) -> Graph:
    if n < 2:
        raise InvalidParameters("path needs n >= 2")
    return graph_from_edges(n, [(i, i + 1) for i in range(n - 1)],
                            meta={"family": "path"})


def complete_graph(n: int) -> Graph:
    if n < 2:
        raise InvalidParameters("complete graph needs n >= 2")
    return graph_from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)],
                            meta={"family": "complete"})


def star_graph(n: int) -> Graph:
    if n < 2:
        raise InvalidParameters("star needs n >= 2")
    return graph_from_edges(n, [(0, i) for i in range(1, n)],
                            meta={"family": "star"})


def kary_tree_graph(k: int, depth: int) -> Graph:
    """Complete k-ary tree of the given depth (root at 0, level order ids)."""
    if k < 2:
        raise InvalidParameters("kary_tree needs k >= 2")
    if depth < 1:
        raise InvalidParameters("kary_tree needs depth >= 1")
    n = (k ** (depth + 1) - 1) // (k - 1)
    n_internal = (k ** depth - 1) // (k - 1)
    edges = [(v, k * v + c) for v in range(n_internal) for c in range(1, k + 1)]
    return graph_from_edges(n, edges, meta={"family": "kary_tree", "k": k,
                                            "depth": depth})


def hypercube_graph(d: int) -> Graph:
    if d < 1:
        raise InvalidParameters("hypercube needs d >= 1")
    n = 1 << d
    edges = [(v, v ^ (1 << b)) for v in range(n) for b in range(d) if v < v ^ (1 << b)]
    return graph_from_edges(n, edges, meta={"family": "hypercube", "d": d})


def torus_graph(dims: Sequence[int]) -> Graph:
    """d-dimensional torus, row-major ids; every side length must be >= 3."""
    dims = tuple(int(L) for L in dims)
    if len(dims) < 1 or any(L < 3 for L in dims):
        raise InvalidParameters("torus needs side lengths >= 3")
    n = int(np.prod(dims))
    strides = np.ones(len(dims), dtype=np.int64)
    for i in range(len(dims) - 2, -1, -1):
        strides[i] = strides[i + 1] * dims[i + 1]
    edges = []
    for v in range(n):
        coords = [(v // strides[i]) % dims[i] for i in range(len(dims))]
        for i in range(len(dims)):
            w = v + int(strides[i]) * ((coords[i] + 1) % dims[i] - coords[i])
            edges.append((min(v, w), max(v, w)))
    return graph_from_edges(n, set(edges), meta={"family": "torus", "dims": dims})


def lollipop_graph(n: int) -> Graph:
    """Clique on n/2 vertices joined to a path with n/2 vertices."""
    if n < 6 or n % 2:
        raise InvalidParameters("lollipop needs even n >= 6")
    h = n // 2
    edges = [(i, j) for i in range(h) for j in range(i + 1, h)]
    edges += [(i, i + 1) for i in range(h - 1, n - 1)]
    return graph_from_edges(n, edges, meta={"family": "lollipop"})


def _pair_stubs(n: int, d: int, rng: np.random.Generator):
    """One configuration-model attempt: pair stubs, requeueing the stubs of
    rejected pairs (loops / multi-edges) as in the NetworkX sampler. Returns
    an edge set or None when the leftover stubs cannot be completed."""
    edges: set[tuple[int, int]] = set()
    stubs = list(np.repeat(np.arange(n), d))
    while stubs:
        rng.shuffle(stubs)
        leftover: list[int] = []
        it = iter(stubs)
        for s1, s2 in zip(it, it):
            if s1 > s2:
                s1, s2 = s2, s1
            if s1 != s2 and (s1, s2) not in edges:
                edges.add((int(s1), int(s2)))
            else:
                leftover.append(s1)
                leftover.append(s2)
        if leftover:
            distinct = sorted(set(leftover))
            completable = any(
                (min(a, b), max(a, b)) not in edges
                for i, a in enumerate(distinct) for b in distinct[i + 1:] if a != b)
            if not completable:
                return None
        stubs = leftover
    return edges


def random_regular_graph(n: int, d: int, seed: int, max_attempts: int = 1000) -> Graph:
    """Random d-regular simple connected graph via the configuration model.

    Pairs that would form loops or multi-edges are rejected and their stubs
    re-paired; stuck or disconnected samples restart with a fresh sub-seed,
    up to max_attempts.
    """
    if n * d % 2 or not 0 < d < n:
        raise InvalidParameters(f"random_regular({n},{d}) is not realizable")
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        edges = _pair_stubs(n, d, rng)
        if edges is None:
            continue
        g = graph_from_edges(n, edges,
                             meta={"family": "random_regular", "d": d,
                                   "seed": seed}, check=False)
        if _connected(g.indptr, g.indices, n):
            return g
    raise InvalidParameters(
        f"no connected simple {d}-regular sample found in {max_attempts} attempts")


def _regular_bipartite_partners(n: int, d: int, rng: np.random.Generator,
                                max_rounds: int = 10_000) -> np.ndarray:
    """(n, d) partner table: row i lists the d distinct partners of left-vertex i.

    Equivalent to a union of d pairwise-disjoint perfect matchings; built from
    d random permutations with swap repair of duplicate pairs.
    """
    partners = np.empty((n, d), dtype=np.int64)
    for c in range(d):
        partners[:, c] = rng.permutation(n)
    for _ in range(max_rounds):
        dup = None
        for i in range(n):
            row = partners[i]
            if len(np.unique(row)) != d:
                vals, counts = np.unique(row, return_counts=True)
                bad = vals[counts > 1][0]
                col = int(np.where(row == bad)[0][1])
                dup = (i, col)
                break
        if dup is None:
            return partners
        i, col = dup
        j = int(rng.integers(n))
        partners[i, col], partners[j, col] = partners[j, col], partners[i, col]
    raise InvalidParameters("could not repair bipartite matchings")


def tree_anchored_expander_graph(d: int, levels: int, seed: int) -> Graph:
    """Tree of full (d, d-1)-ary levels whose leaves attach to a random
    d-regular expander by d disjoint matchings.

    Tree: root has d children, internal nodes d-1 children, `levels` levels
    below the root; all leaves sit on the last level. The expander part has
    exactly one vertex per leaf. Tree ids come first (level order), expander
    ids after.
    """
    if d < 10 or d % 2:
        raise InvalidParameters("tree_anchored_expander needs even d >= 10")
    if levels < 2:
        # one level would need a d-regular expander on d vertices
        raise InvalidParameters("tree_anchored_expander needs levels >= 2")
    level_sizes = [1] + [d * (d - 1) ** (i - 1) for i in range(1, levels + 1)]
    n_tree = sum(level_sizes)
    n_leaves = level_sizes[-1]
    rng = np.random.default_rng(seed)

    edges = []
    level_start = [0]
    for s in level_sizes[:-1]:
        level_start.append(level_start[-1] + s)
    nxt = 1
    parents_of_level = [0]
    for lev in range(1, levels + 1):
        children = list(range(nxt, nxt + level_sizes[lev]))
        per_parent = d if lev == 1 else d - 1
        for idx, c in enumerate(children):
            edges.append((parents_of_level[idx // per_parent], c))
        parents_of_level = children
        nxt += level_sizes[lev]
    leaves = parents_of_level

    ex = random_regular_graph(n_leaves, d, seed=seed + 1)
    ex_offset = n_tree
    for u, v, _ in ex.edges():
        edges.append((u + ex_offset, v + ex_offset))
    partners = _regular_bipartite_partners(n_leaves, d, rng)
    for i, leaf in enumerate(leaves):
        for c in range(d):
            edges.append((leaf, ex_offset + int(partners[i, c])))
    return graph_from_edges(n_tree + n_leaves, edges,
                            meta={"family": "tree_anchored_expander", "d": d,
                                  "levels": levels, "seed": seed,
                                  "n_tree": n_tree, "n_leaves": n_leaves,
                                  "leaves": tuple(leaves)})


def random_connected_graph(n: int, p: float, seed: int,
                           max_attempts: int = 200) -> Graph:
    """Erdos-Renyi G(n, p) conditioned on connectivity (retries with sub-seeds)."""
    if n < 2:
        raise InvalidParameters("need n >= 2")
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        mask = rng.random((n, n)) < p
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if mask[i, j]]
        if len(edges) < n - 1:
            continue
        g = graph_from_edges(n, edges, meta={"family": "random"}, check=False)
        if _connected(g.indptr, g.indices, n):
            return g
    raise InvalidParameters(f"no connected G({n},{p}) sample in {max_attempts} tries")


def build_family(family: FamilyId) -> Graph:
    """Construct the graph named by a FamilyId (see class doc for params)."""
    tag, p = family.tag, tuple(family.params)
    if tag not in FAMILY_TAGS:
        raise InvalidParameters(f"unknown family tag {tag!r}")
    try:
        if tag == "cycle":
            return cycle_graph(*p)
        if tag == "path":
            return path_graph(*p)
        if tag == "complete":
            return complete_graph(*p)
        if tag == "star":
            return star_graph(*p)
        if tag == "kary_tree":
            return kary_tree_graph(*p)
        if tag == "hypercube":
            return hypercube_graph(*p)
        if tag == "torus":
            return torus_graph(p)
        if tag == "lollipop":
            return lollipop_graph(*p)
        if tag == "random_regular":
            return random_regular_graph(*p)
        if tag == "tree_anchored_expander":
            return tree_anchored_expander_graph(*p)
    except TypeError as exc:
        raise InvalidParameters(f"bad parameters {p} for family {tag}: {exc}") from exc
    raise AssertionError("unreachable")


# ----------------------------------------------------------------------------
# Serialization: "n m" header then "u v w" lines, ids 0-based, sorted
# ----------------------------------------------------------------------------

def edge_list_text(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{u} {v} {w}" for u, v, w in g.edges()]
    return "\n".join(lines) + "\n"


def graph_from_edge_list_text(text: str) -> Graph:
    rows = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    if not rows:
        raise InvalidParameters("empty edge list")
    n, m = int(rows[0][0]), int(rows[0][1])
    if len(rows) - 1 != m:
        raise InvalidParameters(f"header says {m} edges, found {len(rows) - 1}")
    edges, weights = [], {}
    for u_, v_, w_ in rows[1:]:
        u, v, w = int(u_), int(v_), int(w_)
        edges.append((u, v))
        weights[(u, v)] = w
    return graph_from_edges(n, edges, weights)


def write_edge_list(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(edge_list_text(g))


def read_edge_list(path) -> Graph:
    with open(path) as fh:
        return graph_from_edge_list_text(fh.read())
