"""Markov-chain quantities behind the cover-time upper bounds: transition
matrices, hitting times, the concentration functional K(v), local divergence,
second eigenvalues, electrical flows, bound evaluators, and a Monte Carlo
random-walk baseline.

Dense linear algebra throughout; intended for analysis at desk scale
(n up to a few thousand), while pure simulation scales far beyond.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .backend import kernels
from .errors import (DimensionMismatch, InvalidParameters, NonConvergent,
                     SingularSystem)
from .graphs import Graph

__all__ = [
    "Chain",
    "build_chain",
    "hitting_times",
    "return_times",
    "fundamental_matrix",
    "k_functional",
    "triple_identity_residual",
    "local_divergence",
    "local_divergence_all",
    "lambda2",
    "FlowResult",
    "electrical_flow",
    "flow_conservation_residual",
    "ChainAnalytics",
    "analyze_chain",
    "BoundReport",
    "bound_evaluators",
    "MCResult",
    "mc_random_walk",
    "mc_hitting_time",
    "save_matrix",
]

ROW_SUM_TOL = 1e-12
STATIONARY_TOL = 1e-10


@dataclass(frozen=True)
class Chain:
    """Row-stochastic transition matrix with its stationary vector.

    kind "plain": P[u,v] = c(u,v)/c(u) from the graph weights.
    kind "lazy": the symmetric walk, P[u,v] = 1/(Delta+1) on edges with the
    complementary self-loop mass; stationary vector uniform.
    """

    graph: Graph
    P: np.ndarray
    pi: np.ndarray
    kind: str

    @property
    def n(self) -> int:
        return len(self.pi)

    @property
    def c_max(self) -> int:
        if self.kind == "plain":
            return int(self.graph.weights.max())
        return int(self.graph.max_degree + 1 - self.graph.min_degree)


def build_chain(g: Graph, lazy: bool = False) -> Chain:
    """Plain chain of the weighted graph, or its lazy symmetric variant."""
    n = g.n
    P = np.zeros((n, n))
    if lazy:
        if np.any(g.weights != 1):
            raise InvalidParameters("lazy symmetric chain requires unit weights")
        dmax = g.max_degree
        for u in range(n):
            P[u, g.neighbors(u)] = 1.0 / (dmax + 1)
            P[u, u] = 1.0 - g.degree(u) / (dmax + 1)
        pi = np.full(n, 1.0 / n)
        kind = "lazy"
    else:
        c = np.zeros(n)
        for u in range(n):
            lo, hi = g.indptr[u], g.indptr[u + 1]
            c[u] = g.weights[lo:hi].sum()
            P[u, g.indices[lo:hi]] = g.weights[lo:hi] / c[u]
        pi = c / c.sum()
        kind = "plain"
    assert np.all(np.abs(P.sum(axis=1) - 1.0) < ROW_SUM_TOL)
    assert np.max(np.abs(pi @ P - pi)) < STATIONARY_TOL
    return Chain(graph=g, P=P, pi=pi, kind=kind)


def hitting_times(chain: Chain) -> np.ndarray:
    """H[u,v] = expected steps from u to first reach v (H[v,v] = 0).

    One dense solve per target: (I - P restricted to V minus {v}) h = 1.
    """
    n = chain.n
    P = chain.P
    H = np.zeros((n, n))
    idx = np.arange(n)
    for v in range(n):
        keep = idx != v
        A = np.eye(n - 1) - P[np.ix_(keep, keep)]
        try:
            h = np.linalg.solve(A, np.ones(n - 1))
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(f"hitting-time system singular for target {v}") from exc
        H[keep, v] = h
    return H


def return_times(chain: Chain) -> np.ndarray:
    """Expected return times 1/pi_v (the H(v,v) variant)."""
    return 1.0 / chain.pi


def fundamental_matrix(chain: Chain) -> np.ndarray:
    """Z with Z[i,j] = sum_t (P^t_ij - pi_j), via inv(I - P + 1 pi^T) - 1 pi^T.

    Algebraically equal to the Cesaro value for periodic chains, so no
    aperiodicity is needed.
    """
    n = chain.n
    one_pi = np.outer(np.ones(n), chain.pi)
    try:
        M = np.linalg.inv(np.eye(n) - chain.P + one_pi)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem("fundamental matrix inversion failed") from exc
    return M - one_pi


def k_functional(chain: Chain, d_tilde: np.ndarray,
                 H: np.ndarray | None = None) -> np.ndarray:
    """The concentration functional

        K(v) = max_u H(u,v) + (1/2) ( d(v)/pi_v
               + sum_{i,j} d(i) P_ij |H(i,v) - H(j,v) - 1| )

    where d is the rotor sequence length vector (must satisfy the
    multiplicity rule for the chain).
    """
    d_tilde = np.asarray(d_tilde, dtype=np.int64)
    if len(d_tilde) != chain.n:
        raise DimensionMismatch("d_tilde length != n")
    if H is None:
        H = hitting_times(chain)
    W = d_tilde[:, None] * chain.P
    K = np.empty(chain.n)
    for v in range(chain.n):
        h = H[:, v]
        spread = np.abs(h[:, None] - h[None, :] - 1.0)
        K[v] = h.max() + 0.5 * (d_tilde[v] / chain.pi[v] + (W * spread).sum())
    return K


def triple_identity_residual(chain: Chain, i: int, j: int, v: int,
                             H: np.ndarray | None = None,
                             Z: np.ndarray | None = None) -> float:
    """| sum_t (P^t_iv - P^t_jv)  -  pi_v (H(j,v) - H(i,v)) |.

    The series is evaluated through the fundamental matrix (Z_iv - Z_jv); the
    hitting times come from the independent per-target solves.
    """
    if H is None:
        H = hitting_times(chain)
    if Z is None:
        Z = fundamental_matrix(chain)
    series = Z[i, v] - Z[j, v]
    return float(abs(series - chain.pi[v] * (H[j, v] - H[i, v])))


def _edge_endpoints(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    eu = np.empty(g.m, dtype=np.int64)
    ev = np.empty(g.m, dtype=np.int64)
    for k, (u, v, _) in enumerate(g.edges()):
        eu[k] = u
        ev[k] = v
    return eu, ev


def local_divergence(chain: Chain, v: int, tol: float = 1e-9,
                     max_terms: int = 2_000_000, cesaro: bool = False) -> float:
    """Psi(P, v) = sum_t sum_{edges {i,j}} |P^t_iv - P^t_jv|.

    Iterates the v-column of P^t; stops when the per-step increment and the
    spectral tail bound both drop below tol. Periodic chains diverge unless
    ``cesaro`` is set, which averages consecutive step distributions
    (experimental; see module notes).
    """
    g = chain.graph
    eu, ev = _edge_endpoints(g)
    lam = lambda2(chain)
    if lam >= 1.0 - 1e-12 and not cesaro:
        raise NonConvergent("chain is (nearly) periodic; use a lazy chain or cesaro")
    pi = chain.pi
    sqrt_pi = np.sqrt(pi)
    inv_norm = math.sqrt(float((1.0 / pi).sum()))
    dmax = g.max_degree
    q = np.zeros(chain.n)
    q[v] = 1.0
    psi = 0.0
    target = pi[v]
    prev = q
    for t in range(max_terms):
        # cesaro mode smooths the period-2 oscillation of bipartite chains
        ref = 0.5 * (prev + q) if (cesaro and t > 0) else q
        inc = float(np.abs(ref[eu] - ref[ev]).sum())
        psi += inc
        dev = ref - target
        wnorm = float(np.sqrt(((sqrt_pi * dev) ** 2).sum()))
        if lam < 1.0 - 1e-15:
            tail = dmax * inv_norm * wnorm * lam / (1.0 - lam)
        else:
            tail = math.inf
        if inc < tol and (tail < tol or (cesaro and wnorm < tol)):
            return psi
        prev = q
        q = chain.P @ q
    raise NonConvergent(f"divergence series did not settle in {max_terms} terms")


def local_divergence_all(chain: Chain, tol: float = 1e-9,
                         cesaro: bool = False) -> np.ndarray:
    return np.array([local_divergence(chain, v, tol=tol, cesaro=cesaro)
                     for v in range(chain.n)])


def lambda2(chain: Chain, signed: bool = False) -> float:
    """Second-largest eigenvalue of P, in absolute value by default.

    ``signed=True`` returns the second-largest signed eigenvalue instead
    (for bipartite plain chains the absolute version is 1).
    """
    pi = chain.pi
    s = np.sqrt(pi)
    S = (s[:, None] * chain.P) / s[None, :]
    if np.max(np.abs(S - S.T)) > 1e-8:
        raise InvalidParameters("chain is not reversible")
    w = scipy.linalg.eigvalsh((S + S.T) / 2)
    if signed:
        return float(w[-2])
    rest = np.delete(w, len(w) - 1)  # drop the principal eigenvalue (== 1)
    return float(np.abs(rest).max())


@dataclass(frozen=True)
class FlowResult:
    """Unit-demand electrical flow from a source: the l2-minimal flow."""

    source: int
    potentials: np.ndarray
    edge_u: np.ndarray
    edge_v: np.ndarray
    flow: np.ndarray

    @property
    def total_abs(self) -> float:
        return float(np.abs(self.flow).sum())

    def value(self, u: int, v: int) -> float:
        """Signed flow across edge {u,v} in the u -> v direction."""
        for k in range(len(self.flow)):
            if self.edge_u[k] == u and self.edge_v[k] == v:
                return float(self.flow[k])
            if self.edge_u[k] == v and self.edge_v[k] == u:
                return float(-self.flow[k])
        raise InvalidParameters(f"({u},{v}) is not an edge")


def electrical_flow(g: Graph, s: int) -> FlowResult:
    """Solve L phi = b with b_s = n-1 and b_v = -1 elsewhere (phi grounded
    at s); the edge flows phi_i - phi_j scaled by conductance minimize the
    squared-flow energy among unit-demand flows from s."""
    n = g.n
    L = np.zeros((n, n))
    for u in range(n):
        lo, hi = g.indptr[u], g.indptr[u + 1]
        L[u, g.indices[lo:hi]] = -g.weights[lo:hi]
        L[u, u] = g.weights[lo:hi].sum()
    b = np.full(n, -1.0)
    b[s] = n - 1
    keep = np.arange(n) != s
    phi = np.zeros(n)
    try:
        phi[keep] = np.linalg.solve(L[np.ix_(keep, keep)], b[keep])
    except np.linalg.LinAlgError as exc:
        raise SingularSystem("Laplacian solve failed (disconnected?)") from exc
    phi -= phi[s]
    eu, ev = _edge_endpoints(g)
    w = np.array([g.weight(int(a), int(b_)) for a, b_ in zip(eu, ev)], dtype=float)
    flow = (phi[eu] - phi[ev]) * w
    return FlowResult(source=s, potentials=phi, edge_u=eu, edge_v=ev, flow=flow)


def flow_conservation_residual(g: Graph, result: FlowResult) -> float:
    """Max |net outflow - demand| over vertices; ~0 for a correct solve."""
    net = np.zeros(g.n)
    np.add.at(net, result.edge_u, result.flow)
    np.add.at(net, result.edge_v, -result.flow)
    b = np.full(g.n, -1.0)
    b[result.source] = g.n - 1
    return float(np.abs(net - b).max())


@dataclass
class ChainAnalytics:
    """Bundle of the per-chain quantities used by checks and reports."""

    chain: Chain
    d_tilde: np.ndarray
    H: np.ndarray
    K: np.ndarray
    lambda2_abs: float
    psi_per_vertex: np.ndarray | None = None

    @property
    def max_k(self) -> float:
        return float(self.K.max())

    @property
    def psi(self) -> float | None:
        if self.psi_per_vertex is None:
            return None
        return float(self.psi_per_vertex.max())


def analyze_chain(g: Graph, lazy: bool = False,
                  d_tilde: np.ndarray | None = None,
                  with_divergence: bool = False,
                  divergence_tol: float = 1e-9) -> ChainAnalytics:
    """Hitting times, K vector and lambda2 for the plain or lazy chain.

    ``d_tilde`` defaults to the canonical sequence lengths: deg(u) for the
    plain chain, Delta+1 for the lazy one.
    """
    chain = build_chain(g, lazy=lazy)
    if d_tilde is None:
        if lazy:
            d_tilde = np.full(g.n, g.max_degree + 1, dtype=np.int64)
        else:
            d_tilde = g.degrees.astype(np.int64)
    H = hitting_times(chain)
    K = k_functional(chain, d_tilde, H=H)
    lam = lambda2(chain)
    psi = None
    if with_divergence:
        psi = local_divergence_all(chain, tol=divergence_tol)
    return ChainAnalytics(chain=chain, d_tilde=np.asarray(d_tilde, dtype=np.int64),
                          H=H, K=K, lambda2_abs=lam, psi_per_vertex=psi)


@dataclass
class BoundReport:
    """Concrete values of the named cover-time bounds for one instance.

    Bounds whose statements hide unspecified constants are reported as raw
    component sums (constants taken as 1) and are not asserted anywhere.
    """

    n: int
    m: int
    delta: int
    Delta: int
    kappa: float
    c_max: int
    kind: str
    max_hitting: float
    k_per_vertex: list[float]
    max_k: float
    hit_bound: float          # max_v K(v) + 1
    vertex_cover_bound: float  # max_v K(v) + 1
    edge_cover_bound: float   # 3 max_v K(v)
    lambda2: float
    psi_per_vertex: list[float] | None = None
    psi: float | None = None
    divergence_k_bound: float | None = None
    sym_divergence_k_bound: float | None = None
    expansion_ec_bound: float | None = None
    flow_total_max: float | None = None
    flow_ec_bound: float | None = None

    def to_dict(self) -> dict:
        return {
            "n": self.n, "m": self.m, "delta": self.delta, "Delta": self.Delta,
            "kappa": self.kappa, "c_max": self.c_max, "kind": self.kind,
            "max_hitting": self.max_hitting,
            "k_per_vertex": self.k_per_vertex, "max_k": self.max_k,
            "hit_bound": self.hit_bound,
            "vertex_cover_bound": self.vertex_cover_bound,
            "edge_cover_bound": self.edge_cover_bound,
            "lambda2": self.lambda2,
            "psi_per_vertex": self.psi_per_vertex, "psi": self.psi,
            "divergence_k_bound": self.divergence_k_bound,
            "sym_divergence_k_bound": self.sym_divergence_k_bound,
            "expansion_ec_bound": self.expansion_ec_bound,
            "flow_total_max": self.flow_total_max,
            "flow_ec_bound": self.flow_ec_bound,
        }


def bound_evaluators(g: Graph, chain: Chain | None = None,
                     d_tilde: np.ndarray | None = None,
                     with_divergence: bool = True,
                     with_flow: bool = True,
                     divergence_tol: float = 1e-9) -> BoundReport:
    """Evaluate every named bound as a concrete number for one instance."""
    if chain is None:
        chain = build_chain(g)
    lazy = chain.kind == "lazy"
    if d_tilde is None:
        d_tilde = (np.full(g.n, g.max_degree + 1, dtype=np.int64) if lazy
                   else g.degrees.astype(np.int64))
    d_tilde = np.asarray(d_tilde, dtype=np.int64)
    # kappa refers to the pre-lazification sequence lengths: for a lazy walk
    # the base length is d'(u) deg(u) / (Delta+1)
    if lazy:
        base_lens = d_tilde * g.degrees // (g.max_degree + 1)
        kappa = float((base_lens / g.degrees).max())
    else:
        kappa = float((d_tilde / g.degrees).max())
    H = hitting_times(chain)
    K = k_functional(chain, d_tilde, H=H)
    max_h = float(H.max())
    max_k = float(K.max())
    lam_plain = lambda2(build_chain(g)) if lazy else lambda2(chain)
    c_max = chain.c_max

    psi_vec = None
    div_bound = None
    sym_bound = None
    if with_divergence:
        try:
            psi_vec = local_divergence_all(chain, tol=divergence_tol)
            if lazy:
                # constant-free only up to the O() of the symmetric variant:
                # reported, never asserted
                sym_per_v = H.max(axis=0) + (kappa / chain.pi) * psi_vec \
                    + g.n * g.max_degree * kappa
                sym_bound = float(sym_per_v.max())
            else:
                # hard inequality for the plain chain
                per_v = H.max(axis=0) + (kappa * c_max / chain.pi) * psi_vec \
                    + 2 * g.m * kappa * c_max
                div_bound = float(per_v.max())
        except NonConvergent:
            psi_vec = None

    expansion = None
    if lam_plain < 1.0 - 1e-12:
        gap = 1.0 - lam_plain
        ratio = g.max_degree / g.min_degree
        expansion = float(ratio * g.n / gap
                          + g.n * kappa * ratio * g.max_degree
                          * math.log2(max(g.n, 2)) / gap)

    flow_total = None
    flow_bound = None
    if with_flow:
        flow_total = max(electrical_flow(g, s).total_abs for s in range(g.n))
        flow_bound = float((g.max_degree / g.min_degree) * max_h
                           + g.max_degree * g.n * kappa
                           + kappa * g.max_degree * flow_total)

    return BoundReport(
        n=g.n, m=g.m, delta=g.min_degree, Delta=g.max_degree,
        kappa=kappa, c_max=c_max, kind=chain.kind,
        max_hitting=max_h,
        k_per_vertex=[float(x) for x in K], max_k=max_k,
        hit_bound=max_k + 1.0,
        vertex_cover_bound=max_k + 1.0,
        edge_cover_bound=3.0 * max_k,
        lambda2=float(lam_plain),
        psi_per_vertex=None if psi_vec is None else [float(x) for x in psi_vec],
        psi=None if psi_vec is None else float(psi_vec.max()),
        divergence_k_bound=div_bound,
        sym_divergence_k_bound=sym_bound,
        expansion_ec_bound=expansion,
        flow_total_max=flow_total,
        flow_ec_bound=flow_bound,
    )


@dataclass
class MCResult:
    """Monte Carlo estimate with reproducible seeding."""

    mean: float
    stderr: float
    trials: int
    failures: int
    samples: np.ndarray = field(repr=False, default=None)


def _trial_seed(seed: int, i: int) -> int:
    """Derive a per-trial stream seed; distinct base seeds share no streams."""
    return (seed * 0x9E3779B9 + i) % (1 << 62)


def mc_random_walk(g: Graph, start: int, mode: str, trials: int, seed: int,
                   cap: int | None = None) -> MCResult:
    """Mean random-walk cover time (vertex_cover or edge_cover) from start.

    Trials that exceed the cap are excluded from the mean and counted as
    failures. Trial i uses the derived stream seed + i.
    """
    if trials < 1:
        raise InvalidParameters("trials >= 1 required")
    if mode not in ("vertex_cover", "edge_cover"):
        raise InvalidParameters(f"unknown mode {mode!r}")
    if cap is None:
        cap = 64 * g.n * g.m
    stop = 1 if mode == "vertex_cover" else 2
    ker = kernels()
    samples = np.empty(trials, dtype=np.int64)
    for i in range(trials):
        samples[i] = ker.rw_cover(g.indptr, g.indices, g.edge_ids, start, stop,
                                  cap, _trial_seed(seed, i))
    ok = samples[samples >= 0]
    failures = int((samples < 0).sum())
    if len(ok) == 0:
        return MCResult(mean=math.nan, stderr=math.nan, trials=trials,
                        failures=failures, samples=samples)
    mean = float(ok.mean())
    stderr = float(ok.std(ddof=1) / math.sqrt(len(ok))) if len(ok) > 1 else 0.0
    return MCResult(mean=mean, stderr=stderr, trials=trials, failures=failures,
                    samples=samples)


def mc_hitting_time(g: Graph, u: int, v: int, trials: int, seed: int,
                    cap: int | None = None) -> MCResult:
    """Monte Carlo estimate of the expected first-passage time u -> v."""
    if cap is None:
        cap = 64 * g.n * g.m
    ker = kernels()
    samples = np.empty(trials, dtype=np.int64)
    for i in range(trials):
        samples[i] = ker.rw_hit(g.indptr, g.indices, u, v, cap, _trial_seed(seed, i))
    ok = samples[samples >= 0]
    failures = int((samples < 0).sum())
    mean = float(ok.mean()) if len(ok) else math.nan
    stderr = float(ok.std(ddof=1) / math.sqrt(len(ok))) if len(ok) > 1 else 0.0
    return MCResult(mean=mean, stderr=stderr, trials=trials, failures=failures,
                    samples=samples)


def save_matrix(path, M: np.ndarray) -> None:
    """Plain-text dense export for cross-checking in external tools."""
    np.savetxt(path, np.asarray(M), fmt="%.17g")
