import itertools
import math

import numpy as np
import pytest

import rotorlab as rl
from rotorlab import adversary, analytics, rotor
from rotorlab.errors import EvenSide, GraphTooSmall, WrongFamily


ALL_BUILDERS = [
    ("euler_avoid", rl.complete_graph(6)),
    ("cycle_inward", rl.cycle_graph(7)),
    ("cycle_inward", rl.path_graph(6)),
    ("tree_mixed", rl.kary_tree_graph(2, 3)),
    ("lollipop", rl.lollipop_graph(10)),
    ("torus_origin", rl.torus_graph((5, 5))),
    ("hypercube_lex", rl.hypercube_graph(3)),
    ("expander_tree", rl.tree_anchored_expander_graph(10, 2, seed=4)),
]


@pytest.mark.parametrize("name,g", ALL_BUILDERS,
                         ids=[f"{n}-{g.meta.get('family')}" for n, g in ALL_BUILDERS])
def test_builders_produce_valid_unit_configs(name, g):
    config, start = adversary.BUILDERS[name](g)
    chain = analytics.build_chain(g)
    report = rotor.validate_config(g, config, chain=chain)
    assert report.ok, report.problems
    assert config.kappa(g) == 1.0
    assert 0 <= start < g.n


# ---------------------------------------------------------------------------
# cycle / path
# ---------------------------------------------------------------------------

def test_cycle_inward_exact_counts():
    for n in (3, 5, 7, 21):
        g = rl.cycle_graph(n)
        config, start = adversary.cycle_inward_config(g)
        steps, _ = rotor.run_until_vertex_cover(g, config, start)
        assert steps == (n - 1) * n // 2


def test_cycle_inward_rejects_even_cycle_and_other_families():
    with pytest.raises(WrongFamily):
        adversary.cycle_inward_config(rl.cycle_graph(6))
    with pytest.raises(WrongFamily):
        adversary.cycle_inward_config(rl.complete_graph(5))


def _path_cover_steps(n, orders, pointers, start):
    g = rl.path_graph(n)
    seqs = [[1]]
    for u in range(1, n - 1):
        seqs.append(list(orders[u - 1]))
    seqs.append([n - 2])
    ptrs = np.zeros(n, dtype=np.int64)
    ptrs[1:n - 1] = pointers
    config = adversary._config_from_lists(seqs, ptrs)
    steps, _ = rotor.run_until_vertex_cover(g, config, start)
    return steps


@pytest.mark.parametrize("n", [3, 4, 5])
def test_path_construction_is_worst_case(n):
    # brute-force oracle: enumerate every rotor order, pointer, and start
    worst = 0
    for orders in itertools.product(*[[(u - 1, u + 1), (u + 1, u - 1)]
                                      for u in range(1, n - 1)]):
        for pointers in itertools.product(*[[0, 1]] * (n - 2)):
            for start in range(n):
                worst = max(worst, _path_cover_steps(n, orders, pointers, start))
    assert worst == (n - 1) ** 2
    g = rl.path_graph(n)
    config, start = adversary.cycle_inward_config(g)
    steps, _ = rotor.run_until_vertex_cover(g, config, start)
    assert steps == worst


# ---------------------------------------------------------------------------
# euler avoidance
# ---------------------------------------------------------------------------

def test_euler_avoid_k4():
    g = rl.complete_graph(4)
    config, start = adversary.euler_avoid_config(g)
    steps, state = rotor.run_until_vertex_cover(g, config, start)
    assert steps >= g.m - g.min_degree
    # the walk reaches the avoided vertex only after the full directed tour
    assert steps == 2 * (g.m - g.min_degree) + 1


def test_euler_avoid_traverses_whole_tour_first():
    g = rl.random_connected_graph(12, 0.5, seed=11)
    config, start = adversary.euler_avoid_config(g)
    # the avoided vertex is the last first-visited one
    steps, state = rotor.run_until_vertex_cover(g, config, start)
    w = int(np.argmax(state.first_visit))
    tour_len = 2 * (g.m - g.degree(w))
    assert state.first_visit[w] == steps == tour_len + 1
    # every directed edge away from w was seen before w
    mask = np.ones(len(g.indices), dtype=bool)
    for j in range(len(g.indices)):
        u = int(np.searchsorted(g.indptr, j, side="right")) - 1
        if u == w or g.indices[j] == w:
            mask[j] = False
    assert int(state.dir_seen[mask].sum()) == mask.sum()


def test_euler_avoid_star_leaf():
    n = 7
    g = rl.star_graph(n)
    config, start = adversary.euler_avoid_config(g)   # min degree = a leaf
    steps, _ = rotor.run_until_vertex_cover(g, config, start)
    assert steps >= (n - 1) - 1


def test_euler_avoid_triangle():
    g = rl.cycle_graph(3)
    config, start = adversary.euler_avoid_config(g)
    steps, _ = rotor.run_until_vertex_cover(g, config, start)
    assert steps >= 1


def test_euler_avoid_too_small():
    with pytest.raises(GraphTooSmall):
        adversary.euler_avoid_config(rl.path_graph(2))


# ---------------------------------------------------------------------------
# trees
# ---------------------------------------------------------------------------

def test_tree_mixed_beats_canonical():
    g = rl.kary_tree_graph(2, 3)
    mixed, start = adversary.tree_mixed_config(g)
    mixed_steps, _ = rotor.run_until_vertex_cover(g, mixed, start)
    canon_steps, _ = rotor.run_until_vertex_cover(g, rl.canonical_config(g), 0)
    assert mixed_steps > canon_steps
    assert mixed_steps > 4 * g.n


def test_tree_mixed_nlogn_band():
    ratios = []
    for depth in range(4, 11):
        g = rl.kary_tree_graph(2, depth)
        config, start = adversary.tree_mixed_config(g)
        steps, _ = rotor.run_until_vertex_cover(g, config, start)
        ratios.append(steps / (g.n * math.log2(g.n)))
    assert max(ratios) / min(ratios) < 3


def test_tree_mixed_depth1_degenerate():
    k = 5
    g = rl.kary_tree_graph(k, 1)
    config, start = adversary.tree_mixed_config(g)
    steps, _ = rotor.run_until_vertex_cover(g, config, start)
    assert steps <= 2 * (k + 1)


def test_tree_mixed_wrong_family():
    with pytest.raises(WrongFamily):
        adversary.tree_mixed_config(rl.complete_graph(6))


# ---------------------------------------------------------------------------
# lollipop
# ---------------------------------------------------------------------------

def test_lollipop_exceeds_tour_plus_path():
    g = rl.lollipop_graph(8)
    config, start = adversary.lollipop_config(g)
    steps, _ = rotor.run_until_vertex_cover(g, config, start)
    assert steps > (g.m - g.min_degree) + (g.n // 2) ** 2


def test_lollipop_tours_clique_before_path():
    g = rl.lollipop_graph(12)
    h = g.n // 2
    config, start = adversary.lollipop_config(g)
    steps, state = rotor.run_until_vertex_cover(g, config, start)
    first_path_visit = int(state.first_visit[h:].min())
    assert first_path_visit > h * (h - 1)  # full directed clique tour first


def test_lollipop_wrong_family():
    with pytest.raises(WrongFamily):
        adversary.lollipop_config(rl.complete_graph(8))


# ---------------------------------------------------------------------------
# torus
# ---------------------------------------------------------------------------

def test_torus_origin_exact_small():
    for side, expected in ((3, 16), (5, 80), (7, 224)):
        g = rl.torus_graph((side, side))
        config, start = adversary.torus_origin_config(g)
        steps, _ = rotor.run_until_vertex_cover(g, config, start)
        assert steps == expected


def test_torus_origin_rotors_point_at_origin_ring1():
    g = rl.torus_graph((5, 5))
    config, _ = adversary.torus_origin_config(g)
    origin = 0
    for x, y in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        v = adversary.torus_vertex(5, x, y)
        first = config.sequence(v)[config.pointers[v]]
        assert first == origin


def test_torus_origin_rejections():
    with pytest.raises(WrongFamily):
        adversary.torus_origin_config(rl.torus_graph((3, 5)))
    with pytest.raises(EvenSide):
        adversary.torus_origin_config(rl.torus_graph((4, 4)))
    with pytest.raises(WrongFamily):
        adversary.torus_origin_config(rl.torus_graph((3, 3, 3)))


# ---------------------------------------------------------------------------
# hypercube
# ---------------------------------------------------------------------------

def test_hypercube_lex_first_visit_positions():
    for d in (1, 2, 3, 5):
        g = rl.hypercube_graph(d)
        config, start = adversary.hypercube_lex_config(g)
        state = rotor.WalkState.begin(g, config, start)
        rotor.run_steps(g, state, rotor.default_cap(g), rotor.STOP_VERTEX_COVER)
        positions = int(state.first_visit[(1 << d) - 1]) + 1
        assert positions == d + 1 + d * (d - 1) * (1 << (d - 1))


def test_hypercube_lex_golden_prefix_d5():
    # first sixty walk positions of the lex walk on the 5-cube
    expected = [0, 1, 0, 2, 0, 4, 0, 8, 0, 16,
                0, 1, 3, 1, 5, 1, 9, 1, 17, 1,
                0, 2, 3, 2, 6, 2, 10, 2, 18, 2,
                0, 4, 5, 4, 6, 4, 12, 4, 20, 4,
                0, 8, 9, 8, 10, 8, 12, 8, 24, 8,
                0, 16, 17, 16, 18, 16, 20, 16, 24, 16]
    g = rl.hypercube_graph(5)
    config, start = adversary.hypercube_lex_config(g)
    _, trace = rotor.run_recorded(g, config, start, 60)
    assert [int(x) for x in trace.vertices(start)[:60]] == expected


def test_hypercube_lex_wrong_family():
    with pytest.raises(WrongFamily):
        adversary.hypercube_lex_config(rl.cycle_graph(8))


# ---------------------------------------------------------------------------
# expander
# ---------------------------------------------------------------------------

def test_expander_tree_tours_expander_first():
    g = rl.tree_anchored_expander_graph(10, 2, seed=5)
    config, start = adversary.expander_tree_config(g)
    n_tree = g.meta["n_tree"]
    n_leaves = g.meta["n_leaves"]
    steps, state = rotor.run_until_vertex_cover(g, config, start)
    tree_first = int(state.first_visit[:n_tree].min())
    assert tree_first >= n_leaves * 10  # directed Euler length of the expander
    assert tree_first == n_leaves * 10 + 1


def test_expander_tree_minimum_levels():
    with pytest.raises(rl.InvalidParameters):
        rl.tree_anchored_expander_graph(10, 1, seed=4)


def test_expander_tree_needs_metadata():
    with pytest.raises(WrongFamily):
        adversary.expander_tree_config(rl.complete_graph(8))


# ---------------------------------------------------------------------------
# random configurations
# ---------------------------------------------------------------------------

def test_random_config_deterministic_in_seed():
    g = rl.cycle_graph(7)
    a = adversary.random_config(g, 123)
    b = adversary.random_config(g, 123)
    assert np.array_equal(a.seq_targets, b.seq_targets)
    assert np.array_equal(a.pointers, b.pointers)
    c = adversary.random_config(g, 124)
    assert not (np.array_equal(a.seq_targets, c.seq_targets)
                and np.array_equal(a.pointers, c.pointers))


def test_random_config_cycle_cover_bounds():
    n = 5
    g = rl.cycle_graph(n)
    for seed in range(100):
        config = adversary.random_config(g, seed)
        steps, _ = rotor.run_until_vertex_cover(g, config, 0)
        assert n - 1 <= steps <= rotor.default_cap(g)


def test_random_config_walks_satisfy_invariants():
    g = rl.random_connected_graph(10, 0.5, seed=1)
    for seed in range(20):
        config = adversary.random_config(g, seed)
        state, trace = rotor.run_recorded(g, config, 0, 500)
        assert rotor.check_balance(state)[0]
        assert rotor.check_edge_interleaving(trace.directed_slots(g))[0]


def test_euler_exit_orders_deterministic_lex():
    out_lists = [[1, 2], [0, 2], [0, 1]]
    path1, exits1 = adversary.euler_exit_orders([list(l) for l in out_lists], 0)
    path2, exits2 = adversary.euler_exit_orders([list(l) for l in out_lists], 0)
    assert path1 == path2 and exits1 == exits2
    assert path1[0] == path1[-1] == 0
    assert len(path1) == 7  # six directed edges + closing vertex
