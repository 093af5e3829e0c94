import numpy as np
import pytest
from hypothesis import given, strategies as st

import rotorlab as rl
from rotorlab import adversary, analytics, rotor
from rotorlab.errors import (CapExceeded, ChainMismatch, DivisibilityError,
                             InvalidParameters)


def small_walk_cases():
    return st.tuples(
        st.integers(4, 14),            # n
        st.floats(0.3, 0.9),           # p
        st.integers(0, 10_000),        # graph seed
        st.integers(0, 10_000),        # config seed
        st.integers(1, 400),           # steps
    )


def test_canonical_config_examples():
    g = rl.cycle_graph(3)
    cfg = rl.canonical_config(g)
    assert list(cfg.sequence(0)) == [1, 2]
    assert list(cfg.sequence(2)) == [0, 1]

    star = rl.star_graph(5)
    scfg = rl.canonical_config(star)
    assert list(scfg.sequence(0)) == [1, 2, 3, 4]
    assert list(scfg.sequence(3)) == [0]

    k4 = rl.complete_graph(4)
    assert list(rl.canonical_config(k4).sequence(2)) == [0, 1, 3]
    assert rl.canonical_config(k4).kappa(k4) == 1.0


def test_single_step_rotor_update():
    g = rl.cycle_graph(3)
    state = rotor.WalkState.begin(g, rl.canonical_config(g), 0)
    rotor.step(g, state)
    assert state.current == 1 and state.t == 1
    # the rotor at 0 now points at its second neighbor, vertex 2
    assert state.config.sequence(0)[state.config.pointers[0]] == 2


def test_k2_alternation_visit_counts():
    g = rl.path_graph(2)
    state = rotor.WalkState.begin(g, rl.canonical_config(g), 0)
    for t in range(1, 12):
        rotor.step(g, state)
        assert state.visits[0] == (t + 1 + 1) // 2
        assert state.counters_consistent()


def test_cycle3_six_step_unroll():
    # hand-unrolled: 0 ->1 ->0 ->2 ->0 ->1 ->2
    g = rl.cycle_graph(3)
    _, trace = rotor.run_recorded(g, rl.canonical_config(g), 0, 6)
    assert list(trace.vertices(0)) == [0, 1, 0, 2, 0, 1, 2]


def test_vertex_cover_path2():
    g = rl.path_graph(2)
    steps, state = rotor.run_until_vertex_cover(g, rl.canonical_config(g), 0)
    assert steps == 1 and state.visited_count == 2


def test_cap_exceeded_carries_state():
    g = rl.cycle_graph(9)
    cfg, start = adversary.cycle_inward_config(g)
    with pytest.raises(CapExceeded) as exc:
        rotor.run_until_vertex_cover(g, cfg, start, step_cap=5)
    assert exc.value.state.t == 5
    assert exc.value.steps == 5


def test_edge_cover_k2():
    g = rl.path_graph(2)
    steps, _ = rotor.run_until_edge_cover(g, rl.canonical_config(g), 0)
    assert steps == 1


def test_edge_cover_star4_from_center():
    # 0 ->1 ->0 ->2 ->0 ->3 : the undirected edge set is complete at step 5
    g = rl.star_graph(4)
    steps, _ = rotor.run_until_edge_cover(g, rl.canonical_config(g), 0)
    assert steps == 5


def test_edge_cover_directed_cycle():
    # all rotors oriented one way: a single loop covers all n edges
    n = 9
    g = rl.cycle_graph(n)
    seqs = [[(u + 1) % n, (u - 1) % n] for u in range(n)]
    cfg = adversary._config_from_lists(seqs)
    steps, _ = rotor.run_until_edge_cover(g, cfg, 0)
    assert steps == n


def test_cover_monotone_vertex_before_edge():
    g = rl.random_connected_graph(12, 0.4, seed=5)
    cfg = adversary.random_config(g, 17)
    ec, state = rotor.run_until_edge_cover(g, cfg, 0)
    assert int(state.first_visit.max()) <= ec


def test_lazify_star4():
    g = rl.star_graph(4)
    chain, lazy = rotor.lazify(g, rl.canonical_config(g))
    assert chain.kind == "lazy"
    assert list(lazy.sequence(0)) == [1, 2, 3, 0]
    assert list(lazy.sequence(2)) == [0, 2, 2, 2]
    assert np.all(lazy.lengths == 4)


def test_lazify_complete3():
    g = rl.complete_graph(3)
    _, lazy = rotor.lazify(g, rl.canonical_config(g))
    assert np.all(lazy.lengths == 3)
    for u in range(3):
        assert list(lazy.sequence(u)).count(u) == 1


def test_lazify_divisibility_error():
    # a sequence of length 1 on a degree-2 vertex: (Delta+1)*1 = 3 not
    # divisible by 2
    g = rl.cycle_graph(3)
    cfg = rotor.RotorConfiguration(
        seq_indptr=np.array([0, 1, 2, 3], dtype=np.int64),
        seq_targets=np.array([1, 2, 0], dtype=np.int64),
        pointers=np.zeros(3, dtype=np.int64))
    with pytest.raises(DivisibilityError):
        rotor.lazify(g, cfg)


def test_lazy_walk_loops_cover_no_edge():
    g = rl.star_graph(4)
    _, lazy = rotor.lazify(g, rl.canonical_config(g))
    state = rotor.WalkState.begin(g, lazy, 1)
    rotor.run_steps(g, state, 50)
    assert state.counters_consistent()
    assert int(state.loop_count.sum()) > 0
    assert int(state.slot_count.sum()) + int(state.loop_count.sum()) == state.t


@given(small_walk_cases())
def test_counter_conservation_random_walks(case):
    n, p, gseed, cseed, steps = case
    g = rl.random_connected_graph(n, p, gseed)
    cfg = adversary.random_config(g, cseed)
    state = rotor.WalkState.begin(g, cfg, 0)
    rotor.run_steps(g, state, steps)
    assert state.t == steps
    assert state.counters_consistent()
    covered = {(u, v) for u, v, _ in g.edges()
               if state.edge_traversals(u, v) + state.edge_traversals(v, u) > 0}
    assert covered == state.covered_edges()


@given(small_walk_cases())
def test_determinism_bit_identical_replay(case):
    n, p, gseed, cseed, steps = case
    g = rl.random_connected_graph(n, p, gseed)
    cfg = adversary.random_config(g, cseed)
    _, t1 = rotor.run_recorded(g, cfg, 0, steps)
    _, t2 = rotor.run_recorded(g, cfg, 0, steps)
    assert np.array_equal(t1.v, t2.v) and np.array_equal(t1.ridx, t2.ridx)


@given(small_walk_cases())
def test_balance_holds_on_random_walks(case):
    n, p, gseed, cseed, steps = case
    g = rl.random_connected_graph(n, p, gseed)
    cfg = adversary.random_config(g, cseed)
    state = rotor.WalkState.begin(g, cfg, 0)
    rotor.run_steps(g, state, steps)
    ok, witness = rotor.check_balance(state)
    assert ok, witness


def test_balance_path4_every_step():
    g = rl.path_graph(4)
    state = rotor.WalkState.begin(g, rl.canonical_config(g), 0)
    for _ in range(10_000):
        rotor.step(g, state)
        ok, witness = rotor.check_balance(state)
        assert ok, witness


def test_balance_t0_and_forged_counters():
    g = rl.path_graph(4)
    state = rotor.WalkState.begin(g, rl.canonical_config(g), 0)
    assert rotor.check_balance(state)[0]
    state.slot_count[g.slot(0, 1)] = 5
    state.slot_count[g.slot(1, 2)] = 1
    ok, witness = rotor.check_balance(state)
    assert not ok and witness["pair"] is not None


def test_edge_interleaving_k2_trace():
    ok, _ = rotor.check_edge_interleaving([0, 1, 0])
    assert ok


def test_edge_interleaving_cycle5_canonical():
    g = rl.cycle_graph(5)
    _, trace = rotor.run_recorded(g, rl.canonical_config(g), 0, 100)
    ok, witness = rotor.check_edge_interleaving(trace.directed_slots(g))
    assert ok, witness


def test_edge_interleaving_forged_trace_fails():
    ok, witness = rotor.check_edge_interleaving([5, 7, 7, 5])
    assert not ok
    assert witness["edge"] == 5 and witness["other_edge"] == 7


def test_edge_interleaving_in_kernel_matches_checker():
    g = rl.random_connected_graph(10, 0.5, seed=2)
    cfg = adversary.random_config(g, 3)
    state = rotor.WalkState.begin(g, cfg, 0)
    checked = rotor.CheckedRun.begin(g)
    status = rotor.run_steps_checked(g, state, checked, 2_000)
    assert status == 0  # budget exhausted without violation


def test_concentration_k2_lazy():
    g = rl.path_graph(2)
    chain, lazy = rotor.lazify(g, rl.canonical_config(g))
    K = analytics.k_functional(chain, np.array([2, 2]))
    state = rotor.WalkState.begin(g, lazy, 0)
    rotor.run_steps(g, state, 100)
    resid = rotor.concentration_check(state, chain.pi, K, chain=chain)
    assert resid <= 0


def test_concentration_complete8_canonical():
    g = rl.complete_graph(8)
    ana = analytics.analyze_chain(g)
    state = rotor.WalkState.begin(g, rl.canonical_config(g), 0)
    rotor.run_steps(g, state, 10_000)
    assert rotor.concentration_check(state, ana.chain.pi, ana.K) <= 0


def test_concentration_chain_mismatch():
    g = rl.cycle_graph(5)
    lazy_chain = analytics.build_chain(g, lazy=True)
    K = analytics.k_functional(lazy_chain, np.full(5, 3))
    state = rotor.WalkState.begin(g, rl.canonical_config(g), 0)
    rotor.run_steps(g, state, 10)
    with pytest.raises(ChainMismatch):
        rotor.concentration_check(state, lazy_chain.pi, K, chain=lazy_chain)


def test_validate_config_negative_cases():
    g = rl.cycle_graph(4)
    bad_ptr = rl.canonical_config(g)
    bad_ptr.pointers[1] = 7
    assert not rotor.validate_config(g, bad_ptr).pointers_ok

    stray = rl.canonical_config(g)
    stray.seq_targets.setflags(write=True)
    stray.seq_targets[0] = 2  # vertex 2 is not adjacent to vertex 0
    assert not rotor.validate_config(g, stray).membership_ok


def test_validate_config_multiplicity_against_chain():
    g = rl.cycle_graph(4)
    cfg = rl.canonical_config(g)
    plain = analytics.build_chain(g)
    assert rotor.validate_config(g, cfg, chain=plain).ok
    lazy_chain = analytics.build_chain(g, lazy=True)
    rep = rotor.validate_config(g, cfg, chain=lazy_chain)
    assert not rep.multiplicities_ok


def test_config_text_round_trip():
    g = rl.lollipop_graph(8)
    cfg, _ = adversary.lollipop_config(g)
    text = rotor.config_text(cfg)
    back = rotor.config_from_text(text)
    assert np.array_equal(back.seq_indptr, cfg.seq_indptr)
    assert np.array_equal(back.seq_targets, cfg.seq_targets)
    assert np.array_equal(back.pointers, cfg.pointers)


def test_trace_text_format():
    g = rl.cycle_graph(3)
    _, trace = rotor.run_recorded(g, rl.canonical_config(g), 0, 3)
    lines = rotor.trace_text(trace).splitlines()
    assert lines[0] == "1 0 1 1"
    assert len(lines) == 3


def test_lazify_kappa():
    g = rl.star_graph(4)
    _, lazy = rotor.lazify(g, rl.canonical_config(g))
    assert lazy.kappa(g) == 4.0  # leaf sequences have length Delta+1 = 4, deg 1


def test_walkstate_rejects_bad_start():
    g = rl.cycle_graph(3)
    with pytest.raises(InvalidParameters):
        rotor.WalkState.begin(g, rl.canonical_config(g), 5)


def test_weighted_multiplicity_walk_end_to_end():
    # weight 2 on edge {0,1}: vertex 0 serves 1 twice per rotor cycle
    g = rl.graph_from_edges(3, [(0, 1), (0, 2), (1, 2)], weights={(0, 1): 2})
    config = rotor.RotorConfiguration(
        seq_indptr=np.array([0, 3, 6, 8], dtype=np.int64),
        seq_targets=np.array([1, 1, 2, 0, 0, 2, 0, 1], dtype=np.int64),
        pointers=np.zeros(3, dtype=np.int64))
    chain = analytics.build_chain(g)
    assert chain.P[0, 1] == pytest.approx(2 / 3)
    report = rotor.validate_config(g, config, chain=chain)
    assert report.ok, report.problems
    assert config.kappa(g) == 1.5
    d_tilde = config.lengths
    K = analytics.k_functional(chain, d_tilde)
    state = rotor.WalkState.begin(g, config, 0)
    rotor.run_steps(g, state, 5_000)
    assert state.counters_consistent()
    assert rotor.concentration_check(state, chain.pi, K, chain=chain) <= 0


def _naive_rotor_walk(config, start, steps):
    # straight-from-definition stepper on plain python lists; test oracle
    seqs = [list(int(x) for x in config.sequence(u)) for u in range(config.n)]
    ptr = [int(p) for p in config.pointers]
    x = start
    path = [start]
    for _ in range(steps):
        nxt = seqs[x][ptr[x]]
        ptr[x] = (ptr[x] + 1) % len(seqs[x])
        x = nxt
        path.append(x)
    return path


@given(small_walk_cases(), st.booleans())
def test_kernel_matches_naive_definition(case, lazy):
    n, p, gseed, cseed, steps = case
    g = rl.random_connected_graph(n, p, gseed)
    cfg = adversary.random_config(g, cseed)
    if lazy:
        _, cfg = rotor.lazify(g, cfg)
    expected = _naive_rotor_walk(cfg, 0, steps)
    state, trace = rotor.run_recorded(g, cfg, 0, steps)
    assert list(trace.vertices(0)) == expected
    # visit counters agree with the raw path
    for v in range(g.n):
        assert state.visits[v] == expected.count(v)
