"""Numba-JIT kernels; logic mirrors _kernels_py line for line.

Keep the two backends in sync: the parity test in tests/test_backend.py runs
both on identical inputs and requires bit-identical results, including the
xorshift64* stream of the random-walk baselines.
"""

from __future__ import annotations

import numpy as np
from numba import njit

STOP_NONE = 0
STOP_VERTEX_COVER = 1
STOP_EDGE_COVER = 2

STATUS_BUDGET = 0
STATUS_STOPPED = 1
STATUS_BALANCE = 2
STATUS_REVISIT = 3


@njit(cache=True)
def walk(indptr, indices, edge_ids, seq_ptr, seq_tgt, seq_slot, pointer,
         visits, slot_count, loop_count, first_visit, edge_seen, dir_seen,
         scal, stop_mode, budget):
    n = len(indptr) - 1
    m = len(indices) // 2
    cur = scal[0]
    t = scal[1]
    visited = scal[2]
    covered = scal[3]
    dir_cov = scal[4]
    status = STATUS_BUDGET
    for _ in range(budget):
        base = seq_ptr[cur]
        dlen = seq_ptr[cur + 1] - base
        p = pointer[cur]
        j = base + p
        v = seq_tgt[j]
        s = seq_slot[j]
        pointer[cur] = p + 1 if p + 1 < dlen else 0
        t += 1
        if s >= 0:
            slot_count[s] += 1
            if dir_seen[s] == 0:
                dir_seen[s] = 1
                dir_cov += 1
            e = edge_ids[s]
            if edge_seen[e] == 0:
                edge_seen[e] = 1
                covered += 1
        else:
            loop_count[cur] += 1
        visits[v] += 1
        if first_visit[v] < 0:
            first_visit[v] = t
            visited += 1
        cur = v
        if stop_mode == STOP_VERTEX_COVER and visited == n:
            status = STATUS_STOPPED
            break
        if stop_mode == STOP_EDGE_COVER and covered == m:
            status = STATUS_STOPPED
            break
    scal[0] = cur
    scal[1] = t
    scal[2] = visited
    scal[3] = covered
    scal[4] = dir_cov
    return status


@njit(cache=True)
def walk_recorded(indptr, indices, edge_ids, seq_ptr, seq_tgt, seq_slot, pointer,
                  visits, slot_count, loop_count, first_visit, edge_seen,
                  dir_seen, scal, stop_mode, budget,
                  trace_u, trace_v, trace_r):
    n = len(indptr) - 1
    m = len(indices) // 2
    cur = scal[0]
    t = scal[1]
    visited = scal[2]
    covered = scal[3]
    dir_cov = scal[4]
    status = STATUS_BUDGET
    rec = 0
    for _ in range(budget):
        base = seq_ptr[cur]
        dlen = seq_ptr[cur + 1] - base
        p = pointer[cur]
        j = base + p
        v = seq_tgt[j]
        s = seq_slot[j]
        trace_u[rec] = cur
        trace_v[rec] = v
        trace_r[rec] = p
        rec += 1
        pointer[cur] = p + 1 if p + 1 < dlen else 0
        t += 1
        if s >= 0:
            slot_count[s] += 1
            if dir_seen[s] == 0:
                dir_seen[s] = 1
                dir_cov += 1
            e = edge_ids[s]
            if edge_seen[e] == 0:
                edge_seen[e] = 1
                covered += 1
        else:
            loop_count[cur] += 1
        visits[v] += 1
        if first_visit[v] < 0:
            first_visit[v] = t
            visited += 1
        cur = v
        if stop_mode == STOP_VERTEX_COVER and visited == n:
            status = STATUS_STOPPED
            break
        if stop_mode == STOP_EDGE_COVER and covered == m:
            status = STATUS_STOPPED
            break
    scal[0] = cur
    scal[1] = t
    scal[2] = visited
    scal[3] = covered
    scal[4] = dir_cov
    return status


@njit(cache=True)
def walk_checked(indptr, indices, edge_ids, rev_slot, seq_ptr, seq_tgt,
                 seq_slot, pointer, visits, slot_count, loop_count,
                 first_visit, edge_seen, dir_seen, scal, stop_mode, budget,
                 last_seen, second_last, viol):
    n = len(indptr) - 1
    m = len(indices) // 2
    cur = scal[0]
    t = scal[1]
    visited = scal[2]
    covered = scal[3]
    dir_cov = scal[4]
    top1_val = np.int64(-1)
    top1_slot = np.int64(-1)
    top2_val = np.int64(-1)
    for s0 in range(len(second_last)):
        sl = second_last[s0]
        if sl > top1_val:
            top2_val = top1_val
            top1_val = sl
            top1_slot = s0
        elif sl > top2_val:
            top2_val = sl
    status = STATUS_BUDGET
    for _ in range(budget):
        base = seq_ptr[cur]
        dlen = seq_ptr[cur + 1] - base
        p = pointer[cur]
        j = base + p
        v = seq_tgt[j]
        s = seq_slot[j]
        pointer[cur] = p + 1 if p + 1 < dlen else 0
        t += 1
        if s >= 0:
            prev = last_seen[s]
            if prev >= 0:
                other = top2_val if top1_slot == s else top1_val
                if other > prev:
                    for f in range(len(second_last)):
                        if f != s and second_last[f] > prev:
                            viol[0] = STATUS_REVISIT
                            viol[1] = t
                            viol[2] = s
                            viol[3] = f
                            viol[4] = prev
                            viol[5] = second_last[f]
                            scal[0] = cur
                            scal[1] = t - 1
                            scal[2] = visited
                            scal[3] = covered
                            scal[4] = dir_cov
                            return STATUS_REVISIT
            second_last[s] = prev
            if top1_slot == s:
                top1_val = prev
            elif prev > top1_val:
                top2_val = top1_val
                top1_val = prev
                top1_slot = s
            elif prev > top2_val:
                top2_val = prev
            last_seen[s] = t

            slot_count[s] += 1
            if dir_seen[s] == 0:
                dir_seen[s] = 1
                dir_cov += 1
            e = edge_ids[s]
            if edge_seen[e] == 0:
                edge_seen[e] = 1
                covered += 1

            c_in = slot_count[s]
            for j2 in range(indptr[v], indptr[v + 1]):
                c_out = slot_count[j2]
                if c_in - c_out > 2 or c_out - c_in > 2:
                    viol[0] = STATUS_BALANCE
                    viol[1] = t
                    viol[2] = s
                    viol[3] = j2
                    viol[4] = c_in
                    viol[5] = c_out
                    scal[0] = v
                    scal[1] = t
                    scal[2] = visited
                    scal[3] = covered
                    scal[4] = dir_cov
                    return STATUS_BALANCE
            for j2 in range(indptr[cur], indptr[cur + 1]):
                c_other = slot_count[rev_slot[j2]]
                if c_in - c_other > 2 or c_other - c_in > 2:
                    viol[0] = STATUS_BALANCE
                    viol[1] = t
                    viol[2] = rev_slot[j2]
                    viol[3] = s
                    viol[4] = c_other
                    viol[5] = c_in
                    scal[0] = v
                    scal[1] = t
                    scal[2] = visited
                    scal[3] = covered
                    scal[4] = dir_cov
                    return STATUS_BALANCE
        else:
            loop_count[cur] += 1
        visits[v] += 1
        if first_visit[v] < 0:
            first_visit[v] = t
            visited += 1
        cur = v
        if stop_mode == STOP_VERTEX_COVER and visited == n:
            status = STATUS_STOPPED
            break
        if stop_mode == STOP_EDGE_COVER and covered == m:
            status = STATUS_STOPPED
            break
    scal[0] = cur
    scal[1] = t
    scal[2] = visited
    scal[3] = covered
    scal[4] = dir_cov
    return status


@njit(cache=True)
def _mix_seed(seed):
    z = np.uint64(seed) + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    if z == np.uint64(0):
        z = np.uint64(0x9E3779B97F4A7C15)
    return z


@njit(cache=True)
def rw_cover(indptr, indices, edge_ids, start, mode, cap, seed):
    n = len(indptr) - 1
    m = len(indices) // 2
    state = _mix_seed(seed)
    seen_v = np.zeros(n, dtype=np.uint8)
    seen_e = np.zeros(m, dtype=np.uint8)
    seen_v[start] = 1
    n_v = 1
    n_e = 0
    cur = start
    t = 0
    while t < cap:
        deg = indptr[cur + 1] - indptr[cur]
        state ^= state << np.uint64(13)
        state ^= state >> np.uint64(7)
        state ^= state << np.uint64(17)
        r = state * np.uint64(0x2545F4914F6CDD1D)
        j = indptr[cur] + np.int64(r % np.uint64(deg))
        v = indices[j]
        t += 1
        if seen_v[v] == 0:
            seen_v[v] = 1
            n_v += 1
        e = edge_ids[j]
        if seen_e[e] == 0:
            seen_e[e] = 1
            n_e += 1
        cur = v
        if mode == STOP_VERTEX_COVER and n_v == n:
            return t
        if mode == STOP_EDGE_COVER and n_e == m:
            return t
    return -1


@njit(cache=True)
def rw_hit(indptr, indices, start, target, cap, seed):
    if start == target:
        return 0
    state = _mix_seed(seed)
    cur = start
    t = 0
    while t < cap:
        deg = indptr[cur + 1] - indptr[cur]
        state ^= state << np.uint64(13)
        state ^= state >> np.uint64(7)
        state ^= state << np.uint64(17)
        r = state * np.uint64(0x2545F4914F6CDD1D)
        cur = indices[indptr[cur] + np.int64(r % np.uint64(deg))]
        t += 1
        if cur == target:
            return t
    return -1
