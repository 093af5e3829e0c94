"""Pure-Python reference kernels.

Same signatures as the numba backend; selected via ROTORLAB_BACKEND=python.
All state lives in preallocated numpy arrays so the two backends are
interchangeable and bit-identical (including the PRNG stream).

Walk scalars (int64 array ``scal``):
    scal[0] current vertex, scal[1] step count t, scal[2] visited vertices,
    scal[3] covered undirected edges, scal[4] distinct directed traversals.

Status codes: 0 budget exhausted, 1 stop condition reached,
2 balance violation, 3 edge-revisit (interleaving) violation.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1

STOP_NONE = 0
STOP_VERTEX_COVER = 1
STOP_EDGE_COVER = 2

STATUS_BUDGET = 0
STATUS_STOPPED = 1
STATUS_BALANCE = 2
STATUS_REVISIT = 3


def walk(indptr, indices, edge_ids, seq_ptr, seq_tgt, seq_slot, pointer,
         visits, slot_count, loop_count, first_visit, edge_seen, dir_seen,
         scal, stop_mode, budget):
    """Advance the rotor walk up to ``budget`` steps; see module doc for codes."""
    n = len(indptr) - 1
    m = len(indices) // 2
    cur = int(scal[0])
    t = int(scal[1])
    visited = int(scal[2])
    covered = int(scal[3])
    dir_cov = int(scal[4])
    status = STATUS_BUDGET
    for _ in range(budget):
        base = seq_ptr[cur]
        dlen = seq_ptr[cur + 1] - base
        p = pointer[cur]
        j = base + p
        v = int(seq_tgt[j])
        s = int(seq_slot[j])
        pointer[cur] = p + 1 if p + 1 < dlen else 0
        t += 1
        if s >= 0:
            slot_count[s] += 1
            if not dir_seen[s]:
                dir_seen[s] = 1
                dir_cov += 1
            e = edge_ids[s]
            if not edge_seen[e]:
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


def walk_recorded(indptr, indices, edge_ids, seq_ptr, seq_tgt, seq_slot, pointer,
                  visits, slot_count, loop_count, first_visit, edge_seen,
                  dir_seen, scal, stop_mode, budget,
                  trace_u, trace_v, trace_r):
    """Like ``walk`` but records (from, to, rotor index used) per step."""
    n = len(indptr) - 1
    m = len(indices) // 2
    cur = int(scal[0])
    t = int(scal[1])
    visited = int(scal[2])
    covered = int(scal[3])
    dir_cov = int(scal[4])
    status = STATUS_BUDGET
    rec = 0
    for _ in range(budget):
        base = seq_ptr[cur]
        dlen = seq_ptr[cur + 1] - base
        p = pointer[cur]
        j = base + p
        v = int(seq_tgt[j])
        s = int(seq_slot[j])
        trace_u[rec] = cur
        trace_v[rec] = v
        trace_r[rec] = p
        rec += 1
        pointer[cur] = p + 1 if p + 1 < dlen else 0
        t += 1
        if s >= 0:
            slot_count[s] += 1
            if not dir_seen[s]:
                dir_seen[s] = 1
                dir_cov += 1
            e = edge_ids[s]
            if not edge_seen[e]:
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


def walk_checked(indptr, indices, edge_ids, rev_slot, seq_ptr, seq_tgt,
                 seq_slot, pointer, visits, slot_count, loop_count,
                 first_visit, edge_seen, dir_seen, scal, stop_mode, budget,
                 last_seen, second_last, viol):
    """``walk`` plus per-step traversal-balance and edge-interleaving checks.

    Balance: any in-edge count of v and out-edge count of v differ by <= 2.
    Interleaving: between two successive traversals of a directed edge no
    other directed edge is traversed twice. Tracked in O(1) per step via the
    two largest second-to-last traversal times; values only ever increase so
    a running top-2 stays exact.

    ``last_seen``/``second_last`` are per-slot step indices (init -1).
    On failure ``viol`` holds a witness: kind, step, and the offending ids.
    """
    n = len(indptr) - 1
    m = len(indices) // 2
    cur = int(scal[0])
    t = int(scal[1])
    visited = int(scal[2])
    covered = int(scal[3])
    dir_cov = int(scal[4])
    top1_val = -1
    top1_slot = -1
    top2_val = -1
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
        v = int(seq_tgt[j])
        s = int(seq_slot[j])
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
            if not dir_seen[s]:
                dir_seen[s] = 1
                dir_cov += 1
            e = edge_ids[s]
            if not edge_seen[e]:
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


# ----------------------------------------------------------------------------
# Random-walk baselines; xorshift64* so both backends share one stream
# ----------------------------------------------------------------------------

def _mix_seed(seed):
    # splitmix64 step; avoids the all-zero xorshift state
    z = (seed + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    z = z ^ (z >> 31)
    return z if z != 0 else 0x9E3779B97F4A7C15


def rw_cover(indptr, indices, edge_ids, start, mode, cap, seed):
    """Random-walk cover run; returns step count or -1 if cap exceeded."""
    n = len(indptr) - 1
    m = len(indices) // 2
    state = _mix_seed(int(seed))
    seen_v = [False] * n
    seen_e = [False] * m
    seen_v[start] = True
    n_v = 1
    n_e = 0
    cur = int(start)
    t = 0
    while t < cap:
        lo = int(indptr[cur])
        deg = int(indptr[cur + 1]) - lo
        state ^= (state << 13) & MASK64
        state ^= state >> 7
        state ^= (state << 17) & MASK64
        r = (state * 0x2545F4914F6CDD1D) & MASK64
        j = lo + (r % deg)
        v = int(indices[j])
        t += 1
        if not seen_v[v]:
            seen_v[v] = True
            n_v += 1
        e = edge_ids[j]
        if not seen_e[e]:
            seen_e[e] = True
            n_e += 1
        cur = v
        if mode == STOP_VERTEX_COVER and n_v == n:
            return t
        if mode == STOP_EDGE_COVER and n_e == m:
            return t
    return -1


def rw_hit(indptr, indices, start, target, cap, seed):
    """Random-walk first-passage time start -> target, or -1 if cap exceeded."""
    if start == target:
        return 0
    state = _mix_seed(int(seed))
    cur = int(start)
    t = 0
    while t < cap:
        lo = int(indptr[cur])
        deg = int(indptr[cur + 1]) - lo
        state ^= (state << 13) & MASK64
        state ^= state >> 7
        state ^= (state << 17) & MASK64
        r = (state * 0x2545F4914F6CDD1D) & MASK64
        cur = int(indices[lo + (r % deg)])
        t += 1
        if cur == target:
            return t
    return -1
