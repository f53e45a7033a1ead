"""Event-loop kernels, jit-compiled.

Two trajectory engines produce identical statistics:

* :func:`faithful_pass` replays the graphical construction: every site
  carries an independent rate-1 Poisson clock and an i.i.d. coin stream
  (occupied with probability p); the driver merges the per-site streams into
  one time-sorted event list.  Rings at constrained sites are discarded,
  legal rings refresh the site to the coin value.  Flip counters advance
  only when the value actually changes.

* :func:`rf_pass` is the rejection-free equivalent: it schedules only the
  state-changing events.  Unconstrained occupied sites empty at rate q,
  unconstrained empty sites fill at rate p; constrained sites are skipped
  entirely.  The two classes live in swap-remove index sets so every event
  costs O(1).  Only the west neighbour's constraint state can change at a
  flip, which keeps the bookkeeping local.

Both engines fill the same per-sample-row outputs: bit and flip-count
snapshots, probe occupancy and probe never-flipped flags, the positions of
the two leftmost vacancies, and the total flip count.  A sample at time s
reflects every event with time <= s.

Randomness: :func:`faithful_pass` is deterministic in its event arrays
(built outside from per-site streams); the rejection-free kernels draw from
numba's internal generator, seeded per call.  All kernels release the GIL.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["faithful_pass", "faithful_hitting", "rf_pass", "rf_wall_pass"]


@njit(cache=True, nogil=True)
def faithful_pass(
    bits,          # uint8[W], in place
    ev_time,       # float64[E], ascending
    ev_site,       # int64[E], window offsets
    ev_coin,       # uint8[E], 1 = refresh to occupied
    ev_legal,      # uint8[E] out: legality at application time
    sample_times,  # float64[S], ascending
    probe,         # int64 window offset
    track_zero,    # bool
    zero_start,    # int64 window offset of the distinguished zero
    occ_snap,      # uint8[S, W] out
    flip_snap,     # int64[S, W] out
    probe_occ,     # uint8[S] out
    probe_never,   # uint8[S] out
    x0,            # int64[S] out: leftmost vacancy, -1 if none
    x1,            # int64[S] out: second vacancy, -1 if none
    tot_flips,     # int64[S] out
    zero_pos,      # int64[S] out: W means absorbed at the frozen zero
    zero_jump_t,   # float64[cap] out
    zero_jump_x,   # int64[cap] out
):
    """Apply a merged ring/coin stream to ``bits``; returns the jump count.

    The distinguished zero advances one step east at every legal ring at its
    position, whatever the coin shows; legality guarantees the landing site
    is empty, so the label always sits on a vacancy.  It is absorbed once it
    steps onto the frozen zero at offset W.
    """
    W = bits.size
    E = ev_time.size
    S = sample_times.size
    flips = np.zeros(W, np.int64)
    tot = 0
    zpos = zero_start
    nj = 0
    si = 0
    for e in range(E):
        te = ev_time[e]
        while si < S and sample_times[si] < te:
            for x in range(W):
                occ_snap[si, x] = bits[x]
                flip_snap[si, x] = flips[x]
            probe_occ[si] = bits[probe]
            probe_never[si] = 1 if flips[probe] == 0 else 0
            x0[si] = -1
            x1[si] = -1
            for x in range(W):
                if bits[x] == 0:
                    if x0[si] < 0:
                        x0[si] = x
                    else:
                        x1[si] = x
                        break
            tot_flips[si] = tot
            zero_pos[si] = zpos
            si += 1
        x = ev_site[e]
        legal = x == W - 1 or bits[x + 1] == 0
        ev_legal[e] = 1 if legal else 0
        if legal:
            c = ev_coin[e]
            if c != bits[x]:
                bits[x] = c
                flips[x] += 1
                tot += 1
            if track_zero and x == zpos:
                zpos += 1
                if nj < zero_jump_t.size:
                    zero_jump_t[nj] = te
                    zero_jump_x[nj] = zpos
                nj += 1
    while si < S:
        for x in range(W):
            occ_snap[si, x] = bits[x]
            flip_snap[si, x] = flips[x]
        probe_occ[si] = bits[probe]
        probe_never[si] = 1 if flips[probe] == 0 else 0
        x0[si] = -1
        x1[si] = -1
        for x in range(W):
            if bits[x] == 0:
                if x0[si] < 0:
                    x0[si] = x
                else:
                    x1[si] = x
                    break
        tot_flips[si] = tot
        zero_pos[si] = zpos
        si += 1
    return nj


@njit(cache=True, nogil=True)
def faithful_hitting(bits, ev_time, ev_site, ev_coin, a_table):
    """First time the packed state enters the target set; -1.0 if censored.

    ``a_table[s]`` flags membership of packed state s (bit x = bits[x]),
    so the window is capped at the table builder, not here.
    """
    W = bits.size
    state = 0
    for x in range(W):
        if bits[x]:
            state |= 1 << x
    if a_table[state]:
        return 0.0
    for e in range(ev_time.size):
        x = ev_site[e]
        if x == W - 1 or bits[x + 1] == 0:
            c = ev_coin[e]
            if c != bits[x]:
                bits[x] = c
                state ^= 1 << x
                if a_table[state]:
                    return ev_time[e]
    return -1.0


@njit(cache=True, nogil=True)
def rf_pass(
    bits,          # uint8[W], in place
    q,
    seed,          # int64, seeds numba's generator
    sample_times,  # float64[S], ascending
    probe,
    occ_snap,
    flip_snap,
    probe_occ,
    probe_never,
    x0,
    x1,
    tot_flips,
):
    """Rejection-free pass; fills the same sample rows as faithful_pass.

    Returns the number of flip events executed.  The distinguished zero is
    not available here: it also moves at legal rings that do not change the
    state, which this scheduler never generates.
    """
    np.random.seed(seed)
    W = bits.size
    S = sample_times.size
    p = 1.0 - q

    # class A: occupied, unconstrained -> empties at rate q
    # class B: empty, unconstrained -> fills at rate p
    # swap-remove sets; posX[x] is x's slot in memX, -1 when absent
    memA = np.empty(W, np.int64)
    posA = np.full(W, -1, np.int64)
    memB = np.empty(W, np.int64)
    posB = np.full(W, -1, np.int64)
    nA = 0
    nB = 0
    for x in range(W):
        if x == W - 1 or bits[x + 1] == 0:
            if bits[x] == 1:
                memA[nA] = x
                posA[x] = nA
                nA += 1
            else:
                memB[nB] = x
                posB[x] = nB
                nB += 1

    flips = np.zeros(W, np.int64)
    tot = 0
    t = 0.0
    si = 0
    nevents = 0
    while si < S:
        Rtot = q * nA + p * nB
        dt = np.random.exponential(1.0 / Rtot) if Rtot > 0.0 else 1e18
        while si < S and t + dt > sample_times[si]:
            for x in range(W):
                occ_snap[si, x] = bits[x]
                flip_snap[si, x] = flips[x]
            probe_occ[si] = bits[probe]
            probe_never[si] = 1 if flips[probe] == 0 else 0
            x0[si] = -1
            x1[si] = -1
            for x in range(W):
                if bits[x] == 0:
                    if x0[si] < 0:
                        x0[si] = x
                    else:
                        x1[si] = x
                        break
            tot_flips[si] = tot
            si += 1
        if si >= S:
            break
        t += dt
        nevents += 1
        # pick the flipping site, class A with probability q nA / Rtot
        if np.random.random() * Rtot < q * nA:
            i = int(np.random.random() * nA)
            if i >= nA:
                i = nA - 1
            x = memA[i]
        else:
            i = int(np.random.random() * nB)
            if i >= nB:
                i = nB - 1
            x = memB[i]
        old = bits[x]
        bits[x] = 1 - old
        flips[x] += 1
        tot += 1
        # move x between classes; its own constraint state is unchanged
        if old == 1:
            i = posA[x]
            nA -= 1
            memA[i] = memA[nA]
            posA[memA[i]] = i
            posA[x] = -1
            memB[nB] = x
            posB[x] = nB
            nB += 1
        else:
            i = posB[x]
            nB -= 1
            memB[i] = memB[nB]
            posB[memB[i]] = i
            posB[x] = -1
            memA[nA] = x
            posA[x] = nA
            nA += 1
        # only the west neighbour's constraint state toggles
        w = x - 1
        if w >= 0:
            if bits[x] == 0:
                # w became unconstrained
                if bits[w] == 1:
                    memA[nA] = w
                    posA[w] = nA
                    nA += 1
                else:
                    memB[nB] = w
                    posB[w] = nB
                    nB += 1
            else:
                # w became constrained
                if posA[w] >= 0:
                    i = posA[w]
                    nA -= 1
                    memA[i] = memA[nA]
                    posA[memA[i]] = i
                    posA[w] = -1
                else:
                    i = posB[w]
                    nB -= 1
                    memB[i] = memB[nB]
                    posB[memB[i]] = i
                    posB[w] = -1
    return nevents


@njit(cache=True, nogil=True)
def rf_wall_pass(bits, q, seed, t_marks, confirm, out_x01, out_len1):
    """Rejection-free pass reporting confirmed walls at a ladder of times.

    A wall at mark time t_k is a site that is empty at t_k, is never filled
    during [t_k, t_k + confirm], and is empty again at t_k + confirm; the
    confirmation window filters vacancies that are still being moved around
    by active relaxation.  For each mark the offsets of the two leftmost
    walls go to ``out_x01[k]`` and their distance to ``out_len1[k]``
    (-1 where fewer than two walls exist).  Marks must be spaced more than
    ``confirm`` apart.
    """
    W = bits.size
    p = 1.0 - q
    np.random.seed(seed)
    memA = np.empty(W, np.int64)
    posA = np.full(W, -1, np.int64)
    memB = np.empty(W, np.int64)
    posB = np.full(W, -1, np.int64)
    nA = 0
    nB = 0
    for x in range(W):
        if x == W - 1 or bits[x + 1] == 0:
            if bits[x] == 1:
                memA[nA] = x
                posA[x] = nA
                nA += 1
            else:
                memB[nB] = x
                posB[x] = nB
                nB += 1
    nm = t_marks.size
    snap = np.zeros(W, np.uint8)
    filled = np.zeros(W, np.uint8)
    mi = 0
    phase = 0  # 0: waiting for t_marks[mi]; 1: inside the confirmation window
    t = 0.0
    while mi < nm:
        Rtot = q * nA + p * nB
        dt = np.random.exponential(1.0 / Rtot) if Rtot > 0.0 else 1e18
        # handle every boundary crossed before the next event
        while mi < nm:
            if phase == 0 and t + dt > t_marks[mi]:
                for x in range(W):
                    snap[x] = bits[x]
                    filled[x] = 0
                phase = 1
            elif phase == 1 and t + dt > t_marks[mi] + confirm:
                xa = -1
                xb = -1
                for x in range(W):
                    if snap[x] == 0 and filled[x] == 0 and bits[x] == 0:
                        if xa < 0:
                            xa = x
                        elif xb < 0:
                            xb = x
                            break
                out_x01[mi, 0] = xa
                out_x01[mi, 1] = xb
                out_len1[mi] = (xb - xa) if (xa >= 0 and xb >= 0) else -1
                phase = 0
                mi += 1
            else:
                break
        if mi >= nm:
            break
        t += dt
        u = np.random.random() * Rtot
        if u < q * nA:
            k = int(np.random.random() * nA)
            if k == nA:
                k = nA - 1
            x = memA[k]
            nA -= 1
            last = memA[nA]
            memA[k] = last
            posA[last] = k
            posA[x] = -1
            memB[nB] = x
            posB[x] = nB
            nB += 1
            bits[x] = 0
            w = x - 1
            if w >= 0:
                if bits[w] == 1:
                    memA[nA] = w
                    posA[w] = nA
                    nA += 1
                else:
                    memB[nB] = w
                    posB[w] = nB
                    nB += 1
        else:
            k = int(np.random.random() * nB)
            if k == nB:
                k = nB - 1
            x = memB[k]
            nB -= 1
            last = memB[nB]
            memB[k] = last
            posB[last] = k
            posB[x] = -1
            memA[nA] = x
            posA[x] = nA
            nA += 1
            bits[x] = 1
            if phase == 1:
                filled[x] = 1
            w = x - 1
            if w >= 0:
                if bits[w] == 1:
                    j = posA[w]
                    nA -= 1
                    last = memA[nA]
                    memA[j] = last
                    posA[last] = j
                    posA[w] = -1
                else:
                    j = posB[w]
                    nB -= 1
                    last = memB[nB]
                    memB[j] = last
                    posB[last] = j
                    posB[w] = -1
