"""Numba kernels for the hot paths.

Everything here works on plain arrays: uint8 cell masks extended by one
zero sentinel slot (so padded neighbour gathers need no branch), int32
neighbour tables from grid.neighbor_table, and uint64 bitboards for the
enumeration search (cell_count <= 64 there).

Set ids in bitboards follow cell ids.  "tuple-lex" order on equal-size
sets compares sorted element tuples; on bitboards the smaller set is the
one containing the lowest differing bit.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# bit k as uint64, avoiding int/uint promotion pitfalls inside numba
BITS = (np.uint64(1) << np.arange(64, dtype=np.uint64)).astype(np.uint64)
U0 = np.uint64(0)
U1 = np.uint64(1)


# -- degree bookkeeping -------------------------------------------------------


@njit(cache=True, nogil=True)
def compute_degrees(mask_ext, nbr, deg):
    """deg[c] = number of black neighbours of c.  mask_ext has the sentinel."""
    n = nbr.shape[0]
    for c in range(n):
        s = 0
        for t in range(nbr.shape[1]):
            s += mask_ext[nbr[c, t]]
        deg[c] = s


# -- greedy build-up (exactly-d rule) ----------------------------------------


@njit(cache=True, nogil=True)
def greedy_fill(mask_ext, nbr, d, deg, queue):
    """Complete a position greedily in place; returns the final black count.

    Adds white cells whose black degree is exactly d until none remain.
    Degrees only grow, so a queued cell found above d is dead for good and
    a cell crosses d at most once; one queue slot per cell suffices.
    """
    n = nbr.shape[0]
    compute_degrees(mask_ext, nbr, deg)
    head = 0
    tail = 0
    count = 0
    for c in range(n):
        if mask_ext[c]:
            count += 1
        elif deg[c] == d:
            queue[tail] = c
            tail += 1
    while head < tail:
        c = queue[head]
        head += 1
        if mask_ext[c] == 1 or deg[c] != d:
            continue
        mask_ext[c] = 1
        count += 1
        for t in range(nbr.shape[1]):
            w = nbr[c, t]
            if w < n:
                deg[w] += 1
                if mask_ext[w] == 0 and deg[w] == d:
                    queue[tail] = w
                    tail += 1
    return count


# -- percolation closures -----------------------------------------------------


@njit(cache=True, nogil=True)
def bootstrap_fill(mask_ext, nbr, d, deg, queue):
    """Threshold closure in place: white cells with >= d active neighbours
    activate.  Returns final active count."""
    n = nbr.shape[0]
    compute_degrees(mask_ext, nbr, deg)
    head = 0
    tail = 0
    count = 0
    for c in range(n):
        if mask_ext[c]:
            count += 1
        elif deg[c] >= d:
            queue[tail] = c
            tail += 1
    while head < tail:
        c = queue[head]
        head += 1
        if mask_ext[c]:
            continue
        # degrees only grow; once queued the cell stays eligible
        mask_ext[c] = 1
        count += 1
        for t in range(nbr.shape[1]):
            w = nbr[c, t]
            if w < n:
                deg[w] += 1
                if mask_ext[w] == 0 and deg[w] == d:
                    queue[tail] = w
                    tail += 1
    return count


@njit(cache=True, nogil=True)
def modified_bootstrap_fill(mask_ext, nbr, d, axes_seen, queue):
    """Per-axis closure in place: a white cell activates once it has at
    least one active neighbour on every axis.  Returns final count."""
    n = nbr.shape[0]
    full = np.uint8((1 << d) - 1)
    for c in range(n):
        m = 0
        for t in range(nbr.shape[1]):
            if mask_ext[nbr[c, t]]:
                m |= 1 << (t // 2)
        axes_seen[c] = m
    head = 0
    tail = 0
    count = 0
    for c in range(n):
        if mask_ext[c]:
            count += 1
        elif axes_seen[c] == full:
            queue[tail] = c
            tail += 1
    while head < tail:
        c = queue[head]
        head += 1
        if mask_ext[c]:
            continue
        mask_ext[c] = 1
        count += 1
        for t in range(nbr.shape[1]):
            w = nbr[c, t]
            if w < n and mask_ext[w] == 0:
                before = axes_seen[w]
                after = before | np.uint8(1 << (t // 2))
                if after != before:
                    axes_seen[w] = after
                    if after == full:
                        queue[tail] = w
                        tail += 1
    return count


# -- batched greedy tests -----------------------------------------------------


@njit(cache=True, nogil=True)
def count_filling_level_perms(perms, nbr, n):
    """Count level permutations of the order-n cyclic base whose greedy
    completion fills the cube.

    perms holds 0-based level permutations, one per row.  The cyclic base
    puts the black cell of column (i, j) at level (i + j) mod n (0-based).
    """
    nc = n * n * n
    mask_ext = np.zeros(nc + 1, dtype=np.uint8)
    deg = np.zeros(nc, dtype=np.int32)
    queue = np.zeros(nc, dtype=np.int32)
    ok = 0
    for p in range(perms.shape[0]):
        mask_ext[:] = 0
        for i in range(n):
            for j in range(n):
                k = perms[p, (i + j) % n]
                mask_ext[(i * n + j) * n + k] = 1
        if greedy_fill(mask_ext, nbr, 3, deg, queue) == nc:
            ok += 1
    return ok


# -- Latin square enumeration with inline solution testing --------------------


@njit(cache=True, nogil=True)
def latin_solution_scan(n, nbr, perm, out_keys, first_row):
    """Enumerate Latin squares of order n (0-based symbols) by row-major
    backtracking; greedy-test each; store the canonical bitboard key of
    every solution found.

    perm: (G, nc) int32 cell permutations of the isometry group.
    out_keys: (cap, W) uint64, W = ceil(nc / 64); canonical key = the
    lexicographically least word vector among the G images.
    first_row: fixed 0-based first row (for sharding), or first entry -1
    to enumerate all first rows.

    Returns (squares_seen, solutions_found); solutions_found = -1 signals
    out_keys overflow.
    """
    nc = n * n * n
    words = out_keys.shape[1]
    mask_ext = np.zeros(nc + 1, dtype=np.uint8)
    deg = np.zeros(nc, dtype=np.int32)
    queue = np.zeros(nc, dtype=np.int32)
    img = np.zeros(words, dtype=np.uint64)
    best = np.zeros(words, dtype=np.uint64)

    ncells = n * n
    sym = np.full(ncells, -1, dtype=np.int8)
    row_used = np.zeros(n, dtype=np.int64)
    col_used = np.zeros(n, dtype=np.int64)

    start = 0
    if first_row[0] >= 0:
        for c in range(n):
            s = first_row[c]
            sym[c] = s
            row_used[0] |= 1 << s
            col_used[c] |= 1 << s
        start = n

    seen = 0
    found = 0
    pos = start
    while pos >= start:
        if pos == ncells:
            # complete square: black cell of column (r, c) sits at level sym
            seen += 1
            mask_ext[:] = 0
            for rc in range(ncells):
                mask_ext[rc * n + sym[rc]] = 1
            if greedy_fill(mask_ext, nbr, 3, deg, queue) == nc:
                for w in range(words):
                    best[w] = np.uint64(0xFFFFFFFFFFFFFFFF)
                for g in range(perm.shape[0]):
                    for w in range(words):
                        img[w] = U0
                    for rc in range(ncells):
                        cid = perm[g, rc * n + sym[rc]]
                        img[cid >> 6] |= BITS[cid & 63]
                    smaller = False
                    for w in range(words):
                        if img[w] < best[w]:
                            smaller = True
                            break
                        if img[w] > best[w]:
                            break
                    if smaller:
                        for w in range(words):
                            best[w] = img[w]
                if found >= out_keys.shape[0]:
                    return seen, -1
                for w in range(words):
                    out_keys[found, w] = best[w]
                found += 1
            pos -= 1
            continue
        r = pos // n
        c = pos % n
        s = sym[pos]
        if s >= 0:
            row_used[r] &= ~(1 << s)
            col_used[c] &= ~(1 << s)
        s += 1
        used = row_used[r] | col_used[c]
        while s < n and (used >> s) & 1:
            s += 1
        if s < n:
            sym[pos] = s
            row_used[r] |= 1 << s
            col_used[c] |= 1 << s
            pos += 1
        else:
            sym[pos] = -1
            pos -= 1
    return seen, found


# -- all-solutions search over independent base positions ----------------------


@njit(cache=True, nogil=True)
def tuplex_smaller(a, b):
    """True if set-bitboard a precedes b in tuple-lex order (equal sizes)."""
    if a == b:
        return False
    diff = a ^ b
    lsb = diff & (~diff + U1)
    return (a & lsb) != U0


@njit(cache=True, nogil=True)
def all_solutions_dfs(
    n_cells,
    want,
    d,
    adj,
    perm,
    sec_idx,
    sec_axis,
    sec_req,
    sec_avail_ge,
    screen_depth,
    prefix,
    stop_at_first,
    nbr,
    out_keys,
):
    """Enumerate independent want-subsets in increasing id order, greedy-test
    each, and append the canonical uint64 key of every solution to out_keys.

    Branches are pruned by (a) adjacency, (b) per-section availability and
    per-axis deficit against the section minima sec_req, and (c) canonical
    screening at depths <= screen_depth: a branch dies when some isometry
    image of the chosen prefix is tuple-lex smaller, which is sound because
    the tuple-lex least member of an orbit has tuple-lex least prefixes.

    Returns (solutions_found, leaves_tested, nodes); solutions_found = -1
    signals out_keys overflow.
    """
    n_sec = sec_req.shape[0]
    n_groups = perm.shape[0]

    choice = np.zeros(want, dtype=np.int32)
    cand = np.zeros(want + 1, dtype=np.int32)
    forb_stack = np.zeros(want + 1, dtype=np.uint64)
    chosen_stack = np.zeros(want + 1, dtype=np.uint64)
    img_stack = np.zeros((screen_depth + 1, n_groups), dtype=np.uint64)
    have = np.zeros(n_sec, dtype=np.int32)

    mask_ext = np.zeros(n_cells + 1, dtype=np.uint8)
    deg = np.zeros(n_cells, dtype=np.int32)
    queue = np.zeros(n_cells, dtype=np.int32)

    found = 0
    leaves = 0
    nodes = 0

    # install the prefix (assumed independent and screen-surviving)
    lvl = 0
    for t in range(prefix.shape[0]):
        c = prefix[t]
        choice[lvl] = c
        chosen_stack[lvl + 1] = chosen_stack[lvl] | BITS[c]
        forb_stack[lvl + 1] = forb_stack[lvl] | adj[c]
        for a in range(d):
            have[sec_idx[c, a]] += 1
        if lvl + 1 <= screen_depth:
            for g in range(n_groups):
                img_stack[lvl + 1, g] = img_stack[lvl, g] | BITS[perm[g, c]]
        lvl += 1
        cand[lvl] = c + 1
    base_lvl = lvl

    while lvl >= base_lvl:
        if lvl == want:
            # leaf: greedy-test the base position
            leaves += 1
            for c in range(n_cells + 1):
                mask_ext[c] = 0
            for t in range(want):
                mask_ext[choice[t]] = 1
            if greedy_fill(mask_ext, nbr, d, deg, queue) == n_cells:
                best = np.uint64(0xFFFFFFFFFFFFFFFF)
                for g in range(n_groups):
                    key = U0
                    for t in range(want):
                        key |= BITS[perm[g, choice[t]]]
                    if key < best:
                        best = key
                if found >= out_keys.shape[0]:
                    return -1, leaves, nodes
                out_keys[found] = best
                found += 1
                if stop_at_first:
                    return found, leaves, nodes
            lvl -= 1
            if lvl >= base_lvl:
                c = choice[lvl]
                for a in range(d):
                    have[sec_idx[c, a]] -= 1
            continue
        c = cand[lvl]
        advanced = False
        while c < n_cells:
            rem = want - lvl - 1
            if n_cells - c - 1 < rem:
                break
            bit = BITS[c]
            if (forb_stack[lvl] | chosen_stack[lvl]) & bit:
                c += 1
                continue
            nodes += 1
            # section feasibility with c placed
            ok = True
            for a in range(d):
                have[sec_idx[c, a]] += 1
            for a in range(d):
                deficit = 0
                for s in range(n_sec):
                    if sec_axis[s] != a:
                        continue
                    need = sec_req[s] - have[s]
                    if need > 0:
                        if sec_avail_ge[c + 1, s] < need:
                            ok = False
                            break
                        deficit += need
                if not ok or deficit > rem:
                    ok = False
                    break
            if ok and lvl + 1 <= screen_depth:
                cur = chosen_stack[lvl] | bit
                for g in range(n_groups):
                    im = img_stack[lvl, g] | BITS[perm[g, c]]
                    img_stack[lvl + 1, g] = im
                    if tuplex_smaller(im, cur):
                        ok = False
                        break
            if not ok:
                for a in range(d):
                    have[sec_idx[c, a]] -= 1
                c += 1
                continue
            # descend
            choice[lvl] = c
            chosen_stack[lvl + 1] = chosen_stack[lvl] | bit
            forb_stack[lvl + 1] = forb_stack[lvl] | adj[c]
            cand[lvl] = c + 1
            lvl += 1
            cand[lvl] = c + 1
            advanced = True
            break
        if not advanced:
            lvl -= 1
            if lvl >= base_lvl:
                c = choice[lvl]
                for a in range(d):
                    have[sec_idx[c, a]] -= 1
    return found, leaves, nodes


# -- random Latin squares (±1-move chain) --------------------------------------


@njit(cache=True, nogil=True)
def _next_u64(state):
    state[0] += np.uint64(0x9E3779B97F4A7C15)
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True, nogil=True)
def _rand_below(state, n):
    """Uniform integer in [0, n) by rejection; deterministic per state."""
    n64 = np.uint64(n)
    threshold = (np.uint64(0xFFFFFFFFFFFFFFFF) // n64) * n64
    while True:
        x = _next_u64(state)
        if x < threshold:
            return np.int64(x % n64)


@njit(cache=True, nogil=True)
def lsq_chain_advance(L, imp, state, moves):
    """Advance the ±1-move chain on order-n squares by `moves` moves, then
    keep moving until the square is proper.

    L: (n, n) int8, 0-based symbols.  imp: length-4 int64 scratch holding
    (row, col, extra_symbol, negative_symbol) of the improper cell, row -1
    when proper.  state: length-1 uint64 RNG state.  All mutated in place.
    """
    n = L.shape[0]
    done = 0
    while done < moves or imp[0] >= 0:
        if imp[0] < 0:
            # proper move
            r = _rand_below(state, n)
            c = _rand_below(state, n)
            t = L[r, c]
            s = _rand_below(state, n - 1)
            if s >= t:
                s += 1
            # conflict row in column c and conflict column in row r
            r2 = -1
            for i in range(n):
                if L[i, c] == s:
                    r2 = i
                    break
            c2 = -1
            for j in range(n):
                if L[r, j] == s:
                    c2 = j
                    break
            u = L[r2, c2]
            L[r, c] = np.int8(s)
            L[r2, c] = np.int8(t)
            L[r, c2] = np.int8(t)
            if u == t:
                L[r2, c2] = np.int8(s)
            else:
                # improper: cell carries {u, s}, is short one t
                L[r2, c2] = np.int8(u)
                imp[0] = r2
                imp[1] = c2
                imp[2] = s
                imp[3] = t
        else:
            ri = imp[0]
            ci = imp[1]
            # positives at the improper cell
            p1 = np.int64(L[ri, ci])
            p2 = imp[2]
            tneg = imp[3]
            # two rows carry tneg in column ci, two columns in row ri
            ra = -1
            rb = -1
            for i in range(n):
                if i != ri and L[i, ci] == tneg:
                    if ra < 0:
                        ra = i
                    else:
                        rb = i
            ca = -1
            cb = -1
            for j in range(n):
                if j != ci and L[ri, j] == tneg:
                    if ca < 0:
                        ca = j
                    else:
                        cb = j
            r2 = ra if _rand_below(state, 2) == 0 else rb
            c2 = ca if _rand_below(state, 2) == 0 else cb
            t = p1 if _rand_below(state, 2) == 0 else p2
            keep = p2 if t == p1 else p1
            u = L[r2, c2]
            L[ri, ci] = np.int8(keep)
            L[r2, ci] = np.int8(t)
            L[ri, c2] = np.int8(t)
            imp[0] = -1
            if u == t:
                L[r2, c2] = np.int8(tneg)
            else:
                L[r2, c2] = np.int8(u)
                imp[0] = r2
                imp[1] = c2
                imp[2] = tneg
                imp[3] = t
        done += 1
