"""Pure-Python/numpy implementations of the graph kernels.

Bitsets are little-endian ``uint64`` word rows: vertex ``v`` lives in word
``v // 64``, bit ``v % 64``.  Results must match ``_ckernels`` exactly.
"""

import numpy as np


def words_for(n_bits):
    return max(1, (n_bits + 63) // 64)


def pack_bool_rows(mask):
    """Pack an (r, c) boolean array into (r, words_for(c)) uint64 rows."""
    mask = np.atleast_2d(np.asarray(mask, dtype=bool))
    rows, cols = mask.shape
    n_words = words_for(cols)
    packed = np.packbits(mask, axis=1, bitorder="little")
    out = np.zeros((rows, n_words * 8), dtype=np.uint8)
    out[:, : packed.shape[1]] = packed
    return out.view("<u8").astype(np.uint64)


def row_to_int(row):
    return int.from_bytes(np.ascontiguousarray(row, dtype="<u8").tobytes(), "little")


def int_to_row(value, n_words):
    return np.frombuffer(value.to_bytes(8 * n_words, "little"), dtype="<u8").astype(np.uint64)


def adjacency(z_words, x_words, qwc):
    m = z_words.shape[0]
    out = np.zeros((m, words_for(m)), dtype=np.uint64)
    for i in range(m):
        clash = (x_words[i] & z_words) ^ (z_words[i] & x_words)
        count = np.bitwise_count(clash).sum(axis=1)
        ok = count == 0 if qwc else (count & 1) == 0
        ok[i] = False
        out[i] = pack_bool_rows(ok)[0]
    return out


def _iter_bits(value):
    while value:
        low = value & -value
        yield low.bit_length() - 1
        value ^= low


def _argmax_lowest(candidates, adj, within):
    best, best_score = -1, -1
    for v in _iter_bits(candidates):
        score = (adj[v] & within).bit_count()
        if score > best_score:
            best, best_score = v, score
    return best


def greedy_cover(adj_words):
    adj = [row_to_int(r) for r in adj_words]
    m = len(adj)
    family_of = np.full(m, -1, dtype=np.int64)
    unmarked = (1 << m) - 1
    family = 0
    while unmarked:
        seed = _argmax_lowest(unmarked, adj, unmarked)
        clique = 1 << seed
        cand = adj[seed] & unmarked
        while cand:
            v = _argmax_lowest(cand, adj, cand)
            clique |= 1 << v
            cand &= adj[v]
        for v in _iter_bits(clique):
            family_of[v] = family
        unmarked &= ~clique
        family += 1
    return family_of


def max_clique(adj_words, active_words):
    adj = [row_to_int(r) for r in adj_words]
    active = row_to_int(active_words)
    best = [0, 0]  # clique bitset, size

    def expand(r, p, x, size):
        if not p:
            if not x and size > best[1]:
                best[0], best[1] = r, size
            return
        if size + p.bit_count() <= best[1]:
            return
        pivot, pivot_score = -1, -1
        for u in _iter_bits(p | x):
            score = (adj[u] & p).bit_count()
            if score > pivot_score:
                pivot, pivot_score = u, score
        for v in _iter_bits(p & ~adj[pivot]):
            expand(r | (1 << v), p & adj[v], x & adj[v], size + 1)
            p &= ~(1 << v)
            x |= 1 << v
            if size + p.bit_count() <= best[1]:
                return

    expand(0, active, 0, 0)
    return int_to_row(best[0], active_words.shape[0])
