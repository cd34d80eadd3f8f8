# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled graph kernels over packed uint64 bitsets.

Same contracts and tie-breaking as ``_pykernels``; see that module.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy, memset

cnp.import_array()

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


cdef inline int popcount(const uint64_t* a, Py_ssize_t n) noexcept nogil:
    cdef int total = 0
    cdef Py_ssize_t k
    for k in range(n):
        total += __builtin_popcountll(a[k])
    return total


cdef inline int popcount_and(const uint64_t* a, const uint64_t* b, Py_ssize_t n) noexcept nogil:
    cdef int total = 0
    cdef Py_ssize_t k
    for k in range(n):
        total += __builtin_popcountll(a[k] & b[k])
    return total


cdef inline bint is_empty(const uint64_t* a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t k
    for k in range(n):
        if a[k]:
            return False
    return True


def words_for(Py_ssize_t n_bits):
    return max(1, (n_bits + 63) // 64)


def adjacency(const uint64_t[:, ::1] z_words, const uint64_t[:, ::1] x_words, bint qwc):
    cdef Py_ssize_t m = z_words.shape[0]
    cdef Py_ssize_t w = z_words.shape[1]
    cdef Py_ssize_t wm = words_for(m)
    out = np.zeros((m, wm), dtype=np.uint64)
    cdef uint64_t[:, ::1] adj = out
    cdef Py_ssize_t i, j, k
    cdef int count
    cdef uint64_t clash
    with nogil:
        for i in range(m):
            for j in range(i + 1, m):
                count = 0
                for k in range(w):
                    clash = (x_words[i, k] & z_words[j, k]) ^ (z_words[i, k] & x_words[j, k])
                    count += __builtin_popcountll(clash)
                if (count == 0) if qwc else ((count & 1) == 0):
                    adj[i, j >> 6] |= (<uint64_t>1) << (j & 63)
                    adj[j, i >> 6] |= (<uint64_t>1) << (i & 63)
    return out


cdef Py_ssize_t argmax_lowest(const uint64_t[:, ::1] adj, const uint64_t* cand,
                              const uint64_t* within, Py_ssize_t wm) noexcept nogil:
    cdef Py_ssize_t best = -1, k, v
    cdef int best_score = -1, score
    cdef uint64_t word
    for k in range(wm):
        word = cand[k]
        while word:
            v = (k << 6) + __builtin_ctzll(word)
            word &= word - 1
            score = popcount_and(&adj[v, 0], within, wm)
            if score > best_score:
                best = v
                best_score = score
    return best


def greedy_cover(const uint64_t[:, ::1] adj):
    cdef Py_ssize_t m = adj.shape[0]
    cdef Py_ssize_t wm = adj.shape[1]
    family_arr = np.full(m, -1, dtype=np.int64)
    cdef int64_t[::1] family_of = family_arr
    cdef uint64_t* unmarked = <uint64_t*>malloc(wm * sizeof(uint64_t))
    cdef uint64_t* cand = <uint64_t*>malloc(wm * sizeof(uint64_t))
    cdef uint64_t* clique = <uint64_t*>malloc(wm * sizeof(uint64_t))
    cdef Py_ssize_t k, v, seed
    cdef int64_t family = 0
    cdef uint64_t word
    if unmarked == NULL or cand == NULL or clique == NULL:
        free(unmarked); free(cand); free(clique)
        raise MemoryError()
    try:
        with nogil:
            memset(unmarked, 0, wm * sizeof(uint64_t))
            for v in range(m):
                unmarked[v >> 6] |= (<uint64_t>1) << (v & 63)
            while not is_empty(unmarked, wm):
                seed = argmax_lowest(adj, unmarked, unmarked, wm)
                memset(clique, 0, wm * sizeof(uint64_t))
                clique[seed >> 6] |= (<uint64_t>1) << (seed & 63)
                for k in range(wm):
                    cand[k] = adj[seed, k] & unmarked[k]
                while not is_empty(cand, wm):
                    v = argmax_lowest(adj, cand, cand, wm)
                    clique[v >> 6] |= (<uint64_t>1) << (v & 63)
                    for k in range(wm):
                        cand[k] &= adj[v, k]
                for k in range(wm):
                    word = clique[k]
                    while word:
                        v = (k << 6) + __builtin_ctzll(word)
                        word &= word - 1
                        family_of[v] = family
                    unmarked[k] &= ~clique[k]
                family += 1
    finally:
        free(unmarked); free(cand); free(clique)
    return family_arr


cdef struct CliqueSearch:
    Py_ssize_t wm
    uint64_t* buf      # per depth: R, P, X, branch (4 * wm words)
    uint64_t* best
    int best_size


cdef void expand(CliqueSearch* s, const uint64_t[:, ::1] adj, Py_ssize_t depth, int size) noexcept nogil:
    cdef Py_ssize_t wm = s.wm
    cdef uint64_t* r = s.buf + depth * 4 * wm
    cdef uint64_t* p = r + wm
    cdef uint64_t* x = p + wm
    cdef uint64_t* branch = x + wm
    cdef uint64_t* r2 = r + 4 * wm
    cdef uint64_t* p2 = r2 + wm
    cdef uint64_t* x2 = p2 + wm
    cdef Py_ssize_t k, u, v, pivot = -1
    cdef int score, pivot_score = -1
    cdef uint64_t word
    if is_empty(p, wm):
        if is_empty(x, wm) and size > s.best_size:
            memcpy(s.best, r, wm * sizeof(uint64_t))
            s.best_size = size
        return
    if size + popcount(p, wm) <= s.best_size:
        return
    for k in range(wm):
        word = p[k] | x[k]
        while word:
            u = (k << 6) + __builtin_ctzll(word)
            word &= word - 1
            score = popcount_and(&adj[u, 0], p, wm)
            if score > pivot_score:
                pivot = u
                pivot_score = score
    for k in range(wm):
        branch[k] = p[k] & ~adj[pivot, k]
    for k in range(wm):
        while branch[k]:
            v = (k << 6) + __builtin_ctzll(branch[k])
            branch[k] &= branch[k] - 1
            for u in range(wm):
                r2[u] = r[u]
                p2[u] = p[u] & adj[v, u]
                x2[u] = x[u] & adj[v, u]
            r2[v >> 6] |= (<uint64_t>1) << (v & 63)
            expand(s, adj, depth + 1, size + 1)
            p[v >> 6] &= ~((<uint64_t>1) << (v & 63))
            x[v >> 6] |= (<uint64_t>1) << (v & 63)
            if size + popcount(p, wm) <= s.best_size:
                return


def max_clique(const uint64_t[:, ::1] adj, const uint64_t[::1] active):
    cdef Py_ssize_t m = adj.shape[0]
    cdef Py_ssize_t wm = adj.shape[1]
    cdef CliqueSearch s
    s.wm = wm
    s.best_size = 0
    s.buf = <uint64_t*>malloc((m + 2) * 4 * wm * sizeof(uint64_t))
    s.best = <uint64_t*>malloc(wm * sizeof(uint64_t))
    if s.buf == NULL or s.best == NULL:
        free(s.buf); free(s.best)
        raise MemoryError()
    out = np.zeros(wm, dtype=np.uint64)
    cdef uint64_t[::1] out_view = out
    cdef Py_ssize_t k
    try:
        with nogil:
            memset(s.buf, 0, 4 * wm * sizeof(uint64_t))
            memset(s.best, 0, wm * sizeof(uint64_t))
            for k in range(wm):
                s.buf[wm + k] = active[k]
            expand(&s, adj, 0, 0)
            for k in range(wm):
                out_view[k] = s.best[k]
    finally:
        free(s.buf); free(s.best)
    return out
