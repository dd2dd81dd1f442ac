# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled subset-table kernels.

Subsets of an indexed ground ``{0, ..., nbits-1}`` are bitmasks; tables are
``uint8`` arrays of length ``2**nbits`` indexed by mask.  Lexicographic order
on subsets means lexicographic order of their sorted index tuples.
"""

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef inline bint _lex_less(unsigned long long a, unsigned long long b) nogil:
    cdef unsigned long long d = a ^ b
    return (d & (~d + 1) & a) != 0


def subset_max_transform(unsigned char[::1] h, int nbits):
    """In place: ``h[S] = max(h[T] for T ⊆ S)``."""
    cdef long long size = 1LL << nbits
    cdef long long bit, s, t
    cdef int i
    cdef unsigned char a, b
    cdef unsigned char* p = &h[0]
    if h.shape[0] != size:
        raise ValueError("table length must be 2**nbits")
    with nogil:
        for i in range(nbits):
            bit = 1LL << i
            # blocks of 2*bit: the upper half takes the max with the lower half
            s = 0
            while s < size:
                for t in range(s, s + bit):
                    a = p[t]
                    b = p[t + bit]
                    p[t + bit] = a if a > b else b
                s += 2 * bit


def min_at_popcount(const unsigned char[::1] best, int nbits, int n):
    """Smallest ``best[S]`` over ``|S| = n``; returns ``(value, mask)``.

    Ties go to the lexicographically first subset.
    """
    cdef unsigned long long size = 1ULL << nbits
    cdef unsigned long long s, c, r
    cdef unsigned long long arg = 0
    cdef int v = 256
    if n < 0 or n > nbits:
        raise ValueError("n outside 0..nbits")
    if n == 0:
        return int(best[0]), 0
    s = (1ULL << n) - 1
    with nogil:
        while s < size:
            if best[s] < v or (best[s] == v and _lex_less(s, arg)):
                v = best[s]
                arg = s
            # Gosper's hack
            c = s & (~s + 1)
            r = s + c
            s = (((r ^ s) >> 2) // c) | r
    return v, int(arg)


def first_filling_combination(const unsigned char[::1] best, int nbits, int m,
                              const unsigned char[::1] need):
    """First ``m``-subset B (lexicographic) with ``best[S] >= need[|S|]`` for all S ⊆ B.

    Returns the mask of B, or -1.
    """
    cdef int idx[64]
    cdef int i, j
    cdef unsigned long long b, sub
    cdef bint ok
    cdef long long found = -1
    if m < 0 or m > nbits or nbits > 63:
        raise ValueError("bad subset size")
    if need.shape[0] < m + 1:
        raise ValueError("need must cover sizes 0..m")
    for i in range(m):
        idx[i] = i
    with nogil:
        while True:
            b = 0
            for i in range(m):
                b |= 1ULL << idx[i]
            ok = True
            sub = b
            while True:
                if best[sub] < need[__builtin_popcountll(sub)]:
                    ok = False
                    break
                if sub == 0:
                    break
                sub = (sub - 1) & b
            if ok:
                found = <long long>b
                break
            i = m - 1
            while i >= 0 and idx[i] == i + nbits - m:
                i -= 1
            if i < 0:
                break
            idx[i] += 1
            for j in range(i + 1, m):
                idx[j] = idx[j - 1] + 1
    return found
