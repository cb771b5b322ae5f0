"""Compiled inner loops for elimination over Z/p^eZ and GF(2)."""
import numpy as np
from numba import njit, uint64


@njit(cache=True, nogil=True)
def _inverse_mod(x, q):
    r0, r1 = q, x % q
    s0, s1 = 0, 1
    while r1 != 0:
        k = r0 // r1
        r0, r1 = r1, r0 - k * r1
        s0, s1 = s1, s0 - k * s1
    return s0 % q


@njit(cache=True, nogil=True)
def snf_valuations(A, p, e):
    """Diagonal valuations of the Smith form of A over Z/p^eZ. Destroys A."""
    n, m = A.shape
    q = p**e
    k = min(n, m)
    out = np.full(k, e, dtype=np.int64)
    for t in range(k):
        best_v = e
        bi = -1
        bj = -1
        for i in range(t, n):
            for j in range(t, m):
                x = A[i, j]
                if x != 0:
                    v = 0
                    while x % p == 0:
                        x //= p
                        v += 1
                    if v < best_v:
                        best_v = v
                        bi = i
                        bj = j
                        if v == 0:
                            break
            if best_v == 0:
                break
        if bi < 0:
            break
        out[t] = best_v
        if bi != t:
            for j in range(m):
                tmp = A[t, j]
                A[t, j] = A[bi, j]
                A[bi, j] = tmp
        if bj != t:
            for i in range(n):
                tmp = A[i, t]
                A[i, t] = A[i, bj]
                A[i, bj] = tmp
        pv = p**best_v
        uinv = _inverse_mod(A[t, t] // pv, q)
        uq = uint64(q)
        for i in range(t + 1, n):
            x = A[i, t]
            if x != 0:
                # add (q - f) * row_t so everything stays nonnegative
                g = uint64(q - ((x // pv) * uinv) % q)
                for j in range(t, m):
                    A[i, j] = (uint64(A[i, j]) + g * uint64(A[t, j])) % uq
    return out


@njit(cache=True, nogil=True)
def rank_gf2(rows, ncols):
    """Rank of a bit-packed 0/1 matrix (little-endian bits in uint64 words). Destroys rows."""
    n, W = rows.shape
    rank = 0
    one = uint64(1)
    for col in range(ncols):
        w = col >> 6
        bit = one << uint64(col & 63)
        piv = -1
        for i in range(rank, n):
            if rows[i, w] & bit:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            for k in range(W):
                tmp = rows[rank, k]
                rows[rank, k] = rows[piv, k]
                rows[piv, k] = tmp
        for i in range(rank + 1, n):
            if rows[i, w] & bit:
                for k in range(w, W):
                    rows[i, k] ^= rows[rank, k]
        rank += 1
        if rank == n:
            break
    return rank
