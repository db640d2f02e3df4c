# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Must stay behaviourally identical to _pykernels."""
import numpy as np

from libc.stdint cimport int64_t


cdef inline int64_t _gcd(int64_t a, int64_t b) noexcept nogil:
    cdef int64_t t
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        t = a % b
        a = b
        b = t
    return a


def sieve(Py_ssize_t N):
    phi = np.arange(N + 1, dtype=np.int64)
    mu = np.ones(N + 1, dtype=np.int64)
    omega = np.zeros(N + 1, dtype=np.int64)
    composite = np.zeros(N + 1, dtype=np.uint8)
    cdef int64_t[::1] ph = phi
    cdef int64_t[::1] m = mu
    cdef int64_t[::1] om = omega
    cdef unsigned char[::1] comp = composite
    cdef Py_ssize_t i, j, sq
    with nogil:
        m[0] = 0
        for i in range(2, N + 1):
            if comp[i]:
                continue
            j = i
            while j <= N:
                if j > i:
                    comp[j] = 1
                ph[j] -= ph[j] // i
                m[j] = -m[j]
                om[j] += 1
                j += i
            if i <= N // i:
                sq = i * i
                j = sq
                while j <= N:
                    m[j] = 0
                    j += sq
    return phi, mu, omega


def overlap_length(const int64_t[::1] l1, const int64_t[::1] r1, int64_t s1,
                   const int64_t[::1] l2, const int64_t[::1] r2, int64_t s2):
    """Total length of the intersection of two sorted disjoint interval lists.

    Endpoints of list k are multiplied by s_k before comparison.
    """
    cdef Py_ssize_t i = 0, j = 0
    cdef Py_ssize_t n1 = l1.shape[0], n2 = l2.shape[0]
    cdef int64_t total = 0, a1, b1, a2, b2, lo, hi
    with nogil:
        while i < n1 and j < n2:
            a1 = l1[i] * s1
            b1 = r1[i] * s1
            a2 = l2[j] * s2
            b2 = r2[j] * s2
            lo = a1 if a1 > a2 else a2
            hi = b1 if b1 < b2 else b2
            if hi > lo:
                total += hi - lo
            if b1 < b2:
                i += 1
            else:
                j += 1
    return total


def residue_histograms(const int64_t[::1] values, int64_t q_lo, int64_t q_hi):
    cdef int64_t total = (q_hi - q_lo + 1) * (q_lo + q_hi) // 2
    out = np.zeros(total, dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef int64_t q, off = 0, r
    cdef Py_ssize_t k, nv = values.shape[0]
    with nogil:
        for q in range(q_lo, q_hi + 1):
            for k in range(nv):
                r = values[k] % q
                if r < 0:
                    r += q
                o[off + r] += 1
            off += q
    return out


def mobius_class_counts(int64_t n, const int64_t[::1] ds, const int64_t[::1] mus,
                        int64_t q_lo, int64_t q_hi):
    cdef int64_t total = (q_hi - q_lo + 1) * (q_lo + q_hi) // 2
    out = np.zeros(total, dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef int64_t q, off = 0, d, dm, mu, L, qq, c, b, base, rem, pos
    cdef Py_ssize_t k, nd = ds.shape[0]
    with nogil:
        for q in range(q_lo, q_hi + 1):
            for k in range(nd):
                d = ds[k]
                mu = mus[k]
                L = n // d
                qq = q // _gcd(d, q)
                # [-L, L] holds 2L+1 integers: every class mod qq gets `base`,
                # and the `rem` classes starting at -L mod qq get one more
                base = (2 * L + 1) // qq
                rem = (2 * L + 1) % qq
                pos = (L % qq) % qq  # (c - (-L)) mod qq at c = 0
                dm = d % q
                b = 0
                for c in range(qq):
                    o[off + b] += mu * (base + (pos < rem))
                    pos += 1
                    if pos == qq:
                        pos = 0
                    b += dm
                    if b >= q:
                        b -= q
            off += q
    return out
