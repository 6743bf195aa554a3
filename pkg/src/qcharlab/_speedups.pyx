# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: Kronecker symbols, character fills, moment scans, Gal sums.

Same API as ``_kernels_py``; all heavy loops release the GIL so scans can be
driven by a thread pool.
"""

from libc.stdlib cimport malloc, free
from libc.math cimport sqrt

import numpy as np

BACKEND = "compiled"


cdef inline long long _mod(long long a, long long m) nogil:
    cdef long long r = a % m
    if r < 0:
        r += m
    return r


cdef inline long long _gcd(long long a, long long b) nogil:
    cdef long long t
    while b:
        t = a % b
        a = b
        b = t
    return a


cdef long long _kron(long long a, long long n) nogil:
    cdef long long k = 1, r, t
    cdef int v = 0
    if n == 0:
        if a == 1 or a == -1:
            return 1
        return 0
    if (a & 1) == 0 and (n & 1) == 0:
        return 0
    if n < 0:
        n = -n
        if a < 0:
            k = -k
    while (n & 1) == 0:
        n >>= 1
        v += 1
    if v & 1:
        r = _mod(a, 8)
        if r == 3 or r == 5:
            k = -k
    a = _mod(a, n)
    while a != 0:
        while (a & 1) == 0:
            a >>= 1
            r = n & 7
            if r == 3 or r == 5:
                k = -k
        t = a
        a = n
        n = t
        if (a & 3) == 3 and (n & 3) == 3:
            k = -k
        a = _mod(a, n)
    if n == 1:
        return k
    return 0


def kronecker(a, n):
    """Kronecker symbol (a|n), defined for all integer pairs (64-bit range)."""
    return int(_kron(a, n))


def kronecker_array(long long[::1] ds, n):
    """Kronecker symbols (d|n) for every d in an int64 array."""
    cdef long long nn = n
    cdef Py_ssize_t i, m = ds.shape[0]
    out = np.empty(m, dtype=np.int8)
    cdef signed char[::1] ov = out
    with nogil:
        for i in range(m):
            ov[i] = <signed char>_kron(ds[i], nn)
    return out


def chi_range(d, x, int[::1] spf):
    """chi_d(n) for n = 0..x as an int8 array (index 0 set to 0)."""
    cdef long long dd = d
    cdef Py_ssize_t xx = x, n
    cdef int p
    out = np.empty(xx + 1, dtype=np.int8)
    cdef signed char[::1] chi = out
    chi[0] = 0
    if xx >= 1:
        chi[1] = 1
    with nogil:
        for n in range(2, xx + 1):
            p = spf[n]
            if p == n:
                chi[n] = <signed char>_kron(dd, n)
            else:
                chi[n] = chi[p] * chi[n // p]
    return out


def scan_chunk(long long[::1] ds, x, int[::1] spf,
               double complex[::1] f,
               long long[::1] sup_primes,
               long long[::1] sup_offs,
               long long[::1] sup_pidx,
               double complex[::1] sup_w,
               long long[::1] hist):
    """Moments over one chunk of discriminants.

    Accumulates M1 = sum |R_d|^2 and M2 = sum |S_d(x)|^2 |R_d|^2 over the
    chunk, tracks the first maximiser of |S_d| in chunk order, and bins |S_d|
    into ``hist`` (64 linear bins over [0, x]).

    Returns (m1, m2, best_s2, best_pos, count).
    """
    cdef Py_ssize_t xx = x
    cdef Py_ssize_t nd = ds.shape[0]
    cdef Py_ssize_t nsp = sup_primes.shape[0]
    cdef Py_ssize_t nsup = sup_w.shape[0]
    cdef Py_ssize_t idx, n, j, t, best_pos = -1
    cdef long long d
    cdef int p, sign, b
    cdef double m1 = 0.0, m2 = 0.0, best_s2 = -1.0
    cdef double sre, sim, rre, rim, s2, r2
    cdef signed char c
    cdef signed char *chi = <signed char *>malloc(xx + 1)
    cdef signed char *kp = <signed char *>malloc(nsp if nsp > 0 else 1)
    if chi == NULL or kp == NULL:
        if chi != NULL:
            free(chi)
        if kp != NULL:
            free(kp)
        raise MemoryError()
    with nogil:
        for idx in range(nd):
            d = ds[idx]
            chi[0] = 0
            chi[1] = 1
            for n in range(2, xx + 1):
                p = spf[n]
                if p == n:
                    chi[n] = <signed char>_kron(d, n)
                else:
                    chi[n] = chi[p] * chi[n // p]
            sre = 0.0
            sim = 0.0
            for n in range(1, xx + 1):
                c = chi[n]
                if c == 1:
                    sre += f[n].real
                    sim += f[n].imag
                elif c == -1:
                    sre -= f[n].real
                    sim -= f[n].imag
            s2 = sre * sre + sim * sim
            for j in range(nsp):
                kp[j] = <signed char>_kron(d, sup_primes[j])
            rre = 0.0
            rim = 0.0
            for j in range(nsup):
                sign = 1
                for t in range(sup_offs[j], sup_offs[j + 1]):
                    sign = sign * kp[sup_pidx[t]]
                    if sign == 0:
                        break
                if sign == 1:
                    rre += sup_w[j].real
                    rim += sup_w[j].imag
                elif sign == -1:
                    rre -= sup_w[j].real
                    rim -= sup_w[j].imag
            r2 = rre * rre + rim * rim
            m1 += r2
            m2 += s2 * r2
            if s2 > best_s2:
                best_s2 = s2
                best_pos = idx
            b = <int>(sqrt(s2) * 64.0 / xx)
            if b > 63:
                b = 63
            hist[b] += 1
    free(chi)
    free(kp)
    return m1, m2, best_s2, best_pos, nd


def gcd_chunk(long long[::1] ms, double[::1] rs, i0, i1, double thr2):
    """Partial Gal sum over the row block [i0, i1), pairs (i, j >= i).

    ``rs[i]`` must equal 1/sqrt(ms[i]); each unordered off-diagonal pair
    contributes twice.  A pair goes to the head when 2*lcm/gcd <= thr2,
    else to the tail.  Returns (head, tail).
    """
    cdef Py_ssize_t i, j, a = i0, b = i1, n = ms.shape[0]
    cdef long long g, q, mi
    cdef double head = 0.0, tail = 0.0, term, ri
    with nogil:
        for i in range(a, b):
            if 2.0 <= thr2:
                head += 1.0
            else:
                tail += 1.0
            mi = ms[i]
            ri = rs[i]
            for j in range(i + 1, n):
                g = _gcd(mi, ms[j])
                q = (mi // g) * (ms[j] // g)
                term = 2.0 * g * ri * rs[j]
                if 2.0 * q <= thr2:
                    head += term
                else:
                    tail += term
    return head, tail
