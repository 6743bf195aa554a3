"""Pure-Python/numpy implementations of the hot kernels.

Mirrors the API of the compiled module ``_speedups``; selected as a fallback
at import time (see ``kernels``).  Correct at any scale, but large scans and
Gal sums are an order of magnitude slower than the compiled path.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "pure"


def kronecker(a, n):
    """Kronecker symbol (a|n), defined for all integer pairs."""
    a = int(a)
    n = int(n)
    if n == 0:
        return 1 if a in (1, -1) else 0
    if a % 2 == 0 and n % 2 == 0:
        return 0
    k = 1
    if n < 0:
        n = -n
        if a < 0:
            k = -k
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v % 2 == 1 and a % 8 in (3, 5):
        k = -k
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                k = -k
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            k = -k
        a %= n
    return k if n == 1 else 0


def kronecker_array(ds, n):
    """Kronecker symbols (d|n) for every d in an int64 array."""
    n = int(n)
    out = np.empty(len(ds), dtype=np.int8)
    for i, d in enumerate(ds):
        out[i] = kronecker(int(d), n)
    return out


def _primes_upto(x, spf):
    idx = np.arange(2, x + 1, dtype=spf.dtype)
    return (np.nonzero(spf[2:x + 1] == idx)[0] + 2).astype(np.int64)


def chi_range(d, x, spf):
    """chi_d(n) for n = 0..x as an int8 array (index 0 set to 0)."""
    d = int(d)
    chi = np.ones(x + 1, dtype=np.int8)
    chi[0] = 0
    for p in _primes_upto(x, spf):
        p = int(p)
        kp = kronecker(d, p)
        if kp == 1:
            continue
        pk = p
        while pk <= x:
            chi[pk::pk] *= kp
            pk *= p
    return chi


def scan_chunk(ds, x, spf, f, sup_primes, sup_offs, sup_pidx, sup_w, hist):
    """Moments over one chunk of discriminants.

    Accumulates M1 = sum |R_d|^2 and M2 = sum |S_d(x)|^2 |R_d|^2 over the
    chunk, tracks the first maximiser of |S_d| in chunk order, and bins |S_d|
    into ``hist`` (64 linear bins over [0, x]).

    Returns (m1, m2, best_s2, best_pos, count).
    """
    primes = [int(p) for p in _primes_upto(x, spf)]
    fv = f[1:x + 1]
    nsup = len(sup_w)
    m1 = 0.0
    m2 = 0.0
    best_s2 = -1.0
    best_pos = -1
    for idx in range(len(ds)):
        d = int(ds[idx])
        chi = np.ones(x + 1, dtype=np.int8)
        chi[0] = 0
        for p in primes:
            kp = kronecker(d, p)
            if kp == 1:
                continue
            pk = p
            while pk <= x:
                chi[pk::pk] *= kp
                pk *= p
        s = complex(np.dot(fv, chi[1:]))
        s2 = s.real * s.real + s.imag * s.imag
        kp_sup = [kronecker(d, int(p)) for p in sup_primes]
        r = 0.0 + 0.0j
        for j in range(nsup):
            sign = 1
            for t in range(sup_offs[j], sup_offs[j + 1]):
                sign *= kp_sup[sup_pidx[t]]
                if sign == 0:
                    break
            if sign:
                r += sign * sup_w[j]
        r2 = r.real * r.real + r.imag * r.imag
        m1 += r2
        m2 += s2 * r2
        if s2 > best_s2:
            best_s2 = s2
            best_pos = idx
        b = int(math.sqrt(s2) * 64.0 / x)
        hist[min(b, 63)] += 1
    return m1, m2, best_s2, best_pos, len(ds)


def gcd_chunk(ms, rs, i0, i1, thr2):
    """Partial Gal sum over the row block [i0, i1), pairs (i, j >= i).

    ``rs[i]`` must equal 1/sqrt(ms[i]); each unordered off-diagonal pair
    contributes twice.  A pair goes to the head when 2*lcm/gcd <= thr2,
    else to the tail.  Returns (head, tail).
    """
    head = 0.0
    tail = 0.0
    for i in range(i0, i1):
        if 2.0 <= thr2:
            head += 1.0
        else:
            tail += 1.0
        if i + 1 >= len(ms):
            continue
        rest = ms[i + 1:]
        g = np.gcd(ms[i], rest)
        q = (ms[i] // g) * (rest // g)
        terms = (2.0 * rs[i]) * g * rs[i + 1:]
        mask = 2.0 * q <= thr2
        head += float(terms[mask].sum())
        tail += float(terms[~mask].sum())
    return head, tail
