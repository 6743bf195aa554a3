"""Exact integer arithmetic: sieves, factorization, Mobius, Kronecker symbols,
and fundamental-discriminant predicates/enumeration.

All tables are numpy arrays, frozen read-only after construction so they can
be shared freely across worker threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .config import DEFAULT_CONFIG, LabConfig
from .errors import DomainError, ResourceLimitError

kronecker = kernels.kronecker


@dataclass(frozen=True)
class SieveTables:
    """Smallest-prime-factor, Mobius and prime tables up to ``limit``.

    ``spf[n]`` is the smallest prime factor of n (0 for n < 2), ``mobius[n]``
    is mu(n), and ``primes`` lists the primes <= limit in increasing order.
    """

    limit: int
    spf: np.ndarray      # int32, length limit+1
    mobius: np.ndarray   # int8, length limit+1
    primes: np.ndarray   # int64


def build_sieve(limit: int, config: LabConfig | None = None) -> SieveTables:
    """Build SieveTables for 2 <= n <= limit."""
    cfg = config or DEFAULT_CONFIG
    if limit < 2:
        raise DomainError(f"sieve limit must be >= 2, got {limit}")
    approx_bytes = 5 * (limit + 1) + 8 * (limit // 10)
    if approx_bytes > cfg.max_sieve_bytes:
        raise ResourceLimitError(
            f"sieve to {limit} needs ~{approx_bytes} bytes "
            f"(budget {cfg.max_sieve_bytes}); raise max_sieve_bytes or lower sieve_limit"
        )
    spf = np.zeros(limit + 1, dtype=np.int32)
    for i in range(2, math.isqrt(limit) + 1):
        if spf[i] == 0:
            block = spf[i * i::i]
            block[block == 0] = i
    rest = np.nonzero(spf[2:] == 0)[0].astype(np.int64) + 2
    spf[rest] = rest
    primes = (np.nonzero(spf[2:] == np.arange(2, limit + 1, dtype=np.int32))[0] + 2).astype(np.int64)

    mobius = np.ones(limit + 1, dtype=np.int8)
    mobius[0] = 0
    for p in primes:
        p = int(p)
        mobius[p::p] *= -1
        if p * p <= limit:
            mobius[p * p::p * p] = 0

    for arr in (spf, mobius, primes):
        arr.flags.writeable = False
    return SieveTables(limit=limit, spf=spf, mobius=mobius, primes=primes)


def factorize(n: int, tables: SieveTables) -> list[tuple[int, int]]:
    """(prime, exponent) pairs of n in increasing prime order; n = 1 gives []."""
    n = int(n)
    if n < 1 or n > tables.limit:
        raise DomainError(f"factorize: n={n} outside table range [1, {tables.limit}]")
    spf = tables.spf
    out = []
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


def squarefree_decompose(n: int, tables: SieveTables) -> tuple[int, int]:
    """Split n = n0 * n1**2 with n0 squarefree."""
    n0 = 1
    n1 = 1
    for p, e in factorize(n, tables):
        if e % 2 == 1:
            n0 *= p
        n1 *= p ** (e // 2)
    return n0, n1


def is_squarefree(n: int) -> bool:
    """Trial-division squarefree test for a single integer n >= 1."""
    n = int(n)
    if n < 1:
        raise DomainError(f"is_squarefree: n={n} must be >= 1")
    if n % 2 == 0:
        n //= 2
        if n % 2 == 0:
            return False
    p = 3
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return False
        p += 2
    return True


def is_fundamental_discriminant(d: int, tables: SieveTables | None = None) -> bool:
    """True iff d indexes a real primitive quadratic character.

    Accepts d = 1 (trivial character) by the classical convention.  Either
    d = 1 (mod 4) and squarefree, or d = 4m with m = 2 or 3 (mod 4) squarefree.
    """
    d = int(d)
    if d == 0:
        raise DomainError("d = 0 is not a discriminant")

    def _sf(n):
        if tables is not None and n <= tables.limit:
            return tables.mobius[n] != 0
        return is_squarefree(n)

    if d % 4 == 1:
        return _sf(abs(d))
    if d % 4 == 0:
        m = d // 4
        if m % 4 in (2, 3):
            return _sf(abs(m))
    return False


# --- range enumeration ------------------------------------------------------

def _small_primes(limit: int) -> np.ndarray:
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i::i] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def squarefree_mask(lo: int, hi: int) -> np.ndarray:
    """Boolean mask of squarefree integers over magnitudes [lo, hi)."""
    n = hi - lo
    mask = np.ones(n, dtype=bool)
    if lo <= 0:
        mask[:min(1 - lo, n)] = False  # non-positive entries are not squarefree
    for p in _small_primes(math.isqrt(max(hi - 1, 0))):
        p2 = int(p) * int(p)
        start = ((lo + p2 - 1) // p2) * p2
        if start < hi:
            mask[start - lo::p2] = False
    return mask


def _fundamental_masks(lo: int, hi: int):
    """(pos, neg) masks over magnitudes [lo, hi): is +m / -m fundamental."""
    mags = np.arange(lo, hi, dtype=np.int64)
    sf = squarefree_mask(lo, hi)
    r4 = mags & 3
    pos = (r4 == 1) & sf
    neg = (r4 == 3) & sf
    idx4 = np.nonzero(r4 == 0)[0]
    if len(idx4):
        qs = mags[idx4] >> 2
        qlo, qhi = int(qs[0]), int(qs[-1]) + 1
        sfq = squarefree_mask(qlo, qhi)[qs - qlo]
        qr = qs & 3
        pos[idx4] = ((qr == 2) | (qr == 3)) & sfq
        neg[idx4] = ((qr == 1) | (qr == 2)) & sfq
    return mags, pos, neg


def iter_fundamental_blocks(lo: int, hi: int, config: LabConfig | None = None):
    """Yield int64 blocks of fundamental d with lo < |d| <= hi.

    Order within and across blocks: |d| increasing, +|d| before -|d|.
    Accepts lo = 0 so full ranges 0 < |d| <= hi can be streamed.
    """
    cfg = config or DEFAULT_CONFIG
    if not (0 <= lo < hi):
        raise DomainError(f"need 0 <= lo < hi, got ({lo}, {hi})")
    if hi > cfg.scan_bound:
        raise ResourceLimitError(f"hi={hi} exceeds scan_bound={cfg.scan_bound}")
    step = cfg.block_size
    for a in range(lo + 1, hi + 1, step):
        b = min(a + step, hi + 1)
        mags, pos, neg = _fundamental_masks(a, b)
        pair = np.zeros((b - a, 2), dtype=np.int64)
        pair[pos, 0] = mags[pos]
        pair[neg, 1] = -mags[neg]
        flat = pair.ravel()
        block = flat[flat != 0]
        if len(block):
            yield block


def fundamental_discriminants_in(lo: int, hi: int, config: LabConfig | None = None) -> np.ndarray:
    """All fundamental d with lo < |d| <= hi, ordered by (|d|, sign>0 first)."""
    if lo < 1:
        raise DomainError(f"need lo >= 1, got {lo}")
    blocks = list(iter_fundamental_blocks(lo, hi, config))
    if not blocks:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(blocks)


def count_fundamental_upto(hi: int, config: LabConfig | None = None) -> int:
    """#{d fundamental : 0 < |d| <= hi}, d = 1 included."""
    cfg = config or DEFAULT_CONFIG
    if hi < 1:
        raise DomainError(f"need hi >= 1, got {hi}")
    if hi > cfg.scan_bound:
        raise ResourceLimitError(f"hi={hi} exceeds scan_bound={cfg.scan_bound}")
    total = 0
    step = cfg.block_size
    for a in range(1, hi + 1, step):
        b = min(a + step, hi + 1)
        _, pos, neg = _fundamental_masks(a, b)
        total += int(pos.sum()) + int(neg.sum())
    return total


def chi_values(d: int, x: int, tables: SieveTables) -> np.ndarray:
    """chi_d(n) for n = 0..x (int8; index 0 is 0)."""
    if x < 1 or x > tables.limit:
        raise DomainError(f"x={x} outside table range [1, {tables.limit}]")
    return kernels.chi_range(int(d), int(x), tables.spf)
