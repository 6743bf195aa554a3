"""Character sums S_d(x), resonator values, the moments M1/M2, mean values of
chi_d over fundamental discriminants, and the equal-product count.

The dyadic scan is data-parallel over discriminants: the d-range is cut into
fixed-size chunks (independent of the worker count) and partial results are
reduced in chunk order, so every total is bit-stable for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import coeffs, kernels
from .arith import SieveTables, chi_values, factorize, iter_fundamental_blocks, squarefree_decompose
from .coeffs import CoefficientFunction
from .config import DEFAULT_CONFIG, LabConfig
from .errors import DomainError
from .resonator import SetResonator, WeightedResonator

ZETA2 = math.pi * math.pi / 6.0


@dataclass(frozen=True)
class CharSumRecord:
    d: int
    x: int
    value: complex


def char_sum(d: int, x: int, f: CoefficientFunction, tables: SieveTables) -> CharSumRecord:
    """S_d(x) = sum_{n<=x} f(n) chi_d(n)."""
    chi = chi_values(d, x, tables)
    fv = coeffs.eval_range(f, x, tables)
    value = complex((fv[1:] * chi[1:]).sum())
    return CharSumRecord(d=int(d), x=int(x), value=value)


def _f_at(f: CoefficientFunction, m: int, tables: SieveTables,
          cache: dict[int, complex]) -> complex:
    out = 1.0 + 0.0j
    for p, e in factorize(m, tables):
        fp = cache.get(p)
        if fp is None:
            fp = f.at_prime(p)
            cache[p] = fp
        out *= fp ** e
    return out


@dataclass(frozen=True)
class SupportData:
    """Resonator support in the flattened form the scan kernels consume."""

    ns: np.ndarray          # int64 support elements
    sup_primes: np.ndarray  # int64 distinct primes over the support
    offs: np.ndarray        # int64, len(ns)+1
    pidx: np.ndarray        # int64 indices into sup_primes (repeated per exponent)
    w: np.ndarray           # complex128 weights f(m)*r(m)


def support_data(resonator, f: CoefficientFunction, tables: SieveTables) -> SupportData:
    if resonator is None:
        ns, rs = np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64)
    elif isinstance(resonator, WeightedResonator):
        ns, rs = resonator.ns, resonator.rs
    elif isinstance(resonator, SetResonator):
        ns, rs = resonator.ms, np.ones(len(resonator.ms))
    else:
        raise DomainError(f"unsupported resonator type {type(resonator).__name__}")
    prime_index: dict[int, int] = {}
    sup_primes: list[int] = []
    offs = [0]
    pidx: list[int] = []
    w = np.empty(len(ns), dtype=np.complex128)
    fcache: dict[int, complex] = {}
    for j, (m, r) in enumerate(zip(ns, rs)):
        m = int(m)
        if m > tables.limit:
            raise DomainError(f"support element {m} exceeds sieve limit {tables.limit}")
        fm = 1.0 + 0.0j
        for p, e in factorize(m, tables):
            if p not in prime_index:
                prime_index[p] = len(sup_primes)
                sup_primes.append(p)
            pidx.extend([prime_index[p]] * e)
            fp = fcache.get(p)
            if fp is None:
                fp = f.at_prime(p)
                fcache[p] = fp
            fm *= fp ** e
        offs.append(len(pidx))
        w[j] = fm * float(r)
    return SupportData(
        ns=np.asarray(ns, dtype=np.int64),
        sup_primes=np.array(sup_primes, dtype=np.int64),
        offs=np.array(offs, dtype=np.int64),
        pidx=np.array(pidx, dtype=np.int64),
        w=w,
    )


def resonator_value(d: int, resonator, f: CoefficientFunction,
                    tables: SieveTables) -> complex:
    """R_d = sum over the support of f(m) r(m) chi_d(m) (set weights are 1)."""
    sup = resonator if isinstance(resonator, SupportData) else support_data(resonator, f, tables)
    kp = {int(p): kernels.kronecker(int(d), int(p)) for p in sup.sup_primes}
    total = 0.0 + 0.0j
    for j in range(len(sup.ns)):
        sign = 1
        for t in range(sup.offs[j], sup.offs[j + 1]):
            sign *= kp[int(sup.sup_primes[sup.pidx[t]])]
            if sign == 0:
                break
        if sign:
            total += sign * sup.w[j]
    return complex(total)


@dataclass
class ScanTotals:
    m1: float
    m2: float
    max_abs: float
    argmax_d: int | None
    hist: np.ndarray
    n_d: int


def moment_scan(X: int, x: int, f: CoefficientFunction, tables: SieveTables,
                resonator=None, workers: int = 1,
                config: LabConfig | None = None) -> ScanTotals:
    """One pass over fundamental X < |d| <= 2X accumulating M1, M2, the maximum
    of |S_d(x)| with its first argmax (|d| ascending, positive sign first), and
    a 64-bin histogram of |S_d(x)| over [0, x]."""
    cfg = config or DEFAULT_CONFIG
    if x < 1 or x > tables.limit:
        raise DomainError(f"x={x} outside table range [1, {tables.limit}]")
    fv = coeffs.eval_range(f, x, tables)
    sup = resonator if isinstance(resonator, SupportData) else support_data(resonator, f, tables)

    def run(chunk):
        hist = np.zeros(64, dtype=np.int64)
        m1, m2, best_s2, best_pos, cnt = kernels.scan_chunk(
            chunk, x, tables.spf, fv,
            sup.sup_primes, sup.offs, sup.pidx, sup.w, hist)
        return m1, m2, best_s2, best_pos, cnt, hist

    totals = ScanTotals(0.0, 0.0, 0.0, None, np.zeros(64, dtype=np.int64), 0)
    best_s2 = -1.0
    nworkers = cfg.workers if workers is None else workers
    pool = ThreadPoolExecutor(max_workers=nworkers) if nworkers > 1 else None
    try:
        for block in iter_fundamental_blocks(X, 2 * X, cfg):
            chunks = [block[i:i + cfg.chunk_size]
                      for i in range(0, len(block), cfg.chunk_size)]
            results = list(pool.map(run, chunks)) if pool else [run(c) for c in chunks]
            for (m1, m2, bs2, bpos, cnt, hist), chunk in zip(results, chunks):
                totals.m1 += m1
                totals.m2 += m2
                totals.n_d += cnt
                totals.hist += hist
                if bs2 > best_s2:
                    best_s2 = bs2
                    totals.argmax_d = int(chunk[bpos])
    finally:
        if pool:
            pool.shutdown()
    totals.max_abs = math.sqrt(best_s2) if best_s2 >= 0.0 else 0.0
    return totals


def moment_m1(resonator, X: int, f: CoefficientFunction, tables: SieveTables,
              workers: int = 1, config: LabConfig | None = None) -> float:
    """M1 = sum over fundamental X < |d| <= 2X of |R_d|**2."""
    return moment_scan(X, 1, f, tables, resonator, workers, config).m1


def moment_m2(resonator, X: int, x: int, f: CoefficientFunction, tables: SieveTables,
              workers: int = 1, config: LabConfig | None = None) -> float:
    """M2 = sum over fundamental X < |d| <= 2X of |S_d(x)|**2 |R_d|**2."""
    return moment_scan(X, x, f, tables, resonator, workers, config).m2


# --- reports ------------------------------------------------------------------

@dataclass
class MomentReport:
    X: int
    x: int
    f_name: str
    resonator_id: str
    M1: float
    M2: float
    ratio: float
    scan_max: float
    argmax_d: int | None
    curve_short_sums: float | None
    curve_long_sums: float | None
    range_ok: bool
    degenerate: bool
    # set-resonator extras (None on weighted runs)
    gcd_total: float | None = None
    gcd_head: float | None = None
    gcd_tail: float | None = None
    equal_product_total: int | None = None
    chain_rhs: float | None = None
    chain_ok: bool | None = None


def resonance_inequality(report: MomentReport) -> bool:
    """ratio <= scan_max**2 up to 1e-9 relative; holds for every resonator and
    every coefficient function (a weighted mean never exceeds the max)."""
    if not report.M1 > 0.0:
        raise DomainError("degenerate report: M1 = 0")
    bound = report.scan_max * report.scan_max
    return report.ratio <= bound * (1.0 + 1e-9)


def count_equal_products(m: int, n: int, x: int) -> int:
    """#{(a, b) : a, b <= x, a m = b n} = floor(x / max(m/g, n/g))."""
    if m < 1 or n < 1 or x < 1:
        raise DomainError("m, n, x must be >= 1")
    g = math.gcd(m, n)
    return x // max(m // g, n // g)


def equal_products_total(ms: np.ndarray, x: int) -> int:
    """Sum of count_equal_products over all ordered pairs from ms."""
    ms = np.asarray(ms, dtype=np.int64)
    total = 0
    for i in range(len(ms)):
        g = np.gcd(ms[i], ms)
        total += int((x // np.maximum(ms[i] // g, ms // g)).sum())
    return total


# --- mean values over fundamental discriminants -------------------------------

_TAB8 = np.array([0, 1, 0, -1, 0, -1, 0, 1], dtype=np.int8)  # (d|2) by d mod 8


def _chi_factor_plan(n: int, tables: SieveTables):
    plan = []
    for p, e in factorize(n, tables):
        odd = e % 2 == 1
        if p == 2:
            plan.append(("two_odd" if odd else "two_even", 0, None))
        elif odd:
            tab = np.full(p, -1, dtype=np.int8)
            tab[0] = 0
            roots = (np.arange(1, (p + 1) // 2, dtype=np.int64) ** 2) % p
            tab[roots] = 1
            plan.append(("odd", p, tab))
        else:
            plan.append(("even", p, None))
    return plan


def _chi_over_ds(ds: np.ndarray, plan) -> np.ndarray:
    out = np.ones(len(ds), dtype=np.int8)
    for kind, p, tab in plan:
        if kind == "odd":
            out *= tab[np.mod(ds, p)]
        elif kind == "even":
            out *= (np.mod(ds, p) != 0).astype(np.int8)
        elif kind == "two_odd":
            out *= _TAB8[np.mod(ds, 8)]
        else:  # two_even
            out *= (np.mod(ds, 2) != 0).astype(np.int8)
    return out


def mean_value_sum(n: int, X: int, tables: SieveTables,
                   config: LabConfig | None = None) -> int:
    """Exact sum of chi_d(n) over all fundamental 0 < |d| <= X (d = 1 included)."""
    cfg = config or DEFAULT_CONFIG
    plan = _chi_factor_plan(n, tables)
    total = 0
    for ds in iter_fundamental_blocks(0, X, cfg):
        total += int(_chi_over_ds(ds, plan).sum(dtype=np.int64))
    return total


def mean_value_main_term(n: int, X: int, tables: SieveTables) -> float:
    """(X / zeta(2)) * prod_{p | n} p/(p+1) for square n, else 0."""
    r = math.isqrt(n)
    if r * r != n:
        return 0.0
    value = X / ZETA2
    for p, _ in factorize(n, tables):
        value *= p / (p + 1.0)
    return value


def mean_value_error_envelope(n: int, X: int, epsilon: float,
                              tables: SieveTables) -> float:
    """X**(1/2+eps) * exp((log n0)**(1-eps)) * sum_{d | n1} mu(d)**2 / d**(1/2+eps)."""
    if not 0.0 < epsilon < 0.5:
        raise DomainError(f"epsilon must lie in (0, 1/2), got {epsilon}")
    n0, n1 = squarefree_decompose(n, tables)
    g1 = math.exp(math.log(n0) ** (1.0 - epsilon)) if n0 > 1 else 1.0
    g2 = 1.0
    for p, _ in factorize(n1, tables):
        g2 *= 1.0 + p ** (-(0.5 + epsilon))
    return X ** (0.5 + epsilon) * g1 * g2


def euler_factor_product(n: int, tables: SieveTables) -> float:
    """prod over distinct primes p | n of p/(p+1)."""
    value = 1.0
    for p, _ in factorize(n, tables):
        value *= p / (p + 1.0)
    return value


@dataclass
class MeanValueReport:
    n: int
    X: int
    exact_sum: int
    main_term: float
    error_envelope: float
    epsilon: float


def mean_value_report(n: int, X: int, epsilon: float, tables: SieveTables,
                      config: LabConfig | None = None) -> MeanValueReport:
    return MeanValueReport(
        n=n, X=X,
        exact_sum=mean_value_sum(n, X, tables, config),
        main_term=mean_value_main_term(n, X, tables),
        error_envelope=mean_value_error_envelope(n, X, epsilon, tables),
        epsilon=epsilon,
    )
